"""p-energy estimates, the constants ledger and the voluminous-simplex search."""
from .estimators import EnergyEstimate, energy_brute, energy_mc, max_curvature_sample
from .constants import ConstantsLedger, balance_check, constants_ledger, eta, exponents, h0, ledger_rows
from .search import big_projection_check, voluminous_search
