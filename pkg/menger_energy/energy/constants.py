"""Exponents, the η-d balance condition and the chain of explicit constants and radii.

Long products of small constants are evaluated as sums of logarithms; only the final values are
exponentiated, so radii stay positive even when an intermediate constant underflows.
"""
from dataclasses import dataclass, fields
import logging
import math
from typing import Dict, List, Optional, Tuple

from scipy.optimize import brentq

from menger_energy.errors import InvalidParameter, NoValidH0, SubcriticalExponent
from menger_energy.grassmann import grass_constants
import menger_energy.metadata.energy as metadata
import menger_energy.metadata.shared as shared
from menger_energy.simplex import eta_const, omega, omega_max, upsilon, varsigma

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Exponents:
    lam: float
    kappa: float
    tau: float
    alpha: float

    def to_dict(self) -> Dict:
        return {"lambda": self.lam, "kappa": self.kappa, "tau": self.tau, "alpha": self.alpha}


def exponents(m: int, p: float) -> Exponents:
    """λ = p − m(m+2), κ = (m+1)(m(m+1)(m+2) + p), τ = λ/κ and α = 1 − m(m+2)/p.

    >>> e = exponents(2, 16)
    >>> e.lam, e.kappa, e.alpha
    (8, 120, 0.5)
    """
    if m < 1:
        raise InvalidParameter(f"m must be a positive integer, got {m}.")
    critical = m * (m + 2)
    if not p > critical:
        raise SubcriticalExponent(m, p)
    lam = p - critical
    kappa = (m + 1) * (m * (m + 1) * (m + 2) + p)
    return Exponents(lam=lam, kappa=kappa, tau=lam / kappa, alpha=1 - critical / p)


def _check_delta(delta: float) -> None:
    if not 0 < delta < 1:
        raise InvalidParameter(f"δ must lie in (0, 1), got {delta}.")


def _h0_slack(h: float, delta: float) -> float:
    t = 2 * h * delta
    return (1 - t) * math.sqrt(1 - t * t) - delta - t


def h0(delta: float) -> float:
    """Largest h <= 1/2 with δ + 2hδ <= (1 − 2hδ)√(1 − (2hδ)²); exactly 1/2 for δ <= 1/4.

    >>> h0(0.25)
    0.5
    """
    _check_delta(delta)
    if delta <= 0.25 or _h0_slack(0.5, delta) >= 0:
        return 0.5
    if _h0_slack(0.0, delta) <= 0:
        raise NoValidH0(f"No h > 0 satisfies the cone inequality for δ={delta}.")
    return float(brentq(_h0_slack, 0.0, 0.5, args=(delta,), xtol=metadata.H0_XTOL))


def eta(delta: float, m: int) -> float:
    """η(δ, m) = min{√(1 − δ²)/(2(m!)^{1/m}), h₀δ/2}."""
    return min(math.sqrt(1 - delta**2) / (2 * math.factorial(m) ** (1 / m)), 0.5 * h0(delta) * delta)


def _log_c_eta_d1(m: int) -> float:
    base = eta_const() / (2 * upsilon(m) * omega_max() ** (m + 2) * math.factorial(m))
    return m * (m + 2) * math.log(base)


def _log_c_eta_d2(m: int) -> float:
    return -math.log((m + 1) * 2 ** (m + 2))


def _psi_root(level: float) -> float:
    return float(brentq(lambda psi: (1 - psi) * math.sqrt(1 - psi * psi) - level - psi, 0.0, 1.0, xtol=1e-14))


@dataclass
class ConstantsLedger:
    E: float
    m: int
    p: float
    delta: float
    M_sigma: float
    A_sigma: float
    lam: float
    kappa: float
    tau: float
    alpha: float
    omega_m: float
    Omega: float
    C_eta_const: float
    C_eta_d1: float
    C_eta_d2: float
    h0: float
    eta: float
    varsigma_m: float
    A1: float
    C_uahlreg1: float
    C_uahlreg2: float
    R_uar: float
    C_beta_est: float
    Psi0: float
    R_adm_fine: float
    R_sigma: float
    C_dist_ang: float
    C_bap_osc: float
    C_tan_dist: float
    C_tan_point: float
    C_lip_const: float
    C_tan_osc: float
    C_holder_norm: float
    R_beta: float
    R_graph: float
    R_smooth: float
    C_smooth_const: float

    def to_dict(self) -> Dict:
        return {field.name: getattr(self, field.name) for field in fields(self)}


FORMULAS = {
    "lam": "p - m(m+2)",
    "kappa": "(m+1)(m(m+1)(m+2) + p)",
    "tau": "lambda/kappa",
    "alpha": "1 - m(m+2)/p",
    "omega_m": "volume of the unit m-ball",
    "Omega": "max_k omega_k = 8 pi^2/15",
    "C_eta_const": "numerically determined (scan over k)",
    "C_eta_d1": "(C_eta_const/(2 Upsilon(m) Omega^(m+2) m!))^(m(m+2))",
    "C_eta_d2": "1/((m+1) 2^(m+2))",
    "h0": "largest h <= 1/2 with delta + 2h delta <= (1 - 2h delta) sqrt(1 - (2h delta)^2)",
    "eta": "min(sqrt(1 - delta^2)/(2 (m!)^(1/m)), h0 delta/2)",
    "varsigma_m": "varsigma_m(eta)",
    "A1": "sqrt(1 - delta^2) omega_m varsigma_m^m",
    "C_uahlreg1": "C_eta_d1 A1 eta^(m(m+1)^2(m+2))",
    "C_uahlreg2": "C_eta_d2 eta^(m+1)",
    "R_uar": "(C_uahlreg1 C_uahlreg2^p/E)^(1/lambda)",
    "C_beta_est": "2/(m!)^(1/m) (1/(C_eta_d1 C_eta_d2^p A_sigma^(m+2)))^(1/kappa)",
    "Psi0": "root of Psi = (1 - Psi) sqrt(1 - Psi^2) - L delta",
    "R_adm_fine": "(7 gamma Psi0/(16 C_beta_est))^(1/tau) E^(-1/lambda)",
    "R_sigma": "min(R_uar, R_adm_fine)",
    "C_dist_ang": "Grassmannian distance/angle constant for m-planes",
    "C_bap_osc": "(8/3)(M_sigma + 2) C_dist_ang C_beta_est",
    "C_tan_dist": "C_bap_osc 2^(1+tau)/(2^tau - 1)",
    "C_tan_point": "C_tan_dist + C_beta_est",
    "C_lip_const": "C_tan_point/(4 C_beta_est M_sigma)",
    "C_tan_osc": "C_bap_osc + 2 C_tan_dist",
    "C_holder_norm": "4 C_tan_osc (4 C_tan_osc/(2 C_tan_osc - 3 C_tan_point))^tau",
    "R_beta": "min((4 C_beta_est M_sigma)^(-1/tau) E^(-1/lambda), R_sigma)",
    "R_graph": "min(E^(-1/lambda)(C_tan_osc + C_tan_point (2 C_lip_const)^tau)^(-1/tau)/2, R_beta/(4 C_lip_const))",
    "R_smooth": "min(E^(-1/lambda)(2 C_tan_osc)^(-1/tau), R_graph, R_beta/2)/2",
    "C_smooth_const": "R_smooth E^(1/lambda)",
}


def constants_ledger(
    E: float,
    m: int,
    p: float,
    delta: float,
    M_sigma: float = metadata.M_SIGMA,
    A_sigma: Optional[float] = None,
) -> ConstantsLedger:
    """Evaluate the whole constants chain in dependency order.

    A_sigma defaults to the Ahlfors constant (1 − δ²)^{m/2} ω_m of an admissible set.
    """
    if not E > 0:
        raise InvalidParameter(f"The energy bound E must be positive, got {E}.")
    _check_delta(delta)
    ex = exponents(m, p)
    lam, kappa, tau = ex.lam, ex.kappa, ex.tau
    omega_m = omega(m)
    A_sigma = (1 - delta**2) ** (m / 2) * omega_m if A_sigma is None else A_sigma
    if not A_sigma > 0:
        raise InvalidParameter(f"A_sigma must be positive, got {A_sigma}.")
    log_E = math.log(E)

    log_d1, log_d2 = _log_c_eta_d1(m), _log_c_eta_d2(m)
    h = h0(delta)
    eta_value = eta(delta, m)
    sigma = varsigma(m, eta_value)
    A1 = math.sqrt(1 - delta**2) * omega_m * sigma**m
    log_uahlreg1 = log_d1 + math.log(A1) + m * (m + 1) ** 2 * (m + 2) * math.log(eta_value)
    log_uahlreg2 = log_d2 + (m + 1) * math.log(eta_value)
    R_uar = math.exp((log_uahlreg1 + p * log_uahlreg2 - log_E) / lam)

    log_beta_est = (
        math.log(2) - math.log(math.factorial(m)) / m - (log_d1 + p * log_d2 + (m + 2) * math.log(A_sigma)) / kappa
    )
    C_beta_est = math.exp(log_beta_est)

    L = 0.5 * (math.sqrt((2 - delta) / delta) + 1 / delta)
    psi0 = _psi_root(L * delta)
    gamma = math.sqrt(1 - (L * delta) ** 2)
    R_adm_fine = math.exp((math.log(7 * gamma * psi0 / 16) - log_beta_est) / tau - log_E / lam)
    R_sigma = min(R_uar, R_adm_fine)

    C_dist_ang = grass_constants(m).c_dist_ang
    C_bap_osc = 8 / 3 * (M_sigma + 2) * C_dist_ang * C_beta_est
    C_tan_dist = C_bap_osc * 2 ** (1 + tau) / (2**tau - 1)
    C_tan_point = C_tan_dist + C_beta_est
    C_lip = C_tan_point / (4 * C_beta_est * M_sigma)
    C_tan_osc = C_bap_osc + 2 * C_tan_dist
    C_holder_norm = 4 * C_tan_osc * (4 * C_tan_osc / (2 * C_tan_osc - 3 * C_tan_point)) ** tau

    energy_scale = math.exp(-log_E / lam)
    R_beta = min(math.exp(-math.log(4 * C_beta_est * M_sigma) / tau) * energy_scale, R_sigma)
    R_graph = min(
        0.5 * energy_scale * math.exp(-math.log(C_tan_osc + C_tan_point * (2 * C_lip) ** tau) / tau),
        R_beta / (4 * C_lip),
    )
    R_smooth = 0.5 * min(energy_scale * math.exp(-math.log(2 * C_tan_osc) / tau), R_graph, 0.5 * R_beta)

    ledger = ConstantsLedger(
        E=E,
        m=m,
        p=p,
        delta=delta,
        M_sigma=M_sigma,
        A_sigma=A_sigma,
        lam=lam,
        kappa=kappa,
        tau=tau,
        alpha=ex.alpha,
        omega_m=omega_m,
        Omega=omega_max(),
        C_eta_const=eta_const(),
        C_eta_d1=math.exp(log_d1),
        C_eta_d2=math.exp(log_d2),
        h0=h,
        eta=eta_value,
        varsigma_m=sigma,
        A1=A1,
        C_uahlreg1=math.exp(log_uahlreg1),
        C_uahlreg2=math.exp(log_uahlreg2),
        R_uar=R_uar,
        C_beta_est=C_beta_est,
        Psi0=psi0,
        R_adm_fine=R_adm_fine,
        R_sigma=R_sigma,
        C_dist_ang=C_dist_ang,
        C_bap_osc=C_bap_osc,
        C_tan_dist=C_tan_dist,
        C_tan_point=C_tan_point,
        C_lip_const=C_lip,
        C_tan_osc=C_tan_osc,
        C_holder_norm=C_holder_norm,
        R_beta=R_beta,
        R_graph=R_graph,
        R_smooth=R_smooth,
        C_smooth_const=R_smooth / energy_scale,
    )
    logger.info("Ledger for E=%g, m=%d, p=%g, δ=%g: R_uar=%.4g, R_smooth=%.4g", E, m, p, delta, R_uar, R_smooth)
    return ledger


LEDGER_HEADER = ["name", "value", "formula"]


def ledger_rows(ledger: ConstantsLedger) -> List[Tuple[str, float, str]]:
    """(name, value, formula) for every derived entry of the ledger; the inputs are skipped."""
    return [(name, getattr(ledger, name), formula) for name, formula in FORMULAS.items()]


@dataclass
class BalanceCheck:
    holds: bool
    lhs: float
    rhs: float

    def to_dict(self) -> Dict:
        return {"holds": self.holds, "lhs": self.lhs, "rhs": self.rhs}


def balance_check(
    eta: float, d: float, E: float, A_sigma: float, m: int, p: float, tol: float = shared.TOL_GEOM
) -> BalanceCheck:
    """d >= (C_eta_d1 C_eta_d2^p A_sigma^{m+2}/E)^{1/λ} η^{κ/λ}, the condition a stopping distance must meet."""
    if min(eta, d, E, A_sigma) <= 0:
        raise InvalidParameter(f"η, d, E and A_sigma must be positive, got {eta}, {d}, {E}, {A_sigma}.")
    ex = exponents(m, p)
    log_rhs = (_log_c_eta_d1(m) + p * _log_c_eta_d2(m) + (m + 2) * math.log(A_sigma) - math.log(E)) / ex.lam
    rhs = math.exp(log_rhs + ex.kappa / ex.lam * math.log(eta))
    return BalanceCheck(holds=bool(d >= rhs - tol), lhs=d, rhs=rhs)
