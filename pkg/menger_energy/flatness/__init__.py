"""β and θ numbers, tangent planes, graph patches and Hölder fits on weighted clouds."""
from .beta import BetaSolver, beta_number, pca_plane, plane_net
from .theta import ThetaSolver, theta_number
from .scan import FlatnessResult, beta_at, flatness_at, gap_ratio_scan
from .tangent import mock_tangent_check, radius_schedule, tangent_oscillation, tangent_plane
from .graph import GraphPatch, check_derivative_angles, graph_extract
from .holder import holder_exponent
