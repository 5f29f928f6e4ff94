BETA_RESTARTS = 8
BETA_MAX_ITERS = 300
BETA_LR = 0.2
BETA_PERTURBATION = 0.3
# exhaustive net certification only for small ambient/plane dimensions
CERTIFY_MAX_N = 4
CERTIFY_MAX_M = 2
CERTIFY_NET_SIZE = 4000

THETA_DISK_GRID = 33
THETA_MAX_NODES = 4096
THETA_MAX_ITERS = 200

GAP_BETA_TOL = 1e-6
GAP_THETA_TOL = 0.5

TANGENT_LEVELS = 6
TANGENT_MIN_POINTS = 20

LIP_SLACK = 1.0
MULTISHEET_FACTOR = 4.0
# local tangent planes farther than this from T_x are not used for the tp-deriv comparison
RELIABLE_TANGENT_DIST = 0.5

HOLDER_BINS = 12
HOLDER_MIN_NODES = 10
HOLDER_MIN_BINS = 3
