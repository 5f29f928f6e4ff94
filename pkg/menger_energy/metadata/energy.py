BRUTE_MAX_TUPLES = 10**8
BRUTE_BLOCK = 2**16
MC_SAMPLES = 100_000
MC_BATCH = 1000
MC_MIN_SAMPLES = 1000

M_SIGMA = 5.0
H0_XTOL = 1e-12

SEARCH_DELTA = 0.25
SEARCH_POINT_TOL = 0.05
SEARCH_MAX_STAGES = 64
COVERAGE_GRID = 41
# the initial tangent schedule starts at this fraction of the cloud diameter
SEARCH_TANGENT_FRACTION = 0.125
# rotations of the axis frame tried before giving up on a stage
SEARCH_FRAME_TRIALS = 8
