TOOL_VERSION = "0.1.0"

TOL_LINALG = 1e-10
TOL_GEOM = 1e-7
SEED = 42

# significant digits for floats in JSON reports and CSV files
FLOAT_DIGITS = 17
