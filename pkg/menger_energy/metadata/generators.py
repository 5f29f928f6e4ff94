SAMPLE_COUNT = 10_000
RADIUS = 1.0
# offsets inside each parameter cell are drawn from [0.5 - JITTER/2, 0.5 + JITTER/2]
JITTER = 0.5

TORUS_MINOR_RADIUS = 0.4

GRAPH_HEIGHTS = ("quadratic", "cusp")
GRAPH_HEIGHT = "quadratic"
GRAPH_AMPLITUDE = 0.5
GRAPH_HALF_WIDTH = 1.0

SPIRAL_T_MIN = 0.15
SPIRAL_T_MAX = 1.0

KOCH_LEVEL = 6

GAP_WIDTH = 0.1
GAP_BULGE = 0.02

UNION_OFFSET = 1.0
