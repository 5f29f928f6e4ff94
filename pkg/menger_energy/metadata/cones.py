STEPS_PER_ROTATION = 32
TWO_CONES_SAMPLES = 10_000
# points along the segment joining paired principal vectors when looking for a common m-plane
WITNESS_GRID = 65
SPHERE_SAMPLES = 1000
