HEADER_PREFIX = "#menger"
KNN_NEIGHBORS = 8
AHLFORS_CENTERS = 200
# exact pairwise diameter below this many points, farthest-point sweep above
EXACT_DIAMETER_LIMIT = 4000
