# (k+2)! permutations are enumerated by pseudo_distance
MAX_PSEUDO_VERTICES = 9

# largest k scanned when searching the absolute constant in the eta bracket and Omega = max omega_k
ETA_CONST_SCAN = 64
