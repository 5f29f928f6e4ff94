import menger_energy.metadata.shared as shared

TOL_LINALG = shared.TOL_LINALG
TOL_GEOM = shared.TOL_GEOM

BOUNDS = ("close-bases", "gs-red", "dist-ang", "red-ang")
