"""Menger-type curvature, p-energy, β/θ flatness and tangent regularity diagnostics for weighted point clouds."""
