"""Simplex metrics, discrete Menger curvature, voluminous simplices and their perturbation constants.

A k-simplex is an ordered tuple of k+1 vertices. Ordering matters: the base of a voluminous
simplex is the face opposite the last vertex and its height is the one lowered from the last vertex.
"""
from dataclasses import dataclass
from functools import lru_cache
import itertools
import math
from typing import Dict, List, Optional, Tuple

from boltons.cacheutils import cachedproperty
import numpy as np
from scipy.spatial.distance import cdist, pdist
from scipy.special import gamma

from menger_energy.errors import DimensionMismatch, InvalidParameter, TooManyVertices, ZeroDiameter
import menger_energy.metadata.shared as shared
import menger_energy.metadata.simplex as metadata
from menger_energy.util import as_generator, RngLike

CURVATURE_VARIANTS = ("K", "K_prime", "K_double_prime")


def omega(k: int) -> float:
    """Volume of the unit ball in R^k, π^{k/2}/Γ(k/2 + 1).

    >>> round(omega(2), 12) == round(math.pi, 12)
    True
    """
    return float(math.pi ** (k / 2) / gamma(k / 2 + 1))


@lru_cache(maxsize=None)
def omega_max() -> float:
    """Ω = sup_k ω_k, attained at k = 5 (8π²/15)."""
    return max(omega(k) for k in range(1, metadata.ETA_CONST_SCAN + 1))


def upsilon(k: int) -> float:
    """Υ(k) = (1 + (3/4)^{1/(k+2)}) / (1 − (3/4)^{1/(k+2)})."""
    q = 0.75 ** (1.0 / (k + 2))
    return (1.0 + q) / (1.0 - q)


def varsigma(k: int, eta: float) -> float:
    """ς_k(η), the admissible vertex displacement (relative to d) keeping a voluminous simplex voluminous."""
    return min(
        2.0 ** (1.0 / (k + 1) ** 2) - 1.0,
        eta ** ((k + 1) ** 2) / (2.0 * upsilon(k) * omega(k) ** (k + 2) * math.factorial(k)),
    )


@lru_cache(maxsize=None)
def eta_const() -> float:
    """Largest c in (0, 1) with 2^{1/(k+1)²} − 1 >= √c/(k+1)² and 1/(k+1)² >= √c/(2Υ(k)Ω^{k+2}k!) for all k.

    The first bound (k+1)²(2^{1/(k+1)²} − 1) decreases to ln 2 and the second grows factorially,
    so the scan over k is closed off with the ln 2 limit.
    """
    big_omega = omega_max()
    first = min((k + 1) ** 2 * (2.0 ** (1.0 / (k + 1) ** 2) - 1.0) for k in range(1, metadata.ETA_CONST_SCAN + 1))
    second = min(
        2.0 * upsilon(k) * big_omega ** (k + 2) * math.factorial(k) / (k + 1) ** 2
        for k in range(1, metadata.ETA_CONST_SCAN + 1)
    )
    root = min(first, math.log(2.0), second)
    return min(root**2, 1.0 - shared.TOL_GEOM)


@dataclass(frozen=True)
class PerturbationConstant:
    k: int
    eta: float
    varsigma: float
    upsilon: float
    bracket: Tuple[float, float]

    def to_dict(self) -> Dict:
        return {
            "k": self.k,
            "eta": self.eta,
            "varsigma": self.varsigma,
            "upsilon": self.upsilon,
            "bracket": self.bracket,
        }


def perturbation_constant(k: int, eta: float) -> PerturbationConstant:
    """ς_k(η), Υ(k) and the two-sided bracket of ς_k(η) in terms of η^{(k+1)²}."""
    if k < 1 or not 0 < eta < 1:
        raise InvalidParameter(f"Need k >= 1 and η in (0, 1), got k={k}, η={eta}.")
    scale = 2.0 * upsilon(k) * math.factorial(k)
    power = eta ** ((k + 1) ** 2)
    lower = eta_const() * power / (scale * omega_max() ** (k + 2))
    upper = power / (scale * omega(k) ** (k + 2))
    return PerturbationConstant(k=k, eta=eta, varsigma=varsigma(k, eta), upsilon=upsilon(k), bracket=(lower, upper))


def _circumball(support: List[np.ndarray]) -> Tuple[np.ndarray, float]:
    """Smallest ball with all support points on its boundary (center in their affine hull)."""
    base = support[0]
    if len(support) == 1:
        return base.copy(), 0.0
    edges = np.array([p - base for p in support[1:]])
    rhs = 0.5 * np.sum(edges**2, axis=1)
    coefficients = np.linalg.lstsq(edges @ edges.T, rhs, rcond=None)[0]
    center = base + coefficients @ edges
    radius = max(float(np.linalg.norm(p - center)) for p in support)
    return center, radius


def _welzl(points: List[np.ndarray], support: List[np.ndarray], dim: int) -> Tuple[Optional[np.ndarray], float]:
    if not points or len(support) == dim + 1:
        if not support:
            return None, -1.0
        return _circumball(support)
    p = points[-1]
    center, radius = _welzl(points[:-1], support, dim)
    if center is not None and np.linalg.norm(p - center) <= radius * (1 + 1e-12) + shared.TOL_LINALG:
        return center, radius
    return _welzl(points[:-1], support + [p], dim)


def enclosing_ball(points: np.ndarray) -> Tuple[np.ndarray, float]:
    """Minimum enclosing ball of a small point set in R^n by Welzl's recursion."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    center, radius = _welzl(list(points), [], points.shape[1])
    return center, max(radius, 0.0)


def _distance_to_affine_hull(x: np.ndarray, vertices: np.ndarray) -> float:
    base = vertices[0]
    if len(vertices) == 1:
        return float(np.linalg.norm(x - base))
    edges = vertices[1:] - base
    coefficients = np.linalg.lstsq(edges.T, x - base, rcond=None)[0]
    return float(np.linalg.norm(x - base - coefficients @ edges))


def gram_measure(vertices: np.ndarray) -> float:
    """H^k measure of the simplex spanned by k+1 vertices: sqrt(det(E Eᵀ))/k!."""
    k = len(vertices) - 1
    if k == 0:
        return 1.0
    edges = vertices[1:] - vertices[0]
    det = float(np.linalg.det(edges @ edges.T))
    return math.sqrt(max(det, 0.0)) / math.factorial(k)


class Simplex:
    """An ordered tuple of k+1 vertices in R^n; degenerate vertex sets are allowed."""

    def __init__(self, vertices: np.ndarray) -> None:
        vertices = np.atleast_2d(np.asarray(vertices, dtype=float))
        if vertices.ndim != 2 or len(vertices) < 1:
            raise DimensionMismatch(f"Vertices must form a (k+1, n) array, got shape {vertices.shape}.")
        vertices = vertices.copy()
        vertices.setflags(write=False)
        self.vertices = vertices

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    @cachedproperty
    def diam(self) -> float:
        if len(self.vertices) < 2:
            return 0.0
        return float(np.max(pdist(self.vertices)))

    @cachedproperty
    def measure(self) -> float:
        value = gram_measure(self.vertices)
        if self.dim > 0 and value <= shared.TOL_LINALG * self.diam**self.dim:
            return 0.0
        return value

    @property
    def degenerate(self) -> bool:
        return self.measure == 0.0

    def face(self, i: int) -> "Simplex":
        """fc_i: the face opposite vertex i."""
        return Simplex(np.delete(self.vertices, i, axis=0))

    @cachedproperty
    def faces(self) -> List["Simplex"]:
        return [self.face(i) for i in range(len(self.vertices))]

    @cachedproperty
    def heights(self) -> np.ndarray:
        """h_i: distance from vertex i to the affine hull of fc_i; all zero for degenerate simplices."""
        if self.dim == 0 or self.degenerate:
            return np.zeros(len(self.vertices))
        return np.array(
            [_distance_to_affine_hull(x, np.delete(self.vertices, i, axis=0)) for i, x in enumerate(self.vertices)]
        )

    @property
    def hmin(self) -> float:
        return float(np.min(self.heights))

    @cachedproperty
    def enclosing(self) -> Tuple[np.ndarray, float]:
        return enclosing_ball(self.vertices)

    @property
    def enclosing_radius(self) -> float:
        return self.enclosing[1]

    def scaled(self, alpha: float) -> "Simplex":
        return Simplex(alpha * self.vertices)

    def to_dict(self) -> Dict:
        return {"vertices": self.vertices}

    def __repr__(self) -> str:
        return f"Simplex(k={self.dim}, n={self.ambient_dim})"


@dataclass
class SimplexMetrics:
    measure: float
    diam: float
    heights: np.ndarray
    hmin: float
    faces: List[Simplex]
    enclosing_radius: float

    def to_dict(self) -> Dict:
        return {
            "measure": self.measure,
            "diam": self.diam,
            "heights": self.heights,
            "hmin": self.hmin,
            "face_measures": [face.measure for face in self.faces],
            "enclosing_radius": self.enclosing_radius,
        }


def simplex_metrics(T: Simplex) -> SimplexMetrics:
    """Measure, diameter, heights, faces and minimal enclosing radius of T.

    >>> metrics = simplex_metrics(Simplex([[0, 0], [1, 0], [0, 1]]))
    >>> metrics.measure, round(metrics.hmin, 12)
    (0.5, 0.707106781187)
    """
    return SimplexMetrics(
        measure=T.measure,
        diam=T.diam,
        heights=T.heights,
        hmin=T.hmin,
        faces=T.faces,
        enclosing_radius=T.enclosing_radius,
    )


def menger_curvature(T: Simplex, variant: str = "K") -> float:
    """Discrete curvature of an (m+2)-vertex simplex.

    K = H^{m+1}(T)/diam^{m+2}, K′ = H^{m+1}(T)/(Σ_i H^m(fc_i T)·diam²) and K″ = hmin/diam².
    """
    if variant not in CURVATURE_VARIANTS:
        raise InvalidParameter(f"Unknown curvature variant {variant!r}; choose one of {CURVATURE_VARIANTS}.")
    if T.diam == 0.0:
        raise ZeroDiameter("All vertices coincide; the curvature is a 0/0 form.")
    if T.degenerate:
        return 0.0
    if variant == "K":
        return T.measure / T.diam ** (T.dim + 1)
    if variant == "K_prime":
        area = sum(face.measure for face in T.faces)
        return T.measure / (area * T.diam**2)
    return T.hmin / T.diam**2


def tuple_curvature(vertices: np.ndarray, tol: float = shared.TOL_LINALG) -> np.ndarray:
    """K for a batch of simplices given as a (B, k+1, n) array; degenerate and zero-diameter tuples get 0.

    >>> tuple_curvature(np.array([[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]])).round(12).tolist()
    [0.176776695297]
    """
    vertices = np.asarray(vertices, dtype=float)
    k = vertices.shape[1] - 1
    differences = vertices[:, :, None, :] - vertices[:, None, :, :]
    diam = np.sqrt(np.max(np.sum(differences**2, axis=-1), axis=(1, 2)))
    edges = vertices[:, 1:] - vertices[:, :1]
    det = np.linalg.det(edges @ np.swapaxes(edges, 1, 2))
    measure = np.sqrt(np.maximum(det, 0.0)) / math.factorial(k)
    alive = (diam > 0) & (measure > tol * diam**k)
    safe = np.where(alive, diam, 1.0)
    return np.where(alive, measure / safe ** (k + 1), 0.0)


@dataclass
class VoluminousReport:
    member: bool
    enclosing_radius: float
    base_measure: float
    height: float

    def to_dict(self) -> Dict:
        return {
            "member": self.member,
            "witnesses": {
                "enclosing_radius": self.enclosing_radius,
                "base_measure": self.base_measure,
                "height": self.height,
            },
        }


def voluminous_classify(T: Simplex, eta: float, d: float, tol: float = shared.TOL_GEOM) -> VoluminousReport:
    """Membership of a (k+1)-simplex in V_k(η, d): small enclosing ball, big base, tall last height."""
    if not 0 < eta < 1 or d <= 0:
        raise InvalidParameter(f"Need η in (0, 1) and d > 0, got η={eta}, d={d}.")
    k = T.dim - 1
    if k < 1:
        raise DimensionMismatch(f"A voluminous simplex needs at least 3 vertices, got {len(T.vertices)}.")
    radius = T.enclosing_radius
    base = T.face(k + 1).measure
    height = float(T.heights[-1])
    member = radius <= d * (1 + tol) and base >= (eta * d) ** k * (1 - tol) and height >= eta * d * (1 - tol)
    return VoluminousReport(member=bool(member), enclosing_radius=radius, base_measure=base, height=height)


def voluminous_eta(T: Simplex, d: float) -> float:
    """Largest η with T in V_k(η, d), or 0 when T does not fit in a ball of radius d."""
    k = T.dim - 1
    if T.enclosing_radius > d * (1 + shared.TOL_GEOM):
        return 0.0
    return min(T.face(k + 1).measure ** (1.0 / k), float(T.heights[-1])) / d


def curvature_lower_bound(m: int, eta: float, d: float) -> float:
    """K(T) >= η^{m+1}/((m+1)2^{m+2}d) for T in V_m(η, d)."""
    return eta ** (m + 1) / ((m + 1) * 2 ** (m + 2) * d)


def check_hmin_estimates(T: Simplex, eta: float, d: float, tol: float = shared.TOL_GEOM) -> Dict[str, bool]:
    """Evaluate the chain of lower/upper estimates satisfied by every member of V_k(η, d)."""
    k = T.dim - 1
    hmin = T.hmin
    distances = pdist(T.vertices)
    face_measures = [face.measure for face in T.faces]
    slack = 1 + tol
    return {
        "meas-low": T.measure * slack >= (eta * d) ** (k + 1) / (k + 1),
        "diam-low": bool(np.all(distances * slack >= hmin)),
        "meas-T": hmin ** (k + 1) / math.factorial(k + 1) <= T.measure * slack
        and T.measure <= omega(k + 1) * d ** (k + 1) * slack,
        "meas-face-T": all(
            hmin**k / math.factorial(k) <= measure * slack and measure <= omega(k) * d**k * slack
            for measure in face_measures
        ),
        "hmin": d * eta ** (k + 1) / omega(k) <= hmin * slack and hmin <= d * (omega(k) * math.factorial(k)) ** (1 / k),
        "hmin-ito-measures": math.isclose(hmin, (k + 1) * T.measure / max(face_measures), rel_tol=1e-7, abs_tol=tol),
    }


def pseudo_distance(T: Simplex, T2: Simplex) -> float:
    """min over vertex permutations σ of max_i |x_i − x′_σ(i)|, by exhaustive enumeration."""
    if T.vertices.shape != T2.vertices.shape:
        raise DimensionMismatch(f"Simplices of shapes {T.vertices.shape} and {T2.vertices.shape} cannot be compared.")
    count = len(T.vertices)
    if count > metadata.MAX_PSEUDO_VERTICES:
        raise TooManyVertices(f"{count}! permutations exceed the budget of {metadata.MAX_PSEUDO_VERTICES} vertices.")
    distances = cdist(T.vertices, T2.vertices)
    permutations = np.array(list(itertools.permutations(range(count))))
    return float(distances[np.arange(count), permutations].max(axis=1).min())


def pseudo_distance_lower_bound(T: Simplex, T2: Simplex) -> float:
    """max_i min_j |x_i − x′_j|, a cheap lower bound for the pseudo-distance."""
    distances = cdist(T.vertices, T2.vertices)
    return float(max(distances.min(axis=1).max(), distances.min(axis=0).max()))


def random_voluminous_simplex(
    k: int, n: int, d: float = 1.0, min_eta: float = 0.05, rng: RngLike = None, max_tries: int = 1000
) -> Tuple[Simplex, float]:
    """Random (k+1)-simplex with vertices in B(0, d), returned with its voluminous η at scale d."""
    if n < k + 1:
        raise DimensionMismatch(f"A (k+1)-simplex with k={k} needs n >= {k + 1}, got n={n}.")
    rng = as_generator(rng)
    for _ in range(max_tries):
        directions = rng.standard_normal((k + 2, n))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = d * rng.random((k + 2, 1)) ** (1.0 / n)
        T = Simplex(directions * radii)
        eta = voluminous_eta(T, d)
        if min_eta <= eta < 1:
            return T, eta
    raise InvalidParameter(f"No simplex with η >= {min_eta} found in {max_tries} tries (k={k}, n={n}).")
