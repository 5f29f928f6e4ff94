"""Linear-subspace geometry: projections, the Grassmannian metric, ρεδ-bases and perturbation bounds.

A subspace H of R^n is stored as a frame, a (k, n) array whose rows are orthonormal. The
projector π_H = FᵀF does not depend on the choice of frame, so all metric quantities are
computed from projectors or from singular values of cross-Gram matrices.
"""
from dataclasses import dataclass, field
from functools import lru_cache
import logging
from typing import Dict, Sequence, Tuple

from boltons.cacheutils import cachedproperty
import numpy as np

from menger_energy.errors import (
    AngleTooLarge,
    ConstantUndefined,
    DegenerateBasis,
    DimensionMismatch,
    HypothesisViolated,
    InvalidParameter,
    NotInDomain,
)
import menger_energy.metadata.grassmann as metadata
from menger_energy.util import as_generator, RngLike

logger = logging.getLogger(__name__)


class Subspace:
    """A k-dimensional linear subspace of R^n, stored as an orthonormal frame of shape (k, n)."""

    def __init__(self, frame: np.ndarray, tol: float = metadata.TOL_LINALG) -> None:
        frame = np.atleast_2d(np.asarray(frame, dtype=float))
        if frame.ndim != 2 or frame.shape[0] > frame.shape[1]:
            raise DimensionMismatch(f"A frame must have shape (k, n) with k <= n, got {frame.shape}.")
        gram = frame @ frame.T
        deviation = np.abs(gram - np.eye(frame.shape[0])).max(axis=1) if frame.size else np.zeros(1)
        if deviation.max() > tol:
            raise DegenerateBasis(int(np.argmax(deviation)), float(deviation.max()))
        frame = frame.copy()
        frame.setflags(write=False)
        self._frame = frame

    @classmethod
    def from_span(cls, vectors: np.ndarray, tol: float = metadata.TOL_LINALG) -> "Subspace":
        """Subspace spanned by the rows of `vectors`, which must be linearly independent."""
        return cls(orthonormalize(vectors, tol=tol))

    @classmethod
    def random(cls, n: int, k: int, rng: RngLike = None) -> "Subspace":
        """Rotation-invariant random subspace: orthonormalized standard-Gaussian frame."""
        rng = as_generator(rng)
        q, _ = np.linalg.qr(rng.standard_normal((n, k)))
        return cls(q.T)

    @classmethod
    def coordinate(cls, n: int, axes: Sequence[int]) -> "Subspace":
        """span{e_i : i in axes}."""
        return cls(np.eye(n)[list(axes)])

    @property
    def frame(self) -> np.ndarray:
        return self._frame

    @property
    def ambient_dim(self) -> int:
        return self._frame.shape[1]

    @property
    def dim(self) -> int:
        return self._frame.shape[0]

    @cachedproperty
    def projector(self) -> np.ndarray:
        return self._frame.T @ self._frame

    @cachedproperty
    def complement_projector(self) -> np.ndarray:
        return np.eye(self.ambient_dim) - self.projector

    def complement(self) -> "Subspace":
        """The orthogonal complement H^⊥."""
        if self.dim == self.ambient_dim:
            raise DimensionMismatch("The whole space has no nonzero complement.")
        q, _ = np.linalg.qr(self._frame.T, mode="complete")
        return Subspace(q[:, self.dim :].T)

    def project(self, v: np.ndarray) -> np.ndarray:
        return project(self, v, "onto")

    def reject(self, v: np.ndarray) -> np.ndarray:
        return project(self, v, "complement")

    def contains(self, v: np.ndarray, tol: float = metadata.TOL_GEOM) -> bool:
        v = np.asarray(v, dtype=float)
        return float(np.linalg.norm(self.reject(v))) <= tol * max(1.0, float(np.linalg.norm(v)))

    def to_dict(self) -> Dict:
        return {"ambient_dim": self.ambient_dim, "dim": self.dim, "frame": self._frame}

    def __repr__(self) -> str:
        return f"Subspace(n={self.ambient_dim}, k={self.dim})"


@dataclass(frozen=True)
class GrassConstants:
    """Constants of the Gram-Schmidt and angle perturbation estimates for m-planes."""

    m: int
    c_gs_eps: float
    c_gs_del: float
    c_dist_ang: float

    def c_red_ang(self, eps: float, delta: float) -> float:
        """C_red-ang(ε, δ) = C_dist-ang / (1 − C_dist-ang·(C_gs-eps·ε + C_gs-del·δ))."""
        denominator = 1.0 - self.c_dist_ang * (self.c_gs_eps * eps + self.c_gs_del * delta)
        if denominator <= 0:
            raise ConstantUndefined(
                f"C_dist-ang·(C_gs-eps·ε + C_gs-del·δ) = {1 - denominator:.6g} >= 1 for m={self.m}, ε={eps}, δ={delta}."
            )
        return self.c_dist_ang / denominator

    def to_dict(self) -> Dict:
        return {"m": self.m, "c_gs_eps": self.c_gs_eps, "c_gs_del": self.c_gs_del, "c_dist_ang": self.c_dist_ang}


@dataclass
class BoundReport:
    """Both sides of a perturbation inequality lhs <= rhs."""

    bound: str
    lhs: float
    rhs: float
    satisfied: bool
    hypotheses: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {"bound": self.bound, "lhs": self.lhs, "rhs": self.rhs, "satisfied": self.satisfied, **self.hypotheses}


def _as_vectors(vectors: np.ndarray) -> np.ndarray:
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.ndim != 2:
        raise DimensionMismatch(f"Expected a (k, n) array of vectors, got shape {vectors.shape}.")
    return vectors


def orthonormalize(
    vectors: np.ndarray, mode: str = "unit", rho: float = 1.0, tol: float = metadata.TOL_LINALG
) -> np.ndarray:
    """Classical Gram-Schmidt process on the rows of `vectors`, in the given order.

    Parameters
    ----------
    vectors
        (k, n) array of linearly independent vectors.
    mode
        "unit" returns an orthonormal basis, "scaled" an ortho-ρ-normal one (every vector of length rho).
    rho
        Length used in "scaled" mode.
    tol
        Residuals shorter than tol times the length of the input vector signal linear dependence.

    Returns
    -------
    np.ndarray
        (k, n) array spanning the same subspace, with the same ordering.

    Raises
    ------
    DegenerateBasis
        When a residual vanishes.

    Examples
    --------
    >>> orthonormalize(np.array([[1.0, 0.0], [1.0, 1.0]]))
    array([[1., 0.],
           [0., 1.]])
    """
    if mode not in ("unit", "scaled"):
        raise InvalidParameter(f"Unknown Gram-Schmidt mode {mode!r}.")
    vectors = _as_vectors(vectors)
    result = np.zeros_like(vectors)
    for k, v in enumerate(vectors):
        w = v - result[:k].T @ (result[:k] @ v)
        residual = float(np.linalg.norm(w))
        if residual <= tol * max(float(np.linalg.norm(v)), tol):
            raise DegenerateBasis(k, residual)
        result[k] = w / residual
    if mode == "scaled":
        result = rho * result
    return result


def project(H: Subspace, v: np.ndarray, mode: str = "onto") -> np.ndarray:
    """π_H(v) for mode "onto", Q_H(v) = v − π_H(v) for mode "complement".

    Accepts a single vector of length n or a stack of shape (N, n).

    >>> H = Subspace.coordinate(2, [0])
    >>> project(H, np.array([3.0, 4.0]))
    array([3., 0.])
    >>> project(H, np.array([3.0, 4.0]), "complement")
    array([0., 4.])
    """
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != H.ambient_dim:
        raise DimensionMismatch(f"Vector of length {v.shape[-1]} does not live in R^{H.ambient_dim}.")
    onto = (v @ H.frame.T) @ H.frame
    if mode == "onto":
        return onto
    if mode == "complement":
        return v - onto
    raise InvalidParameter(f"Unknown projection mode {mode!r}.")


def _check_same_grassmannian(U: Subspace, V: Subspace) -> None:
    if U.ambient_dim != V.ambient_dim or U.dim != V.dim:
        raise DimensionMismatch(f"{U} and {V} do not lie in the same Grassmannian.")


def grass_distance(U: Subspace, V: Subspace) -> float:
    """dgras(U, V) = ‖π_U − π_V‖, the operator norm of the projector difference."""
    _check_same_grassmannian(U, V)
    return float(np.linalg.norm(U.projector - V.projector, 2))


def _aligned_singular_values(U: Subspace, V: Subspace) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    a, s, bt = np.linalg.svd(U.frame @ V.frame.T)
    return a, np.clip(s, 0.0, 1.0), bt


def aligned_frames(U: Subspace, V: Subspace) -> Tuple[np.ndarray, np.ndarray]:
    """Orthonormal frames of U and V realizing the infimum in the frame distance."""
    _check_same_grassmannian(U, V)
    a, _, bt = _aligned_singular_values(U, V)
    return a.T @ U.frame, bt @ V.frame


def frame_distance(U: Subspace, V: Subspace) -> float:
    """Infimum over orthonormal frames of (Σ|u_i − v_i|²)^{1/2}, which equals sqrt(2m − 2Σ s_i)."""
    _check_same_grassmannian(U, V)
    _, s, _ = _aligned_singular_values(U, V)
    return float(np.sqrt(max(0.0, 2.0 * U.dim - 2.0 * float(np.sum(s)))))


def aligned_frame_gap(U: Subspace, V: Subspace) -> float:
    """Largest per-vector gap max|u_i − v_i| of the aligned frames."""
    _check_same_grassmannian(U, V)
    _, s, _ = _aligned_singular_values(U, V)
    return float(np.sqrt(np.max(np.maximum(0.0, 2.0 - 2.0 * s))))


def is_red_basis(vectors: np.ndarray, rho: float, eps: float, delta: float) -> bool:
    """Whether the rows of `vectors` form a ρεδ-basis.

    >>> is_red_basis(np.array([[1.0, 0.0], [0.5, 0.5]]), 1.0, 0.3, 0.4)
    False
    """
    vectors = _as_vectors(vectors)
    norms = np.linalg.norm(vectors, axis=1)
    if np.any(norms < (1 - eps) * rho) or np.any(norms > (1 + eps) * rho):
        return False
    gram = vectors @ vectors.T
    off_diagonal = gram[~np.eye(len(gram), dtype=bool)]
    return bool(np.all(np.abs(off_diagonal) <= delta * rho**2))


def random_red_basis(n: int, k: int, rho: float, eps: float, delta: float, rng: RngLike = None) -> np.ndarray:
    """A random ρεδ-basis: ρ(e_i + η_i) with (e_i) orthonormal and |η_i| <= min(ε, δ)/3."""
    rng = as_generator(rng)
    frame = Subspace.random(n, k, rng).frame
    noise = rng.standard_normal((k, n))
    noise *= (min(eps, delta) / 3.0) * rng.random((k, 1)) / np.linalg.norm(noise, axis=1, keepdims=True)
    return rho * (frame + noise)


@lru_cache(maxsize=None)
def _gs_sequences(m: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    a_seq, b_seq = [1], [0]
    for k in range(2, m + 1):
        a_seq.append(1 + 4 * sum(a_seq))
        b_seq.append(2 * (k - 1) + 4 * sum(b_seq))
    return tuple(a_seq), tuple(b_seq)


def grass_constants(m: int) -> GrassConstants:
    """Evaluate A_m, B_m and C_dist-ang = 2m(A_m + B_m + 1).

    >>> c = grass_constants(2)
    >>> (c.c_gs_eps, c.c_gs_del, c.c_dist_ang)
    (5.0, 2.0, 32.0)
    """
    if m < 1:
        raise InvalidParameter(f"m must be a positive integer, got {m}.")
    a_seq, b_seq = _gs_sequences(m)
    a_m, b_m = float(a_seq[-1]), float(b_seq[-1])
    return GrassConstants(m=m, c_gs_eps=a_m, c_gs_del=b_m, c_dist_ang=2.0 * m * (a_m + b_m + 1.0))


def inverse_projection(U: Subspace, V: Subspace, v: np.ndarray, mode: str = "plane") -> np.ndarray:
    """Inverse of the restricted projection: the unique w in V with π_U(w) = v.

    With mode "complement" returns the unique w in V^⊥ with Q_U(w) = v, for v in U^⊥.
    """
    _check_same_grassmannian(U, V)
    distance = grass_distance(U, V)
    if distance >= 1 - metadata.TOL_GEOM:
        raise AngleTooLarge(f"dgras(U, V) = {distance:.6g} is too close to 1 to invert the projection.")
    if mode == "complement":
        if U.dim == U.ambient_dim:
            return np.zeros(U.ambient_dim)
        U, V = U.complement(), V.complement()
    elif mode != "plane":
        raise InvalidParameter(f"Unknown inverse projection mode {mode!r}.")
    v = np.asarray(v, dtype=float)
    if not U.contains(v):
        raise NotInDomain(f"The vector is not in the {'complement' if mode == 'complement' else 'plane'} of U.")
    coefficients = np.linalg.solve(U.frame @ V.frame.T, U.frame @ v)
    return coefficients @ V.frame


def _is_orthonormal(frame: np.ndarray, tol: float = metadata.TOL_GEOM) -> bool:
    return bool(np.max(np.abs(frame @ frame.T - np.eye(len(frame)))) <= tol)


def check_close_bases(E: np.ndarray, F: np.ndarray, tol: float = metadata.TOL_GEOM) -> BoundReport:
    """dgras(U, V) <= 2mϑ for orthonormal bases with |e_i − f_i| <= ϑ."""
    E, F = _as_vectors(E), _as_vectors(F)
    if E.shape != F.shape:
        raise DimensionMismatch(f"Frames of shapes {E.shape} and {F.shape} cannot be compared.")
    if not (_is_orthonormal(E, tol) and _is_orthonormal(F, tol)):
        raise HypothesisViolated("orthonormal bases", "Both frames must be orthonormal.")
    m = E.shape[0]
    theta = float(np.max(np.linalg.norm(E - F, axis=1)))
    lhs = grass_distance(Subspace(E, tol), Subspace(F, tol))
    rhs = 2 * m * theta
    return BoundReport("close-bases", lhs, rhs, lhs <= rhs + tol, {"theta": theta})


def check_gs_red(
    vectors: np.ndarray, rho: float, eps: float, delta: float, tol: float = metadata.TOL_GEOM
) -> BoundReport:
    """|v_i − v̂_i| <= (C_gs-eps·ε + C_gs-del·δ)ρ for the ortho-ρ-normal Gram-Schmidt output."""
    vectors = _as_vectors(vectors)
    if not is_red_basis(vectors, rho, eps, delta):
        raise HypothesisViolated("ρεδ-basis", f"ρ={rho}, ε={eps}, δ={delta}.")
    constants = grass_constants(vectors.shape[0])
    hats = orthonormalize(vectors, mode="scaled", rho=rho)
    lhs = float(np.max(np.linalg.norm(vectors - hats, axis=1)))
    rhs = (constants.c_gs_eps * eps + constants.c_gs_del * delta) * rho
    return BoundReport("gs-red", lhs, rhs, lhs <= rhs + tol)


def check_dist_ang(U: Subspace, E: np.ndarray, tol: float = metadata.TOL_GEOM) -> BoundReport:
    """dgras(U, V) <= C_dist-ang·ϑ when every vector e_i of an orthonormal basis of V has |Q_U(e_i)| <= ϑ."""
    E = _as_vectors(E)
    if not _is_orthonormal(E, tol):
        raise HypothesisViolated("orthonormal basis", "The frame of V must be orthonormal.")
    theta = float(np.max(np.linalg.norm(project(U, E, "complement"), axis=1)))
    if theta >= 1:
        raise HypothesisViolated("ϑ < 1", f"max|Q_U(e_i)| = {theta:.6g}.")
    V = Subspace(E, tol)
    lhs = grass_distance(U, V)
    rhs = grass_constants(U.dim).c_dist_ang * theta
    return BoundReport("dist-ang", lhs, rhs, lhs <= rhs + tol, {"theta": theta})


def check_red_ang(
    vectors: np.ndarray, others: np.ndarray, rho: float, eps: float, delta: float, tol: float = metadata.TOL_GEOM
) -> BoundReport:
    """dgras(U, V) <= C_red-ang(ε, δ)·ϑ for a ρεδ-basis (v_i) of V and a basis (u_i) of U with |u_i − v_i| <= ϑρ."""
    vectors, others = _as_vectors(vectors), _as_vectors(others)
    if vectors.shape != others.shape:
        raise DimensionMismatch(f"Bases of shapes {vectors.shape} and {others.shape} cannot be compared.")
    if not is_red_basis(vectors, rho, eps, delta):
        raise HypothesisViolated("ρεδ-basis", f"ρ={rho}, ε={eps}, δ={delta}.")
    theta = float(np.max(np.linalg.norm(vectors - others, axis=1))) / rho
    if theta >= 1:
        raise HypothesisViolated("ϑ < 1", f"max|u_i − v_i|/ρ = {theta:.6g}.")
    try:
        c_red_ang = grass_constants(vectors.shape[0]).c_red_ang(eps, delta)
    except ConstantUndefined as exception:
        raise HypothesisViolated("C_dist-ang(C_gs-eps·ε + C_gs-del·δ) < 1", str(exception)) from exception
    lhs = grass_distance(Subspace.from_span(others), Subspace.from_span(vectors))
    rhs = c_red_ang * theta
    return BoundReport("red-ang", lhs, rhs, lhs <= rhs + tol, {"theta": theta})


def verify_perturbation_bounds(bound: str, *trial, **params) -> BoundReport:
    """Evaluate both sides of one of the perturbation estimates on a trial.

    bound is one of "close-bases" (trial: E, F), "gs-red" (trial: vectors; params rho, eps, delta),
    "dist-ang" (trial: U, E) or "red-ang" (trial: vectors, others; params rho, eps, delta). Every bound
    also takes a `tol` slack.
    """
    checks = {
        "close-bases": check_close_bases,
        "gs-red": check_gs_red,
        "dist-ang": check_dist_ang,
        "red-ang": check_red_ang,
    }
    if bound not in checks:
        raise InvalidParameter(f"Unknown bound {bound!r}; choose one of {', '.join(metadata.BOUNDS)}.")
    report = checks[bound](*trial, **params)
    if not report.satisfied:
        logger.warning(f"{bound} bound violated: lhs={report.lhs:.6g} > rhs={report.rhs:.6g}")
    return report


def random_pair(n: int, k: int, scale: float, rng: RngLike = None) -> Tuple[Subspace, Subspace]:
    """A random subspace and a perturbation of it; `scale` controls the size of the perturbation."""
    rng = as_generator(rng)
    U = Subspace.random(n, k, rng)
    V = Subspace.from_span(U.frame + scale * rng.standard_normal((k, n)))
    return U, V


def principal_vectors(U: Subspace, V: Subspace) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Paired principal vectors (rows) of U and V with the cosines of the principal angles."""
    a, s, bt = _aligned_singular_values(U, V)
    return a.T @ U.frame, bt @ V.frame, s


def restricted_singular_values(P: np.ndarray, L: Subspace) -> np.ndarray:
    """Singular values of the linear map P (n×n) restricted to the subspace L."""
    return np.linalg.svd(P @ L.frame.T, compute_uv=False)


def min_gain(P: np.ndarray, L: Subspace) -> float:
    """min over unit v in L of |P v|."""
    return float(restricted_singular_values(P, L)[-1])


def max_gain(P: np.ndarray, L: Subspace) -> float:
    """max over unit v in L of |P v|."""
    return float(restricted_singular_values(P, L)[0])
