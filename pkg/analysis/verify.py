"""Property suites behind `run_analysis.py verify`.

Every check runs a library routine on randomized trials or on clouds with known geometry and compares the
outcome with a closed-form value or an inequality. A suite passes when all of its checks do.
"""
import argparse
from dataclasses import dataclass, field
import logging
import math
from typing import Callable, Dict, List

import numpy as np

from analysis.util import Report
from menger_energy import energy, flatness, generators
from menger_energy.cones import two_cones_check
from menger_energy.errors import (
    HypothesisViolated,
    IntersectionNotWitnessed,
    InvalidParameter,
    MaxStagesExceeded,
    TargetPointMissing,
)
from menger_energy.grassmann import (
    aligned_frame_gap,
    check_close_bases,
    check_dist_ang,
    check_gs_red,
    check_red_ang,
    grass_constants,
    grass_distance,
    inverse_projection,
    orthonormalize,
    project,
    random_pair,
    random_red_basis,
    Subspace,
)
import menger_energy.metadata.shared as shared
from menger_energy.pointcloud import ahlfors_scan, PointCloud
from menger_energy.simplex import (
    check_hmin_estimates,
    menger_curvature,
    omega,
    omega_max,
    random_voluminous_simplex,
    Simplex,
    upsilon,
    varsigma,
    voluminous_classify,
    voluminous_eta,
)
from menger_energy.util import as_generator, dumps_report, progress

logger = logging.getLogger(__name__)

GRASSMANN_TRIALS = 10_000
CONE_TRIALS = 200
SIMPLEX_TRIALS = 1000
CURVE_POINTS = 10_000
SPHERE_POINTS = 10_000
SPIRAL_POINTS = 2000
SPIRAL_SAMPLES = 1_000_000
SCAN_PAIRS = 100
TOL = 1e-9

CHECK_HEADER = ["suite", "check", "passed", "detail"]


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteOutcome:
    checks: List[Check] = field(default_factory=list)
    header: List[str] = field(default_factory=lambda: list(CHECK_HEADER))

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def rows(self) -> List[List]:
        return [[check.suite, check.name, check.passed, check.detail] for check in self.checks]

    def to_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "checks": len(self.checks),
            "failed": [f"{check.suite}/{check.name}" for check in self.checks if not check.passed],
            "suites": sorted({check.suite for check in self.checks}),
        }


class _Tally:
    """Violation counter for one randomized check."""

    def __init__(self) -> None:
        self.trials, self.violations, self.skipped, self.worst = 0, 0, 0, 0.0

    def add(self, holds: bool, excess: float = 0.0) -> None:
        self.trials += 1
        self.violations += int(not holds)
        self.worst = max(self.worst, excess)

    def check(self, suite: str, name: str) -> Check:
        detail = f"{self.violations} violations in {self.trials} trials, {self.skipped} skipped"
        if self.violations:
            detail += f", worst excess {self.worst:.3g}"
        return Check(suite, name, self.trials > 0 and self.violations == 0, detail)


def _generate(kind: str, **params) -> PointCloud:
    return generators.generate(kind, argparse.Namespace(**params))


def _close(suite: str, name: str, value: float, expected: float, tol: float) -> Check:
    return Check(suite, name, abs(value - expected) <= tol, f"{value:.12g} vs {expected:.12g} (tol {tol:g})")


def grassmann_suite(
    seed: int, show_progress: bool = False, tol_geom: float = shared.TOL_GEOM, tol_linalg: float = shared.TOL_LINALG
) -> List[Check]:
    rng = as_generator(seed)
    names = (
        "metric axioms",
        "frame gap",
        "ang-dist",
        "inverse projection",
        "close-bases",
        "gs-red",
        "dist-ang",
        "red-ang",
    )
    tallies = {name: _Tally() for name in names}
    for _ in progress(range(GRASSMANN_TRIALS), show_progress, desc="grassmann"):
        n = int(rng.integers(2, 9))
        m = int(rng.integers(1, min(n - 1, 4) + 1))
        U, V, W = (Subspace.random(n, m, rng) for _ in range(3))
        d_uv, d_vw, d_uw = grass_distance(U, V), grass_distance(V, W), grass_distance(U, W)
        axioms = (
            grass_distance(U, U) <= TOL
            and abs(d_uv - grass_distance(V, U)) <= TOL
            and d_uw <= d_uv + d_vw + TOL
            and -TOL <= d_uv <= 1 + TOL
        )
        tallies["metric axioms"].add(axioms)
        excess = d_uv - 2 * m * aligned_frame_gap(U, V)
        tallies["frame gap"].add(excess <= TOL, excess)

        v = rng.standard_normal(m) @ V.frame
        excess = float(np.linalg.norm(project(U, v, "complement"))) - float(np.linalg.norm(v)) * d_uv
        tallies["ang-dist"].add(excess <= TOL, excess)

        U1, V1 = random_pair(n, m, 0.1 * rng.random(), rng)
        if grass_distance(U1, V1) <= 0.5:
            u = rng.standard_normal(m) @ U1.frame
            w = inverse_projection(U1, V1, u)
            excess = float(np.linalg.norm(w)) - 2 * float(np.linalg.norm(u))
            tallies["inverse projection"].add(excess <= TOL, excess)
        else:
            tallies["inverse projection"].skipped += 1

        E = U.frame
        F = orthonormalize(E + 0.05 * rng.random() * rng.standard_normal(E.shape))
        report = check_close_bases(E, F, tol_geom)
        tallies["close-bases"].add(report.satisfied, report.lhs - report.rhs)

        rho = float(rng.uniform(0.5, 2.0))
        vectors = random_red_basis(n, m, rho, 0.01, 0.01, rng)
        report = check_gs_red(vectors, rho, 0.01, 0.01, tol_geom)
        tallies["gs-red"].add(report.satisfied, report.lhs - report.rhs)

        try:
            report = check_dist_ang(U1, V1.frame, tol_geom)
            tallies["dist-ang"].add(report.satisfied, report.lhs - report.rhs)
        except HypothesisViolated:
            tallies["dist-ang"].skipped += 1

        if m <= 3:
            vectors = random_red_basis(n, m, rho, 1e-5, 1e-5, rng)
            noise = rng.standard_normal(vectors.shape)
            noise *= 1e-3 * rho * rng.random() / np.linalg.norm(noise, axis=1, keepdims=True)
            try:
                report = check_red_ang(vectors, vectors + noise, rho, 1e-5, 1e-5, tol_geom)
                tallies["red-ang"].add(report.satisfied, report.lhs - report.rhs)
            except HypothesisViolated:
                tallies["red-ang"].skipped += 1
    checks = [tallies[name].check("grassmann", name) for name in names]

    one, two = grass_constants(1), grass_constants(2)
    checks.append(
        Check(
            "grassmann",
            "constants golden values",
            (one.c_gs_eps, one.c_gs_del, one.c_dist_ang, two.c_gs_eps, two.c_gs_del, two.c_dist_ang)
            == (1.0, 0.0, 4.0, 5.0, 2.0, 32.0),
            f"m=1: {one.to_dict()}, m=2: {two.to_dict()}",
        )
    )
    checks.append(_close("grassmann", "Υ(1)", upsilon(1), 20.8723368691, 1e-6))
    checks.append(_close("grassmann", "Ω = 8π²/15", omega_max(), 8 * math.pi**2 / 15, 1e-9))
    lam = energy.exponents(2, 16)
    checks.append(
        Check(
            "grassmann",
            "exponents(2, 16)",
            (lam.lam, lam.kappa, lam.alpha) == (8, 120, 0.5) and abs(lam.tau - 1 / 15) <= 1e-15,
            str(lam.to_dict()),
        )
    )
    checks.append(_close("grassmann", "h0(0.25)", energy.h0(0.25), 0.5, 0.0))
    return checks


def cones_suite(
    seed: int, show_progress: bool = False, tol_geom: float = shared.TOL_GEOM, tol_linalg: float = shared.TOL_LINALG
) -> List[Check]:
    rng = as_generator(seed)
    tally = _Tally()
    special = _Tally()
    for trial in progress(range(CONE_TRIALS), show_progress, desc="cones"):
        n = int(rng.integers(2, 5))
        H0, H1 = random_pair(n, 1, 0.05 * rng.random(), rng)
        alpha = grass_distance(H0, H1) + 0.01
        beta = 0.02
        try:
            report = two_cones_check(H0, H1, alpha, beta, 0.05, samples=2000, seed=seed + trial, tol=tol_geom)
        except (HypothesisViolated, IntersectionNotWitnessed):
            tally.skipped += 1
            continue
        tally.add(report.violations == 0, float(report.violations))
        if report.special_case_applicable:
            special.add(bool(report.special_case_holds))
    return [tally.check("cones", "two-cones inclusion"), special.check("cones", "two-cones special case")]


def simplex_suite(
    seed: int, show_progress: bool = False, tol_geom: float = shared.TOL_GEOM, tol_linalg: float = shared.TOL_LINALG
) -> List[Check]:
    rng = as_generator(seed)
    estimates, perturb = _Tally(), _Tally()
    for _ in progress(range(SIMPLEX_TRIALS), show_progress, desc="simplex"):
        k = int(rng.integers(1, 4))
        n = int(rng.integers(k + 1, k + 3))
        d = float(rng.uniform(0.5, 2.0))
        T, eta = random_voluminous_simplex(k, n, d=d, min_eta=0.05, rng=rng)
        results = check_hmin_estimates(T, eta, d, tol_geom)
        estimates.add(all(results.values()))

        step = varsigma(k, eta) * d
        noise = rng.standard_normal(T.vertices.shape)
        noise *= step * rng.random((len(noise), 1)) / np.linalg.norm(noise, axis=1, keepdims=True)
        perturb.add(voluminous_classify(Simplex(T.vertices + noise), 0.5 * eta, 1.5 * d, tol_geom).member)
    checks = [estimates.check("simplex", "hmin estimates"), perturb.check("simplex", "perturbation stability")]

    right = Simplex([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    checks.append(_close("simplex", "K(right triangle)", menger_curvature(right), math.sqrt(2) / 8, 1e-12))
    alpha = 3.7
    checks.append(
        _close("simplex", "K scaling", alpha * menger_curvature(right.scaled(alpha)), menger_curvature(right), TOL)
    )
    tetrahedron = Simplex([[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]])
    checks.append(
        _close(
            "simplex",
            "regular tetrahedron K′ = K/√3",
            menger_curvature(tetrahedron, "K_prime"),
            menger_curvature(tetrahedron) / math.sqrt(3),
            TOL,
        )
    )
    return checks


def energy_suite(
    seed: int, show_progress: bool = False, tol_geom: float = shared.TOL_GEOM, tol_linalg: float = shared.TOL_LINALG
) -> List[Check]:
    triangle = PointCloud(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), np.ones(3), 1, tol=tol_geom)
    exact = energy.energy_brute(triangle, 2, tol=tol_linalg)
    checks = [_close("energy", "three-point brute force", exact.value, 0.1875, 1e-12)]

    circle = _generate("sphere", m=1, num_points=30, seed=seed, tol_geom=tol_geom)
    for name, cloud, p in (("three-point", triangle, 2), ("30-point circle", circle, 4)):
        brute = energy.energy_brute(cloud, p, tol=tol_linalg)
        mc = energy.energy_mc(cloud, p, samples=100_000, seed=seed, show_progress=show_progress, tol=tol_linalg)
        gap = abs(mc.value - brute.value)
        checks.append(
            Check(
                "energy",
                f"Monte Carlo vs brute force ({name})",
                gap <= 3 * mc.stderr + TOL * brute.value,
                f"|{mc.value:.6g} - {brute.value:.6g}| = {gap:.3g}, stderr {mc.stderr:.3g}",
            )
        )

    s, p = 2.0, 4
    scaled = energy.energy_brute(circle.scaled(s), p, tol=tol_linalg).value
    expected = s ** (circle.m * (circle.m + 2) - p) * energy.energy_brute(circle, p, tol=tol_linalg).value
    checks.append(_close("energy", "scaling law", scaled / expected, 1.0, 1e-6))
    return checks


def flatness_suite(
    seed: int, show_progress: bool = False, tol_geom: float = shared.TOL_GEOM, tol_linalg: float = shared.TOL_LINALG
) -> List[Check]:
    rng = as_generator(seed)
    checks = []
    circle = _generate("sphere", m=1, num_points=CURVE_POINTS, seed=seed, tol_geom=tol_geom)
    worst = 0.0
    for r in (0.05, 0.1, 0.2, 0.3):
        beta = flatness.beta_number(circle, circle.points[0], r)
        worst = max(worst, abs(beta.beta_bar / (0.5 * r) - 1))
    checks.append(Check("flatness", "circle β̄ = r/2", worst <= 0.05, f"worst relative error {worst:.3g}"))

    open_closed, theta_theta = _Tally(), _Tally()
    for _ in progress(range(SCAN_PAIRS), show_progress, desc="flatness"):
        i, r = int(rng.integers(len(circle))), float(rng.uniform(0.05, 0.5))
        result = flatness.flatness_at(circle, circle.points[i], r)
        open_closed.add(result.beta_open <= result.beta_bar + TOL, result.beta_open - result.beta_bar)
        theta_theta.add(result.theta_open <= 3 * result.theta_bar + TOL, result.theta_open - 3 * result.theta_bar)
    checks += [open_closed.check("flatness", "β ≤ β̄"), theta_theta.check("flatness", "θ ≤ 3θ̄")]

    torus = _generate("torus", num_points=CURVE_POINTS, seed=seed, tol_geom=tol_geom)
    c2 = _Tally()
    for i in rng.choice(len(torus), size=10, replace=False):
        for r in (0.05, 0.1):
            beta = flatness.beta_number(torus, torus.points[i], r).beta_bar
            bound = r / (2 * torus.provenance["reach"]) + 0.01
            c2.add(beta <= bound, beta - bound)
    checks.append(c2.check("flatness", "C² bound on the torus"))

    radii = [0.05, 0.1, 0.2]
    scan = flatness.gap_ratio_scan(circle, radii, centers=10, seed=seed, show_progress=show_progress)
    checks.append(Check("flatness", "gap ratio on the circle", scan.max_ratio <= 6, f"max ratio {scan.max_ratio:.3g}"))

    square_generator = generators.GapSquare(argparse.Namespace(num_points=CURVE_POINTS, seed=seed, tol_geom=tol_geom))
    square = square_generator.generate()
    ends = [int(square.index.nearest(np.asarray(end))[1]) for end in square_generator.gap_endpoints()]
    ratios = []
    for i in ends:
        result = flatness.flatness_at(square, square.points[i], 0.1)
        ratios.append(math.inf if result.beta_bar <= 0 else result.theta_bar / result.beta_bar)
    checks.append(Check("flatness", "gap ratio at the square's gap", min(ratios) > 10, f"ratios {ratios}"))

    segment = _generate("half_segment", num_points=2000, seed=seed, tol_geom=tol_geom)
    theta = flatness.flatness_at(segment, segment.points[0], 0.5).theta_bar
    checks.append(Check("flatness", "θ̄ at the half-segment endpoint", theta >= 0.9, f"θ̄ = {theta:.4g}"))
    return checks


def _search_checks(
    name: str, cloud: PointCloud, p: float, seed: int, tol_linalg: float, delta: float = 0.25
) -> List[Check]:
    x0 = int(cloud.index.nearest(np.eye(cloud.n)[-1])[1])
    try:
        result = energy.voluminous_search(cloud, x0, delta=delta)
    except (MaxStagesExceeded, TargetPointMissing) as exception:
        return [Check("search", f"{name}: voluminous simplex", False, f"{type(exception).__name__}: {exception}")]
    checks = [
        Check(
            "search",
            f"{name}: voluminous simplex",
            result.verified,
            f"d = {result.d:.4g} after {len(result.stages)} stages",
        )
    ]
    x = cloud.points[x0]
    coverage = [energy.big_projection_check(cloud, x, f * result.d, result.tangent, delta) for f in (0.25, 0.5)]
    checks.append(Check("search", f"{name}: big projection", min(coverage) >= 0.99, f"coverage {coverage}"))

    estimate = energy.energy_mc(cloud, p, samples=10_000, seed=seed, tol=tol_linalg)
    A_sigma = float(ahlfors_scan(cloud, [0.25 * result.d], seed=seed).min_ratio[0])
    if estimate.value <= 0 or A_sigma <= 0:
        checks.append(Check("search", f"{name}: balance", False, f"Ê = {estimate.value:.3g}, Â = {A_sigma:.3g}"))
        return checks
    eta_T = voluminous_eta(result.simplex, result.d)
    balance = energy.balance_check(eta_T, result.d, estimate.value, A_sigma, cloud.m, p, cloud.tol)
    checks.append(Check("search", f"{name}: balance", balance.holds, f"lhs {balance.lhs:.3g}, rhs {balance.rhs:.3g}"))

    R_uar = energy.constants_ledger(estimate.value, cloud.m, p, delta).R_uar
    lower = (1 - delta**2) ** (cloud.m / 2) * omega(cloud.m)
    scan = ahlfors_scan(cloud, [R_uar, 0.1 * R_uar, 0.01 * R_uar], seed=seed)
    checks.append(
        Check(
            "search",
            f"{name}: lower Ahlfors regularity below R_uar",
            bool(np.all(scan.min_ratio >= 0.9 * lower)),
            f"R_uar = {R_uar:.3g}, min ratio {float(np.min(scan.min_ratio)):.3g} vs {0.9 * lower:.3g}",
        )
    )
    return checks


def search_suite(
    seed: int, show_progress: bool = False, tol_geom: float = shared.TOL_GEOM, tol_linalg: float = shared.TOL_LINALG
) -> List[Check]:
    circle = _generate("sphere", m=1, num_points=CURVE_POINTS, seed=seed, tol_geom=tol_geom)
    sphere = _generate("sphere", m=2, num_points=SPHERE_POINTS, seed=seed, tol_geom=tol_geom)
    checks = _search_checks("circle", circle, 4, seed, tol_linalg)
    checks += _search_checks("sphere", sphere, 9, seed, tol_linalg)

    disk = _generate("plane_disk", m=2, n=3, num_points=SPHERE_POINTS, seed=seed, tol_geom=tol_geom)
    try:
        energy.voluminous_search(disk, int(disk.index.nearest(np.zeros(3))[1]))
        checks.append(Check("search", "flat disk fails", False, "a simplex was returned"))
    except (MaxStagesExceeded, TargetPointMissing) as exception:
        checks.append(Check("search", "flat disk fails", True, type(exception).__name__))
    return checks


def graph_suite(
    seed: int, show_progress: bool = False, tol_geom: float = shared.TOL_GEOM, tol_linalg: float = shared.TOL_LINALG
) -> List[Check]:
    sphere = _generate("sphere", m=2, num_points=SPHERE_POINTS, seed=seed, tol_geom=tol_geom)
    pole = int(sphere.index.nearest(np.array([0.0, 0.0, 1.0]))[1])
    R, resolution = 0.8, 0.04
    patch = flatness.graph_extract(sphere, sphere.points[pole], R, resolution)
    valid = patch.valid
    # the unit sphere lies 1 − √(1 − |w|²) below each of its tangent planes
    analytic = 1 - np.sqrt(1 - np.sum(patch.nodes[valid] ** 2, axis=1))
    errors = np.abs(np.linalg.norm(patch.values[valid], axis=1) - analytic)
    checks = [
        Check(
            "graph",
            "sphere patch matches the sphere",
            float(errors.max()) <= 2 * resolution,
            f"max error {float(errors.max()):.3g} over {int(valid.sum())} nodes",
        ),
        Check(
            "graph",
            "F(0) = 0 and DF(0) = 0",
            not np.any(patch.values[0]) and not np.any(patch.derivatives[0]),
            f"F(0) = {patch.values[0].tolist()}, DF(0) = {patch.derivatives[0].tolist()}",
        ),
    ]
    angles = flatness.check_derivative_angles(patch, tol=tol_geom)
    checks.append(
        Check("graph", "derivative angle bound", angles.violations == 0, f"{angles.violations} of {angles.pairs} pairs")
    )
    fit = flatness.holder_exponent(patch)
    checks.append(
        Check(
            "graph",
            "sphere Hölder exponent",
            0.8 <= fit.exponent <= 1.2,
            f"exponent {fit.exponent:.3g}, envelope {fit.envelope_exponent:.3g}",
        )
    )

    cusp = generators.Graph(argparse.Namespace(height="cusp", amplitude=1.0, m=2, n=3))
    cusp_patch = flatness.GraphPatch.from_function(cusp.height, cusp.jacobian, 2, 3, 1.0, 0.02)
    fit = flatness.holder_exponent(cusp_patch)
    checks.append(
        Check(
            "graph",
            "cusp Hölder envelope",
            0.4 <= fit.envelope_exponent <= 0.6,
            f"envelope {fit.envelope_exponent:.3g}, all pairs {fit.exponent:.3g}",
        )
    )
    return checks


def spiral_suite(
    seed: int, show_progress: bool = False, tol_geom: float = shared.TOL_GEOM, tol_linalg: float = shared.TOL_LINALG
) -> List[Check]:
    coarse = _generate("spiral", num_points=SPIRAL_POINTS, seed=seed, tol_geom=tol_geom)
    fine = _generate("spiral", num_points=4 * SPIRAL_POINTS, seed=seed, tol_geom=tol_geom)
    first = energy.max_curvature_sample(coarse, SPIRAL_SAMPLES, seed=seed, tol=tol_linalg)
    second = energy.max_curvature_sample(fine, SPIRAL_SAMPLES, seed=seed, tol=tol_linalg)
    return [
        Check(
            "spiral",
            "max sampled K stays bounded under refinement",
            second <= 1.1 * first,
            f"{first:.4g} at N={SPIRAL_POINTS}, {second:.4g} at N={4 * SPIRAL_POINTS}",
        )
    ]


def _pipeline_report(seed: int, tol_geom: float, tol_linalg: float) -> str:
    cloud = _generate("sphere", m=1, num_points=500, seed=seed, tol_geom=tol_geom)
    report = Report("determinism", {"seed": seed}, {"seed": seed})
    report.results = {
        "energy": energy.energy_mc(cloud, 4, samples=5000, seed=seed, tol=tol_linalg),
        "flatness": flatness.flatness_at(cloud, cloud.points[0], 0.2),
        "ledger": energy.constants_ledger(1.0, 2, 16, 0.25),
    }
    return dumps_report({key: value for key, value in report.to_dict().items() if key != "timestamp"})


def determinism_suite(
    seed: int, show_progress: bool = False, tol_geom: float = shared.TOL_GEOM, tol_linalg: float = shared.TOL_LINALG
) -> List[Check]:
    first = _pipeline_report(seed, tol_geom, tol_linalg)
    second = _pipeline_report(seed, tol_geom, tol_linalg)
    return [Check("determinism", "identical reports for identical seeds", first == second, f"{len(first)} bytes")]


SUITES: Dict[str, Callable[..., List[Check]]] = {
    "grassmann": grassmann_suite,
    "cones": cones_suite,
    "simplex": simplex_suite,
    "energy": energy_suite,
    "flatness": flatness_suite,
    "search": search_suite,
    "graph": graph_suite,
    "spiral": spiral_suite,
    "determinism": determinism_suite,
}


def run_suites(
    suite: str = "all",
    seed: int = shared.SEED,
    show_progress: bool = False,
    tol_geom: float = shared.TOL_GEOM,
    tol_linalg: float = shared.TOL_LINALG,
) -> SuiteOutcome:
    """Run one named suite, or all of them in order, with the given geometric and linear-algebra tolerances."""
    if suite != "all" and suite not in SUITES:
        raise InvalidParameter(f"Unknown suite {suite!r}; choose 'all' or one of {sorted(SUITES)}.")
    names = list(SUITES) if suite == "all" else [suite]
    outcome = SuiteOutcome()
    for name in names:
        checks = SUITES[name](seed, show_progress, tol_geom, tol_linalg)
        failed = sum(not check.passed for check in checks)
        logger.info("Suite %s: %d checks, %d failed", name, len(checks), failed)
        outcome.checks.extend(checks)
    return outcome
