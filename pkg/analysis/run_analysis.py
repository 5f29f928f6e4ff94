"""Analysis-running framework."""
import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

from analysis.util import (
    generator_class_from_kind,
    load_config,
    output_path,
    parse_radii,
    Report,
    setup_cloud_from_args,
    setup_logging,
)
from analysis.verify import run_suites
from menger_energy import energy, flatness
from menger_energy.energy.constants import LEDGER_HEADER
from menger_energy.energy.search import SEARCH_HEADER
from menger_energy.errors import InvalidParameter, MengerError
from menger_energy.flatness.scan import GAP_SCAN_HEADER
from menger_energy.flatness.tangent import TANGENT_HEADER
import menger_energy.metadata.energy as energy_metadata
import menger_energy.metadata.shared as shared
from menger_energy.pointcloud import ahlfors_scan, save_cloud
from menger_energy.simplex import omega, voluminous_eta

logger = logging.getLogger(__name__)

COMMANDS = (
    "generate",
    "energy",
    "beta",
    "theta",
    "gap-scan",
    "ahlfors",
    "tangent",
    "graph",
    "holder",
    "search-simplex",
    "constants",
    "verify",
)

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL, EXIT_SUITE_FAILED = 0, 1, 2, 3


class _ArgumentParser(argparse.ArgumentParser):
    """Argument errors are validation errors, reported with exit code 1."""

    def error(self, message):
        raise InvalidParameter(message)


def _setup_parser(argv: Optional[List[str]] = None) -> argparse.ArgumentParser:
    """Set up Python's ArgumentParser with command, input, solver and generator arguments."""
    parser = _ArgumentParser(add_help=False)
    parser.add_argument("command", type=str, choices=COMMANDS, help="Analysis to run.")

    # Basic arguments
    parser.add_argument("--input", type=str, default=None, help="Point cloud CSV file or URI.")
    parser.add_argument(
        "--kind",
        type=str,
        default=None,
        help="Generate the cloud instead of reading it: a generator kind such as sphere, or a module.Class path.",
    )
    parser.add_argument(
        "--output", type=str, default=None, help="Directory for the JSON report and CSV tables. Default is stdout."
    )
    parser.add_argument("--config", type=str, default=None, help="TOML run config; command-line flags override it.")
    parser.add_argument("--seed", type=int, default=shared.SEED, help=f"Random seed. Default is {shared.SEED}.")
    parser.add_argument("--threads", type=int, default=1, help="Worker threads for scans and energies. Default is 1.")
    parser.add_argument("--verbose", action="store_true", default=False, help="Log at INFO level.")
    parser.add_argument(
        "--log-json", "--log_json", dest="log_json", action="store_true", default=False, help="Log as JSON lines."
    )
    parser.add_argument("--progress", action="store_true", default=False, help="Show progress bars.")
    parser.add_argument(
        "--tol_linalg",
        type=float,
        default=shared.TOL_LINALG,
        help=f"Rank and degeneracy tolerance for simplices and frames. Default is {shared.TOL_LINALG}.",
    )
    parser.add_argument(
        "--tol_geom",
        type=float,
        default=shared.TOL_GEOM,
        help=f"Slack for closed balls and geometric checks. Default is {shared.TOL_GEOM}.",
    )

    # Analysis arguments
    parser.add_argument("--m", type=int, default=None, help="Intrinsic dimension.")
    parser.add_argument("--p", type=float, default=None, help="Energy exponent, p > m(m+2).")
    parser.add_argument("--E", type=float, default=None, help="Energy bound for the constants ledger.")
    parser.add_argument(
        "--delta", type=float, default=energy_metadata.SEARCH_DELTA, help="Cone parameter δ. Default is 0.25."
    )
    parser.add_argument("--radius", type=float, default=None, help="Analysis radius.")
    parser.add_argument("--radii", type=str, default=None, help="Radii as 'lo:hi:steps', log-spaced.")
    parser.add_argument("--point-index", "--point_index", dest="point_index", type=int, default=0)
    parser.add_argument("--centers", type=int, default=20, help="Sampled centers for gap scans. Default is 20.")
    parser.add_argument("--resolution", type=float, default=None, help="Graph lattice spacing. Default is R/20.")
    parser.add_argument("--method", type=str, choices=("brute", "mc"), default="brute", help="Default is brute.")
    parser.add_argument(
        "--samples",
        type=int,
        default=energy_metadata.MC_SAMPLES,
        help=f"Monte Carlo tuples. Default is {energy_metadata.MC_SAMPLES}.",
    )
    parser.add_argument("--batch", type=int, default=energy_metadata.MC_BATCH)
    parser.add_argument("--max_tuples", type=int, default=energy_metadata.BRUTE_MAX_TUPLES)
    parser.add_argument("--point_tol", type=float, default=energy_metadata.SEARCH_POINT_TOL)
    parser.add_argument("--max_stages", type=int, default=energy_metadata.SEARCH_MAX_STAGES)
    parser.add_argument("--M_sigma", type=float, default=energy_metadata.M_SIGMA)
    parser.add_argument("--A_sigma", type=float, default=None, help="Ahlfors constant. Default is scanned or analytic.")
    parser.add_argument("--suite", type=str, default="all", help="Property suite for verify. Default is all.")
    parser.add_argument("--set_radius", type=float, default=None, help="Radius of the generated set. Default is 1.0.")

    # Get the generator class, so that we can add its specific arguments
    temp_args, _ = parser.parse_known_args(argv)
    if temp_args.kind is not None:
        generator_group = parser.add_argument_group("Generator Args")
        generator_class_from_kind(temp_args.kind).add_to_argparse(generator_group)

    beta_group = parser.add_argument_group("Beta Solver Args")
    flatness.BetaSolver.add_to_argparse(beta_group)
    theta_group = parser.add_argument_group("Theta Solver Args")
    flatness.ThetaSolver.add_to_argparse(theta_group)

    parser.add_argument("--help", "-h", action="help")
    return parser


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Built-in defaults, then the config file, then the command line."""
    parser = _setup_parser(argv)
    args = parser.parse_args(argv)
    if args.config is not None:
        parser.set_defaults(**load_config(args.config))
        args = parser.parse_args(argv)
    if args.threads < 1:
        raise InvalidParameter(f"--threads must be at least 1, got {args.threads}.")
    return args


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [name for name in names if getattr(args, name) is None]
    if missing:
        raise InvalidParameter(f"{args.command} needs {', '.join('--' + name for name in missing)}.")


def _radii(args: argparse.Namespace) -> List[float]:
    radii = parse_radii(args.radii)
    if radii is None:
        _require(args, "radius")
        radii = [args.radius]
    return radii


def _center(args: argparse.Namespace, cloud):
    if not 0 <= args.point_index < len(cloud):
        raise InvalidParameter(f"--point-index {args.point_index} is outside [0, {len(cloud)}).")
    return cloud.points[args.point_index]


def run_generate(args, report):
    _require(args, "kind")
    cloud = setup_cloud_from_args(args)
    if args.output is not None:
        save_cloud(cloud, output_path(args.output, "cloud.csv"))
    report.results = cloud.to_dict()
    report.diagnostics = {"diameter": cloud.diameter}


def run_energy(args, report):
    _require(args, "p")
    cloud = setup_cloud_from_args(args)
    if args.method == "brute":
        restrict = (_center(args, cloud), args.radius) if args.radius is not None else None
        estimate = energy.energy_brute(
            cloud,
            args.p,
            restrict_ball=restrict,
            max_tuples=args.max_tuples,
            threads=args.threads,
            show_progress=args.progress,
            tol=args.tol_linalg,
        )
    else:
        estimate = energy.energy_mc(
            cloud,
            args.p,
            samples=args.samples,
            seed=args.seed,
            batch=args.batch,
            threads=args.threads,
            show_progress=args.progress,
            tol=args.tol_linalg,
        )
    report.results = estimate.to_dict()
    report.diagnostics = {"cloud": cloud.to_dict()}


def run_beta(args, report):
    cloud = setup_cloud_from_args(args)
    x = _center(args, cloud)
    solver = flatness.BetaSolver(args)
    results = [flatness.beta_at(cloud, x, r, solver) for r in _radii(args)]
    report.results = {"center": x, "flatness": [result.to_dict() for result in results]}
    report.add_table(
        "beta",
        ["radius", "point_count", "beta_bar", "beta_open"],
        [[result.radius, result.point_count, result.beta_bar, result.beta_open] for result in results],
    )


def run_theta(args, report):
    cloud = setup_cloud_from_args(args)
    x = _center(args, cloud)
    beta_solver, theta_solver = flatness.BetaSolver(args), flatness.ThetaSolver(args)
    results = [flatness.flatness_at(cloud, x, r, beta_solver, theta_solver) for r in _radii(args)]
    report.results = {"center": x, "flatness": [result.to_dict() for result in results]}
    report.add_table(
        "theta",
        ["radius", "point_count", "beta_bar", "beta_open", "theta_bar", "theta_open"],
        [[r.radius, r.point_count, r.beta_bar, r.beta_open, r.theta_bar, r.theta_open] for r in results],
    )


def run_gap_scan(args, report):
    cloud = setup_cloud_from_args(args)
    scan = flatness.gap_ratio_scan(
        cloud,
        _radii(args),
        centers=args.centers,
        seed=args.seed,
        beta_solver=flatness.BetaSolver(args),
        theta_solver=flatness.ThetaSolver(args),
        threads=args.threads,
        show_progress=args.progress,
    )
    report.results = scan.to_dict()
    report.add_table("pairs", GAP_SCAN_HEADER, scan.rows)


def run_ahlfors(args, report):
    cloud = setup_cloud_from_args(args)
    scan = ahlfors_scan(cloud, _radii(args), seed=args.seed)
    report.results = scan.to_dict()
    report.diagnostics = {"admissible_constant": (1 - args.delta**2) ** (cloud.m / 2) * omega(cloud.m)}
    report.add_table("ratios", ["radius", "min_ratio", "worst_point"], scan.rows())


def run_tangent(args, report):
    _require(args, "radius")
    cloud = setup_cloud_from_args(args)
    x = _center(args, cloud)
    estimate = flatness.tangent_plane(cloud, x, flatness.radius_schedule(args.radius), flatness.BetaSolver(args))
    mock = flatness.mock_tangent_check(cloud, x, estimate.tangent, args.delta, estimate.radii)
    report.results = estimate.to_dict()
    report.diagnostics = {"mock_tangent": mock.to_dict()}
    report.add_table("schedule", TANGENT_HEADER, estimate.rows())


def _graph_patch(args, cloud):
    _require(args, "radius")
    resolution = args.resolution if args.resolution is not None else args.radius / 20
    return flatness.graph_extract(
        cloud, _center(args, cloud), args.radius, resolution, solver=flatness.BetaSolver(args)
    )


def run_graph(args, report):
    cloud = setup_cloud_from_args(args)
    patch = _graph_patch(args, cloud)
    report.results = patch.to_dict()
    report.diagnostics = {"derivative_angles": flatness.check_derivative_angles(patch, tol=args.tol_geom).to_dict()}
    report.add_table("nodes", patch.header(), patch.rows())


def run_holder(args, report):
    cloud = setup_cloud_from_args(args)
    patch = _graph_patch(args, cloud)
    fit = flatness.holder_exponent(patch)
    report.results = fit.to_dict()
    report.diagnostics = {"patch": patch.to_dict()}
    if cloud.m * (cloud.m + 2) < (args.p or 0):
        report.diagnostics["optimal_exponent"] = energy.exponents(cloud.m, args.p).alpha


def run_search_simplex(args, report):
    cloud = setup_cloud_from_args(args)
    result = energy.voluminous_search(
        cloud,
        args.point_index,
        delta=args.delta,
        point_tol=args.point_tol,
        max_stages=args.max_stages,
        solver=flatness.BetaSolver(args),
    )
    x = cloud.points[args.point_index]
    report.results = result.to_dict()
    report.diagnostics = {
        "coverage": {
            f"{fraction}d": energy.big_projection_check(cloud, x, fraction * result.d, result.tangent, args.delta)
            for fraction in (0.25, 0.5)
        }
    }
    if args.E is not None and args.p is not None:
        A_sigma = args.A_sigma
        if A_sigma is None:
            A_sigma = float(ahlfors_scan(cloud, [0.25 * result.d], seed=args.seed).min_ratio[0])
        balance = energy.balance_check(
            voluminous_eta(result.simplex, result.d), result.d, args.E, A_sigma, cloud.m, args.p, args.tol_geom
        )
        report.diagnostics["balance"] = {**balance.to_dict(), "A_sigma": A_sigma}
    report.add_table("stages", SEARCH_HEADER, [[s.stage, s.rho, s.case, s.apex] for s in result.stages])


def run_constants(args, report):
    _require(args, "E", "m", "p")
    ledger = energy.constants_ledger(args.E, args.m, args.p, args.delta, M_sigma=args.M_sigma, A_sigma=args.A_sigma)
    report.results = ledger.to_dict()
    report.add_table("ledger", LEDGER_HEADER, energy.ledger_rows(ledger))


def run_verify(args, report):
    outcome = run_suites(
        args.suite, seed=args.seed, show_progress=args.progress, tol_geom=args.tol_geom, tol_linalg=args.tol_linalg
    )
    report.results = outcome.to_dict()
    report.add_table("checks", outcome.header, outcome.rows())
    return EXIT_OK if outcome.passed else EXIT_SUITE_FAILED


RUNNERS: Dict[str, Callable] = {
    "generate": run_generate,
    "energy": run_energy,
    "beta": run_beta,
    "theta": run_theta,
    "gap-scan": run_gap_scan,
    "ahlfors": run_ahlfors,
    "tangent": run_tangent,
    "graph": run_graph,
    "holder": run_holder,
    "search-simplex": run_search_simplex,
    "constants": run_constants,
    "verify": run_verify,
}

# arguments echoed as `params` in each report
PARAMS = {
    "generate": ("kind", "m", "n", "num_points", "set_radius", "seed"),
    "energy": ("input", "kind", "p", "method", "samples", "batch", "seed", "radius", "point_index"),
    "beta": ("input", "kind", "point_index", "radius", "radii"),
    "theta": ("input", "kind", "point_index", "radius", "radii"),
    "gap-scan": ("input", "kind", "radius", "radii", "centers", "seed"),
    "ahlfors": ("input", "kind", "radius", "radii", "seed", "delta"),
    "tangent": ("input", "kind", "point_index", "radius", "delta"),
    "graph": ("input", "kind", "point_index", "radius", "resolution"),
    "holder": ("input", "kind", "point_index", "radius", "resolution", "p"),
    "search-simplex": ("input", "kind", "point_index", "delta", "point_tol", "max_stages", "E", "p"),
    "constants": ("E", "m", "p", "delta", "M_sigma", "A_sigma"),
    "verify": ("suite", "seed"),
}


def run(args: argparse.Namespace) -> int:
    """Run one command and write its report; returns the exit status."""
    config = {key: value for key, value in sorted(vars(args).items()) if key != "output"}
    report = Report(args.command, {key: getattr(args, key, None) for key in PARAMS[args.command]}, config)
    status = RUNNERS[args.command](args, report)
    report.write(args.output)
    return EXIT_OK if status is None else status


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run an analysis.

    Sample command:
    ```
    python analysis/run_analysis.py energy --kind sphere --num_points 2000 --p 16 --method mc --output reports/sphere
    ```

    The available command line args differ depending on --kind; to see the generator args, provide the kind
    before invoking --help, like so:
    ```
    python analysis/run_analysis.py generate --kind torus --help
    ```
    """
    try:
        args = parse_args(argv)
        setup_logging(args.verbose, args.log_json)
        return run(args)
    except MengerError as exception:
        logger.error("%s: %s", type(exception).__name__, exception)
        sys.stderr.write(f"error: {exception}\n")
        return EXIT_INVALID
    except Exception:  # noqa: B902
        logger.exception("Internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
