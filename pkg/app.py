# app.py

import argparse
import logging
import sys
import time
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

import config
from certificates import B_bound, certify, decay_rate_estimate
from checks import run_property_battery
from equilibrium import assemble_equilibrium, interaction_residuals, lotka_sharpe_residuals, open_loop_eigenvalues
from ingest import load_config, load_profiles
from model.errors import CertificateError, ConfigError, SimulationGuardError
from reports import CsvStore, RunManifest, append_manifest, config_hash
from simulation import underpopulated_profiles, run_closed_loop
from simulation.base.interfaces import Trajectory
from transform import P_functional, boundary_residual, forward_transform

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_GUARD = 2
EXIT_CERTIFICATE = 3

TRAJECTORY_HEADER = ["t", "eta1", "eta2", "u", "V", "G1", "G2", "psi_sup1", "psi_sup2"]
BCURVE_BETAS = np.geomspace(0.01, 100.0, 401)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _snapshot_list(raw: str) -> List[float]:
    try:
        return [float(t) for t in raw.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"snapshots must be comma-separated times, got {raw!r}")


def build_parser(settings: Optional[config.Settings] = None) -> argparse.ArgumentParser:
    settings = settings or config.Settings()
    common = _Parser(add_help=False)
    common.add_argument("--config", default=settings.config_path, help="Run configuration file")
    common.add_argument("--out", default=settings.output_dir, help="Output directory for CSV files")

    parser = _Parser(prog="agestruct", description="Age-structured two-species harvesting control")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("equilibrium", parents=[common], help="Solve the steady state")

    p = sub.add_parser("transform", parents=[common], help="Map profiles to (eta, psi)")
    p.add_argument("--ic-file", help="CSV with columns a, x1, x2 (default: underpopulated example)")

    p = sub.add_parser("simulate", parents=[common], help="Run the closed loop")
    p.add_argument("--solver", choices=["ipde", "odeide"])
    p.add_argument("--open-loop", action="store_true", help="Hold u at u* instead of the feedback")
    p.add_argument("--ic", choices=["paper", "underpopulated", "equilibrium", "file"], default="paper",
                   help="Initial condition (underpopulated is an alias of paper)")
    p.add_argument("--ic-file", help="CSV with columns a, x1, x2 for --ic file")
    p.add_argument("--snapshots", type=_snapshot_list)
    p.add_argument("--t-final", type=float)
    p.add_argument("--feedback", choices=["state", "output"])

    p = sub.add_parser("certify", parents=[common], help="Lyapunov weights and region of attraction")
    p.add_argument("--resolution", type=int, help="Points per axis of the eta-plane scan")

    p = sub.add_parser("reproduce-figures", parents=[common], help="Emit all figure data as CSV")
    p.add_argument("--resolution", type=int)

    p = sub.add_parser("check", parents=[common], help="Run the property battery")
    p.add_argument("--seed", type=int, default=0, help="Seed of the random initial-condition battery")
    p.add_argument("--resolution", type=int)
    p.add_argument("--quick", action="store_true", help="Half grid and a shorter random battery")
    return parser


def _roa_options(args) -> dict:
    return {} if getattr(args, "resolution", None) is None else {"resolution": args.resolution}


def write_trajectory(store: CsvStore, traj: Trajectory, grid) -> None:
    d = traj.diagnostics
    store.write("trajectory.csv", TRAJECTORY_HEADER, [
        traj.times, traj.eta_series[:, 0], traj.eta_series[:, 1], traj.u_series,
        d["V"], d["G1"], d["G2"], d["psi_sup1"], d["psi_sup2"],
    ])
    for t, (x1, x2) in sorted(traj.profile_snapshots.items()):
        store.write(f"profile_t{t:g}.csv", ["a", "x1", "x2"], [grid.ages, x1, x2])


def write_figure_data(store: CsvStore, estimate) -> None:
    store.write("bcurve.csv", ["beta", "B"], [BCURVE_BETAS, [B_bound(b) for b in BCURVE_BETAS]])
    scan = estimate.scan
    eta_1, eta_2 = np.meshgrid(scan.axis, scan.axis)
    store.write("roa.csv", ["eta1", "eta2", "V3", "in_D", "u"],
                [eta_1, eta_2, scan.V3, scan.in_D.astype(float), scan.u])


def cmd_equilibrium(args, model, store: CsvStore) -> int:
    eq = assemble_equilibrium(model)
    ls = lotka_sharpe_residuals(eq)
    inter = interaction_residuals(eq)
    growth, decay = open_loop_eigenvalues(eq)
    print(f"✅ zeta    = ({eq.zeta_1:.12g}, {eq.zeta_2:.12g})")
    print(f"   lambda  = ({eq.lambda_1:.12g}, {eq.lambda_2:.12g})")
    print(f"   x*(0)   = ({eq.x0_1:.12g}, {eq.x0_2:.12g})")
    print(f"   u*      = {eq.u_star:.12g}")
    print(f"   open-loop eigenvalues = ({growth:.12g}, {decay:.12g})")
    print(f"   residuals: Lotka-Sharpe {max(map(abs, ls)):.2e}, interaction {max(map(abs, inter)):.2e}")
    store.write("equilibrium.csv", ["a", "x1_star", "x2_star", "survival_1", "survival_2"],
                [eq.grid.ages, eq.profile_1, eq.profile_2, eq.survival_1, eq.survival_2])
    return EXIT_OK


def cmd_transform(args, model, store: CsvStore) -> int:
    eq = assemble_equilibrium(model)
    profiles = load_profiles(args.ic_file, eq.grid) if args.ic_file else underpopulated_profiles(eq)
    state = forward_transform(eq, *profiles)
    print(f"✅ eta = ({state.eta_1:.12g}, {state.eta_2:.12g})")
    for i in (1, 2):
        print(f"   species {i}: P(psi) = {P_functional(eq, i, state.psi(i)):.3e}, "
              f"boundary residual = {boundary_residual(eq, i, state.psi(i)):.3e}")
    store.write("psi.csv", ["a", "psi1", "psi2"], [eq.grid.ages, state.psi_1, state.psi_2])
    return EXIT_OK


def _simulate(args, model, store: CsvStore) -> Trajectory:
    eq = assemble_equilibrium(model)
    ic = getattr(args, "ic", "paper")
    options = dict(
        solver=getattr(args, "solver", None),
        open_loop=getattr(args, "open_loop", False),
        feedback=getattr(args, "feedback", None),
        snapshots=getattr(args, "snapshots", None),
        t_final=getattr(args, "t_final", None),
        eq=eq,
    )
    if ic == "file":
        if not args.ic_file:
            raise UsageError("--ic file needs --ic-file")
        options["profiles"] = load_profiles(args.ic_file, eq.grid)
        ic = "profiles"
    try:
        traj = run_closed_loop(model, ic, **options)
    except SimulationGuardError as e:
        if e.trajectory is not None:
            write_trajectory(store, e.trajectory, eq.grid)
        raise
    write_trajectory(store, traj, eq.grid)
    print(f"✅ {traj.solver}: |eta(T)| = {np.linalg.norm(traj.final_eta):.3e}, "
          f"u(T) = {traj.u_series[-1]:.12g} (u* = {eq.u_star:.12g}), min u = {np.min(traj.u_series):.6g}")
    if np.min(traj.u_series) <= 0.0:
        print("⚠️  harvesting rate was not positive along the whole run")
    return traj


def cmd_simulate(args, model, store: CsvStore) -> int:
    _simulate(args, model, store)
    return EXIT_OK


def cmd_certify(args, model, store: CsvStore) -> int:
    eq = assemble_equilibrium(model)
    gains = model.gains
    cert, estimate = certify(eq, gains, model.sigma_1, model.sigma_2, model.gamma_slack, **_roa_options(args))
    rate = decay_rate_estimate(gains, cert.sigma_1, cert.sigma_2, eq.lambda_2, epsilon=0.1)
    print(f"✅ kappa   = ({cert.kappa_1:.10g}, {cert.kappa_2:.10g})")
    print(f"   sigma   = ({cert.sigma_1:.10g}, {cert.sigma_2:.10g})")
    print(f"   gamma   = ({cert.gamma_1:.10g}, {cert.gamma_2:.10g})")
    print(f"   H       = ({cert.H1:.10g}, {cert.H2:.10g})")
    print(f"   B(1) = {cert.B1:.12g}, B(theta) = {cert.Btheta:.12g}")
    print(f"   c_star = {cert.c_star:.12g}, c0_star = {cert.c0_star:.12g}")
    print(f"   decay estimate (epsilon = 0.1) = {rate:.10g}")
    if not estimate.contour_closed:
        print("⚠️  u = 0 contour does not close against the scan box")
    write_figure_data(store, estimate)
    return EXIT_OK


def cmd_reproduce(args, model, store: CsvStore) -> int:
    eq = assemble_equilibrium(model)
    _, estimate = certify(eq, model.gains, model.sigma_1, model.sigma_2, model.gamma_slack, **_roa_options(args))
    write_figure_data(store, estimate)
    _simulate(args, model, store)
    return EXIT_OK


def cmd_check(args, model, store: CsvStore) -> int:
    results = run_property_battery(model, seed=args.seed, quick=args.quick, resolution=args.resolution)
    width = max(len(r.name) for r in results)
    for r in results:
        mark = "✅" if r.passed else "❌"
        print(f"{mark} {r.name:<{width}}  {r.detail}  ({r.seconds:.1f}s)")
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"❌ {len(failed)} of {len(results)} properties failed", file=sys.stderr)
        return EXIT_CERTIFICATE
    return EXIT_OK


COMMANDS: Dict[str, Callable] = {
    "equilibrium": cmd_equilibrium,
    "transform": cmd_transform,
    "simulate": cmd_simulate,
    "certify": cmd_certify,
    "reproduce-figures": cmd_reproduce,
    "check": cmd_check,
}


def _fail(kind: str, message: str, code: int) -> int:
    print(f"❌ {kind}: {message}", file=sys.stderr)
    return code


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit code."""
    try:
        args = build_parser(config.get_settings()).parse_args(argv)
    except UsageError as e:
        return _fail("usage", str(e), EXIT_USAGE)
    except ConfigError as e:
        return _fail("config", str(e), EXIT_USAGE)
    except SystemExit as e:
        return int(e.code or 0)

    started = time.perf_counter()
    store = CsvStore(args.out)
    try:
        model = load_config(args.config)
        code = COMMANDS[args.command](args, model, store)
    except UsageError as e:
        return _fail("usage", str(e), EXIT_USAGE)
    except ConfigError as e:
        return _fail("config", str(e), EXIT_USAGE)
    except SimulationGuardError as e:
        return _fail("simulation", str(e), EXIT_GUARD)
    except CertificateError as e:
        return _fail("certificate", str(e), EXIT_CERTIFICATE)
    except (ValueError, RuntimeError, ArithmeticError) as e:
        logger.debug("%s failed", args.command, exc_info=True)
        return _fail(type(e).__name__, str(e), EXIT_USAGE)

    parameters = {k: v for k, v in vars(args).items() if k != "command"}
    append_manifest(args.out, RunManifest(
        config_hash=config_hash(args.config),
        subcommand=args.command,
        parameters=parameters,
        outputs=store.written,
        wall_time=time.perf_counter() - started,
    ))
    return code


def main() -> None:
    try:
        level = config.get_settings().log_level
    except ConfigError:
        level = "WARNING"
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
