# simulation/cli_io/main.py
import argparse
import os
from pathlib import Path
from typing import Optional, Sequence

from scipy import fft

from shared.logging.logger import setup_logger
from shared.monitoring.metrics import SimulationMetrics
from .config import ConfigError, parse_config
from .models import ConvergenceSummary
from .selftest import run_selftest
from .utils import (
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_SELFTEST,
    NUMERICAL_ERRORS,
    SimulationRunner,
    spatial_convergence,
    temporal_convergence,
    uniqueness_experiment,
    with_overrides,
    write_report,
)

# Module loggers under "simulation.*" propagate here
logger = setup_logger("simulation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcsh",
        description="Maxwell-Chern-Simons-Higgs evolution in Coulomb gauge on a periodic grid",
    )
    parser.add_argument("--out", help="output directory (overrides [output].directory)")
    parser.add_argument("--seed", type=int, help="random seed (overrides the config seed)")
    parser.add_argument("--threads", type=int, default=int(os.getenv("MCSH_THREADS", 1)),
                        help="FFT worker threads")

    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="evolve one configuration")
    run_parser.add_argument("config")

    convergence_parser = commands.add_parser("convergence", help="temporal and spatial self-convergence")
    convergence_parser.add_argument("config")
    convergence_parser.add_argument("--levels", type=int, default=3)

    uniqueness_parser = commands.add_parser("uniqueness", help="paired runs from perturbed data")
    uniqueness_parser.add_argument("config")
    uniqueness_parser.add_argument("--delta", type=float, required=True)

    commands.add_parser("selftest", help="run the built-in oracle checks")
    return parser


def _load(args):
    config = parse_config(args.config)
    config, out_dir = with_overrides(config, args.out, args.seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    return config, out_dir


def command_run(args) -> int:
    config, out_dir = _load(args)
    metrics = SimulationMetrics(Path(args.config).stem)
    summary = SimulationRunner(config, out_dir, metrics).run()
    if summary.aborted:
        print(f"aborted at t={summary.abort_time:.6g}: {summary.abort_reason}")
    else:
        print(f"completed {summary.steps} steps to t={summary.t_final:.6g} in {summary.wall_time_seconds:.1f}s")
    return summary.exit_code


def command_convergence(args) -> int:
    if args.levels < 3:
        raise ConfigError("--levels", f"convergence needs at least 3 levels, got {args.levels}")
    config, out_dir = _load(args)
    reports = [temporal_convergence(config, args.levels), spatial_convergence(config, args.levels)]
    for report in reports:
        print(f"{report.kind} convergence against {report.reference}:")
        for level in report.levels:
            error = "-" if level.error is None else f"{level.error:.3e}"
            order = "-" if level.observed_order is None else f"{level.observed_order:.2f}"
            print(f"  {level.label:>16}  error {error:>10}  order {order}")
    write_report(out_dir / "convergence.json", ConvergenceSummary(reports=reports))
    return EXIT_OK


def command_uniqueness(args) -> int:
    if args.delta < 0:
        raise ConfigError("--delta", f"delta must be non-negative, got {args.delta}")
    config, out_dir = _load(args)
    report = uniqueness_experiment(config, args.delta)
    write_report(out_dir / "uniqueness.json", report)
    ratio = "-" if report.terminal_ratio is None else f"{report.terminal_ratio:.3f}"
    print(f"delta={report.delta:g}  terminal ratio {ratio}  M(T)={report.M_T}  "
          f"zero-delta identical: {report.zero_delta_identical}")
    if report.valid_until is not None:
        print(f"comparison invalid after t={report.valid_until:.6g}: {report.abort_reason}")
        return EXIT_NUMERICAL
    return EXIT_OK


def command_selftest(args) -> int:
    return EXIT_OK if run_selftest(args.seed or 0) else EXIT_SELFTEST


COMMANDS = {
    "run": command_run,
    "convergence": command_convergence,
    "uniqueness": command_uniqueness,
    "selftest": command_selftest,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logger.info(f"Command {args.command} with {args.threads} FFT worker(s)")
    try:
        with fft.set_workers(max(1, args.threads)):
            return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error(f"Configuration error: {str(e)}")
        print(f"config error: {e}")
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"Output error: {str(e)}")
        print(f"output error: {e}")
        return EXIT_CONFIG
    except NUMERICAL_ERRORS as e:
        logger.error(f"Numerical abort: {type(e).__name__}: {str(e)}")
        print(f"numerical abort: {e}")
        return EXIT_NUMERICAL
