import json
import logging
import math
import platform
import time
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pydantic
import scipy

from shared.monitoring.metrics import SimulationMetrics
from simulation.diagnostics import (
    SCHEMA_VERSION,
    XAccumulator,
    data_norm_J0,
    difference_norm,
    make_record,
    record_columns,
)
from simulation.dynamics import (
    DEFAULT_CFL,
    FieldState,
    NonFiniteStateError,
    make_initial_data,
    perturb,
    step,
)
from simulation.elliptic import EllipticSolveError
from simulation.grid import Grid, resample
from simulation.potential import PotentialSpec, bounded_below_hint
from .models import (
    ConvergenceLevel,
    ConvergenceReport,
    RunConfig,
    RunSummary,
    UniquenessReport,
    UniquenessSample,
)
from .snapshot import SnapshotError, write_snapshot
from .timeseries import TimeseriesWriter

logger = logging.getLogger("simulation.cli_io")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_SELFTEST = 4

NUMERICAL_ERRORS = (NonFiniteStateError, EllipticSolveError)
UNIQUENESS_RATIO_BAND = (1.8, 2.2)


def check_config(config: RunConfig, spec: PotentialSpec, dt: float):
    """Soft validation: findings are logged, never raised."""
    grid = config.grid
    if config.integrator.t_end >= min(grid.lx, grid.ly) / 2:
        logger.warning(
            f"t_end={config.integrator.t_end} reaches half the torus size; signals may wrap around"
        )
    limit = DEFAULT_CFL * min(grid.dx, grid.dy)
    if dt > limit:
        logger.warning(f"Step dt={dt:.4g} exceeds the CFL limit {limit:.4g}; the run may become unstable")
    if not bounded_below_hint(spec):
        logger.warning("Potential may be unbounded below; energy is not guaranteed to be bounded")


def evolve(state: FieldState, n_steps: int, dt: float, config: RunConfig, spec: PotentialSpec) -> FieldState:
    for _ in range(n_steps):
        state = step(state, dt, spec, config.elliptic, config.integrator.dt_a0_method)
    return state


def _versions() -> Dict[str, str]:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pydantic": pydantic.__version__,
    }


def _write_json(path: Path, payload: dict):
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, default=str)


class SimulationRunner:
    def __init__(self, config: RunConfig, out_dir: Optional[Path] = None,
                 metrics: Optional[SimulationMetrics] = None):
        self.config = config
        self.out_dir = Path(out_dir or config.output.directory)
        self.metrics = metrics or SimulationMetrics("run")
        self.spec = config.potential.to_spec()
        self.n_steps, self.dt = config.integrator.schedule(config.grid)

    def prepare_output(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def initial_state(self) -> FieldState:
        return make_initial_data(
            self.config.initial_data, self.config.grid, self.spec, self.config.elliptic, self.config.seed
        )

    def run(self) -> RunSummary:
        config = self.config
        start = time.perf_counter()
        self.prepare_output()
        check_config(config, self.spec, self.dt)
        logger.info(f"Starting run: {self.n_steps} steps of dt={self.dt:.6g} to t={config.integrator.t_end}")

        columns = record_columns(config.diagnostics.hs_exponents)
        accumulator = XAccumulator()
        steps_done = 0
        state = None
        summary = None

        with TimeseriesWriter(self.out_dir / "timeseries.csv", columns) as writer:
            try:
                state = self.initial_state()
                initial_J0 = data_norm_J0(state)
                self._sample(writer, state, accumulator, initial_J0)

                for i in range(1, self.n_steps + 1):
                    with self.metrics.track_time():
                        state = step(state, self.dt, self.spec, config.elliptic, config.integrator.dt_a0_method)
                    steps_done = i
                    self.metrics.track_step(state.solve_report.iterations if state.solve_report else None)

                    if i % config.integrator.sample_every == 0 or i == self.n_steps:
                        self._sample(writer, state, accumulator, initial_J0)
                    if config.output.snapshot_every and i % config.output.snapshot_every == 0:
                        write_snapshot(state, self.out_dir)

                if config.output.final_snapshot:
                    write_snapshot(state, self.out_dir)
                summary = RunSummary(exit_code=EXIT_OK, steps=steps_done, t_final=state.t)
            except SnapshotError as e:
                logger.error(f"Initial data unavailable: {str(e)}")
                self.metrics.track_abort(type(e).__name__)
                summary = RunSummary(
                    exit_code=EXIT_CONFIG, steps=0, t_final=0.0,
                    aborted=True, abort_reason=f"{type(e).__name__}: {e}", abort_time=0.0,
                )
            except NUMERICAL_ERRORS as e:
                error_type = type(e).__name__
                abort_time = getattr(e, "t", None)
                if abort_time is None:
                    abort_time = state.t + self.dt if state is not None else 0.0
                logger.error(f"Run aborted after {steps_done} steps: {error_type}: {e}")
                self.metrics.track_abort(error_type)
                summary = RunSummary(
                    exit_code=EXIT_NUMERICAL, steps=steps_done,
                    t_final=state.t if state is not None else 0.0,
                    aborted=True, abort_reason=f"{error_type}: {e}", abort_time=abort_time,
                )

        summary = summary.model_copy(update={"wall_time_seconds": time.perf_counter() - start})
        self._write_meta(summary)
        self.metrics.write(self.out_dir / "metrics.prom")
        logger.info(f"Run finished with exit code {summary.exit_code} after {summary.steps} steps")
        return summary

    def _sample(self, writer: TimeseriesWriter, state: FieldState, accumulator: XAccumulator, initial_J0: float):
        record = make_record(state, self.spec, accumulator, initial_J0, self.config.diagnostics.hs_exponents)
        if not record.is_finite():
            logger.warning(f"Non-finite diagnostics at t={state.t:.6g}")
        writer.write(record)
        self.metrics.track_sample(record.energy_total, record.gauge_residual)

    def _write_meta(self, summary: RunSummary):
        _write_json(self.out_dir / "run.meta", {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.model_dump(mode="json"),
            "dt": self.dt,
            "steps_planned": self.n_steps,
            "dt_a0_method": self.config.integrator.dt_a0_method.value,
            "dt_a0_is_estimate": self.config.integrator.dt_a0_method.value == "lagged",
            "versions": _versions(),
            "summary": summary.model_dump(mode="json"),
        })


def _observed_orders(levels: List[ConvergenceLevel], ratio: float, floor: float) -> List[ConvergenceLevel]:
    out = []
    for i, level in enumerate(levels):
        order = None
        if i + 1 < len(levels):
            e0, e1 = level.error, levels[i + 1].error
            if e0 is not None and e1 is not None and e0 > floor and e1 > floor:
                order = math.log(e0 / e1) / math.log(ratio)
        out.append(level.model_copy(update={"observed_order": order}))
    return out


def temporal_convergence(config: RunConfig, levels: int) -> ConvergenceReport:
    """Errors of dt, dt/2, ... against the finest step, all at t_end."""
    if levels < 3:
        raise ValueError(f"convergence needs at least 3 levels, got {levels}")
    spec = config.potential.to_spec()
    base_steps, _ = config.integrator.schedule(config.grid)
    initial = make_initial_data(config.initial_data, config.grid, spec, config.elliptic, config.seed)

    finals = []
    for level in range(levels):
        n_steps = base_steps * 2**level
        dt = config.integrator.t_end / n_steps
        logger.info(f"Temporal level {level}: {n_steps} steps of dt={dt:.6g}")
        finals.append((dt, evolve(initial, n_steps, dt, config, spec)))

    reference = finals[-1][1]
    rows = [
        ConvergenceLevel(
            label=f"dt={dt:.6g}", parameter=dt,
            error=difference_norm(state, reference) if i < levels - 1 else None,
        )
        for i, (dt, state) in enumerate(finals)
    ]
    scale = max(difference_norm(reference, FieldState.zeros(reference.grid, reference.t)), 1.0)
    return ConvergenceReport(kind="temporal", levels=_observed_orders(rows, 2.0, 1e-14 * scale),
                             reference=rows[-1].label)


def _on_grid(state: FieldState, target: Grid) -> FieldState:
    if state.grid == target:
        return state
    return FieldState(grid=target, t=state.t, **{
        name: resample(value, state.grid, target) for name, value in state.arrays().items()
    })


def spatial_convergence(config: RunConfig, levels: int) -> ConvergenceReport:
    """Errors of nx, 2nx, ... against the finest grid at a common dt."""
    if levels < 3:
        raise ValueError(f"convergence needs at least 3 levels, got {levels}")
    spec = config.potential.to_spec()
    grids = [
        Grid(nx=config.grid.nx * 2**level, ny=config.grid.ny * 2**level, lx=config.grid.lx, ly=config.grid.ly)
        for level in range(levels)
    ]
    finest = grids[-1]
    n_steps, dt = config.integrator.schedule(finest)

    finals = []
    for grid in grids:
        logger.info(f"Spatial level {grid.nx}x{grid.ny}: {n_steps} steps of dt={dt:.6g}")
        initial = make_initial_data(config.initial_data, grid, spec, config.elliptic, config.seed)
        final = evolve(initial, n_steps, dt, config, spec)
        finals.append((grid, _on_grid(final, finest)))

    reference = finals[-1][1]
    rows = [
        ConvergenceLevel(
            label=f"{grid.nx}x{grid.ny}", parameter=grid.dx,
            error=difference_norm(state, reference) if i < levels - 1 else None,
        )
        for i, (grid, state) in enumerate(finals)
    ]
    scale = max(difference_norm(reference, FieldState.zeros(finest, reference.t)), 1.0)
    return ConvergenceReport(kind="spatial", levels=_observed_orders(rows, 2.0, 1e-12 * scale),
                             reference=rows[-1].label)


def uniqueness_experiment(config: RunConfig, delta: float) -> UniquenessReport:
    """Lockstep runs from data perturbed by 0, delta/2 and delta.

    A second unperturbed run checks bit-identical determinism. After any
    run aborts, the comparisons it enters are marked invalid.
    """
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    spec = config.potential.to_spec()
    n_steps, dt = config.integrator.schedule(config.grid)
    base = make_initial_data(config.initial_data, config.grid, spec, config.elliptic, config.seed)

    names = ("reference", "zero", "half", "full")
    amplitudes = {"reference": 0.0, "zero": 0.0, "half": delta / 2, "full": delta}
    states: Dict[str, Optional[FieldState]] = {
        name: perturb(base, amplitudes[name], config.seed, spec, config.elliptic) for name in names
    }
    valid_until = None
    abort_reason = None

    def sample() -> UniquenessSample:
        ref = states["reference"]
        t = ref.t if ref is not None else valid_until

        def diff(name):
            if ref is None or states[name] is None:
                return None
            return difference_norm(states[name], ref)

        return UniquenessSample(t=t, difference_half=diff("half"), difference_full=diff("full"),
                                difference_zero=diff("zero"))

    samples = [sample()]
    for i in range(1, n_steps + 1):
        for name in names:
            if states[name] is None:
                continue
            try:
                states[name] = step(states[name], dt, spec, config.elliptic, config.integrator.dt_a0_method)
            except NUMERICAL_ERRORS as e:
                logger.error(f"Uniqueness run {name} aborted at step {i}: {type(e).__name__}: {e}")
                states[name] = None
                if valid_until is None:
                    valid_until = (i - 1) * dt
                    abort_reason = f"{name}: {type(e).__name__}: {e}"
        if states["reference"] is None:
            break
        if i % config.integrator.sample_every == 0 or i == n_steps:
            samples.append(sample())

    valid = [s for s in samples if s.difference_full is not None and s.difference_half is not None]
    terminal_ratio = None
    if valid and valid[-1].difference_half > 0:
        terminal_ratio = valid[-1].difference_full / valid[-1].difference_half
    low, high = UNIQUENESS_RATIO_BAND
    full_values = [s.difference_full for s in samples if s.difference_full is not None]
    zero_identical = (
        states["zero"] is not None and states["reference"] is not None
        and states["zero"].bit_equal(states["reference"])
        and all(s.difference_zero == 0.0 for s in samples if s.difference_zero is not None)
    )
    return UniquenessReport(
        delta=delta,
        samples=samples,
        terminal_ratio=terminal_ratio,
        ratio_in_band=None if terminal_ratio is None else low <= terminal_ratio <= high,
        M_T=max(full_values) if full_values else None,
        zero_delta_identical=zero_identical,
        valid_until=valid_until,
        abort_reason=abort_reason,
    )


def write_report(path: Path, report: pydantic.BaseModel):
    _write_json(path, report.model_dump(mode="json"))


def with_overrides(config: RunConfig, out: Optional[str], seed: Optional[int]) -> Tuple[RunConfig, Path]:
    updates = {}
    if seed is not None:
        updates["seed"] = seed
    if out is not None:
        updates["output"] = config.output.model_copy(update={"directory": out})
    config = config.model_copy(update=updates) if updates else config
    return config, Path(config.output.directory)
