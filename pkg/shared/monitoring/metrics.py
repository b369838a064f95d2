from prometheus_client import CollectorRegistry, Counter, Gauge, Histogram, generate_latest, write_to_textfile
from contextlib import contextmanager
import time


class SimulationMetrics:
    def __init__(self, run_name):
        # One registry per run so repeated runs in a process do not collide
        self.registry = CollectorRegistry()
        self.run_name = run_name

        self.step_count = Counter(
            'mcsh_steps_total',
            'Total integrator steps taken',
            ['run'],
            registry=self.registry
        )

        self.step_time = Histogram(
            'mcsh_step_time_seconds',
            'Wall time per integrator step in seconds',
            ['run'],
            buckets=[0.001, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0],
            registry=self.registry
        )

        self.elliptic_iterations = Histogram(
            'mcsh_elliptic_iterations',
            'Conjugate-gradient iterations per A0 solve',
            ['run'],
            buckets=[0, 1, 5, 10, 25, 50, 100, 250, 500],
            registry=self.registry
        )

        self.abort_count = Counter(
            'mcsh_aborts_total',
            'Runs aborted by a numerical failure',
            ['run', 'error_type'],
            registry=self.registry
        )

        self.energy = Gauge(
            'mcsh_energy_total',
            'Latest sampled total energy',
            ['run'],
            registry=self.registry
        )

        self.gauge_residual = Gauge(
            'mcsh_gauge_residual',
            'Latest sampled relative Coulomb-gauge residual',
            ['run'],
            registry=self.registry
        )

    def track_step(self, solve_iterations):
        self.step_count.labels(run=self.run_name).inc()
        if solve_iterations is not None:
            self.elliptic_iterations.labels(run=self.run_name).observe(solve_iterations)

    def track_abort(self, error_type):
        self.abort_count.labels(run=self.run_name, error_type=error_type).inc()

    def track_sample(self, energy, gauge_residual):
        self.energy.labels(run=self.run_name).set(energy)
        self.gauge_residual.labels(run=self.run_name).set(gauge_residual)

    @contextmanager
    def track_time(self):
        start_time = time.perf_counter()
        try:
            yield
        finally:
            duration = time.perf_counter() - start_time
            self.step_time.labels(run=self.run_name).observe(duration)

    def get_metrics(self):
        return generate_latest(self.registry)

    def write(self, path):
        """Write a node-exporter textfile next to the run outputs"""
        write_to_textfile(str(path), self.registry)
