import json
import logging
import re
from pathlib import Path

from shared.logging.logger import setup_logger
from shared.monitoring.metrics import SimulationMetrics


def _flush(logger):
    for handler in logger.handlers:
        handler.flush()


class TestLogger:
    def test_handlers_attached_once(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LOG_DIR", str(tmp_path))
        logger = setup_logger("mcsh-test-once")
        count = len(logger.handlers)
        assert setup_logger("mcsh-test-once") is logger
        assert len(logger.handlers) == count
        assert logger.propagate is False

    def test_writes_json_lines(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LOG_DIR", str(tmp_path))
        logger = setup_logger("mcsh-test-json")
        logger.info("solver ready")
        _flush(logger)
        (log_file,) = tmp_path.glob("mcsh-test-json_*.log")
        entry = json.loads(log_file.read_text().splitlines()[-1])
        assert entry["message"] == "solver ready"
        assert entry["level"] == "INFO"
        assert entry["service"] == "mcsh-test-json"

    def test_child_loggers_propagate_into_service(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LOG_DIR", str(tmp_path))
        parent = setup_logger("mcsh-test-parent")
        logging.getLogger("mcsh-test-parent.elliptic").warning("slow convergence")
        _flush(parent)
        (log_file,) = tmp_path.glob("mcsh-test-parent_*.log")
        assert "slow convergence" in log_file.read_text()

    def test_unwritable_log_dir_falls_back_to_stderr(self, tmp_path, monkeypatch):
        blocker = tmp_path / "file"
        blocker.write_text("")
        monkeypatch.setenv("LOG_DIR", str(blocker / "logs"))
        logger = setup_logger("mcsh-test-stderr")
        assert len(logger.handlers) == 1
        assert isinstance(logger.handlers[0], logging.StreamHandler)

    def test_level_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv("LOG_DIR", str(tmp_path))
        monkeypatch.setenv("LOG_LEVEL", "debug")
        assert setup_logger("mcsh-test-level").level == logging.DEBUG


class TestMetrics:
    def test_counters_and_gauges(self):
        metrics = SimulationMetrics("unit")
        metrics.track_step(12)
        metrics.track_step(None)
        metrics.track_sample(energy=3.5, gauge_residual=1e-13)
        metrics.track_abort("NonFiniteStateError")
        with metrics.track_time():
            pass
        text = metrics.get_metrics().decode()
        assert 'mcsh_steps_total{run="unit"} 2.0' in text
        assert 'mcsh_energy_total{run="unit"} 3.5' in text
        assert 'error_type="NonFiniteStateError"' in text
        assert 'mcsh_elliptic_iterations_count{run="unit"} 1.0' in text
        assert 'mcsh_step_time_seconds_count{run="unit"} 1.0' in text

    def test_registries_are_independent(self):
        first, second = SimulationMetrics("a"), SimulationMetrics("a")
        first.track_step(1)
        assert 'mcsh_steps_total{run="a"} 1.0' in first.get_metrics().decode()
        assert 'mcsh_steps_total{run="a"} 1.0' not in second.get_metrics().decode()

    def test_write_textfile(self, tmp_path):
        metrics = SimulationMetrics("file")
        metrics.track_step(3)
        path = tmp_path / "metrics.prom"
        metrics.write(path)
        assert "mcsh_steps_total" in path.read_text()

    def test_scrape_config_lists_every_series(self):
        config = (Path(__file__).resolve().parent.parent / "config" / "prometheus" / "metrics.yml").read_text()
        assert "scrape_configs:" in config
        listed = set(re.findall(r"^#\s+(mcsh_\w+)", config, flags=re.MULTILINE))
        exported = {
            family.name if family.type != "counter" else f"{family.name}_total"
            for family in SimulationMetrics("names").registry.collect()
        }
        assert listed == exported
