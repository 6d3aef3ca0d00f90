"""Scenario runner: builds the lattice, medium and pulse from a RunConfig,
advances the field and writes the run artifacts at every cadence point."""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from qla2d import __version__
from qla2d.cli.heatmap import render_heatmap, write_pgm, write_png
from qla2d.cli.run_config import RunConfig
from qla2d.cli.snapshots import write_snapshot
from qla2d.config import Config
from qla2d.errors import (
    ArtifactError,
    ConfigError,
    DielectricError,
    GeometryError,
    PulseError,
    RunAborted,
    ScheduleError,
)
from qla2d.lattice.core_lattice import DielectricMap, LatticeGeometry, set_halfspace_dielectric
from qla2d.lattice.evolution import Evolver, RunState, initial_state
from qla2d.physics.diagnostics import EnergyLedger, ledger_row
from qla2d.physics.pulses import init_pulse
from qla2d.utils.files import atomic_write_text
from qla2d.utils.run_monitor import RunMonitor
from qla2d.utils.workers import WorkerPool

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2

CONFIG_ERRORS = (ConfigError, GeometryError, DielectricError, PulseError, ScheduleError)

H_Z = 5


def exit_status_for(error: BaseException) -> int:
    if isinstance(error, CONFIG_ERRORS):
        return EXIT_CONFIG
    return EXIT_RUNTIME


@dataclass
class RunResult:
    exit_status: int
    output_dir: Path
    artifacts: List[Path] = field(default_factory=list)
    ledger: EnergyLedger = field(default_factory=EnergyLedger)
    error: Optional[str] = None
    final_t: int = 0

    @property
    def ok(self) -> bool:
        return self.exit_status == EXIT_OK


class ScenarioRunner:
    """Executes one configured run and owns its artifact directory."""

    def __init__(self, cfg: RunConfig, output_dir: Optional[Union[str, Path]] = None):
        self.cfg = cfg
        self.output_dir = Path(output_dir or Config.output_dir_override() or cfg.output_dir)
        self.logger = logging.getLogger(__name__)
        self.ledger = EnergyLedger()
        self.artifacts: List[Path] = []
        self.monitor: Optional[RunMonitor] = None
        self.dmap: Optional[DielectricMap] = None

    @property
    def snapshot_dir(self) -> Path:
        return self.output_dir / Config.SNAPSHOT_DIR

    @property
    def heatmap_dir(self) -> Path:
        return self.output_dir / Config.HEATMAP_DIR

    def build(self) -> RunState:
        """Lattice, half-space medium and initial pulse."""
        cfg = self.cfg
        geom = LatticeGeometry(cfg.nx, cfg.ny)
        dmap = DielectricMap(geom)
        set_halfspace_dielectric(dmap, cfg.axis, cfg.fraction, cfg.n1, cfg.n2, cfg.smoothing)
        self.dmap = dmap
        pulse = init_pulse(geom, dmap, cfg.pulse_spec())
        return initial_state(pulse, cfg.eps, cfg.order)

    def prepare_directories(self) -> None:
        try:
            self.snapshot_dir.mkdir(parents=True, exist_ok=True)
            self.heatmap_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ArtifactError(f"could not create output directory {self.output_dir}: {e}") from e

    def record(self, view: RunState) -> None:
        """Cadence sink: ledger row, snapshots and the H_z heatmap for one t."""
        t = view.t
        self.ledger.append(ledger_row(t, view.field, self.dmap))
        ledger_path = self.ledger.write_csv(self.output_dir / Config.LEDGER_FILE)
        if ledger_path not in self.artifacts:
            self.artifacts.append(ledger_path)

        stem = f"t{t:08d}"
        written = [
            write_snapshot(self.snapshot_dir / f"field_{stem}.qla", view.field.as_array(), t),
            write_snapshot(self.snapshot_dir / f"hz_{stem}.qla", view.field.q[H_Z], t),
        ]
        image = render_heatmap(view.field.q[H_Z], self.cfg.heatmap)
        written.append(write_pgm(self.heatmap_dir / f"hz_{stem}.pgm", image))
        if self.cfg.png:
            written.append(write_png(self.heatmap_dir / f"hz_{stem}.png", image))
        self.artifacts.extend(written)

        if self.monitor is not None:
            self.monitor.check()
        row = self.ledger.rows[-1]
        self.logger.info(
            f"t={t} E_total={row.E_total:.12g}",
            extra={'context': {'E_region1': row.E_region1, 'E_region2': row.E_region2, 'divE_rel': row.divE_rel}},
        )

    def manifest(self, exit_status: int, iterations: int, error: Optional[str]) -> Dict[str, Any]:
        return {
            'version': __version__,
            'config': self.cfg.to_dict(),
            'workers': self.cfg.resolved_workers(),
            'run': self.monitor.summary(iterations) if self.monitor is not None else {},
            'exit_status': exit_status,
            'error': error,
            'energy_drift': self.ledger.max_relative_drift(),
            'artifacts': sorted(str(p.relative_to(self.output_dir)) for p in self.artifacts),
        }

    def write_manifest(self, exit_status: int, iterations: int, error: Optional[str]) -> Path:
        payload = json.dumps(self.manifest(exit_status, iterations, error), indent=2, default=str)
        return atomic_write_text(self.output_dir / Config.MANIFEST_FILE, payload + "\n")

    def run(self) -> RunResult:
        cfg = self.cfg
        self.monitor = RunMonitor()
        try:
            state = self.build()
        except CONFIG_ERRORS as e:
            self.logger.error(f"Scenario rejected: {e}")
            return RunResult(exit_status_for(e), self.output_dir, error=str(e))

        try:
            self.prepare_directories()
        except ArtifactError as e:
            self.logger.error(str(e))
            return RunResult(EXIT_RUNTIME, self.output_dir, error=str(e))

        workers = cfg.resolved_workers()
        self.logger.info(
            f"Starting run in {self.output_dir}",
            extra={'context': {'nx': cfg.nx, 'ny': cfg.ny, 'eps': cfg.eps, 'workers': workers}},
        )
        status, error = EXIT_OK, None
        try:
            with WorkerPool(workers) as pool:
                Evolver(self.dmap, pool).run(state, cfg.n_steps, cfg.cadence, sink=self.record)
        except RunAborted as e:
            status, error = EXIT_RUNTIME, str(e)
            self.logger.error(f"Run aborted at t={state.t}: {e}")
        except CONFIG_ERRORS as e:
            status, error = EXIT_CONFIG, str(e)
            self.logger.error(f"Run rejected: {e}")

        try:
            manifest_path = self.write_manifest(status, state.t, error)
        except ArtifactError as e:
            self.logger.error(f"Manifest not written: {e}")
            status = EXIT_RUNTIME
            error = error or str(e)
        else:
            self.artifacts.append(manifest_path)

        if status == EXIT_OK:
            self.logger.info(f"Run finished at t={state.t}, max energy drift {self.ledger.max_relative_drift():.3e}")
        return RunResult(status, self.output_dir, list(self.artifacts), self.ledger, error, state.t)


def run_scenario(cfg: RunConfig, output_dir: Optional[Union[str, Path]] = None) -> RunResult:
    """Run ``cfg`` and write its artifacts; the result carries the exit status."""
    return ScenarioRunner(cfg, output_dir).run()
