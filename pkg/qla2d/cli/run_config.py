"""Flat ``section.key = value`` run configuration.

Unknown keys are rejected and every problem in a file is reported at
once, each message prefixed with the key it concerns.
"""
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from qla2d.config import Config
from qla2d.errors import ConfigError, PulseError
from qla2d.physics.pulses import CARRIERS, PRESETS, SHAPES, PulseSpec, get_preset

logger = logging.getLogger(__name__)

DEFAULT_PULSE_SCALE = 0.25
MIN_GRID = 8


def _int(raw: str) -> int:
    value = float(raw)
    if not value.is_integer():
        raise ValueError("must be an integer")
    return int(value)


def _float(raw: str) -> float:
    value = float(raw)
    if not math.isfinite(value):
        raise ValueError("must be finite")
    return value


def _bool(raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ('true', 'yes', 'on', '1'):
        return True
    if lowered in ('false', 'no', 'off', '0'):
        return False
    raise ValueError("must be true or false")


def _choice(*options: str) -> Callable[[str], str]:
    def parse(raw: str) -> str:
        value = raw.strip().lower()
        if value not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return value
    return parse


def _str(raw: str) -> str:
    if not raw.strip():
        raise ValueError("must not be empty")
    return raw.strip()


Check = Tuple[Callable[[Any], bool], str]

# key -> (attribute, parser, default, range checks); default None with required=True means required
SCHEMA: Dict[str, Tuple[str, Callable[[str], Any], Any, List[Check]]] = {
    'grid.nx': ('nx', _int, 256, [(lambda v: v >= MIN_GRID, f"must be >= {MIN_GRID}")]),
    'grid.ny': ('ny', _int, 256, [(lambda v: v >= MIN_GRID, f"must be >= {MIN_GRID}")]),
    'scheme.eps': ('eps', _float, 0.1, [(lambda v: 0 < v <= 0.5, "must lie in (0, 0.5]")]),
    'scheme.order': ('order', _int, 2, [(lambda v: v in (1, 2), "must be 1 or 2")]),
    'scheme.workers': ('workers', _int, None, [(lambda v: v >= 1, "must be >= 1")]),
    'medium.n1': ('n1', _float, None, [(lambda v: v > 0, "must be > 0")]),
    'medium.n2': ('n2', _float, None, [(lambda v: v > 0, "must be > 0")]),
    'interface.axis': ('axis', _choice('x', 'y'), 'x', []),
    'interface.fraction': ('fraction', _float, 0.5, [(lambda v: 0 < v < 1, "must lie in (0, 1)")]),
    'interface.smoothing': ('smoothing', _float, 2.0, [(lambda v: v >= 0, "must be >= 0")]),
    'pulse.preset': ('preset', _choice(*PRESETS), None, []),
    'pulse.zeta_w': ('zeta_w', _float, None, [(lambda v: v > 0, "must be > 0")]),
    'pulse.chi_w': ('chi_w', _float, None, [(lambda v: v > 0, "must be > 0")]),
    'pulse.gamma_w': ('gamma_w', _float, None, [(lambda v: v > 0, "must be > 0")]),
    'pulse.scale': ('scale', _float, DEFAULT_PULSE_SCALE, [(lambda v: v > 0, "must be > 0")]),
    'pulse.theta_inc': ('theta_inc', _float, None, [(lambda v: -90 < v < 90, "must lie in (-90, 90)")]),
    'pulse.amplitude': ('amplitude', _float, 1.0, []),
    'pulse.zeta0': ('zeta0', _float, None, []),
    'pulse.chi0': ('chi0', _float, None, []),
    'pulse.carrier': ('carrier', _choice(*CARRIERS), 'absolute', []),
    'pulse.shape': ('shape', _choice(*SHAPES), 'gaussian', []),
    'pulse.overlap_tolerance': ('overlap_tolerance', _float, 1e-8, [(lambda v: 0 < v <= 1, "must lie in (0, 1]")]),
    'run.n_steps': ('n_steps', _int, 2000, [(lambda v: v >= 0, "must be >= 0")]),
    'run.cadence': ('cadence', _int, 500, [(lambda v: v >= 1, "must be >= 1")]),
    'output.dir': ('output_dir', _str, Config.DEFAULT_OUTPUT_DIR, []),
    'output.heatmap': ('heatmap', _choice('positive', 'signed'), 'positive', []),
    'output.png': ('png', _bool, False, []),
}

REQUIRED = ('medium.n1', 'medium.n2', 'pulse.theta_inc')
EXPLICIT_WIDTHS = ('pulse.zeta_w', 'pulse.chi_w', 'pulse.gamma_w')


@dataclass(frozen=True)
class RunConfig:
    n1: float
    n2: float
    theta_inc: float
    nx: int = 256
    ny: int = 256
    eps: float = 0.1
    order: int = 2
    workers: Optional[int] = None
    axis: str = 'x'
    fraction: float = 0.5
    smoothing: float = 2.0
    preset: Optional[str] = None
    zeta_w: Optional[float] = None
    chi_w: Optional[float] = None
    gamma_w: Optional[float] = None
    scale: float = DEFAULT_PULSE_SCALE
    amplitude: float = 1.0
    zeta0: Optional[float] = None
    chi0: Optional[float] = None
    carrier: str = 'absolute'
    shape: str = 'gaussian'
    overlap_tolerance: float = 1e-8
    n_steps: int = 2000
    cadence: int = 500
    output_dir: str = Config.DEFAULT_OUTPUT_DIR
    heatmap: str = 'positive'
    png: bool = False

    def pulse_widths(self) -> Tuple[float, float, float]:
        """(zeta_w, chi_w, gamma_w): scaled preset values overridden by explicit ones."""
        if self.preset is not None:
            base = get_preset(self.preset).scaled(self.scale)
            widths = [base.zeta_w, base.chi_w, base.gamma_w]
        else:
            widths = [None, None, None]
        for k, explicit in enumerate((self.zeta_w, self.chi_w, self.gamma_w)):
            if explicit is not None:
                widths[k] = explicit
        if any(w is None for w in widths):
            raise PulseError("pulse widths are incomplete: give pulse.preset or all of zeta_w, chi_w, gamma_w")
        return widths[0], widths[1], widths[2]

    def pulse_spec(self) -> PulseSpec:
        zeta_w, chi_w, gamma_w = self.pulse_widths()
        return PulseSpec(
            zeta_w=zeta_w,
            chi_w=chi_w,
            gamma_w=gamma_w,
            theta_inc=self.theta_inc,
            amplitude=self.amplitude,
            zeta0=self.zeta0,
            chi0=self.chi0,
            carrier=self.carrier,
            shape=self.shape,
            overlap_tolerance=self.overlap_tolerance,
        )

    def resolved_workers(self) -> int:
        return self.workers if self.workers is not None else Config.workers()

    def to_dict(self) -> Dict[str, Any]:
        """Normalized echo keyed like the config file."""
        values = asdict(self)
        echo = {}
        for key, (attr, _, _, _) in SCHEMA.items():
            echo[key] = values[attr]
        echo['scheme.workers'] = self.resolved_workers()
        return echo


def _split_lines(text: str, errors: List[str]) -> Dict[str, str]:
    entries: Dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        content = line.split('#', 1)[0].strip()
        if not content:
            continue
        if '=' not in content:
            errors.append(f"line {lineno}: expected 'key = value', got {content!r}")
            continue
        key, raw = (part.strip() for part in content.split('=', 1))
        key = key.lower()
        if key not in SCHEMA:
            errors.append(f"{key}: unknown key (line {lineno})")
            continue
        if key in entries:
            errors.append(f"{key}: duplicate key (line {lineno})")
            continue
        entries[key] = raw
    return entries


def parse_config(text: str) -> RunConfig:
    """Validate a config text; raises ConfigError listing every problem."""
    errors: List[str] = []
    entries = _split_lines(text, errors)
    values: Dict[str, Any] = {}
    for key, raw in entries.items():
        attr, parser, _, checks = SCHEMA[key]
        try:
            value = parser(raw)
        except ValueError as e:
            errors.append(f"{key}: {e} (got {raw!r})")
            continue
        failed = [message for check, message in checks if not check(value)]
        if failed:
            errors.append(f"{key}: {failed[0]} (got {raw})")
            continue
        values[attr] = value

    for key in REQUIRED:
        if key not in entries:
            errors.append(f"{key}: required")
    if 'pulse.preset' not in entries and not all(k in entries for k in EXPLICIT_WIDTHS):
        errors.append("pulse.preset: required unless pulse.zeta_w, pulse.chi_w and pulse.gamma_w are all given")
    if ('pulse.zeta0' in entries) != ('pulse.chi0' in entries):
        errors.append("pulse.zeta0: pulse.zeta0 and pulse.chi0 must be given together")

    if errors:
        raise ConfigError(errors)
    cfg = RunConfig(**values)
    try:
        cfg.pulse_spec()
    except PulseError as e:
        raise ConfigError([f"pulse: {e}"]) from e
    return cfg


def load_config(path: Union[str, Path]) -> RunConfig:
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError([f"could not read config {path}: {e}"]) from e
    return parse_config(text)
