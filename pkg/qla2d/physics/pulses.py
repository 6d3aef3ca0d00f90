"""Initial p-polarized wave packets in medium 1.

The packet lives in a rotated frame (zeta, chi) whose zeta axis is the
propagation direction. Lab and packet frames are related by

    x = cos(t) zeta + sin(t) chi
    y = -sin(t) zeta + cos(t) chi

H_z is a Gaussian-enveloped carrier, E lies along chi with E_chi = H_z / n1
(a forward-propagating mode), and the amplitudes go through the Dyson map.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from qla2d.errors import PulseError
from qla2d.lattice.core_lattice import (
    DielectricMap,
    LatticeGeometry,
    PhysicalFields,
    QubitField,
    from_physical,
    region_mask,
)
from qla2d.physics.diagnostics import poynting_field

logger = logging.getLogger(__name__)

CARRIERS = ('absolute', 'centered')
SHAPES = ('gaussian', 'slab')
COMMENSURATE_TOL = 1e-9


@dataclass(frozen=True)
class ScenarioPreset:
    name: str
    zeta_w: float
    chi_w: float
    gamma_w: float

    def scaled(self, factor: float) -> 'ScenarioPreset':
        return ScenarioPreset(self.name, self.zeta_w * factor, self.chi_w * factor, self.gamma_w * factor)


PRESETS: Dict[str, ScenarioPreset] = {
    'burst': ScenarioPreset('burst', 20.0, 100.0, 20.0),
    'thin_long': ScenarioPreset('thin_long', 100.0, 20.0, 20.0),
    'finite': ScenarioPreset('finite', 50.0, 50.0, 20.0),
}

# scenario, n1, n2, pulse
SCENARIOS: List[Tuple[str, float, float, str]] = [
    ('burst_denser', 1.0, 2.0, 'burst'),
    ('thin_long_denser', 1.0, 2.0, 'thin_long'),
    ('burst_rarer', 2.0, 1.0, 'burst'),
    ('thin_long_rarer', 2.0, 1.0, 'thin_long'),
    ('finite_rarer', 2.0, 1.0, 'finite'),
]


def get_preset(name: str) -> ScenarioPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise PulseError(f"unknown pulse preset {name!r}; known: {', '.join(PRESETS)}")


def scenario_presets() -> pd.DataFrame:
    """Reference scenarios: one row per medium pairing and pulse shape."""
    rows = []
    for scenario, n1, n2, pulse in SCENARIOS:
        p = PRESETS[pulse]
        rows.append({'scenario': scenario, 'n1': n1, 'n2': n2, 'pulse': pulse,
                     'zeta_w': p.zeta_w, 'chi_w': p.chi_w, 'gamma_w': p.gamma_w})
    return pd.DataFrame(rows)


@dataclass(frozen=True)
class PulseSpec:
    """Wave-packet parameters; lengths in sites, theta_inc in degrees from the interface normal."""

    zeta_w: float
    chi_w: float
    gamma_w: float
    theta_inc: float
    amplitude: float = 1.0
    zeta0: Optional[float] = None
    chi0: Optional[float] = None
    carrier: str = 'absolute'
    shape: str = 'gaussian'
    overlap_tolerance: float = 1e-8

    def __post_init__(self):
        for name in ('zeta_w', 'chi_w', 'gamma_w'):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise PulseError(f"{name} must be positive, got {value!r}")
        if not math.isfinite(self.theta_inc) or not (-90.0 < self.theta_inc < 90.0):
            raise PulseError(f"theta_inc must lie in (-90, 90) degrees, got {self.theta_inc!r}")
        if not math.isfinite(self.amplitude):
            raise PulseError(f"amplitude must be finite, got {self.amplitude!r}")
        if (self.zeta0 is None) != (self.chi0 is None):
            raise PulseError("zeta0 and chi0 must be given together")
        if self.carrier not in CARRIERS:
            raise PulseError(f"carrier must be one of {CARRIERS}, got {self.carrier!r}")
        if self.shape not in SHAPES:
            raise PulseError(f"shape must be one of {SHAPES}, got {self.shape!r}")
        if not (0.0 < self.overlap_tolerance <= 1.0):
            raise PulseError(f"overlap_tolerance must lie in (0, 1], got {self.overlap_tolerance!r}")

    @classmethod
    def from_preset(cls, name: str, theta_inc: float, scale: float = 1.0, **kwargs) -> 'PulseSpec':
        p = get_preset(name).scaled(scale)
        return cls(p.zeta_w, p.chi_w, p.gamma_w, theta_inc, **kwargs)


def rotate_to_lab(zeta, chi, theta: float):
    """Packet frame to lab frame; ``theta`` in degrees."""
    t = math.radians(theta)
    c, s = math.cos(t), math.sin(t)
    return c * zeta + s * chi, -s * zeta + c * chi


def rotate_to_packet(x, y, theta: float):
    t = math.radians(theta)
    c, s = math.cos(t), math.sin(t)
    return c * x - s * y, s * x + c * y


def _layout(geom: LatticeGeometry, dmap: DielectricMap) -> Tuple[str, int]:
    if dmap.interface is None:
        return 'x', geom.nx // 2
    return dmap.interface.axis, dmap.interface.split


def lab_angle(theta_inc: float, axis: str) -> float:
    """Rotation angle of the packet frame: theta for an x-split, theta - 90 for a y-split."""
    return theta_inc if axis == 'x' else theta_inc - 90.0


def pulse_center(geom: LatticeGeometry, dmap: DielectricMap, spec: PulseSpec) -> Tuple[float, float]:
    """Lab-frame center: from (zeta0, chi0) when given, else the middle of medium 1."""
    axis, split = _layout(geom, dmap)
    if spec.zeta0 is not None:
        xc, yc = rotate_to_lab(spec.zeta0, spec.chi0, lab_angle(spec.theta_inc, axis))
    elif dmap.interface is None:
        xc, yc = geom.nx / 2.0, geom.ny / 2.0
    elif axis == 'x':
        xc, yc = split / 2.0, geom.ny / 2.0
    else:
        xc, yc = geom.nx / 2.0, split / 2.0
    if not (0.0 <= xc < geom.nx and 0.0 <= yc < geom.ny):
        raise PulseError(f"pulse center ({xc:.3f}, {yc:.3f}) lies outside the {geom.nx}x{geom.ny} lattice")
    return float(xc), float(yc)


def _min_image(d: np.ndarray, length: int) -> np.ndarray:
    return d - length * np.round(d / length)


def _assemble(geom: LatticeGeometry, dmap: DielectricMap, spec: PulseSpec, envelope: np.ndarray,
              zeta: np.ndarray, theta_lab: float, n1: float) -> QubitField:
    h_z = -spec.amplitude * envelope * np.cos(2.0 * np.pi * zeta / spec.gamma_w)
    e_chi = h_z / n1
    t = math.radians(theta_lab)
    zero = np.zeros(geom.shape)
    phys = PhysicalFields(
        E_x=e_chi * math.sin(t),
        E_y=e_chi * math.cos(t),
        E_z=zero.copy(),
        H_x=zero.copy(),
        H_y=zero.copy(),
        H_z=h_z,
    )
    return from_physical(phys, dmap)


def _check_overlap(dmap: DielectricMap, envelope: np.ndarray, spec: PulseSpec) -> None:
    if dmap.interface is None:
        return
    outside = envelope[region_mask(dmap, 2)]
    peak = float(outside.max()) if outside.size else 0.0
    if peak > spec.overlap_tolerance:
        raise PulseError(
            f"pulse envelope reaches {peak:.3e} of its peak inside medium 2 "
            f"(tolerance {spec.overlap_tolerance:.1e}); move the center or shrink the widths"
        )


def _medium_one_index(dmap: DielectricMap) -> float:
    if dmap.interface is not None:
        return dmap.interface.n_left
    return float(dmap.n_x.flat[0])


def init_pulse(geom: LatticeGeometry, dmap: DielectricMap, spec: PulseSpec) -> QubitField:
    """Gaussian packet with envelope widths zeta_w, chi_w in the packet frame."""
    if spec.shape == 'slab':
        return init_slab_pulse(geom, dmap, spec)
    axis, _ = _layout(geom, dmap)
    theta_lab = lab_angle(spec.theta_inc, axis)
    xc, yc = pulse_center(geom, dmap, spec)
    x, y = geom.coordinates()
    dx = _min_image(x - xc, geom.nx)
    dy = _min_image(y - yc, geom.ny)
    d_zeta, d_chi = rotate_to_packet(dx, dy, theta_lab)
    envelope = np.exp(-(d_zeta / spec.zeta_w) ** 2 - (d_chi / spec.chi_w) ** 2)
    _check_overlap(dmap, envelope, spec)
    zeta0, _ = rotate_to_packet(xc, yc, theta_lab)
    zeta = zeta0 + d_zeta if spec.carrier == 'absolute' else d_zeta
    field = _assemble(geom, dmap, spec, envelope, zeta, theta_lab, _medium_one_index(dmap))
    logger.info(
        f"Initialized pulse at ({xc:.1f}, {yc:.1f}), theta {spec.theta_inc:g}",
        extra={'context': {'zeta_w': spec.zeta_w, 'chi_w': spec.chi_w, 'gamma_w': spec.gamma_w}},
    )
    return field


def _transverse_length(geom: LatticeGeometry, axis: str) -> int:
    return geom.ny if axis == 'x' else geom.nx


def commensurate_theta(geom: LatticeGeometry, gamma_w: float, theta: float, axis: str = 'x') -> float:
    """Angle nearest ``theta`` whose carrier is periodic across the lattice."""
    n_t = _transverse_length(geom, axis)
    m = int(round(n_t * abs(math.sin(math.radians(theta))) / gamma_w))
    m = max(0, m)
    while m > 0 and m * gamma_w / n_t >= 1.0:
        m -= 1
    return math.copysign(math.degrees(math.asin(m * gamma_w / n_t)), theta)


def init_slab_pulse(geom: LatticeGeometry, dmap: DielectricMap, spec: PulseSpec) -> QubitField:
    """Packet with a Gaussian envelope along the interface normal only.

    The carrier keeps a single transverse wavenumber, so the transverse
    lattice length times |sin(theta)| / gamma_w must be an integer.
    """
    axis, _ = _layout(geom, dmap)
    n_t = _transverse_length(geom, axis)
    periods = n_t * abs(math.sin(math.radians(spec.theta_inc))) / spec.gamma_w
    if abs(periods - round(periods)) > COMMENSURATE_TOL:
        nearest = commensurate_theta(geom, spec.gamma_w, spec.theta_inc, axis)
        raise PulseError(
            f"theta {spec.theta_inc:g} is not commensurate with a {n_t}-site transverse period; "
            f"nearest commensurate angle is {nearest:.6f}"
        )
    theta_lab = lab_angle(spec.theta_inc, axis)
    xc, yc = pulse_center(geom, dmap, spec)
    x, y = geom.coordinates()
    if axis == 'x':
        d_normal = _min_image(x - xc, geom.nx)
        dx, dy = d_normal, y - yc
    else:
        d_normal = _min_image(y - yc, geom.ny)
        dx, dy = x - xc, d_normal
    envelope = np.exp(-(d_normal / spec.zeta_w) ** 2)
    _check_overlap(dmap, envelope, spec)
    d_zeta, _ = rotate_to_packet(dx, dy, theta_lab)
    zeta0, _ = rotate_to_packet(xc, yc, theta_lab)
    zeta = zeta0 + d_zeta if spec.carrier == 'absolute' else d_zeta
    field = _assemble(geom, dmap, spec, envelope, zeta, theta_lab, _medium_one_index(dmap))
    logger.info(f"Initialized slab pulse at {axis}={xc if axis == 'x' else yc:.1f}, theta {spec.theta_inc:g}")
    return field


def pulse_direction_angle(direction, axis: str = 'x') -> float:
    """Signed angle in degrees of a lab direction from the interface normal (a theta pulse gives theta)."""
    dx, dy = float(direction[0]), float(direction[1])
    angle = math.degrees(math.atan2(-dy, dx))
    if axis == 'y':
        angle += 90.0
    return (angle + 180.0) % 360.0 - 180.0


def pulse_poynting_direction(field: QubitField, dmap: DielectricMap) -> np.ndarray:
    """Unit vector along the lattice sum of E x H."""
    s = poynting_field(field, dmap)
    total = np.array([float(np.sum(s[0])), float(np.sum(s[1]))])
    norm = float(np.hypot(total[0], total[1]))
    if norm == 0.0:
        raise PulseError("Poynting direction of a field with zero energy flux")
    return total / norm
