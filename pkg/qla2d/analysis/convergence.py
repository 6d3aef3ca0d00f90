"""Plane-wave dispersion of the full timestep and its convergence order.

A y-uniform wave along x only involves (q1, q5): the y sweeps reduce to
the identity and the x collisions never reach q2, q4. One iteration
therefore maps the Fourier mode exp(i k x) of (q1, q5) through a 2x2
matrix whose eigenvalue phases give the discrete frequency.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from qla2d.lattice.core_lattice import DielectricMap, LatticeGeometry, new_field
from qla2d.lattice.evolution import apply_schedule, build_schedule, prepare_operators
from qla2d.physics.physics_oracle import plane_wave_phase

logger = logging.getLogger(__name__)

STRIP_WIDTH = 8
PLANE_WAVE_COMPONENTS = (1, 5)


@dataclass(frozen=True)
class PhaseMeasurement:
    eps: float
    wavelength: int
    n: float
    omega: float
    omega_exact: float

    @property
    def relative_error(self) -> float:
        return abs(self.omega - self.omega_exact) / self.omega_exact

    @property
    def speed_ratio(self) -> float:
        return self.omega / self.omega_exact


def propagator_matrix(
    eps: float,
    wavelength: int,
    n: float = 1.0,
    order: int = 2,
) -> np.ndarray:
    """One-iteration propagator of the (q1, q5) amplitudes of exp(2 pi i x / wavelength)."""
    if int(wavelength) != wavelength or wavelength < LatticeGeometry.MIN_SITES:
        raise ValueError(f"wavelength must be an integer >= {LatticeGeometry.MIN_SITES}, got {wavelength!r}")
    wavelength = int(wavelength)
    geom = LatticeGeometry(wavelength, STRIP_WIDTH)
    dmap = DielectricMap(geom, n)
    schedule = build_schedule(eps, order)
    ops = prepare_operators(dmap, eps)
    x = np.arange(wavelength, dtype=np.float64)
    carrier = np.cos(2.0 * np.pi * x / wavelength)
    prop = np.zeros((2, 2), dtype=np.complex128)
    for j, comp in enumerate(PLANE_WAVE_COMPONENTS):
        field = new_field(geom)
        field.q[comp][:, :] = carrier[:, None]
        apply_schedule(field, schedule, ops)
        for i, out in enumerate(PLANE_WAVE_COMPONENTS):
            # a real cosine holds half of its amplitude in the +k mode
            prop[i, j] = 2.0 * np.fft.fft(field.q[out][:, 0])[1] / wavelength
    return prop


def measure_phase_speed(
    eps: float,
    wavelength: int,
    n: float = 1.0,
    order: int = 2,
) -> PhaseMeasurement:
    prop = propagator_matrix(eps, wavelength, n, order)
    omega = float(np.mean(np.abs(np.angle(np.linalg.eigvals(prop)))))
    time_per_step = 1.0 if order == 2 else 0.5
    exact = plane_wave_phase(n, wavelength, 1, eps, time_per_step)
    return PhaseMeasurement(float(eps), int(wavelength), float(n), omega, exact)


def convergence_order(eps_values: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(eps)."""
    if len(eps_values) != len(errors) or len(eps_values) < 2:
        raise ValueError("need at least two (eps, error) pairs")
    if min(errors) <= 0 or min(eps_values) <= 0:
        raise ValueError("eps values and errors must be positive")
    slope, _ = np.polyfit(np.log(eps_values), np.log(errors), 1)
    return float(slope)


def refinement_study(
    eps0: float = 0.2,
    wavelength0: int = 16,
    levels: int = 3,
    n: float = 1.0,
    order: int = 2,
) -> Tuple[List[PhaseMeasurement], float]:
    """Halve eps and double the wavelength ``levels - 1`` times; fit the order of the phase error."""
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    results = []
    for level in range(levels):
        eps = eps0 / 2 ** level
        wavelength = wavelength0 * 2 ** level
        m = measure_phase_speed(eps, wavelength, n, order)
        logger.info(f"eps={eps:g} wavelength={wavelength}: relative phase error {m.relative_error:.3e}")
        results.append(m)
    fitted = convergence_order([m.eps for m in results], [m.relative_error for m in results])
    return results, fitted


def describe(results: Sequence[PhaseMeasurement], fitted: float) -> str:
    lines = [f"{'eps':>10} {'wavelength':>10} {'omega':>14} {'exact':>14} {'rel_error':>12}"]
    for m in results:
        lines.append(f"{m.eps:>10.5g} {m.wavelength:>10d} {m.omega:>14.8g} {m.omega_exact:>14.8g} {m.relative_error:>12.4e}")
    lines.append(f"fitted order: {fitted:.3f}" if math.isfinite(fitted) else "fitted order: n/a")
    return "\n".join(lines)
