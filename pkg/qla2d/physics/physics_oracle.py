"""Closed-form references for planar-interface scattering.

Angles are in degrees. Fresnel amplitudes refer to the H field of a
p-polarized wave, which is the component the simulator measures.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from qla2d.errors import DielectricError, EvanescentError

CRITICAL_TOL = 1e-12


@dataclass(frozen=True)
class InterfaceProblem:
    n1: float
    n2: float
    theta_inc: float

    def __post_init__(self):
        for name in ('n1', 'n2'):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise DielectricError(f"{name} must be a positive index, got {value!r}")
        if not (0.0 <= self.theta_inc < 90.0):
            raise DielectricError(f"theta_inc must lie in [0, 90) degrees, got {self.theta_inc!r}")


class FresnelCoefficients(NamedTuple):
    r_amp: float
    t_amp: float
    R_energy: float
    T_energy: float


def snell_angle(p: InterfaceProblem) -> Optional[float]:
    """Refraction angle, or None when the transmitted wave is evanescent."""
    arg = p.n1 * math.sin(math.radians(p.theta_inc)) / p.n2
    if abs(arg - 1.0) <= CRITICAL_TOL:
        return 90.0
    if arg > 1.0:
        return None
    return math.degrees(math.asin(arg))


def critical_angle(n1: float, n2: float) -> Optional[float]:
    """Onset of total internal reflection; None unless n1 > n2."""
    if n1 <= 0 or n2 <= 0:
        raise DielectricError(f"indices must be positive, got n1={n1!r}, n2={n2!r}")
    if n1 <= n2:
        return None
    return math.degrees(math.asin(n2 / n1))


def brewster_angle(n1: float, n2: float) -> float:
    if n1 <= 0 or n2 <= 0:
        raise DielectricError(f"indices must be positive, got n1={n1!r}, n2={n2!r}")
    return math.degrees(math.atan2(n2, n1))


def fresnel_p(p: InterfaceProblem) -> FresnelCoefficients:
    """p-polarization coefficients for the H-field amplitude.

    r = (n2 cos ti - n1 cos tt) / (n2 cos ti + n1 cos tt), t = 1 + r,
    R = r^2 and T = t^2 n1 cos tt / (n2 cos ti).
    """
    theta_t = snell_angle(p)
    if theta_t is None:
        raise EvanescentError(
            f"no propagating transmitted wave for n1={p.n1:g}, n2={p.n2:g}, theta={p.theta_inc:g}"
        )
    ci = math.cos(math.radians(p.theta_inc))
    ct = math.cos(math.radians(theta_t))
    r = (p.n2 * ci - p.n1 * ct) / (p.n2 * ci + p.n1 * ct)
    t = 1.0 + r
    R = r * r
    T = t * t * p.n1 * ct / (p.n2 * ci)
    return FresnelCoefficients(r, t, R, T)


def wavelength_ratio(n1: float, n2: float) -> float:
    """lambda2 / lambda1 at fixed frequency."""
    if n1 <= 0 or n2 <= 0:
        raise DielectricError(f"indices must be positive, got n1={n1!r}, n2={n2!r}")
    return n1 / n2


def plane_wave_phase(n: float, wavelength: float, steps: int, eps: float, time_per_step: float = 1.0) -> float:
    """Phase advance 2 pi eps tau steps / (n lambda) of a plane wave moving at speed 1/n.

    ``time_per_step`` is 1 for the second-order schedule and 1/2 for the
    first-order one.
    """
    if n <= 0 or wavelength <= 0 or eps < 0 or steps < 0:
        raise ValueError("plane_wave_phase needs positive n and wavelength, non-negative eps and steps")
    return 2.0 * math.pi * eps * time_per_step * steps / (n * wavelength)
