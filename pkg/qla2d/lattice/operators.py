"""Collision, streaming and potential operators.

Collisions and potentials are pointwise 2x2 rotations (or the sparse
potential matrices) applied to pairs of amplitudes at every site.
Streaming shifts a set of components one site along an axis. All
operators act in place on the QubitField and return it.
"""
import logging
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Dict, Optional, Tuple

import numpy as np

from qla2d.errors import ScheduleError
from qla2d.lattice.core_lattice import AXIS_INDEX, DielectricMap, QubitField, normalize_axis
from qla2d.utils.workers import WorkerPool, run_blocks

logger = logging.getLogger(__name__)

EPS_MAX = 0.5

# (a, b, index component) for the two rotation pairs of each axis
COLLISION_PAIRS: Dict[str, Tuple[Tuple[int, int, int], Tuple[int, int, int]]] = {
    'y': ((0, 5, 0), (2, 3, 2)),
    'x': ((1, 5, 1), (2, 4, 2)),
}

STREAM_SETS: Dict[Tuple[str, str], Tuple[int, int]] = {
    ('y', 'A'): (0, 3),
    ('y', 'B'): (2, 5),
    ('x', 'A'): (1, 4),
    ('x', 'B'): (2, 5),
}

# Potential pairs (a, b, sigma): the matrix form sets b <- sigma*sin(beta)*a + cos(beta)*b
POTENTIAL_PAIRS: Dict[str, Tuple[Tuple[int, int, int], Tuple[int, int, int]]] = {
    'y': ((0, 5, +1), (2, 3, -1)),
    'x': ((1, 5, -1), (2, 4, +1)),
}

POTENTIAL_FORMS = ('unitary', 'matrix')


def validate_epsilon(eps: float, allow_zero: bool = False) -> float:
    """Discreteness parameter in (0, 0.5]; zero is accepted where it gives identity operators."""
    try:
        value = float(eps)
    except (TypeError, ValueError):
        raise ScheduleError(f"eps must be a real number, got {eps!r}")
    lower_ok = value >= 0 if allow_zero else value > 0
    if not np.isfinite(value) or not lower_ok or value > EPS_MAX:
        raise ScheduleError(f"eps must lie in (0, {EPS_MAX}], got {eps!r}")
    return value


@dataclass(frozen=True)
class CollisionAngles:
    """Per-site rotation angles of one axis: theta0 for the q5 pair, theta2 for the q2 pair."""

    axis: str
    theta0: np.ndarray
    theta2: np.ndarray

    @cached_property
    def trig(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(1 - cos, sin) of theta0, then of theta2."""
        return _versine(self.theta0), np.sin(self.theta0), _versine(self.theta2), np.sin(self.theta2)


@dataclass(frozen=True)
class PotentialAngles:
    """Per-site potential angles of one axis, proportional to the centered difference of 1/n."""

    axis: str
    beta0: np.ndarray
    beta2: np.ndarray
    _cache: Dict[Tuple[str, float], Tuple[np.ndarray, ...]] = dc_field(default_factory=dict, compare=False, repr=False)

    def trig(self, form: str, scale: float = 1.0) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(cos, sin) of beta for the matrix form, (1 - cos, sin) of beta/2 for the unitary form."""
        key = (form, float(scale))
        if key not in self._cache:
            factor = scale * (0.5 if form == 'unitary' else 1.0)
            b0 = factor * self.beta0
            b2 = factor * self.beta2
            if form == 'unitary':
                self._cache[key] = (_versine(b0), np.sin(b0), _versine(b2), np.sin(b2))
            else:
                self._cache[key] = (np.cos(b0), np.sin(b0), np.cos(b2), np.sin(b2))
        return self._cache[key]

    @cached_property
    def vanishes(self) -> bool:
        return not (np.any(self.beta0) or np.any(self.beta2))


def compute_collision_angles(dmap: DielectricMap, eps: float, axis: str) -> CollisionAngles:
    """theta = eps / (4 n) with the axis-appropriate index components."""
    axis = normalize_axis(axis)
    eps = validate_epsilon(eps, allow_zero=True)
    (_, _, c0), (_, _, c2) = COLLISION_PAIRS[axis]
    theta0 = 0.25 * eps * dmap.inverse(c0)
    theta2 = 0.25 * eps * dmap.inverse(c2)
    return CollisionAngles(axis, theta0, theta2)


def compute_potential_angles(dmap: DielectricMap, eps: float, axis: str) -> PotentialAngles:
    """beta = eps * (1/n(+1) - 1/n(-1)) / 2 along ``axis``."""
    axis = normalize_axis(axis)
    eps = validate_epsilon(eps, allow_zero=True)
    (_, _, c0), (_, _, c2) = COLLISION_PAIRS[axis]
    beta0 = eps * dmap.inverse_difference(c0, axis)
    beta2 = eps * dmap.inverse_difference(c2, axis)
    return PotentialAngles(axis, beta0, beta2)


def _versine(angle: np.ndarray) -> np.ndarray:
    return 2.0 * np.sin(0.5 * angle) ** 2


def _rotate_pair(a: np.ndarray, b: np.ndarray, h: np.ndarray, s: np.ndarray, sign: int, sl: slice) -> None:
    """a' = a - (h a + sign s b) ; b' = b - (h b - sign s a) on rows ``sl``, with h = 1 - cos.

    The corrections are formed first and subtracted once, so a rotation
    followed by its reverse restores the pair to within a few ulp.
    """
    av = a[sl]
    bv = b[sl]
    hv = h[sl]
    sv = s[sl] if sign > 0 else -s[sl]
    da = hv * av
    da += sv * bv
    db = hv * bv
    db -= sv * av
    av -= da
    bv -= db


def _check_sign(sign: int) -> int:
    if sign not in (1, -1):
        raise ScheduleError(f"sign must be +1 or -1, got {sign!r}")
    return int(sign)


def _collide(field: QubitField, angles: CollisionAngles, axis: str, sign: int, pool: Optional[WorkerPool]) -> QubitField:
    sign = _check_sign(sign)
    (a0, b0, _), (a2, b2, _) = COLLISION_PAIRS[axis]
    vers0, sin0, vers2, sin2 = angles.trig
    q = field.q

    def kernel(sl: slice) -> None:
        _rotate_pair(q[a0], q[b0], vers0, sin0, sign, sl)
        _rotate_pair(q[a2], q[b2], vers2, sin2, sign, sl)

    nx, ny = field.shape
    run_blocks(pool, kernel, nx, ny)
    return field


def collide_y(field: QubitField, angles: CollisionAngles, sign: int, pool: Optional[WorkerPool] = None) -> QubitField:
    """Rotate (q0, q5) by theta0 and (q2, q3) by theta2, times ``sign``; q1 and q4 untouched."""
    return _collide(field, angles, 'y', sign, pool)


def collide_x(field: QubitField, angles: CollisionAngles, sign: int, pool: Optional[WorkerPool] = None) -> QubitField:
    """Rotate (q1, q5) by theta0 and (q2, q4) by theta2, times ``sign``; q0 and q3 untouched."""
    return _collide(field, angles, 'x', sign, pool)


def _shift_block(src: np.ndarray, dst: np.ndarray, ax: int, shift: int, sl: slice) -> None:
    # dst[j] = src[j - shift] with periodic wrap, restricted to lines ``sl`` of the other axis
    if ax == 0:
        s, d = src[:, sl], dst[:, sl]
    else:
        s, d = src[sl, :], dst[sl, :]
    s = s if ax == 0 else s.T
    d = d if ax == 0 else d.T
    if shift == 1:
        d[1:] = s[:-1]
        d[0] = s[-1]
    else:
        d[:-1] = s[1:]
        d[-1] = s[0]


def stream(field: QubitField, axis: str, component_set: str, shift: int, pool: Optional[WorkerPool] = None) -> QubitField:
    """Cyclically shift the components of ``component_set`` one site along ``axis``.

    Set A is (q0, q3) on y and (q1, q4) on x; set B is (q2, q5) on both.
    A shift of +1 moves the value at site j to site j + 1.
    """
    axis = normalize_axis(axis)
    key = (axis, str(component_set).upper())
    if key not in STREAM_SETS:
        raise ScheduleError(f"unknown component set {component_set!r}")
    shift = _check_sign(shift)
    ax = AXIS_INDEX[axis]
    other = 1 - ax
    nx, ny = field.shape
    lines = field.shape[other]
    per_line = field.shape[ax]
    for c in STREAM_SETS[key]:
        src = field.q[c]
        dst = field._spare

        def kernel(sl: slice, src=src, dst=dst) -> None:
            _shift_block(src, dst, ax, shift, sl)

        run_blocks(pool, kernel, lines, per_line)
        field.q[c], field._spare = dst, src
    return field


def _potential(
    field: QubitField,
    angles: PotentialAngles,
    axis: str,
    form: str,
    scale: float,
    pool: Optional[WorkerPool],
) -> QubitField:
    if form not in POTENTIAL_FORMS:
        raise ScheduleError(f"potential form must be one of {POTENTIAL_FORMS}, got {form!r}")
    # c is 1 - cos for the unitary form, cos for the matrix form
    c0, s0, c2, s2 = angles.trig(form, scale)
    (a0, b0, sg0), (a2, b2, sg2) = POTENTIAL_PAIRS[axis]
    q = field.q

    if form == 'unitary':
        def kernel(sl: slice) -> None:
            _rotate_pair(q[a0], q[b0], c0, s0, sg0, sl)
            _rotate_pair(q[a2], q[b2], c2, s2, sg2, sl)
    else:
        def kernel(sl: slice) -> None:
            for a, b, sg, c, s in ((a0, b0, sg0, c0, s0), (a2, b2, sg2, c2, s2)):
                bv = q[b][sl]
                bv *= c[sl]
                bv += sg * s[sl] * q[a][sl]

    nx, ny = field.shape
    run_blocks(pool, kernel, nx, ny)
    return field


def potential_y(
    field: QubitField,
    angles: PotentialAngles,
    form: str = 'matrix',
    scale: float = 1.0,
    pool: Optional[WorkerPool] = None,
) -> QubitField:
    """y-gradient potential.

    The matrix form sets q5 <- sin(b0) q0 + cos(b0) q5 and
    q3 <- -sin(b2) q2 + cos(b2) q3. The unitary form applies the
    orthogonal polar factor of the same matrix: the pairs are rotated
    by b/2 in the direction of the off-diagonal entry. Only the unitary
    form conserves energy; the timestep never applies the matrix form.
    """
    return _potential(field, angles, 'y', form, scale, pool)


def potential_x(
    field: QubitField,
    angles: PotentialAngles,
    form: str = 'matrix',
    scale: float = 1.0,
    pool: Optional[WorkerPool] = None,
) -> QubitField:
    """x-gradient potential: q5 <- -sin(b0) q1 + cos(b0) q5, q4 <- sin(b2) q2 + cos(b2) q4."""
    return _potential(field, angles, 'x', form, scale, pool)


def collision_matrix(axis: str, theta0: float, theta2: float, sign: int = 1) -> np.ndarray:
    """The 6x6 per-site collision matrix of one axis."""
    axis = normalize_axis(axis)
    sign = _check_sign(sign)
    m = np.eye(6)
    (a0, b0, _), (a2, b2, _) = COLLISION_PAIRS[axis]
    for a, b, theta in ((a0, b0, theta0), (a2, b2, theta2)):
        c, s = np.cos(theta), sign * np.sin(theta)
        m[a, a], m[a, b] = c, -s
        m[b, a], m[b, b] = s, c
    return m
