"""Timestep schedule and run driver.

One iteration of the second-order scheme is four mirrored collide-stream
sweeps (two per axis, one per component set, 8 entries each) followed by
one potential per axis: 32 unitary entries and 2 potentials. The first
order variant keeps the first half of every sweep.

The potentials inside the timestep are always the orthogonal (polar)
factor of the per-site potential matrix, so every entry is a rotation and
the whole iteration is invertible by sign reversal.
"""
import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, Optional, Tuple

from qla2d.errors import RunAborted, ScheduleError, SimulationError
from qla2d.lattice.core_lattice import DielectricMap, QubitField
from qla2d.lattice.operators import (
    CollisionAngles,
    PotentialAngles,
    collide_x,
    collide_y,
    compute_collision_angles,
    compute_potential_angles,
    potential_x,
    potential_y,
    stream,
    validate_epsilon,
)
from qla2d.utils.workers import WorkerPool

logger = logging.getLogger(__name__)

COLLIDE = 'collide'
STREAM = 'stream'
POTENTIAL = 'potential'

# (axis, component set, s) in execution order
SWEEPS: Tuple[Tuple[str, str, int], ...] = (
    ('x', 'A', +1),
    ('x', 'B', -1),
    ('y', 'A', -1),
    ('y', 'B', +1),
)
# collide signs (as multiples of s) and stream shifts of one sweep
SWEEP_COLLIDE = (-1, +1, +1, -1)
SWEEP_SHIFT = (+1, -1, -1, +1)
TIMESTEP_POTENTIAL_FORM = 'unitary'


@dataclass(frozen=True)
class ScheduleEntry:
    kind: str
    axis: str
    component_set: Optional[str] = None
    sign: int = 0
    shift: int = 0
    scale: float = 1.0

    @property
    def unitary(self) -> bool:
        return self.kind != POTENTIAL

    def inverse(self) -> 'ScheduleEntry':
        if self.kind == COLLIDE:
            return replace(self, sign=-self.sign)
        if self.kind == STREAM:
            return replace(self, shift=-self.shift)
        return replace(self, scale=-self.scale)


@dataclass(frozen=True)
class EvolutionSchedule:
    """Ordered operator applications making up one iteration."""

    entries: Tuple[ScheduleEntry, ...]
    order: int = 2
    time_per_step: float = 1.0

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def unitary_count(self) -> int:
        return sum(1 for e in self.entries if e.unitary)

    @property
    def potential_count(self) -> int:
        return sum(1 for e in self.entries if not e.unitary)

    def unitary_part(self) -> 'EvolutionSchedule':
        return replace(self, entries=tuple(e for e in self.entries if e.unitary))

    def inverse(self) -> 'EvolutionSchedule':
        """Entries reversed and individually inverted."""
        return replace(self, entries=tuple(e.inverse() for e in reversed(self.entries)))


def build_schedule(eps: float, order: int = 2) -> EvolutionSchedule:
    """Deterministic schedule for one iteration.

    Args:
        eps: discreteness parameter; validated here, the angles carry its value.
        order: 2 for the 32-entry mirrored interleave, 1 for the 16-entry variant.
    """
    validate_epsilon(eps)
    if order not in (1, 2):
        raise ScheduleError(f"order must be 1 or 2, got {order!r}")
    parts = 4 if order == 2 else 2
    entries = []
    for axis, cset, s in SWEEPS:
        for p in range(parts):
            entries.append(ScheduleEntry(COLLIDE, axis, cset, sign=SWEEP_COLLIDE[p] * s))
            entries.append(ScheduleEntry(STREAM, axis, cset, shift=SWEEP_SHIFT[p]))
    time_per_step = 1.0 if order == 2 else 0.5
    for axis in ('x', 'y'):
        entries.append(ScheduleEntry(POTENTIAL, axis, scale=time_per_step))
    return EvolutionSchedule(tuple(entries), order, time_per_step)


@dataclass
class PreparedOperators:
    """Angles for both axes with cached trigonometry, tied to one map version."""

    eps: float
    map_version: int
    collisions: Dict[str, CollisionAngles]
    potentials: Dict[str, PotentialAngles]

    def is_current(self, dmap: DielectricMap, eps: float) -> bool:
        return self.map_version == dmap.version and self.eps == eps


def prepare_operators(dmap: DielectricMap, eps: float) -> PreparedOperators:
    eps = validate_epsilon(eps, allow_zero=True)
    return PreparedOperators(
        eps=eps,
        map_version=dmap.version,
        collisions={axis: compute_collision_angles(dmap, eps, axis) for axis in ('x', 'y')},
        potentials={axis: compute_potential_angles(dmap, eps, axis) for axis in ('x', 'y')},
    )


_COLLIDE_FN = {'x': collide_x, 'y': collide_y}
_POTENTIAL_FN = {'x': potential_x, 'y': potential_y}


def apply_schedule(
    field: QubitField,
    schedule: EvolutionSchedule,
    operators: PreparedOperators,
    pool: Optional[WorkerPool] = None,
) -> QubitField:
    """Apply every entry of ``schedule`` to ``field`` in order, in place."""
    for entry in schedule.entries:
        if entry.kind == COLLIDE:
            _COLLIDE_FN[entry.axis](field, operators.collisions[entry.axis], entry.sign, pool=pool)
        elif entry.kind == STREAM:
            stream(field, entry.axis, entry.component_set, entry.shift, pool=pool)
        else:
            angles = operators.potentials[entry.axis]
            if angles.vanishes:
                continue
            _POTENTIAL_FN[entry.axis](field, angles, form=TIMESTEP_POTENTIAL_FORM, scale=entry.scale, pool=pool)
    return field


@dataclass
class RunState:
    field: QubitField
    t: int
    schedule: EvolutionSchedule
    eps: float

    def view(self) -> 'RunState':
        """Read-only copy handed to sinks."""
        return RunState(self.field.read_only(), self.t, self.schedule, self.eps)

    @property
    def time(self) -> float:
        """Physical time eps * time_per_step * t."""
        return self.eps * self.schedule.time_per_step * self.t


Sink = Callable[[RunState], None]


def initial_state(field: QubitField, eps: float, order: int = 2) -> RunState:
    return RunState(field, 0, build_schedule(eps, order), validate_epsilon(eps))


class Evolver:
    """Advances RunStates on one dielectric map."""

    def __init__(self, dmap: DielectricMap, pool: Optional[WorkerPool] = None):
        self.dmap = dmap
        self.pool = pool
        self.logger = logging.getLogger(__name__)
        self._operators: Optional[PreparedOperators] = None

    def operators(self, eps: float) -> PreparedOperators:
        ops = self._operators
        if ops is None or not ops.is_current(self.dmap, eps):
            if ops is not None:
                self.logger.warning("Dielectric map or eps changed; recomputing operator angles")
            ops = prepare_operators(self.dmap, eps)
            self._operators = ops
        return ops

    def step(self, state: RunState) -> RunState:
        apply_schedule(state.field, state.schedule, self.operators(state.eps), self.pool)
        state.t += 1
        if not state.field.is_finite():
            raise SimulationError(f"non-finite amplitudes after iteration {state.t}")
        return state

    def run(self, state: RunState, n_steps: int, cadence: int, sink: Optional[Sink] = None) -> RunState:
        """Advance ``n_steps`` iterations, calling ``sink`` at t = 0 mod cadence and at the final t."""
        if isinstance(n_steps, bool) or int(n_steps) != n_steps or n_steps < 0:
            raise ScheduleError(f"n_steps must be a non-negative integer, got {n_steps!r}")
        if isinstance(cadence, bool) or int(cadence) != cadence or cadence < 1:
            raise ScheduleError(f"cadence must be a positive integer, got {cadence!r}")
        n_steps, cadence = int(n_steps), int(cadence)
        end = state.t + n_steps
        self.logger.info(
            f"Running {n_steps} iterations (order {state.schedule.order}, eps {state.eps:g})",
            extra={'context': {'t0': state.t, 'cadence': cadence}},
        )

        def emit() -> None:
            if sink is None:
                return
            try:
                sink(state.view())
            except Exception as e:
                raise RunAborted(f"sink failed at t={state.t}: {e}", state) from e

        if state.t % cadence == 0 or n_steps == 0:
            emit()
        while state.t < end:
            try:
                self.step(state)
            except SimulationError as e:
                raise RunAborted(str(e), state) from e
            if state.t % cadence == 0 or state.t == end:
                emit()
        return state


def step(state: RunState, dmap: DielectricMap, pool: Optional[WorkerPool] = None) -> RunState:
    """Advance one iteration in place and return the state."""
    return Evolver(dmap, pool).step(state)


def run(
    state: RunState,
    dmap: DielectricMap,
    n_steps: int,
    cadence: int,
    sink: Optional[Sink] = None,
    pool: Optional[WorkerPool] = None,
) -> RunState:
    return Evolver(dmap, pool).run(state, n_steps, cadence, sink)
