"""Lattice geometry, qubit field storage, dielectric map and the Dyson map.

The evolved state is six real amplitudes per site. The first three are
the Dyson-scaled electric field, q_i = n_i E_i. The last three are the
magnetic field H. Arrays are indexed ``[x, y]`` and every axis is
periodic.
"""
import logging
from dataclasses import dataclass
from typing import ClassVar, Dict, List, Optional, Sequence, Tuple

import numpy as np

from qla2d.errors import DielectricError, GeometryError, SimulationError

logger = logging.getLogger(__name__)

AXES = ('x', 'y')
AXIS_INDEX = {'x': 0, 'y': 1}


def normalize_axis(axis: str) -> str:
    """Accept ``x``/``y`` and the ``x-split``/``y-split`` spellings."""
    name = str(axis).strip().lower()
    if name.endswith('-split'):
        name = name[:-len('-split')]
    if name not in AXIS_INDEX:
        raise GeometryError(f"axis must be 'x' or 'y', got {axis!r}")
    return name


@dataclass(frozen=True)
class LatticeGeometry:
    """Periodic nx by ny lattice."""

    nx: int
    ny: int
    MIN_SITES: ClassVar[int] = 8
    boundary: ClassVar[str] = 'periodic'

    def __post_init__(self):
        for name in ('nx', 'ny'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise GeometryError(f"{name} must be an integer, got {value!r}")
            if value < self.MIN_SITES:
                raise GeometryError(f"{name}={value} is below the minimum of {self.MIN_SITES} sites")
        object.__setattr__(self, 'nx', int(self.nx))
        object.__setattr__(self, 'ny', int(self.ny))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def n_sites(self) -> int:
        return self.nx * self.ny

    def length(self, axis: str) -> int:
        return self.shape[AXIS_INDEX[normalize_axis(axis)]]

    def wrap(self, i: int, j: int) -> Tuple[int, int]:
        return i % self.nx, j % self.ny

    def coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        """Site coordinates as two float arrays of the lattice shape."""
        x = np.arange(self.nx, dtype=np.float64)
        y = np.arange(self.ny, dtype=np.float64)
        return np.meshgrid(x, y, indexing='ij')


class QubitField:
    """Six real scalar lattices q0..q5 (structure of arrays)."""

    N_COMPONENTS = 6

    def __init__(self, geometry: LatticeGeometry, components: Optional[Sequence[np.ndarray]] = None):
        self.geometry = geometry
        if components is None:
            self.q: List[np.ndarray] = [np.zeros(geometry.shape, dtype=np.float64) for _ in range(self.N_COMPONENTS)]
        else:
            if len(components) != self.N_COMPONENTS:
                raise GeometryError(f"expected {self.N_COMPONENTS} components, got {len(components)}")
            self.q = []
            for c, comp in enumerate(components):
                arr = np.array(comp, dtype=np.float64, order='C', copy=True)
                if arr.shape != geometry.shape:
                    raise GeometryError(f"component q{c} has shape {arr.shape}, expected {geometry.shape}")
                self.q.append(arr)
        # streaming double buffer; swapped with a component on every shift
        self._spare = np.empty(geometry.shape, dtype=np.float64)

    def __getitem__(self, c: int) -> np.ndarray:
        return self.q[c]

    def __len__(self) -> int:
        return self.N_COMPONENTS

    @property
    def shape(self) -> Tuple[int, int]:
        return self.geometry.shape

    def copy(self) -> 'QubitField':
        return QubitField(self.geometry, self.q)

    def read_only(self) -> 'QubitField':
        """Copy whose component arrays reject writes."""
        view = self.copy()
        for arr in view.q:
            arr.setflags(write=False)
        return view

    def as_array(self) -> np.ndarray:
        """Stacked ``(6, nx, ny)`` copy of the amplitudes."""
        return np.stack(self.q)

    @classmethod
    def from_array(cls, geometry: LatticeGeometry, data: np.ndarray) -> 'QubitField':
        data = np.asarray(data, dtype=np.float64)
        expected = (cls.N_COMPONENTS,) + geometry.shape
        if data.shape != expected:
            raise GeometryError(f"field array has shape {data.shape}, expected {expected}")
        if not np.all(np.isfinite(data)):
            raise SimulationError("field array contains non-finite values")
        return cls(geometry, list(data))

    def value_at(self, c: int, i: int, j: int) -> float:
        """Periodic read of component ``c`` at site (i, j)."""
        i, j = self.geometry.wrap(i, j)
        return float(self.q[c][i, j])

    def is_finite(self) -> bool:
        return all(np.isfinite(arr).all() for arr in self.q)

    def scale(self, factor: float) -> 'QubitField':
        return QubitField(self.geometry, [factor * arr for arr in self.q])

    def __add__(self, other: 'QubitField') -> 'QubitField':
        return QubitField(self.geometry, [a + b for a, b in zip(self.q, other.q)])


def new_field(geometry: LatticeGeometry) -> QubitField:
    """Zero field on a validated geometry."""
    return QubitField(geometry)


@dataclass(frozen=True)
class InterfaceLayout:
    """Planar interface recorded by set_halfspace_dielectric.

    Region 2 is every site whose coordinate along ``axis`` is at least
    ``split``; region 1 is the rest. The partition is sharp whatever the
    smoothing width of the index profile.
    """

    axis: str
    split: int
    n_left: float
    n_right: float
    smoothing: float


class DielectricMap:
    """Per-site diagonal refractive index with cached 1/n and its centered differences."""

    def __init__(self, geometry: LatticeGeometry, n: float = 1.0):
        self.geometry = geometry
        self.version = 0
        self.interface: Optional[InterfaceLayout] = None
        self._n: List[np.ndarray] = []
        self._inv: List[np.ndarray] = []
        self._dinv: Dict[Tuple[int, str], np.ndarray] = {}
        self.set_index(np.full(geometry.shape, float(n)))

    def set_index(self, n_x, n_y=None, n_z=None) -> 'DielectricMap':
        """Replace the index components (scalars or lattice arrays) and rebuild the caches."""
        comps = []
        for name, value in (('n_x', n_x), ('n_y', n_y if n_y is not None else n_x), ('n_z', n_z if n_z is not None else n_x)):
            try:
                arr = np.array(np.broadcast_to(np.asarray(value, dtype=np.float64), self.geometry.shape))
            except ValueError as e:
                raise DielectricError(f"{name} does not match the lattice shape {self.geometry.shape}") from e
            if not np.all(np.isfinite(arr)):
                raise DielectricError(f"{name} contains non-finite values")
            if np.any(arr <= 0):
                raise DielectricError(f"{name} must be positive everywhere (min {arr.min():g})")
            arr.setflags(write=False)
            comps.append(arr)
        self._n = comps
        self._inv = []
        for arr in comps:
            inv = 1.0 / arr
            inv.setflags(write=False)
            self._inv.append(inv)
        self._dinv = {}
        for c, inv in enumerate(self._inv):
            for axis, ax in AXIS_INDEX.items():
                diff = 0.5 * (np.roll(inv, -1, axis=ax) - np.roll(inv, 1, axis=ax))
                diff.setflags(write=False)
                self._dinv[(c, axis)] = diff
        self.interface = None
        self.version += 1
        return self

    @property
    def n_x(self) -> np.ndarray:
        return self._n[0]

    @property
    def n_y(self) -> np.ndarray:
        return self._n[1]

    @property
    def n_z(self) -> np.ndarray:
        return self._n[2]

    def index(self, component: int) -> np.ndarray:
        return self._n[component]

    def inverse(self, component: int) -> np.ndarray:
        return self._inv[component]

    def inverse_difference(self, component: int, axis: str) -> np.ndarray:
        """Centered difference (1/n(+1) - 1/n(-1)) / 2 along ``axis``."""
        return self._dinv[(component, normalize_axis(axis))]

    def is_homogeneous(self) -> bool:
        return all(float(arr.min()) == float(arr.max()) for arr in self._n)


def halfspace_profile(length: int, split: int, n_left: float, n_right: float, width: float) -> np.ndarray:
    """One-dimensional index profile of a periodic half-space.

    The medium-2 band [split, length) has interfaces at split - 0.5 and at
    the periodic seam length - 0.5. A positive width replaces each jump by
    a tanh ramp; the nearest periodic images are included.
    """
    u = np.arange(length, dtype=np.float64)
    if width == 0:
        s = (u >= split).astype(np.float64)
    else:
        lower = split - 0.5
        upper = length - 0.5
        s = np.zeros(length, dtype=np.float64)
        for m in (-1, 0, 1):
            shifted = u + m * length
            s += 0.5 * (np.tanh((shifted - lower) / width) - np.tanh((shifted - upper) / width))
    return n_left + (n_right - n_left) * s


def set_halfspace_dielectric(
    dmap: DielectricMap,
    axis: str,
    split_fraction: float,
    n_left: float,
    n_right: float,
    smoothing_width: float = 2.0,
) -> DielectricMap:
    """Two-medium half-space: ``n_left`` below the split, ``n_right`` from it on."""
    axis = normalize_axis(axis)
    for name, value in (('n_left', n_left), ('n_right', n_right)):
        if not np.isfinite(value) or value <= 0:
            raise DielectricError(f"{name} must be a positive finite index, got {value!r}")
    if not (0.0 < split_fraction < 1.0):
        raise DielectricError(f"split_fraction must lie in (0, 1), got {split_fraction!r}")
    if not np.isfinite(smoothing_width) or smoothing_width < 0:
        raise DielectricError(f"smoothing_width must be >= 0, got {smoothing_width!r}")

    length = dmap.geometry.length(axis)
    split = int(round(split_fraction * length))
    if split <= 0 or split >= length:
        raise DielectricError(f"split_fraction {split_fraction} leaves an empty region on {length} sites")

    profile = halfspace_profile(length, split, float(n_left), float(n_right), float(smoothing_width))
    if axis == 'x':
        n = np.broadcast_to(profile[:, None], dmap.geometry.shape)
    else:
        n = np.broadcast_to(profile[None, :], dmap.geometry.shape)
    dmap.set_index(n, n, n)
    dmap.interface = InterfaceLayout(axis, split, float(n_left), float(n_right), float(smoothing_width))
    logger.debug(
        f"Half-space dielectric {n_left:g}|{n_right:g} split at {axis}={split}, width {smoothing_width:g}"
    )
    return dmap


def region_mask(dmap: DielectricMap, region: int) -> np.ndarray:
    """Boolean lattice mask of region 1 or region 2."""
    if region not in (1, 2):
        raise DielectricError(f"region must be 1 or 2, got {region!r}")
    shape = dmap.geometry.shape
    layout = dmap.interface
    if layout is None:
        return np.full(shape, region == 1)
    ax = AXIS_INDEX[layout.axis]
    u = np.arange(shape[ax])
    in_two = u >= layout.split
    in_two = in_two[:, None] if ax == 0 else in_two[None, :]
    mask = np.broadcast_to(in_two, shape)
    return np.array(mask if region == 2 else ~mask)


@dataclass
class PhysicalFields:
    """Lattice-unit E and H fields."""

    E_x: np.ndarray
    E_y: np.ndarray
    E_z: np.ndarray
    H_x: np.ndarray
    H_y: np.ndarray
    H_z: np.ndarray

    def components(self) -> List[np.ndarray]:
        return [self.E_x, self.E_y, self.E_z, self.H_x, self.H_y, self.H_z]


def to_physical(field: QubitField, dmap: DielectricMap) -> PhysicalFields:
    """Inverse Dyson map: E_i = q_i / n_i, H = (q3, q4, q5)."""
    return PhysicalFields(
        E_x=field.q[0] / dmap.n_x,
        E_y=field.q[1] / dmap.n_y,
        E_z=field.q[2] / dmap.n_z,
        H_x=field.q[3].copy(),
        H_y=field.q[4].copy(),
        H_z=field.q[5].copy(),
    )


def from_physical(phys: PhysicalFields, dmap: DielectricMap) -> QubitField:
    """Dyson map: q_i = n_i E_i, q3..q5 = H."""
    return QubitField(
        dmap.geometry,
        [
            dmap.n_x * phys.E_x,
            dmap.n_y * phys.E_y,
            dmap.n_z * phys.E_z,
            phys.H_x,
            phys.H_y,
            phys.H_z,
        ],
    )
