"""Energy, divergence, Poynting and centroid diagnostics plus the energy ledger."""
import logging
from dataclasses import astuple, dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from qla2d.errors import ArtifactError, DiagnosticError
from qla2d.lattice.core_lattice import DielectricMap, QubitField, region_mask, to_physical
from qla2d.utils.files import atomic_write_text

logger = logging.getLogger(__name__)

LEDGER_COLUMNS = ['t', 'E_total', 'E_region1', 'E_region2', 'divH_max', 'divE_rel', 'cx', 'cy']


def _dx(f: np.ndarray) -> np.ndarray:
    return 0.5 * (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0))


def _dy(f: np.ndarray) -> np.ndarray:
    return 0.5 * (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1))


def energy_density(field: QubitField) -> np.ndarray:
    """Per-site sum of squared amplitudes."""
    density = np.zeros(field.shape, dtype=np.float64)
    for arr in field.q:
        density += arr * arr
    return density


def total_energy(field: QubitField) -> float:
    return float(np.sum(energy_density(field)))


def region_energy(field: QubitField, mask: np.ndarray) -> float:
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != field.shape:
        raise DiagnosticError(f"mask shape {mask.shape} does not match lattice {field.shape}")
    return float(np.sum(energy_density(field), where=mask))


def divergence_metrics(field: QubitField, dmap: DielectricMap) -> Tuple[float, float]:
    """(max |div H|, max |div(eps E)| / max |E|) with centered differences."""
    div_h = _dx(field.q[3]) + _dy(field.q[4])
    divh_max = float(np.max(np.abs(div_h)))
    # eps E_i = n_i^2 (q_i / n_i) = n_i q_i
    div_d = _dx(dmap.n_x * field.q[0]) + _dy(dmap.n_y * field.q[1])
    phys = to_physical(field, dmap)
    e_max = float(np.sqrt(np.max(phys.E_x ** 2 + phys.E_y ** 2 + phys.E_z ** 2)))
    dive_rel = float(np.max(np.abs(div_d))) / e_max if e_max > 0 else 0.0
    return divh_max, dive_rel


def poynting_field(field: QubitField, dmap: DielectricMap) -> np.ndarray:
    """In-plane S = E x H as a ``(2, nx, ny)`` array."""
    phys = to_physical(field, dmap)
    s_x = phys.E_y * phys.H_z - phys.E_z * phys.H_y
    s_y = phys.E_z * phys.H_x - phys.E_x * phys.H_z
    return np.stack([s_x, s_y])


def energy_centroid(field: QubitField, mask: Optional[np.ndarray] = None) -> Tuple[float, float]:
    """Energy-weighted mean site position over ``mask`` (whole lattice when omitted)."""
    density = energy_density(field)
    if mask is not None:
        density = np.where(np.asarray(mask, dtype=bool), density, 0.0)
    weight = float(np.sum(density))
    if weight <= 0.0:
        raise DiagnosticError("centroid of a region with zero energy")
    x, y = field.geometry.coordinates()
    return float(np.sum(density * x) / weight), float(np.sum(density * y) / weight)


def longitudinal_energy(field: QubitField) -> float:
    """Energy in the curl-free part of (q0, q1), by FFT Helmholtz projection.

    The uniform (k = 0) mode is both curl- and divergence-free and is not
    counted.
    """
    nx, ny = field.shape
    f0 = np.fft.fft2(field.q[0])
    f1 = np.fft.fft2(field.q[1])
    kx = 2.0 * np.pi * np.fft.fftfreq(nx)[:, None]
    ky = 2.0 * np.pi * np.fft.fftfreq(ny)[None, :]
    k2 = kx * kx + ky * ky
    k_dot_f = kx * f0 + ky * f1
    with np.errstate(divide='ignore', invalid='ignore'):
        longitudinal = np.where(k2 > 0, np.abs(k_dot_f) ** 2 / k2, 0.0)
    return float(np.sum(longitudinal) / (nx * ny))


@dataclass(frozen=True)
class LedgerRow:
    t: int
    E_total: float
    E_region1: float
    E_region2: float
    divH_max: float
    divE_rel: float
    cx: float
    cy: float


def ledger_row(t: int, field: QubitField, dmap: DielectricMap) -> LedgerRow:
    """One ledger row; E_total is the sum of the two region energies."""
    density = energy_density(field)
    two = region_mask(dmap, 2)
    e2 = float(np.sum(density, where=two))
    e1 = float(np.sum(density, where=~two))
    divh, dive = divergence_metrics(field, dmap)
    total = e1 + e2
    if total > 0:
        x, y = field.geometry.coordinates()
        cx = float(np.sum(density * x) / np.sum(density))
        cy = float(np.sum(density * y) / np.sum(density))
    else:
        cx = cy = float('nan')
    return LedgerRow(int(t), total, e1, e2, divh, dive, cx, cy)


class EnergyLedger:
    """Time series of ledger rows with strictly increasing t."""

    def __init__(self, rows: Optional[List[LedgerRow]] = None):
        self.rows: List[LedgerRow] = []
        for row in rows or []:
            self.append(row)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def append(self, row: LedgerRow) -> None:
        if self.rows and row.t <= self.rows[-1].t:
            raise DiagnosticError(f"ledger rows must increase in t: {row.t} after {self.rows[-1].t}")
        self.rows.append(row)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([astuple(r) for r in self.rows], columns=LEDGER_COLUMNS).astype({'t': 'int64'})

    def max_relative_drift(self) -> float:
        """max_t |E_total(t) / E_total(t0) - 1|."""
        if not self.rows or self.rows[0].E_total == 0:
            return 0.0
        e0 = self.rows[0].E_total
        return max(abs(r.E_total / e0 - 1.0) for r in self.rows)

    def write_csv(self, path: Union[str, Path]) -> Path:
        """Atomic CSV write with round-trip float formatting."""
        return atomic_write_text(path, self.to_frame().to_csv(index=False, float_format='%.17g'))

    @classmethod
    def read_csv(cls, path: Union[str, Path]) -> 'EnergyLedger':
        try:
            frame = pd.read_csv(path, float_precision='round_trip')
        except (OSError, pd.errors.ParserError) as e:
            raise ArtifactError(f"could not read ledger {path}: {e}") from e
        if list(frame.columns) != LEDGER_COLUMNS:
            raise ArtifactError(f"unexpected ledger header {list(frame.columns)}")
        rows = [
            LedgerRow(int(rec.t), float(rec.E_total), float(rec.E_region1), float(rec.E_region2),
                      float(rec.divH_max), float(rec.divE_rel), float(rec.cx), float(rec.cy))
            for rec in frame.itertuples(index=False)
        ]
        return cls(rows)
