"""Binary field snapshots.

An ASCII header line ``QLA2D v1 <nx> <ny> <ncomp> <t>`` is followed by
little-endian float64 data, components outermost, each component an
``[x, y]`` array in C order.
"""
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from qla2d.errors import ArtifactError
from qla2d.lattice.core_lattice import LatticeGeometry, QubitField
from qla2d.utils.files import PathLike, atomic_write_bytes

MAGIC = 'QLA2D'
VERSION = 'v1'


@dataclass
class Snapshot:
    t: int
    data: np.ndarray  # (ncomp, nx, ny)

    @property
    def ncomp(self) -> int:
        return self.data.shape[0]

    @property
    def nx(self) -> int:
        return self.data.shape[1]

    @property
    def ny(self) -> int:
        return self.data.shape[2]

    def to_field(self) -> QubitField:
        if self.ncomp != QubitField.N_COMPONENTS:
            raise ArtifactError(f"snapshot holds {self.ncomp} components, a field needs {QubitField.N_COMPONENTS}")
        return QubitField.from_array(LatticeGeometry(self.nx, self.ny), self.data)


def encode_snapshot(data: np.ndarray, t: int) -> bytes:
    data = np.asarray(data, dtype=np.float64)
    if data.ndim == 2:
        data = data[None]
    if data.ndim != 3:
        raise ArtifactError(f"snapshot data must be (ncomp, nx, ny), got shape {data.shape}")
    ncomp, nx, ny = data.shape
    header = f"{MAGIC} {VERSION} {nx} {ny} {ncomp} {int(t)}\n".encode('ascii')
    return header + data.astype('<f8').tobytes(order='C')


def write_snapshot(path: PathLike, data: np.ndarray, t: int) -> Path:
    return atomic_write_bytes(path, encode_snapshot(data, t))


def read_snapshot(path: PathLike) -> Snapshot:
    try:
        raw = Path(path).read_bytes()
    except OSError as e:
        raise ArtifactError(f"could not read snapshot {path}: {e}") from e
    newline = raw.find(b'\n')
    if newline < 0:
        raise ArtifactError(f"{path}: missing snapshot header")
    parts = raw[:newline].decode('ascii', errors='replace').split()
    if len(parts) != 6 or parts[0] != MAGIC or parts[1] != VERSION:
        raise ArtifactError(f"{path}: not a {MAGIC} {VERSION} snapshot")
    try:
        nx, ny, ncomp, t = (int(v) for v in parts[2:])
    except ValueError as e:
        raise ArtifactError(f"{path}: malformed snapshot header") from e
    body = raw[newline + 1:]
    expected = ncomp * nx * ny * 8
    if len(body) != expected:
        raise ArtifactError(f"{path}: expected {expected} data bytes, found {len(body)}")
    data = np.frombuffer(body, dtype='<f8').astype(np.float64).reshape(ncomp, nx, ny)
    return Snapshot(t, data)
