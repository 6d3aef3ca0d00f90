"""8-bit grayscale heatmaps of a scalar lattice field.

Image columns are x and rows are y, with the top row at the largest y.
"""
import io
import logging
from pathlib import Path

import numpy as np

from qla2d.errors import ArtifactError
from qla2d.utils.files import PathLike, atomic_write_bytes

logger = logging.getLogger(__name__)

MAPPINGS = ('positive', 'signed')
MID_GRAY = 128

PIL_AVAILABLE = False
Image = None


def _load_pillow() -> bool:
    global PIL_AVAILABLE, Image
    if PIL_AVAILABLE:
        return True
    try:
        from PIL import Image as pil_image
        Image = pil_image
        PIL_AVAILABLE = True
    except ImportError as e:
        logger.warning(f"Pillow not available, PNG output disabled: {e}")
    return PIL_AVAILABLE


def render_heatmap(values: np.ndarray, mapping: str = 'positive') -> np.ndarray:
    """Map an ``[x, y]`` field to a uint8 image of shape (ny, nx).

    ``positive`` clips at zero and scales the peak to 255 (a field with no
    positive values is black). ``signed`` maps 0 to 128 and +-max|v| to
    255/1. A degenerate field (all values equal and nonzero under the
    mapping) renders uniform mid-gray.
    """
    if mapping not in MAPPINGS:
        raise ValueError(f"mapping must be one of {MAPPINGS}, got {mapping!r}")
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2 or not np.all(np.isfinite(values)):
        raise ValueError("heatmap input must be a finite 2D array")
    if mapping == 'positive':
        clipped = np.maximum(values, 0.0)
        peak = float(clipped.max())
        if peak == 0.0:
            pixels = np.zeros(values.shape)
        elif float(clipped.min()) == peak:
            pixels = np.full(values.shape, float(MID_GRAY))
        else:
            pixels = np.rint(255.0 * clipped / peak)
    else:
        span = float(np.abs(values).max())
        if span == 0.0 or float(values.min()) == float(values.max()):
            pixels = np.full(values.shape, float(MID_GRAY))
        else:
            pixels = np.rint(MID_GRAY + 127.0 * values / span)
    return np.ascontiguousarray(pixels.astype(np.uint8).T[::-1, :])


def encode_pgm(image: np.ndarray) -> bytes:
    image = np.asarray(image, dtype=np.uint8)
    height, width = image.shape
    return f"P5\n{width} {height}\n255\n".encode('ascii') + image.tobytes(order='C')


def write_pgm(path: PathLike, image: np.ndarray) -> Path:
    return atomic_write_bytes(path, encode_pgm(image))


def write_png(path: PathLike, image: np.ndarray) -> Path:
    if not _load_pillow():
        raise ArtifactError("PNG output requested but Pillow is not installed")
    buffer = io.BytesIO()
    Image.fromarray(np.asarray(image, dtype=np.uint8)).save(buffer, format='PNG')
    return atomic_write_bytes(path, buffer.getvalue())
