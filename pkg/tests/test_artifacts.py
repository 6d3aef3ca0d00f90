import sys
import pathlib

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1]))

from qla2d.cli.heatmap import encode_pgm, render_heatmap, write_pgm, write_png
from qla2d.cli.snapshots import encode_snapshot, read_snapshot, write_snapshot
from qla2d.errors import ArtifactError
from qla2d.lattice.core_lattice import LatticeGeometry, QubitField
from qla2d.utils.files import atomic_write_text


def test_snapshot_header_and_layout(tmp_path):
    data = np.arange(6 * 8 * 10, dtype=np.float64).reshape(6, 8, 10)
    raw = encode_snapshot(data, 1500)
    header, body = raw.split(b'\n', 1)
    assert header == b'QLA2D v1 8 10 6 1500'
    assert len(body) == data.size * 8
    assert np.frombuffer(body[:16], dtype='<f8').tolist() == [0.0, 1.0]

    path = write_snapshot(tmp_path / 'field.qla', data, 1500)
    snap = read_snapshot(path)
    assert snap.t == 1500
    assert (snap.ncomp, snap.nx, snap.ny) == (6, 8, 10)
    assert np.array_equal(snap.data, data)
    field = snap.to_field()
    assert isinstance(field, QubitField)
    assert field.geometry == LatticeGeometry(8, 10)


def test_single_component_snapshot(tmp_path):
    hz = np.random.default_rng(0).normal(size=(9, 8))
    snap = read_snapshot(write_snapshot(tmp_path / 'hz.qla', hz, 0))
    assert snap.ncomp == 1
    assert np.array_equal(snap.data[0], hz)
    with pytest.raises(ArtifactError):
        snap.to_field()


def test_corrupt_snapshots_are_rejected(tmp_path):
    truncated = tmp_path / 'short.qla'
    truncated.write_bytes(encode_snapshot(np.zeros((2, 8, 8)), 3)[:-8])
    with pytest.raises(ArtifactError):
        read_snapshot(truncated)
    foreign = tmp_path / 'foreign.qla'
    foreign.write_bytes(b'P5\n8 8\n255\n' + bytes(64))
    with pytest.raises(ArtifactError):
        read_snapshot(foreign)
    with pytest.raises(ArtifactError):
        read_snapshot(tmp_path / 'missing.qla')


def test_zero_field_renders_black():
    image = render_heatmap(np.zeros((8, 6)))
    assert image.shape == (6, 8)
    assert image.dtype == np.uint8
    assert not image.any()


def test_single_positive_spike_is_one_white_pixel():
    values = np.zeros((8, 6))
    values[2, 1] = 0.7
    values[5, 5] = -3.0
    image = render_heatmap(values, 'positive')
    assert int(image.sum()) == 255
    # column x = 2, row counted from the top: y = 1 is the fifth row of six
    assert image[4, 2] == 255


def test_signed_mapping_centers_zero():
    values = np.zeros((4, 4))
    values[0, 0] = 2.0
    values[3, 3] = -2.0
    image = render_heatmap(values, 'signed')
    assert image[0, 3] == 1
    assert image[3, 0] == 255
    assert image[1, 1] == 128


def test_degenerate_fields_render_mid_gray():
    assert np.all(render_heatmap(np.full((5, 5), 0.3), 'positive') == 128)
    assert np.all(render_heatmap(np.full((5, 5), -0.3), 'signed') == 128)
    assert np.all(render_heatmap(np.zeros((5, 5)), 'signed') == 128)


def test_heatmap_rejects_bad_input():
    with pytest.raises(ValueError):
        render_heatmap(np.zeros((4, 4)), 'log')
    bad = np.zeros((4, 4))
    bad[1, 1] = np.nan
    with pytest.raises(ValueError):
        render_heatmap(bad)


def test_pgm_encoding(tmp_path):
    image = np.array([[0, 255, 7], [1, 2, 3]], dtype=np.uint8)
    raw = encode_pgm(image)
    assert raw == b'P5\n3 2\n255\n' + bytes([0, 255, 7, 1, 2, 3])
    path = write_pgm(tmp_path / 'img.pgm', image)
    assert path.read_bytes() == raw


def test_atomic_write_into_missing_directory_fails_cleanly(tmp_path):
    target = tmp_path / 'nope' / 'file.txt'
    with pytest.raises(ArtifactError):
        atomic_write_text(target, 'x')
    assert not target.exists()


def test_png_goes_through_the_atomic_writer(tmp_path):
    pil_image = pytest.importorskip('PIL.Image')
    image = np.array([[0, 255, 7], [1, 2, 3]], dtype=np.uint8)
    path = write_png(tmp_path / 'img.png', image)
    assert not (tmp_path / 'img.png.tmp').exists()
    with pil_image.open(path) as decoded:
        assert np.array_equal(np.asarray(decoded), image)
    target = tmp_path / 'nope' / 'img.png'
    with pytest.raises(ArtifactError):
        write_png(target, image)
    assert not target.exists()
    assert not (tmp_path / 'nope').exists()
