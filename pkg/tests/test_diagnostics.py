import sys
import pathlib

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1]))

from qla2d.errors import ArtifactError, DiagnosticError
from qla2d.lattice.core_lattice import DielectricMap, LatticeGeometry, QubitField, region_mask, set_halfspace_dielectric
from qla2d.physics.diagnostics import (
    LEDGER_COLUMNS,
    EnergyLedger,
    LedgerRow,
    divergence_metrics,
    energy_centroid,
    energy_density,
    ledger_row,
    longitudinal_energy,
    poynting_field,
    region_energy,
    total_energy,
)
from qla2d.physics.pulses import PulseSpec, init_pulse


def random_field(geom, seed=0):
    return QubitField.from_array(geom, np.random.default_rng(seed).normal(size=(6,) + geom.shape))


def test_energy_density_and_total():
    geom = LatticeGeometry(8, 8)
    field = QubitField(geom)
    field.q[0][1, 2] = 3.0
    field.q[5][1, 2] = 4.0
    field.q[3][7, 7] = 1.0
    density = energy_density(field)
    assert density[1, 2] == 25.0
    assert total_energy(field) == 26.0


def test_region_energies_partition_the_total():
    geom = LatticeGeometry(16, 12)
    dmap = set_halfspace_dielectric(DielectricMap(geom), 'x', 0.5, 1.0, 2.0)
    field = random_field(geom)
    e1 = region_energy(field, region_mask(dmap, 1))
    e2 = region_energy(field, region_mask(dmap, 2))
    assert e1 + e2 == pytest.approx(total_energy(field), rel=1e-14)
    with pytest.raises(DiagnosticError):
        region_energy(field, np.ones((3, 3), dtype=bool))


def test_centroid():
    geom = LatticeGeometry(16, 16)
    field = QubitField(geom)
    field.q[4][5, 7] = 2.0
    assert energy_centroid(field) == (5.0, 7.0)
    field.q[1][9, 7] = 2.0
    assert energy_centroid(field) == pytest.approx((7.0, 7.0))
    mask = np.zeros(geom.shape, dtype=bool)
    mask[8:, :] = True
    assert energy_centroid(field, mask) == pytest.approx((9.0, 7.0))
    with pytest.raises(DiagnosticError):
        energy_centroid(QubitField(geom))


def test_longitudinal_energy_separates_transverse_and_longitudinal_fields():
    geom = LatticeGeometry(32, 16)
    x, y = geom.coordinates()
    transverse = QubitField(geom)
    transverse.q[0][:, :] = np.cos(2 * np.pi * y / 16)
    assert longitudinal_energy(transverse) == pytest.approx(0.0, abs=1e-20)

    longitudinal = QubitField(geom)
    longitudinal.q[0][:, :] = np.cos(2 * np.pi * x / 32)
    assert longitudinal_energy(longitudinal) == pytest.approx(32 * 16 / 2, rel=1e-12)

    uniform = QubitField(geom)
    uniform.q[1][:, :] = 1.0
    assert longitudinal_energy(uniform) == pytest.approx(0.0, abs=1e-20)


def test_divergence_of_initial_pulse():
    geom = LatticeGeometry(128, 128)
    dmap = set_halfspace_dielectric(DielectricMap(geom), 'x', 0.5, 1.0, 2.0)
    field = init_pulse(geom, dmap, PulseSpec(4.0, 12.0, 8.0, 25.0))
    div_h, div_e = divergence_metrics(field, dmap)
    assert div_h == 0.0
    assert 0.0 < div_e < 0.5


def test_poynting_field_shape_and_direction():
    geom = LatticeGeometry(16, 16)
    dmap = DielectricMap(geom, 2.0)
    field = QubitField(geom)
    field.q[1][:, :] = 2.0  # E_y = 1
    field.q[5][:, :] = 3.0
    s = poynting_field(field, dmap)
    assert s.shape == (2, 16, 16)
    assert np.allclose(s[0], 3.0)
    assert np.allclose(s[1], 0.0)


def test_ledger_row_fields():
    geom = LatticeGeometry(16, 12)
    dmap = set_halfspace_dielectric(DielectricMap(geom), 'x', 0.5, 1.0, 2.0)
    field = random_field(geom, seed=4)
    row = ledger_row(7, field, dmap)
    assert row.t == 7
    assert row.E_total == pytest.approx(total_energy(field), rel=1e-14)
    assert row.E_total == row.E_region1 + row.E_region2
    assert (row.cx, row.cy) == pytest.approx(energy_centroid(field))


def test_ledger_row_of_zero_field_has_undefined_centroid():
    geom = LatticeGeometry(8, 8)
    row = ledger_row(0, QubitField(geom), DielectricMap(geom))
    assert row.E_total == 0.0
    assert np.isnan(row.cx) and np.isnan(row.cy)


def make_row(t, energy):
    return LedgerRow(t, energy, energy * 0.75, energy * 0.25, 0.0, 1e-3, 4.5, 6.25)


def test_ledger_requires_increasing_time():
    ledger = EnergyLedger([make_row(0, 1.0), make_row(5, 1.0)])
    with pytest.raises(DiagnosticError):
        ledger.append(make_row(5, 1.0))
    assert len(ledger) == 2


def test_ledger_drift():
    ledger = EnergyLedger([make_row(0, 2.0), make_row(1, 2.0 + 2e-9), make_row(2, 2.0 - 4e-9)])
    assert ledger.max_relative_drift() == pytest.approx(2e-9, rel=1e-6)
    assert EnergyLedger().max_relative_drift() == 0.0


def test_ledger_csv_round_trip_is_exact(tmp_path):
    rows = [make_row(0, 1.0 / 3.0), make_row(500, 0.1 + 0.2), make_row(1000, np.pi)]
    ledger = EnergyLedger(rows)
    path = ledger.write_csv(tmp_path / 'ledger.csv')
    header = path.read_text().splitlines()[0]
    assert header.split(',') == LEDGER_COLUMNS
    assert EnergyLedger.read_csv(path).rows == rows
    assert not (tmp_path / 'ledger.csv.tmp').exists()


def test_ledger_write_into_missing_directory_fails_cleanly(tmp_path):
    target = tmp_path / 'nope' / 'ledger.csv'
    with pytest.raises(ArtifactError):
        EnergyLedger([make_row(0, 1.0)]).write_csv(target)
    assert not target.exists()


def test_ledger_frame():
    frame = EnergyLedger([make_row(0, 1.0), make_row(10, 1.0)]).to_frame()
    assert list(frame.columns) == LEDGER_COLUMNS
    assert frame['t'].tolist() == [0, 10]


def test_ledger_read_errors(tmp_path):
    with pytest.raises(ArtifactError):
        EnergyLedger.read_csv(tmp_path / 'missing.csv')
    bad = tmp_path / 'bad.csv'
    bad.write_text('a,b\n1,2\n')
    with pytest.raises(ArtifactError):
        EnergyLedger.read_csv(bad)
