import sys
import math
import pathlib

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1]))

from qla2d.errors import PulseError
from qla2d.lattice.core_lattice import DielectricMap, LatticeGeometry, region_mask, set_halfspace_dielectric
from qla2d.physics.diagnostics import energy_centroid, energy_density, region_energy
from qla2d.physics.pulses import (
    PulseSpec,
    commensurate_theta,
    get_preset,
    init_pulse,
    init_slab_pulse,
    pulse_center,
    pulse_direction_angle,
    pulse_poynting_direction,
    rotate_to_lab,
    rotate_to_packet,
    scenario_presets,
)


def desk_setup(axis='x', n1=1.0, n2=2.0, size=256):
    geom = LatticeGeometry(size, size)
    dmap = set_halfspace_dielectric(DielectricMap(geom), axis, 0.5, n1, n2)
    return geom, dmap


def test_presets_and_scaling():
    burst = get_preset('burst')
    assert (burst.zeta_w, burst.chi_w, burst.gamma_w) == (20.0, 100.0, 20.0)
    spec = PulseSpec.from_preset('burst', 25.0, scale=0.25)
    assert (spec.zeta_w, spec.chi_w, spec.gamma_w) == (5.0, 25.0, 5.0)
    with pytest.raises(PulseError):
        get_preset('gaussian')


def test_scenario_table():
    table = scenario_presets()
    assert list(table['scenario']) == ['burst_denser', 'thin_long_denser', 'burst_rarer', 'thin_long_rarer', 'finite_rarer']
    row = table.set_index('scenario').loc['thin_long_rarer']
    assert (row['n1'], row['n2'], row['pulse']) == (2.0, 1.0, 'thin_long')
    assert row['zeta_w'] == 100.0


def test_pulse_spec_validation():
    with pytest.raises(PulseError):
        PulseSpec(5.0, -5.0, 5.0, 25.0)
    with pytest.raises(PulseError):
        PulseSpec(5.0, 5.0, 5.0, 90.0)
    with pytest.raises(PulseError):
        PulseSpec(5.0, 5.0, 5.0, 25.0, zeta0=10.0)
    with pytest.raises(PulseError):
        PulseSpec(5.0, 5.0, 5.0, 25.0, carrier='relative')
    with pytest.raises(PulseError):
        PulseSpec(5.0, 5.0, 5.0, 25.0, overlap_tolerance=0.0)


def test_frame_rotations_are_inverse():
    x, y = rotate_to_lab(12.0, -3.0, 25.0)
    zeta, chi = rotate_to_packet(x, y, 25.0)
    assert (zeta, chi) == pytest.approx((12.0, -3.0))
    # the zeta axis points along (cos t, -sin t)
    assert rotate_to_lab(1.0, 0.0, 30.0) == pytest.approx((math.cos(math.radians(30)), -0.5))


def test_default_center_is_middle_of_medium_one():
    geom, dmap = desk_setup()
    assert pulse_center(geom, dmap, PulseSpec(5, 25, 5, 25)) == (64.0, 128.0)
    geom, dmap = desk_setup(axis='y')
    assert pulse_center(geom, dmap, PulseSpec(5, 25, 5, 25)) == (128.0, 64.0)


def test_explicit_center_outside_lattice_is_rejected():
    geom, dmap = desk_setup()
    with pytest.raises(PulseError):
        pulse_center(geom, dmap, PulseSpec(5, 25, 5, 0.0, zeta0=300.0, chi0=10.0))


def test_burst_pulse_sits_in_medium_one():
    geom, dmap = desk_setup()
    field = init_pulse(geom, dmap, PulseSpec.from_preset('burst', 25.0, scale=0.25))
    density = energy_density(field)
    total = float(density.sum())
    assert total > 0
    assert region_energy(field, region_mask(dmap, 2)) / total < 1e-12
    # H is purely out of plane
    assert not np.any(field.q[3]) and not np.any(field.q[4]) and not np.any(field.q[2])
    assert energy_centroid(field) == pytest.approx((64.0, 128.0), abs=0.05)


def test_pulse_energy_is_split_evenly_between_e_and_h():
    geom, dmap = desk_setup()
    field = init_pulse(geom, dmap, PulseSpec.from_preset('burst', 25.0, scale=0.25))
    e_part = sum(float(np.sum(field.q[c] ** 2)) for c in range(3))
    h_part = float(np.sum(field.q[5] ** 2))
    assert e_part == pytest.approx(h_part, rel=1e-12)


@pytest.mark.parametrize('axis', ['x', 'y'])
@pytest.mark.parametrize('theta', [25.0, 0.0, -20.0])
def test_pulse_travels_at_the_incidence_angle(axis, theta):
    geom, dmap = desk_setup(axis=axis)
    field = init_pulse(geom, dmap, PulseSpec.from_preset('burst', theta, scale=0.25))
    direction = pulse_poynting_direction(field, dmap)
    assert pulse_direction_angle(direction, axis) == pytest.approx(theta, abs=1e-9)


def test_y_split_pulse_moves_toward_larger_y():
    geom, dmap = desk_setup(axis='y')
    field = init_pulse(geom, dmap, PulseSpec.from_preset('burst', 0.0, scale=0.25))
    direction = pulse_poynting_direction(field, dmap)
    assert direction == pytest.approx([0.0, 1.0], abs=1e-12)


def test_pulse_overlapping_medium_two_is_rejected():
    geom, dmap = desk_setup()
    zeta0, chi0 = rotate_to_packet(118.0, 128.0, 25.0)
    spec = PulseSpec.from_preset('burst', 25.0, scale=0.25, zeta0=zeta0, chi0=chi0)
    with pytest.raises(PulseError):
        init_pulse(geom, dmap, spec)


def test_thin_long_pulse_needs_a_looser_overlap_tolerance():
    geom, dmap = desk_setup()
    with pytest.raises(PulseError):
        init_pulse(geom, dmap, PulseSpec.from_preset('thin_long', 25.0, scale=0.25))
    spec = PulseSpec.from_preset('thin_long', 25.0, scale=0.25, overlap_tolerance=1e-3)
    field = init_pulse(geom, dmap, spec)
    assert field.is_finite()


def test_commensurate_theta():
    geom = LatticeGeometry(800, 57)
    theta = commensurate_theta(geom, 24.0, 25.0)
    assert theta == pytest.approx(math.degrees(math.asin(24.0 / 57.0)))
    assert commensurate_theta(geom, 24.0, -25.0) == pytest.approx(-theta)
    assert commensurate_theta(geom, 24.0, 1.0) == 0.0


def test_slab_pulse_requires_commensurate_angle():
    geom = LatticeGeometry(200, 57)
    dmap = set_halfspace_dielectric(DielectricMap(geom), 'x', 0.5, 2.0, 1.0, smoothing_width=0.5)
    with pytest.raises(PulseError, match='commensurate'):
        init_slab_pulse(geom, dmap, PulseSpec(10.0, 10.0, 24.0, 25.0, shape='slab'))

    theta = commensurate_theta(geom, 24.0, 25.0)
    field = init_pulse(geom, dmap, PulseSpec(10.0, 10.0, 24.0, theta, shape='slab'))
    x, y = geom.coordinates()
    c, s = math.cos(math.radians(theta)), math.sin(math.radians(theta))
    d = x - 50.0
    d -= 200.0 * np.round(d / 200.0)
    envelope = np.exp(-(d / 10.0) ** 2)
    expected = -envelope * np.cos(2 * np.pi * (c * (50.0 + d) - s * y) / 24.0)
    assert np.allclose(field.q[5], expected, rtol=0, atol=1e-12)
    # the carrier continues across the periodic seam in y
    seam = -envelope[:, 0] * np.cos(2 * np.pi * (c * (50.0 + d[:, 0]) - s * 57.0) / 24.0)
    assert np.allclose(field.q[5][:, 0], seam, rtol=0, atol=1e-9)
    assert region_energy(field, region_mask(dmap, 2)) / float(energy_density(field).sum()) < 1e-9


def test_direction_angle():
    assert pulse_direction_angle((1.0, 0.0)) == 0.0
    assert pulse_direction_angle((0.0, 1.0), 'y') == pytest.approx(0.0)
    t = math.radians(25.0)
    assert pulse_direction_angle((math.cos(t), -math.sin(t))) == pytest.approx(25.0)
