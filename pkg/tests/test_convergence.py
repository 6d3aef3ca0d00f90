import sys
import pathlib

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1]))

from qla2d.analysis.convergence import (
    convergence_order,
    describe,
    measure_phase_speed,
    propagator_matrix,
    refinement_study,
)

# speed ratio omega_lattice / omega_exact of a plane wave along x
SPEED_RATIOS = [
    (0.2, 16, 1.0, 0.972924),
    (0.1, 32, 1.0, 0.993177),
    (0.05, 64, 1.0, 0.998291),
    (0.1, 20, 1.0, 0.983231),
    (0.1, 40, 1.0, 0.995480),
    (0.1, 20, 2.0, 0.983531),
]


def test_propagator_is_unitary():
    prop = propagator_matrix(0.2, 16)
    assert prop.shape == (2, 2)
    assert np.allclose(prop @ prop.conj().T, np.eye(2), atol=1e-12)


@pytest.mark.parametrize('eps,wavelength,n,expected', SPEED_RATIOS)
def test_phase_speed_matches_reference(eps, wavelength, n, expected):
    m = measure_phase_speed(eps, wavelength, n)
    assert m.speed_ratio == pytest.approx(expected, abs=1e-5)
    assert m.relative_error == pytest.approx(1.0 - expected, abs=1e-5)


def test_first_order_schedule_has_the_same_dispersion():
    m = measure_phase_speed(0.1, 20, order=1)
    assert m.speed_ratio == pytest.approx(0.983232, abs=1e-5)


def test_phase_speed_rejects_bad_wavelength():
    with pytest.raises(ValueError):
        measure_phase_speed(0.1, 4)
    with pytest.raises(ValueError):
        measure_phase_speed(0.1, 12.5)


def test_refinement_study_is_second_order():
    results, fitted = refinement_study(0.2, 16, levels=3)
    assert [m.wavelength for m in results] == [16, 32, 64]
    assert [m.eps for m in results] == [0.2, 0.1, 0.05]
    errors = [m.relative_error for m in results]
    assert errors[0] > errors[1] > errors[2]
    assert fitted == pytest.approx(2.0, abs=0.05)
    text = describe(results, fitted)
    assert 'fitted order' in text
    assert len(text.splitlines()) == 5


def test_convergence_order_of_synthetic_errors():
    eps = [0.4, 0.2, 0.1]
    assert convergence_order(eps, [3 * e ** 2 for e in eps]) == pytest.approx(2.0)
    assert convergence_order(eps, [e for e in eps]) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        convergence_order([0.1], [0.01])
    with pytest.raises(ValueError):
        convergence_order([0.1, 0.2], [0.0, 0.01])


def test_refinement_study_needs_two_levels():
    with pytest.raises(ValueError):
        refinement_study(levels=1)
