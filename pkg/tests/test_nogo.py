import numpy as np
import pytest

from disappearing import nogo
from disappearing.diffops import FDScheme, sample_annulus
from disappearing.errors import ParameterError


@pytest.mark.parametrize("make", [nogo.dipole_profile, nogo.longitude_profile, nogo.quadrupole_profile])
def test_divergence_is_mesh_independent(make):
    t, x = sample_annulus(60, seed=9)
    out = nogo.modulated_div_obstruction(make(), t, x)
    lm = np.array(out["level_max"])
    assert out["label"] == "demonstration"
    assert lm.min() > 0.1
    assert np.ptp(lm) < 1e-3 * lm.max()
    assert out["change_order"] > 1.5


def test_dipole_divergence_closed_form():
    # div of f(|x|-t) (w ^ e1)/|x| is 0, but div of the B-partner w^(w^e1) f/|x| is -2 w1 f/|x|^2
    x = np.array([[1.2, 0.9, -0.4], [0.3, 1.7, 1.1]])
    t = np.array([0.2, 0.5])
    r = np.linalg.norm(x, axis=1)
    f = np.exp(-((r - t - 1.5) ** 2))
    d = nogo._pair_divergence(nogo.dipole_profile(), t, x, FDScheme(step=1e-4))
    np.testing.assert_allclose(d, np.abs(2 * x[:, 0] / r * f / r**2), rtol=1e-6)


def test_ratio_against_exact_solution():
    out = nogo.obstruction_vs_exact(nogo.dipole_profile(), n_points=50)
    assert out["ratio"] > 10
    assert out["exact_residual"] < 1e-4


def test_zero_profile_rejected():
    t, x = sample_annulus(5)
    with pytest.raises(ParameterError):
        nogo.modulated_div_obstruction(lambda s, om: np.zeros_like(om), t, x)


def test_axis_growth():
    sw = nogo.axis_sweep(nogo.georgiev_profile(), radii=(0.2, 0.1, 0.05))
    v = np.array(sw["max_abs_div"])
    assert np.all(np.diff(v) > 0)
    assert v[-1] / v[0] == pytest.approx(4.0, rel=0.25)


@pytest.mark.parametrize("make,zeros", [
    (nogo.dipole_profile, [[1, 0, 0], [-1, 0, 0]]),
    (nogo.longitude_profile, [[1, 0, 0], [-1, 0, 0]]),
    (lambda: nogo.rotated_profile([0, 0, 2.0]), [[0, 0, 1], [0, 0, -1]]),
])
def test_quiet_spot_locations(make, zeros):
    out = nogo.quiet_spot_find(make(), 1.5)
    assert out["certified"]
    d = min(np.linalg.norm(np.array(out["omega_star"]) - z) for z in np.array(zeros, float))
    assert d < 1e-6


def test_quiet_spot_quadrupole_is_eigenvector():
    out = nogo.quiet_spot_find(nogo.quadrupole_profile(), 1.5)
    A = np.array([[2.0, 0.3, 0.0], [0.3, -1.0, 0.5], [0.0, 0.5, 0.4]])
    om = np.array(out["omega_star"])
    assert np.linalg.norm(np.cross(A @ om, om)) < 1e-8
    assert out["certified"]


def test_quiet_spot_incoming_field():
    out = nogo.quiet_spot_find(nogo.incoming_E_profile(), 1.5)
    assert out["certified"]
    assert abs(abs(out["omega_star"][0]) - 1) < 1e-6


def test_quiet_spot_resolution_guard():
    with pytest.raises(ParameterError):
        nogo.quiet_spot_find(nogo.dipole_profile(), 1.5, resolution=8)
