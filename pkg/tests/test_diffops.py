import json
import math

import numpy as np
import pytest

from disappearing.diffops import (
    FDScheme, ResidualReport, convergence_order, fd_box, fd_curl, fd_div, fd_dt, fd_grad,
    fd_partial, maxwell_residual, sample_annulus,
)
from disappearing.errors import DomainError, ParameterError
from disappearing.profiles import make_exponential, make_rate_profile, zero_profile


def cubic(x):
    return x[..., 0] ** 3 + 2 * x[..., 0] * x[..., 1] ** 2 - x[..., 2]


PTS = np.array([[1.0, 0.5, -0.3], [2.0, -1.0, 0.7]])


@pytest.mark.parametrize("order", [2, 4])
def test_partial_exact_on_quadratics(order):
    sch = FDScheme(step=1e-2, order=order)
    f = lambda x: x[..., 0] ** 2 + 3 * x[..., 1] * x[..., 2]  # noqa: E731
    np.testing.assert_allclose(fd_partial(f, PTS, 0, sch), 2 * PTS[:, 0], rtol=1e-11)
    np.testing.assert_allclose(fd_partial(f, PTS, 2, sch), 3 * PTS[:, 1], rtol=1e-11)


def test_fourth_order_exact_on_cubic():
    sch = FDScheme(step=1e-2, order=4)
    g = fd_grad(cubic, PTS, sch)
    want = np.stack([3 * PTS[:, 0] ** 2 + 2 * PTS[:, 1] ** 2, 4 * PTS[:, 0] * PTS[:, 1],
                     -np.ones(2)], axis=-1)
    np.testing.assert_allclose(g, want, rtol=1e-10)


def test_curl_of_gradient_and_div_of_curl():
    sch = FDScheme(step=1e-3)
    F = lambda x: np.stack([x[..., 1] * x[..., 2], -x[..., 0] ** 2, x[..., 0] * x[..., 1]], axis=-1)  # noqa: E731
    c = fd_curl(F, PTS, sch)
    x, y, z = PTS.T
    want = np.stack([x, np.zeros_like(y), -2 * x - z], axis=-1)
    np.testing.assert_allclose(c, want, atol=1e-8)
    np.testing.assert_allclose(fd_div(F, PTS, sch), 0.0, atol=1e-8)


def test_dt_and_box_of_spherical_wave():
    # g(|x| + t)/|x| solves the wave equation
    sch = FDScheme(step=1e-3)
    u = lambda t, x: np.exp(-(np.linalg.norm(x, axis=-1) + t)) / np.linalg.norm(x, axis=-1)  # noqa: E731
    t = np.array([0.1, 0.4])
    np.testing.assert_allclose(fd_dt(u, t, PTS, sch), -u(t, PTS), rtol=1e-6)
    assert np.max(np.abs(fd_box(u, t, PTS, sch))) < 1e-5


def test_stencil_domain_guard():
    with pytest.raises(DomainError):
        fd_grad(cubic, np.array([[0.1, 0.0, 0.0]]), FDScheme(min_radius=0.5))


def test_scheme_validation():
    with pytest.raises(ParameterError):
        FDScheme(order=3)
    with pytest.raises(ParameterError):
        FDScheme(step=0.0)
    assert FDScheme(step=1e-3, time_step=2e-3).refined(2).dt == pytest.approx(5e-4)


def test_convergence_order():
    steps = [1e-2, 5e-3, 2.5e-3]
    assert convergence_order([4.0, 1.0, 0.25], steps) == pytest.approx(2.0)
    assert convergence_order([0.0, 0.0, 0.0], steps) == math.inf
    assert convergence_order([1e-3, 0.0, 0.0], steps) == math.inf
    with pytest.raises(ParameterError):
        convergence_order([1.0], [1e-2])
    with pytest.raises(ParameterError):
        convergence_order([1.0, 2.0], [1e-3, 1e-2])


def test_sample_annulus_bounds_and_determinism():
    t, x = sample_annulus(300, seed=4)
    r = np.linalg.norm(x, axis=1)
    assert r.min() >= 1.0 and r.max() <= 3.0
    assert t.min() >= 0.0 and t.max() <= 2.0
    t2, x2 = sample_annulus(300, seed=4)
    np.testing.assert_array_equal(x, x2)
    # radial density ~ r^2: median of r^3 sits mid-range
    assert np.median(r**3) == pytest.approx(14.0, rel=0.1)


def test_maxwell_residual_second_order():
    t, x = sample_annulus(100, seed=2)
    rep = maxwell_residual(make_exponential(0.25), t, x, FDScheme(step=2e-3))
    assert 1.9 < rep.order < 2.1
    assert rep.points == 100
    assert set(rep.components) == {"ampere", "faraday", "div_E", "div_B"}
    d = json.loads(rep.to_json())
    assert set(d) == {"norms", "steps", "order", "points"}


def test_residual_detects_wrong_rate():
    # a profile that is not tuned still solves Maxwell; a wrong coefficient would not
    t, x = sample_annulus(50, seed=5)
    rep = maxwell_residual(make_rate_profile(-0.7), t, x)
    assert rep.norms[0] < 1e-5


def test_zero_profile_at_floor():
    t, x = sample_annulus(20, seed=0)
    rep = maxwell_residual(zero_profile(), t, x)
    assert rep.at_floor and rep.order == math.inf
    assert json.loads(rep.to_json())["order"] == "inf"


def test_residual_report_defaults():
    rep = ResidualReport([1.0], [1e-3], 2.0, 1)
    assert rep.components == {} and not rep.at_floor
