"""Boundary algebra on the unit sphere.

Conventions: the normal is n = x/|x|, and the boundary symbol of the system
u_t + sum_j A_j d_j u = 0 with E_t = curl B, B_t = -curl E acts as
A(n)(E, B) = (-n ^ B, n ^ E).  With this symbol <A(n)u, u> = 2 (E ^ B) . n;
the factor is re-measured at import by :func:`measure_kappa`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .errors import ConstructionError, ParameterError
from .fields import FieldSample, coefficient_table, eval_pair, _basis_from_x
from .profiles import Profile, make_bump

SPHERE_TOL = 1e-12


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def unit_normal(x):
    x = np.asarray(x, dtype=float)
    rho = np.linalg.norm(x, axis=-1)
    if np.any(np.abs(rho - 1.0) >= SPHERE_TOL):
        raise ParameterError("boundary frames must lie on the unit sphere")
    return x / rho[..., None]


@dataclass(frozen=True)
class BoundarySpace:
    """Dissipative space (1 + c(t)) E_tan = n ^ B_tan with c = eps or gamma(t)."""

    kind: str
    eps: float = 0.0
    gamma: Optional[Callable] = None
    window: float = math.inf
    b: Optional[float] = None

    @classmethod
    def constant(cls, eps: float) -> "BoundarySpace":
        if not (0.0 < eps < 1.0):
            raise ParameterError(f"eps must lie in (0, 1), got {eps}")
        return cls("eps", eps=float(eps))

    @classmethod
    def bump_gamma(cls, b: float) -> "BoundarySpace":
        """Time-dependent space that the bump solution of width b satisfies."""
        return cls("gamma", gamma=lambda t: gamma_of_t(t, b), window=b - 1.0, b=float(b))

    def coefficient(self, t):
        if self.kind == "eps":
            return self.eps
        return self.gamma(t)

    def describe(self) -> dict:
        if self.kind == "eps":
            return {"kind": "eps", "eps": self.eps}
        return {"kind": "gamma", "b": self.b, "window": self.window}


def tangential_part(v, n):
    v = np.asarray(v, dtype=float)
    return v - _dot(v, n)[..., None] * n


def apply_An(u: FieldSample, n) -> FieldSample:
    E, B = (np.asarray(a, dtype=float) for a in u)
    return FieldSample(-np.cross(n, B), np.cross(n, E))


def an_matrix(n) -> np.ndarray:
    """The 6x6 real symmetric matrix of A(n) acting on (E, B)."""
    n1, n2, n3 = (float(c) for c in n)
    cross = np.array([[0.0, -n3, n2], [n3, 0.0, -n1], [-n2, n1, 0.0]])
    m = np.zeros((6, 6))
    m[:3, 3:] = -cross
    m[3:, :3] = cross
    return m


def quad_form(u: FieldSample, n):
    """<A(n)u, u>."""
    a = apply_An(u, n)
    return _dot(a.E, u.E) + _dot(a.B, u.B)


def poynting_normal(u: FieldSample, n):
    return _dot(np.cross(u.E, u.B), n)


@lru_cache(maxsize=None)
def measure_kappa(samples: int = 64, seed: int = 12345) -> float:
    """Constant k with <A(n)u, u> = k (E ^ B) . n, checked on random data."""
    rng = np.random.default_rng(seed)
    n = rng.normal(size=(samples, 3))
    n /= np.linalg.norm(n, axis=-1, keepdims=True)
    u = FieldSample(rng.normal(size=(samples, 3)), rng.normal(size=(samples, 3)))
    qf = quad_form(u, n)
    pn = poynting_normal(u, n)
    keep = np.abs(pn) > 1e-3
    ratios = qf[keep] / pn[keep]
    kappa = float(np.median(ratios))
    if np.max(np.abs(ratios - kappa)) > 1e-12 * max(1.0, abs(kappa)):
        raise AssertionError("quadratic form is not a fixed multiple of the normal Poynting flux")
    return kappa


def neps_residual(u: FieldSample, n, eps):
    """(1 + eps) E_tan - n ^ B_tan."""
    factor = 1.0 + np.asarray(eps, dtype=float)
    if factor.ndim:
        factor = factor[..., None]
    e_tan = tangential_part(u.E, n)
    b_tan = tangential_part(u.B, n)
    return factor * e_tan - np.cross(n, b_tan)


def boundary_residue(prof: Profile, t, x):
    """Return (E_tan - n ^ B_tan, -(h/|x|^3) omega ^ e1) on the sphere through x."""
    x = np.asarray(x, dtype=float)
    rho = np.linalg.norm(x, axis=-1)
    n = x / rho[..., None]
    u = eval_pair(prof, t, x)
    lhs = tangential_part(u.E, n) - np.cross(n, tangential_part(u.B, n))
    h0 = prof(rho + np.asarray(t, dtype=float))
    rhs = -(h0 / rho**3)[..., None] * _basis_from_x(x, rho).phi1
    return lhs, rhs


def residue_closed_form(prof: Profile, t, x, eps):
    """(eps h''/r - eps h'/r^2 - h/r^3) omega ^ e1: the eps-residue of the exact pair."""
    x = np.asarray(x, dtype=float)
    rho = np.linalg.norm(x, axis=-1)
    h = prof.derivs(rho + np.asarray(t, dtype=float), 2)
    c = eps * h[2] / rho - eps * h[1] / rho**2 - h[0] / rho**3
    return c[..., None] * _basis_from_x(x, rho).phi1


def tangent_frame(n):
    """Two orthonormal tangent vectors at each normal."""
    n = np.asarray(n, dtype=float)
    helper = np.where(np.abs(n[..., :1]) < 0.9, np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]))
    t1 = np.cross(n, helper)
    t1 /= np.linalg.norm(t1, axis=-1, keepdims=True)
    t2 = np.cross(n, t1)
    return t1, t2


def random_normals(rng, k):
    n = rng.normal(size=(k, 3))
    return n / np.linalg.norm(n, axis=-1, keepdims=True)


def sample_neps(eps, n, coeffs):
    """Elements of N_eps at normals ``n`` from coordinates (B_tan1, B_tan2, E.n, B.n)."""
    t1, t2 = tangent_frame(n)
    b_tan = coeffs[..., :1] * t1 + coeffs[..., 1:2] * t2
    e_tan = np.cross(n, b_tan) / (1.0 + eps)
    E = e_tan + coeffs[..., 2:3] * n
    B = b_tan + coeffs[..., 3:4] * n
    return FieldSample(E, B)


def neps_constraint_matrix(n, eps) -> np.ndarray:
    """3x6 matrix of u -> (1 + eps) E_tan - n ^ B_tan."""
    n = np.asarray(n, dtype=float)
    proj = np.eye(3) - np.outer(n, n)
    cross = an_matrix(n)[3:, :3]  # v -> n ^ v
    return np.hstack([(1.0 + eps) * proj, -cross @ proj])


def dissipativity_scan(eps: float, samples: int = 100_000, seed: int = 0,
                       frames: int = 16) -> dict:
    """Sample N_eps and report the least negative ratio <A u,u>/|u_tan|^2.

    ``min_margin`` is the most adverse (largest) ratio found and
    ``c_estimate`` its negation.  Structural checks (rank of A(n), dim N_eps,
    Ker A(n) inside N_eps) are run on ``frames`` random normals.
    """
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    if not eps > -1.0:
        raise ParameterError("need 1 + eps > 0")
    rng = np.random.default_rng(seed)
    n = random_normals(rng, samples)
    coeffs = rng.normal(size=(samples, 4))
    u = sample_neps(eps, n, coeffs)
    tan2 = np.sum(tangential_part(u.E, n) ** 2, -1) + np.sum(tangential_part(u.B, n) ** 2, -1)
    keep = tan2 > 1e-14
    ratio = quad_form(u, n)[keep] / tan2[keep]
    membership = np.max(np.abs(neps_residual(u, n, eps)))

    ranks, dims, kernel_ok = [], [], True
    for nn in random_normals(rng, frames):
        a = an_matrix(nn)
        ranks.append(int(np.linalg.matrix_rank(a, tol=1e-10)))
        c = neps_constraint_matrix(nn, eps)
        dims.append(6 - int(np.linalg.matrix_rank(c, tol=1e-10)))
        kern = np.concatenate([np.hstack([nn, np.zeros(3)])[None], np.hstack([np.zeros(3), nn])[None]])
        kernel_ok &= bool(np.max(np.abs(kern @ a)) < 1e-12 and np.max(np.abs(c @ kern.T)) < 1e-12)
    worst = float(np.max(ratio))
    return {
        "eps": eps,
        "samples": int(samples),
        "min_margin": worst,
        "c_estimate": -worst,
        "mean_ratio": float(np.mean(ratio)),
        "membership_residual": float(membership),
        "rank_checks": {"ranks": sorted(set(ranks)), "dim_neps": sorted(set(dims)),
                        "kernel_in_neps": kernel_ok},
    }


def q_poly(y, b):
    y = np.asarray(y, dtype=float)
    b = np.asarray(b, dtype=float)
    y2, b2 = y * y, b * b
    return 2.0 * (3.0 * y2 * y2 - 2.0 * (b2 - 1.0) * y2 - b2 * b2) + 2.0 * y * (b2 - y2) ** 2


def _q_lipschitz(top: float) -> float:
    # Crude bounds on |dQ/dy| and |dQ/db| over [1, top]^2 (|b^2 - y^2| <= top^2 - 1).
    d = top * top - 1.0
    dy = 24 * top**3 + 8 * d * top + 2 * d * d + 8 * top * top * d
    db = 16 * top**3 + 8 * top * top * d
    return math.hypot(dy, db)


def _certified_min(mu: float, resolution: int) -> float:
    g = np.linspace(1.0, 1.0 + mu, resolution)
    yy, bb = np.meshgrid(g, g, indexing="ij")
    spacing = mu / (resolution - 1)
    return float(np.min(q_poly(yy, bb))) - _q_lipschitz(1.0 + mu) * spacing / math.sqrt(2.0)


def find_mu(resolution: int = 200, iterations: int = 50) -> float:
    """Largest mu in (0, 1] (by bisection) with Q >= 3 certified on [1, 1+mu]^2.

    Certification: grid minimum minus a Lipschitz bound times the largest
    distance from any point of the square to the nearest grid node.
    """
    if resolution < 100:
        raise ParameterError("resolution must be at least 100 points per axis")
    if _certified_min(1.0, resolution) >= 3.0:
        return 1.0
    lo, hi = 0.0, 1.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if _certified_min(mid, resolution) >= 3.0:
            lo = mid
        else:
            hi = mid
    if lo == 0.0:
        raise ConstructionError("could not certify any positive mu")
    return lo


def gamma_of_t(t, b: float):
    """(b^2 - (1+t)^2)^4 / Q(1+t, b) on [0, b-1], extended by zero for t > b - 1."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ParameterError("gamma is only defined for t >= 0")
    y = 1.0 + t
    active = y < b
    q = q_poly(np.where(active, y, 1.0), b)
    if np.any(active & (q <= 0)):
        raise ConstructionError(f"Q(1+t, b) <= 0 inside the window; b = {b} is too large")
    num = np.where(active, b * b - y * y, 0.0) ** 4
    out = np.where(active, num / np.where(active, q, 1.0), 0.0)
    return float(out) if out.ndim == 0 else out


def gamma_sup(b: float, t_samples: int = 2001) -> float:
    t = np.linspace(0.0, b - 1.0, t_samples)
    return float(np.max(np.abs(gamma_of_t(t, b))))


def choose_b(delta: float, mu: Optional[float] = None, t_samples: int = 2001,
             iterations: int = 60) -> float:
    """Width b in (1, 1+mu) with sup |gamma| <= delta/2 on [0, b-1].

    Bisects for the largest admissible b below 1 + mu; the upper end itself is
    excluded by a relative inset of 1e-6.
    """
    if not (0.0 < delta < 1.0):
        raise ParameterError(f"delta must lie in (0, 1), got {delta}")
    if mu is None:
        mu = find_mu()
    ok = lambda b: gamma_sup(b, t_samples) <= delta / 2  # noqa: E731
    top = 1.0 + mu * (1.0 - 1e-6)
    if ok(top):
        return top
    lo, hi = 1.0, top
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def gamma_residual(b: float, t, x):
    """(1 + gamma(t)) E_tan - n ^ B_tan for the bump solution on the unit sphere."""
    n = unit_normal(x)
    u = eval_pair(make_bump(b), t, n)
    return neps_residual(u, n, gamma_of_t(t, b))


def reduced_boundary_coefficients(prof: Profile, t):
    """(p, q, w) at r = 1 (used to relate the 3-D and reduced boundary conditions)."""
    h = prof.derivs(1.0 + np.asarray(t, dtype=float), 2)
    return coefficient_table(h, 1.0)
