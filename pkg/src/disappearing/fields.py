"""Closed-form incoming fields and the auxiliary spherical waves.

All functions are vectorised: ``x`` has shape (..., 3) and ``t`` broadcasts
against ``x[..., 0]``.  The angular factors are built from polynomial forms in
the Cartesian coordinates divided by powers of |x|, so they vanish exactly on
the x1-axis.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import ContractViolation, DomainError, ParameterError
from .profiles import Profile

MIN_RADIUS = 1e-12
E1 = np.array([1.0, 0.0, 0.0])


class AngularBasis(NamedTuple):
    phi1: np.ndarray  # omega ^ e1
    phi2: np.ndarray  # omega ^ (omega ^ e1) = -(e1)_tan
    phi3: np.ndarray  # e1


class FieldSample(NamedTuple):
    E: np.ndarray
    B: np.ndarray


def _radius(x):
    x = np.asarray(x, dtype=float)
    rho = np.linalg.norm(x, axis=-1)
    if np.any(rho < MIN_RADIUS):
        raise DomainError("fields are singular at x = 0")
    return x, rho


def _basis_from_x(x, rho):
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    rho2 = rho * rho
    phi1 = np.stack([np.zeros_like(x1), x3 / rho, -x2 / rho], axis=-1)
    phi2 = np.stack([-(x2 * x2 + x3 * x3) / rho2, x1 * x2 / rho2, x1 * x3 / rho2], axis=-1)
    phi3 = np.broadcast_to(E1, phi1.shape).copy()
    return AngularBasis(phi1, phi2, phi3)


def angular_basis(omega) -> AngularBasis:
    omega = np.asarray(omega, dtype=float)
    norm = np.linalg.norm(omega, axis=-1)
    if np.any(np.abs(norm - 1.0) >= 1e-10):
        raise ParameterError("angular_basis expects unit vectors")
    return _basis_from_x(omega, norm)


def coefficient_table(h, rho):
    """Radial coefficients (p, q, w) with E = p*phi1 and B = q*phi2 + w*phi3.

    ``h`` holds h, h', h'' evaluated at |x| + t.
    """
    inv = 1.0 / rho
    p = (h[2] - h[1] * inv) * inv
    q = -(h[2] - (3.0 * h[1] - 3.0 * h[0] * inv) * inv) * inv
    w = 2.0 * (h[1] - h[0] * inv) * inv * inv
    return p, q, w


def eval_fields(prof: Profile, t, x) -> FieldSample:
    x, rho = _radius(x)
    s = rho + np.asarray(t, dtype=float)
    h = prof.derivs(s, 2)
    p, q, w = coefficient_table(h, rho)
    basis = _basis_from_x(x, rho)
    E = p[..., None] * basis.phi1
    B = q[..., None] * basis.phi2 + w[..., None] * basis.phi3
    return FieldSample(E, B)


def eval_E(prof: Profile, t, x) -> np.ndarray:
    return eval_fields(prof, t, x).E


def eval_B(prof: Profile, t, x) -> np.ndarray:
    return eval_fields(prof, t, x).B


def eval_pair(prof: Profile, t, x) -> FieldSample:
    return eval_fields(prof, t, x)


def spherical_wave(f: Profile, t, x, incoming: bool = True):
    """f(|x| + t)/|x| (incoming) or f(|x| - t)/|x| (outgoing)."""
    x, rho = _radius(x)
    t = np.asarray(t, dtype=float)
    s = rho + t if incoming else rho - t
    return f(s) / rho


ProfileField = Callable[[np.ndarray, np.ndarray], np.ndarray]


def modulated_wave(profile_e: ProfileField, t, x, outgoing: bool = True,
                   tangential_tol: float = 1e-10) -> FieldSample:
    """Candidate (e(s, w)/|x|, (w ^ e)(s, w)/|x|) with s = |x| - t (or |x| + t).

    Not a Maxwell solution in general; used to exhibit the obstruction.
    """
    x, rho = _radius(x)
    omega = x / rho[..., None]
    t = np.asarray(t, dtype=float)
    s = rho - t if outgoing else rho + t
    e = np.asarray(profile_e(s, omega), dtype=float)
    radial = np.einsum("...i,...i->...", e, omega)
    scale = max(1.0, float(np.max(np.abs(e), initial=0.0)))
    if np.any(np.abs(radial) > tangential_tol * scale):
        raise ContractViolation("profile must be tangential: omega . e = 0")
    b = np.cross(omega, e)
    return FieldSample(e / rho[..., None], b / rho[..., None])
