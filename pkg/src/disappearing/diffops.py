"""Finite-difference vector calculus used as an independent oracle.

Nothing here looks at analytic derivatives: fields are sampled on central
stencils only.  Functions take ``x`` of shape (..., 3) and evaluate the field
callable on whole stencils at once.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .errors import DomainError, ParameterError
from .fields import eval_pair
from .profiles import Profile

_WEIGHTS = {
    2: ((1, 0.5),),
    4: ((1, 2.0 / 3.0), (2, -1.0 / 12.0)),
}
_WEIGHTS2 = {
    2: (-2.0, ((1, 1.0),)),
    4: (-2.5, ((1, 4.0 / 3.0), (2, -1.0 / 12.0))),
}


@dataclass(frozen=True)
class FDScheme:
    step: float = 1e-3
    time_step: float | None = None
    order: int = 2
    levels: int = 3
    min_radius: float = 0.5

    def __post_init__(self):
        if self.order not in _WEIGHTS:
            raise ParameterError(f"order must be 2 or 4, got {self.order}")
        if not self.step > 0:
            raise ParameterError("step must be positive")

    @property
    def dt(self) -> float:
        return self.step if self.time_step is None else self.time_step

    def refined(self, level: int) -> "FDScheme":
        f = 0.5**level
        ts = None if self.time_step is None else self.time_step * f
        return FDScheme(self.step * f, ts, self.order, self.levels, self.min_radius)


@dataclass
class ResidualReport:
    norms: list
    steps: list
    order: float
    points: int
    at_floor: bool = False
    components: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"norms": list(self.norms), "steps": list(self.steps),
                "order": _json_float(self.order), "points": self.points}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _json_float(v):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


def _check_stencil(x, reach, min_radius):
    rho = np.linalg.norm(x, axis=-1)
    if np.any(rho - reach * math.sqrt(3) < min_radius):
        raise DomainError(f"stencil of reach {reach:g} comes within {min_radius} of the origin")


def _shift(x, axis, d):
    y = np.array(x, dtype=float, copy=True)
    y[..., axis] += d
    return y


def fd_partial(F, x, axis: int, scheme: FDScheme):
    """Central difference of F along coordinate ``axis``."""
    h = scheme.step
    acc = 0.0
    for k, c in _WEIGHTS[scheme.order]:
        acc = acc + c * (np.asarray(F(_shift(x, axis, k * h))) - np.asarray(F(_shift(x, axis, -k * h))))
    return acc / h


def fd_grad(phi, x, scheme: FDScheme):
    x = np.asarray(x, dtype=float)
    _check_stencil(x, 2 * scheme.step, scheme.min_radius)
    return np.stack([fd_partial(phi, x, j, scheme) for j in range(3)], axis=-1)


def fd_jacobian(F, x, scheme: FDScheme):
    """J[..., i, j] = dF_i/dx_j."""
    x = np.asarray(x, dtype=float)
    _check_stencil(x, 2 * scheme.step, scheme.min_radius)
    return np.stack([fd_partial(F, x, j, scheme) for j in range(3)], axis=-1)


def curl_from_jacobian(J):
    return np.stack([J[..., 2, 1] - J[..., 1, 2],
                     J[..., 0, 2] - J[..., 2, 0],
                     J[..., 1, 0] - J[..., 0, 1]], axis=-1)


def fd_curl(F, x, scheme: FDScheme):
    return curl_from_jacobian(fd_jacobian(F, x, scheme))


def fd_div(F, x, scheme: FDScheme):
    J = fd_jacobian(F, x, scheme)
    return J[..., 0, 0] + J[..., 1, 1] + J[..., 2, 2]


def fd_dt(u, t, x, scheme: FDScheme):
    k = scheme.dt
    t = np.asarray(t, dtype=float)
    acc = 0.0
    for m, c in _WEIGHTS[scheme.order]:
        acc = acc + c * (np.asarray(u(t + m * k, x)) - np.asarray(u(t - m * k, x)))
    return acc / k


def fd_box(u, t, x, scheme: FDScheme):
    """u_tt - Laplacian(u) from central second differences."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    _check_stencil(x, 2 * scheme.step, scheme.min_radius)
    center_c, offsets = _WEIGHTS2[scheme.order]
    u0 = np.asarray(u(t, x))
    k, h = scheme.dt, scheme.step
    utt = center_c * u0
    for m, c in offsets:
        utt = utt + c * (np.asarray(u(t + m * k, x)) + np.asarray(u(t - m * k, x)))
    utt = utt / k**2
    lap = 0.0
    for j in range(3):
        acc = center_c * u0
        for m, c in offsets:
            acc = acc + c * (np.asarray(u(t, _shift(x, j, m * h))) + np.asarray(u(t, _shift(x, j, -m * h))))
        lap = lap + acc / h**2
    return utt - lap


def convergence_order(norms, steps):
    """Least-squares slope of log(norm) against log(step).

    Returns ``inf`` when the coarsest norm is exactly zero (residual already at
    the floor).
    """
    norms = np.asarray(norms, dtype=float)
    steps = np.asarray(steps, dtype=float)
    if norms.size < 2 or norms.size != steps.size:
        raise ParameterError("need at least two levels of matching length")
    if np.any(np.diff(steps) >= 0):
        raise ParameterError("steps must be strictly decreasing")
    if norms[0] == 0:
        return math.inf
    if np.any(norms <= 0):
        # finer levels hit exact zero: treat as converged beyond measurement
        return math.inf
    slope, _ = np.polyfit(np.log(steps), np.log(norms), 1)
    return float(slope)


def _maxwell_terms(prof, t, x, scheme):
    def E(tt, xx):
        return eval_pair(prof, tt, xx).E

    def B(tt, xx):
        return eval_pair(prof, tt, xx).B

    x = np.asarray(x, dtype=float)
    _check_stencil(x, 2 * scheme.step, scheme.min_radius)
    JE = fd_jacobian(lambda xx: E(t, xx), x, scheme)
    JB = fd_jacobian(lambda xx: B(t, xx), x, scheme)
    Et = fd_dt(E, t, x, scheme)
    Bt = fd_dt(B, t, x, scheme)
    ampere = Et - curl_from_jacobian(JB)
    faraday = Bt + curl_from_jacobian(JE)
    div_e = JE[..., 0, 0] + JE[..., 1, 1] + JE[..., 2, 2]
    div_b = JB[..., 0, 0] + JB[..., 1, 1] + JB[..., 2, 2]
    return {
        "ampere": np.max(np.abs(ampere), axis=-1),
        "faraday": np.max(np.abs(faraday), axis=-1),
        "div_E": np.abs(div_e),
        "div_B": np.abs(div_b),
    }


def maxwell_pointwise(prof: Profile, t, x, scheme: FDScheme) -> np.ndarray:
    """Per-point max of the four residual components at one step size."""
    terms = _maxwell_terms(prof, t, x, scheme)
    return np.max(np.stack(list(terms.values())), axis=0)


def maxwell_residual(prof: Profile, t, x, scheme: FDScheme = FDScheme()) -> ResidualReport:
    """Maxwell and divergence residuals over refinement levels (max over points)."""
    if scheme.levels < 2:
        raise ParameterError("need at least two refinement levels")
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    norms, steps = [], []
    comps = {}
    for level in range(scheme.levels):
        sch = scheme.refined(level)
        terms = _maxwell_terms(prof, t, x, sch)
        for name, vals in terms.items():
            comps.setdefault(name, []).append(float(np.max(vals, initial=0.0)))
        norms.append(max(comps[name][-1] for name in terms))
        steps.append(sch.step)
    order = convergence_order(norms, steps)
    npts = int(np.prod(x.shape[:-1])) if x.ndim > 1 else 1
    return ResidualReport(norms, steps, order, npts, at_floor=math.isinf(order), components=comps)


def sample_annulus(n: int, r_min=1.0, r_max=3.0, t_min=0.0, t_max=2.0, seed=0):
    """Deterministic scrambled-Halton points (t, x) with r_min <= |x| <= r_max.

    Radius is drawn with density proportional to r**2, direction uniformly.
    """
    u = qmc.Halton(d=4, scramble=True, seed=seed).random(n)
    r = np.cbrt(r_min**3 + u[:, 0] * (r_max**3 - r_min**3))
    cos_t = 2.0 * u[:, 1] - 1.0
    sin_t = np.sqrt(1.0 - cos_t**2)
    phi = 2.0 * np.pi * u[:, 2]
    x = r[:, None] * np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), cos_t], axis=-1)
    t = t_min + u[:, 3] * (t_max - t_min)
    return t, x
