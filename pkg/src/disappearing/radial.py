"""Reduced radial system for the dipole-structured fields.

Fields of the form E = p(t,r) phi1, B = q(t,r) phi2 + w(t,r) e1 solve the
Maxwell system exactly when

    p_t = -q_r - q/r + w_r,    q_t = -p_r + p/r,    w_t = 2p/r,

and div B = 0 reduces to w_r + 2q/r = 0.  On |x| = 1, n ^ B = (w - q) phi1, so
the boundary space (1 + c) E_tan = n ^ B_tan becomes (1 + c) p = w - q.

With v = q - w the system is the unit-speed pair p_t + v_r = -q/r,
v_t + p_r = -p/r plus the ODE for w.  a = p + v travels outward and
c = p - v travels toward r = 1, which fixes which quantity each boundary
must supply.  Time stepping is the two-step (Richtmyer) Lax-Wendroff scheme.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from .boundary import BoundarySpace
from .errors import AccuracyWarning, DivergenceError, ParameterError
from .profiles import Profile, make_exponential
from .quadrature import EnergyTrace

SIN2_AVG = 8.0 * math.pi / 3.0  # integral of sin^2(theta) over the unit sphere
SPHERE = 4.0 * math.pi
CFL_MAX = 0.9

# Coefficients as sums of c * h^(k)(r + t) / r^m, stored as (k, c, m).
P_TERMS = ((2, 1.0, 1), (1, -1.0, 2))
Q_TERMS = ((2, -1.0, 1), (1, 3.0, 2), (0, -3.0, 3))
W_TERMS = ((1, 2.0, 2), (0, -2.0, 3))


def _d_dt(terms):
    return tuple((k + 1, c, m) for k, c, m in terms)


def _d_dr(terms):
    out = []
    for k, c, m in terms:
        out.append((k + 1, c, m))
        out.append((k, -m * c, m + 1))
    return tuple(out)


def _eval_terms(terms, h, r):
    return sum(c * h[k] / r**m for k, c, m in terms)


def analytic_coefficients(prof: Profile, t, r):
    r = np.asarray(r, dtype=float)
    h = prof.derivs(r + np.asarray(t, dtype=float), 2)
    return tuple(_eval_terms(T, h, r) for T in (P_TERMS, Q_TERMS, W_TERMS))


def reduced_system_residual(prof: Profile, t, r) -> dict:
    """Closed-form check of the radial system, constraint and boundary relation.

    Both sides of every identity use exact derivatives of the profile.
    """
    r = np.asarray(r, dtype=float)
    h = prof.derivs(r + np.asarray(t, dtype=float), 3)
    p, q, w = (_eval_terms(T, h, r) for T in (P_TERMS, Q_TERMS, W_TERMS))
    pt, qt, wt = (_eval_terms(_d_dt(T), h, r) for T in (P_TERMS, Q_TERMS, W_TERMS))
    pr, qr, wr = (_eval_terms(_d_dr(T), h, r) for T in (P_TERMS, Q_TERMS, W_TERMS))
    return {
        "p_eq": pt - (-qr - q / r + wr),
        "q_eq": qt - (-pr + p / r),
        "w_eq": wt - 2.0 * p / r,
        "constraint": wr + 2.0 * q / r,
        # E_tan - n ^ B_tan = (p - (w - q)) phi1 should equal -h/r^3 phi1
        "residue": (p - (w - q)) + h[0] / r**3,
        "scale": np.maximum.reduce([np.abs(p), np.abs(q), np.abs(w), np.abs(pt), np.abs(qt),
                                    np.abs(pr), np.abs(qr), np.abs(wr)]),
    }


@dataclass
class RadialState:
    r: np.ndarray
    p: np.ndarray
    q: np.ndarray
    w: np.ndarray
    t: float = 0.0

    @property
    def dr(self) -> float:
        return float(self.r[1] - self.r[0])

    def copy(self) -> "RadialState":
        return RadialState(self.r, self.p.copy(), self.q.copy(), self.w.copy(), self.t)


@dataclass
class RadialTrace(EnergyTrace):
    boundary_residual: np.ndarray
    constraint_residual: np.ndarray


def radial_grid(R: float, dr: float) -> np.ndarray:
    if not R > 1.0:
        raise ParameterError("outer radius must exceed 1")
    n = int(round((R - 1.0) / dr))
    if n < 4:
        raise ParameterError("grid needs at least 5 nodes")
    return np.linspace(1.0, 1.0 + n * dr, n + 1)


def init_from_profile(prof: Profile, r, t: float = 0.0, tol: float = 1e-10) -> RadialState:
    """Nodal coefficients of the exact solution at time t.

    The divergence constraint is confirmed with closed-form radial derivatives.
    """
    r = np.asarray(r, dtype=float)
    if r[1] - r[0] > 0.05:
        warnings.warn("radial spacing above 0.05; expect poor accuracy", AccuracyWarning, stacklevel=2)
    p, q, w = analytic_coefficients(prof, t, r)
    chk = reduced_system_residual(prof, t, r)
    scale = max(1.0, float(np.max(chk["scale"], initial=0.0)))
    if np.max(np.abs(chk["constraint"]), initial=0.0) > tol * scale:
        raise AssertionError("exact coefficients violate w_r + 2q/r = 0")
    return RadialState(r, p, q, w, float(t))


def zero_state(r) -> RadialState:
    r = np.asarray(r, dtype=float)
    z = np.zeros_like(r)
    return RadialState(r, z, z.copy(), z.copy(), 0.0)


def energy(state: RadialState) -> float:
    """Integral of |E|^2 + |B|^2 over 1 <= |x| <= R with the angular integrals done exactly.

    |E|^2 = p^2 sin^2, |B|^2 = (q^2 - 2qw) sin^2 + w^2, since phi2 . e1 = -sin^2.
    """
    r, p, q, w = state.r, state.p, state.q, state.w
    dens = r * r * (SIN2_AVG * (p * p + q * q - 2.0 * q * w) + SPHERE * w * w)
    return float(trapezoid(dens, r))


def boundary_flux(state: RadialState) -> float:
    """<A(n)u, u> integrated over |x| = 1: 2 (E ^ B) . n = 2 p (q - w) sin^2."""
    return 2.0 * SIN2_AVG * state.p[0] * (state.q[0] - state.w[0])


def boundary_residual(state: RadialState, coeff: float) -> float:
    return abs((1.0 + coeff) * state.p[0] - (state.w[0] - state.q[0]))


def constraint_residual(state: RadialState) -> float:
    """max over interior nodes of |w_r + 2q/r| with central differences."""
    r, q, w = state.r, state.q, state.w
    if len(r) < 3:
        return 0.0
    wr = (w[2:] - w[:-2]) / (r[2:] - r[:-2])
    return float(np.max(np.abs(wr + 2.0 * q[1:-1] / r[1:-1])))


def _sources(p, v, w, r):
    return -(v + w) / r, -p / r, 2.0 * p / r


def _with_ghosts(a):
    # quadratic extrapolation one node beyond each end
    lo = 3.0 * a[0] - 3.0 * a[1] + a[2]
    hi = 3.0 * a[-1] - 3.0 * a[-2] + a[-3]
    return np.concatenate(([lo], a, [hi]))


def step(state: RadialState, dt: float, bc: BoundarySpace, outer: str = "dirichlet",
         profile: Optional[Profile] = None) -> RadialState:
    """Advance one Lax-Wendroff step.

    Both end nodes are updated with the interior stencil using quadratically
    extrapolated ghost values; afterwards the incoming characteristic is
    overwritten.  At r = 1 this is a = p + v from (1 + coeff) p = w - q.  At
    r = R it is c = p - v, taken from ``profile`` for ``outer="dirichlet"``
    (w there as well) and set to zero for ``outer="extrapolation"``.
    """
    dr = state.dr
    if dt <= 0 or dt > CFL_MAX * dr * (1 + 1e-12):
        raise ParameterError(f"dt = {dt:g} violates the CFL bound {CFL_MAX} * dr = {CFL_MAX * dr:g}")
    if outer not in ("dirichlet", "extrapolation"):
        raise ParameterError(f"unknown outer boundary policy {outer!r}")
    if outer == "dirichlet" and profile is None:
        raise ParameterError("dirichlet outer boundary needs the exact profile")

    lam = dt / dr
    t_new = state.t + dt
    r = state.r
    rg = np.concatenate(([r[0] - dr], r, [r[-1] + dr]))
    p = _with_ghosts(state.p)
    w = _with_ghosts(state.w)
    v = _with_ghosts(state.q - state.w)

    # predictor: half time level at cell midpoints
    rm = 0.5 * (rg[:-1] + rg[1:])
    sp, sv, sw = _sources(p, v, w, rg)
    ph = 0.5 * (p[:-1] + p[1:]) - 0.5 * lam * (v[1:] - v[:-1]) + 0.25 * dt * (sp[:-1] + sp[1:])
    vh = 0.5 * (v[:-1] + v[1:]) - 0.5 * lam * (p[1:] - p[:-1]) + 0.25 * dt * (sv[:-1] + sv[1:])
    wh = 0.5 * (w[:-1] + w[1:]) + 0.25 * dt * (sw[:-1] + sw[1:])

    # corrector on every real node
    hp, hv, hw = _sources(ph, vh, wh, rm)
    pn = p[1:-1] - lam * (vh[1:] - vh[:-1]) + 0.5 * dt * (hp[1:] + hp[:-1])
    vn = v[1:-1] - lam * (ph[1:] - ph[:-1]) + 0.5 * dt * (hv[1:] + hv[:-1])
    wn = w[1:-1] + 0.5 * dt * (hw[1:] + hw[:-1])

    coeff = float(bc.coefficient(t_new))
    c0 = pn[0] - vn[0]
    pn[0] = c0 / (2.0 + coeff)
    vn[0] = -(1.0 + coeff) * pn[0]

    aN = pn[-1] + vn[-1]
    if outer == "dirichlet":
        pe, qe, we = analytic_coefficients(profile, t_new, r[-1])
        cN = float(pe - (qe - we))
        wn[-1] = float(we)
    else:
        cN = 0.0
    pn[-1] = 0.5 * (aN + cN)
    vn[-1] = 0.5 * (aN - cN)

    return RadialState(r, pn, vn + wn, wn, t_new)


def run(state: RadialState, t_end: float, dt: float, bc: BoundarySpace,
        outer: str = "dirichlet", profile: Optional[Profile] = None,
        record_every: int = 1):
    """Step from state.t to t_end (dt shrunk so the end time is hit exactly).

    Returns (RadialTrace, final state).  Non-finite values raise
    :class:`DivergenceError` naming the step.
    """
    span = t_end - state.t
    if span < 0:
        raise ParameterError("t_end precedes the state time")
    nsteps = int(math.ceil(span / dt - 1e-12)) if span > 0 else 0
    h = span / nsteps if nsteps else dt
    cur = state
    rows = []

    def record(s):
        coeff = float(bc.coefficient(s.t))
        rows.append((s.t, energy(s), boundary_flux(s), boundary_residual(s, coeff),
                     constraint_residual(s)))

    record(cur)
    for k in range(1, nsteps + 1):
        cur = step(cur, h, bc, outer, profile)
        if k == nsteps:
            cur = replace(cur, t=float(t_end))
        if not (np.isfinite(cur.p).all() and np.isfinite(cur.q).all() and np.isfinite(cur.w).all()):
            raise DivergenceError(f"non-finite values after step {k}")
        if k % record_every == 0 or k == nsteps:
            record(cur)
    cols = list(zip(*rows))
    trace = RadialTrace(np.array(cols[0]), np.array(cols[1]), np.array(cols[2]),
                        np.array(cols[3]), np.array(cols[4]))
    return trace, cur


def l2_error(state: RadialState, prof: Profile) -> float:
    """Energy-weighted L2 distance from the exact coefficients at state.t."""
    p, q, w = analytic_coefficients(prof, state.t, state.r)
    diff = RadialState(state.r, state.p - p, state.q - q, state.w - w, state.t)
    return math.sqrt(max(energy(diff), 0.0))


def eigenmode_check(eps: float, t: float = 0.2, dr: float = 1.0 / 400, R: Optional[float] = None,
                    floor: float = 1e-6) -> dict:
    """Evolve exponential data and compare log(state(t)/state(0))/t with the rate.

    Nodes where a coefficient is below ``floor`` times its maximum are skipped.
    """
    prof = make_exponential(eps)
    rate = prof.rate
    if R is None:
        R = 1.0 + 20.0 / abs(rate)
    r = radial_grid(R, dr)
    s0 = init_from_profile(prof, r)
    if t == 0:
        return {"rate_from_generator": rate, "rate_expected": rate, "max_rel_dev": 0.0, "ratio_at_t0": 1.0}
    _, s1 = run(s0, t, CFL_MAX * dr * 0.5, BoundarySpace.constant(eps), "dirichlet", prof,
                record_every=10**9)
    rates = []
    for a0, a1 in ((s0.p, s1.p), (s0.q, s1.q), (s0.w, s1.w)):
        keep = np.abs(a0) > floor * np.max(np.abs(a0))
        rates.append(np.log(a1[keep] / a0[keep]) / t)
    rates = np.concatenate(rates)
    return {
        "eps": eps,
        "t": t,
        "rate_from_generator": float(np.median(rates)),
        "rate_expected": rate,
        "max_rel_dev": float(np.max(np.abs(rates - rate)) / abs(rate)),
    }
