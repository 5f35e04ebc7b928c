"""Shell energy, boundary flux and decay-rate fitting for the exact fields.

The sphere rule is Gauss-Legendre in cos(theta) times the trapezoid rule in
phi; the radial rule is Gauss-Legendre on [1, r_max].  Sums are accumulated
with ``math.fsum``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .boundary import measure_kappa, poynting_normal, quad_form
from .errors import AccuracyWarning, ParameterError
from .fields import eval_pair
from .profiles import Profile


@dataclass(frozen=True)
class ShellGrid:
    r_max: float
    n_r: int = 48
    n_theta: int = 12
    n_phi: int = 12
    r_min: float = 1.0

    def __post_init__(self):
        if not self.r_max > self.r_min:
            raise ParameterError("r_max must exceed 1")
        if min(self.n_r, self.n_theta, self.n_phi) < 4:
            raise ParameterError("node counts must be at least 4")

    @property
    def sphere_degree(self) -> int:
        """Total spherical-harmonic degree integrated exactly by the sphere rule."""
        return min(2 * self.n_theta - 1, self.n_phi - 1)

    def refined(self, factor: int = 2) -> "ShellGrid":
        return ShellGrid(self.r_max, self.n_r * factor, self.n_theta * factor,
                         self.n_phi * factor, self.r_min)


@dataclass
class EnergyTrace:
    times: np.ndarray
    energy: np.ndarray
    flux: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.energy = np.asarray(self.energy, dtype=float)
        self.flux = np.asarray(self.flux, dtype=float)
        if not (len(self.times) == len(self.energy) == len(self.flux)):
            raise ParameterError("trace columns must have equal length")


@dataclass
class ShellEnergy:
    value: float
    tail_bound: float = 0.0
    quad_error: float = 0.0
    accurate: bool = True
    extra: dict = field(default_factory=dict)

    def __float__(self):
        return self.value


def sphere_rule(n_theta: int, n_phi: int):
    """Unit directions (M, 3) and weights (M,) summing to 4*pi."""
    mu, wmu = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    s = np.sqrt(1.0 - mu**2)
    omega = np.stack([
        np.outer(s, np.cos(phi)),
        np.outer(s, np.sin(phi)),
        np.outer(mu, np.ones(n_phi)),
    ], axis=-1).reshape(-1, 3)
    weights = np.outer(wmu, np.full(n_phi, 2.0 * np.pi / n_phi)).reshape(-1)
    return omega, weights


def radial_rule(a: float, b: float, n: int):
    z, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (z + 1.0), half * w


def integrate_sphere(f, n_theta=12, n_phi=12) -> float:
    omega, w = sphere_rule(n_theta, n_phi)
    return math.fsum(w * f(omega))


def default_r_max(prof: Profile, t: float) -> float:
    if prof.kind == "exponential":
        return 1.0 + 20.0 / abs(prof.rate)
    if prof.kind == "bump":
        return max(prof.width - t, 1.0)
    raise ParameterError("custom profiles need an explicit grid")


def default_grid(prof: Profile, t: float = 0.0) -> Optional[ShellGrid]:
    r_max = default_r_max(prof, t)
    if r_max <= 1.0:
        return None
    n_r = 48 if prof.kind == "exponential" else 160
    return ShellGrid(r_max, n_r=n_r)


def exponential_tail_bound(prof: Profile, t: float, r_max: float) -> float:
    """Upper bound of the energy in |x| > r_max for an exponential profile."""
    a = -2.0 * prof.rate
    if a <= 0:
        return math.inf
    k = abs(prof.rate)
    # |E| <= (k^2 + k) e^{r s}, |B| <= (k^2 + 5k + 5) e^{r s} for |x| >= 1
    amp = (k * k + k) ** 2 + (k * k + 5 * k + 5) ** 2
    R = r_max
    moment = math.exp(-a * R) * (R * R / a + 2 * R / a**2 + 2 / a**3)
    return 4.0 * math.pi * amp * math.exp(2.0 * prof.rate * t) * moment


def _shell_sum(prof, t, grid):
    r, wr = radial_rule(grid.r_min, grid.r_max, grid.n_r)
    omega, wo = sphere_rule(grid.n_theta, grid.n_phi)
    x = r[:, None, None] * omega[None, :, :]
    u = eval_pair(prof, t, x)
    dens = np.sum(u.E**2, -1) + np.sum(u.B**2, -1)
    weights = (wr * r * r)[:, None] * wo[None, :]
    return math.fsum((weights * dens).ravel())


def shell_energy(prof: Profile, t: float, grid: Optional[ShellGrid] = None,
                 tol: float = 1e-10) -> ShellEnergy:
    """Quadrature of |E|^2 + |B|^2 over 1 <= |x| <= r_max.

    A second evaluation on a coarser grid estimates the quadrature error;
    exceeding ``tol`` (relative) raises an :class:`AccuracyWarning`.
    """
    if grid is None:
        grid = default_grid(prof, t)
        if grid is None:
            return ShellEnergy(0.0)
    value = _shell_sum(prof, t, grid)
    coarse = ShellGrid(grid.r_max, max(4, grid.n_r * 3 // 4), max(4, grid.n_theta * 3 // 4),
                       max(4, grid.n_phi * 3 // 4), grid.r_min)
    err = abs(value - _shell_sum(prof, t, coarse))
    tail = exponential_tail_bound(prof, t, grid.r_max) if prof.kind == "exponential" else 0.0
    accurate = err <= tol * max(abs(value), 1e-300)
    if not accurate:
        warnings.warn(f"shell quadrature error estimate {err:.3e} exceeds tolerance",
                      AccuracyWarning, stacklevel=2)
    return ShellEnergy(value, tail, err, accurate)


def boundary_flux(prof: Profile, t: float, grid: Optional[ShellGrid] = None) -> float:
    """Sphere quadrature of <A(n)u, u> on |x| = 1."""
    nt, nph = (grid.n_theta, grid.n_phi) if grid is not None else (12, 12)
    omega, w = sphere_rule(nt, nph)
    u = eval_pair(prof, t, omega)
    return math.fsum(w * quad_form(u, omega))


def poynting_flux(prof: Profile, t: float, grid: Optional[ShellGrid] = None) -> float:
    nt, nph = (grid.n_theta, grid.n_phi) if grid is not None else (12, 12)
    omega, w = sphere_rule(nt, nph)
    u = eval_pair(prof, t, omega)
    return math.fsum(w * poynting_normal(u, omega))


def energy_identity_check(prof: Profile, t: float, grid: Optional[ShellGrid] = None,
                          dt: float = 1e-4, tail_tol: float = 1e-10) -> dict:
    """Compare d/dt of the shell energy with kappa times the normal Poynting flux.

    The radial truncation is held fixed while differencing in t.
    """
    if grid is None:
        grid = default_grid(prof, t + dt) if prof.kind != "custom" else None
        if grid is None:
            return {"lhs": 0.0, "rhs": 0.0, "mismatch": 0.0, "kappa": measure_kappa(),
                    "inconclusive": False}
    ep = shell_energy(prof, t + dt, grid).value
    em = shell_energy(prof, t - dt, grid).value
    e0 = shell_energy(prof, t, grid)
    lhs = (ep - em) / (2.0 * dt)
    kappa = measure_kappa()
    rhs = kappa * poynting_flux(prof, t, grid)
    scale = abs(rhs)
    mismatch = abs(lhs - rhs) / scale if scale > 0 else abs(lhs - rhs)
    tail = e0.tail_bound
    return {
        "t": t,
        "lhs": lhs,
        "rhs": rhs,
        "flux": boundary_flux(prof, t, grid),
        "mismatch": mismatch,
        "kappa": kappa,
        "energy": e0.value,
        "tail_bound": tail,
        "inconclusive": bool(tail > tail_tol * max(e0.value, 1e-300)),
    }


def energy_trace(prof: Profile, times, grid: Optional[ShellGrid] = None) -> EnergyTrace:
    times = np.asarray(times, dtype=float)
    energy, flux = [], []
    for t in times:
        g = grid if grid is not None else default_grid(prof, float(t))
        if g is None:
            energy.append(0.0)
            flux.append(0.0)
            continue
        energy.append(shell_energy(prof, float(t), g).value)
        flux.append(boundary_flux(prof, float(t), g))
    return EnergyTrace(times, energy, flux)


def decay_rate(trace: EnergyTrace, exclude_nonpositive: bool = False) -> float:
    """Field decay rate: half the least-squares slope of log(energy) against t."""
    e = trace.energy
    keep = e > 0
    if not exclude_nonpositive and not np.all(keep):
        raise ParameterError("energy trace contains non-positive values")
    if np.count_nonzero(keep) < 3:
        raise ParameterError("need at least three positive energy samples")
    slope, _ = np.polyfit(trace.times[keep], np.log(e[keep]), 1)
    return 0.5 * float(slope)
