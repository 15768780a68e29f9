"""Long-time soliton decomposition: phase shifts, asymptotic profiles, deviation scans.

For large t the solution splits into independent solitons
-2 kappa_n^2 sech^2(kappa_n x - 4 kappa_n^3 t - xi_n) whose phase shifts xi_n
collect the initial coupling constant and the pairwise interactions:

    xi_n = log|c_n(0)|/2
           - (1/2) sum_{j<n} log((kappa_j + kappa_n)/(kappa_j - kappa_n))
           + (1/2) sum_{j>n} log((kappa_n + kappa_j)/(kappa_n - kappa_j)).

The deviation scan measures the sup-norm gap between the reconstructed
solution and this superposition over a window wide enough to contain every
soliton trajectory plus decay margins.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import WindowTooSmall
from .reconstruct import GridSpec, q_point
from .spectral import ExtendedReal, SpectralData, evolve

# sech^2 argument beyond which a profile term is a hard zero
SECH_ARG_LIMIT = 400.0

# window margins: 20/kappa puts sech^2 below 1e-17; spacing 0.05/kappa_1
# resolves the narrowest soliton
WINDOW_MARGIN_FACTOR = 20.0
WINDOW_SPACING_FACTOR = 0.05


@dataclass(frozen=True)
class SolitonProfile:
    """Per-soliton (kappa_n, xi_n) pairs defining the asymptotic superposition."""

    terms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "terms", tuple((float(k), float(x)) for k, x in self.terms)
        )

    @property
    def n(self) -> int:
        return len(self.terms)


def phase_shifts(data: SpectralData) -> SolitonProfile:
    """Phase shifts of the asymptotic solitons, from the t=0 coupling constants.

    The stored c is rolled back to its t=0 value internally, so data at any
    time stamp yields the same profile.
    """
    k = data.kappas
    xis = []
    for i in range(data.n):
        # log|c_n(0)| without forming the possibly huge rollback factor
        lc0 = math.log(abs(data.c[i])) - 8.0 * k[i] ** 3 * data.t
        xi = 0.5 * lc0
        for j in range(i):
            xi -= 0.5 * math.log((k[j] + k[i]) / (k[j] - k[i]))
        for j in range(i + 1, data.n):
            xi += 0.5 * math.log((k[i] + k[j]) / (k[i] - k[j]))
        xis.append(xi)
    return SolitonProfile(terms=tuple(zip(k, xis)))


def profile_eval(profile: SolitonProfile, x, t: float):
    """Sum of -2 kappa^2 sech^2(kappa x - 4 kappa^3 t - xi); scalar or array in x."""
    xs = np.asarray(x, dtype=float)
    out = np.zeros_like(xs, dtype=float)
    for kappa, xi in profile.terms:
        arg = kappa * xs - 4.0 * kappa**3 * t - xi
        mask = np.abs(arg) < SECH_ARG_LIMIT
        term = np.zeros_like(out)
        term[mask] = -2.0 * kappa**2 / np.cosh(arg[mask]) ** 2
        out += term
    return float(out) if np.isscalar(x) else out


def required_window(data: SpectralData, t: float) -> tuple[float, float]:
    """x-interval every deviation window must cover at time t."""
    k1, kn = data.kappas[0], data.kappas[-1]
    lo = min(4.0 * kn**2 * t, 0.0) - WINDOW_MARGIN_FACTOR / kn
    hi = max(4.0 * k1**2 * t, 0.0) + WINDOW_MARGIN_FACTOR / k1
    return lo, hi


def default_window(data: SpectralData, t: float) -> GridSpec:
    """Window satisfying the coverage rule with spacing <= 0.05/kappa_1."""
    lo, hi = required_window(data, t)
    spacing = WINDOW_SPACING_FACTOR / data.kappas[0]
    nx = int(math.ceil((hi - lo) / spacing)) + 1
    return GridSpec(x_min=lo, x_max=hi, nx=max(nx, 2))


def deviation(data: SpectralData, t: float, window: GridSpec) -> float:
    """Sup over the window of |q(x, t) - asymptotic superposition|.

    Raises WindowTooSmall when the window misses a soliton trajectory (plus
    margin) or is too coarse to resolve the narrowest soliton.
    """
    if data.n == 0:
        return 0.0
    lo, hi = required_window(data, t)
    if window.x_min > lo or window.x_max < hi:
        raise WindowTooSmall(
            f"window [{window.x_min}, {window.x_max}] must cover [{lo:.3f}, {hi:.3f}]"
        )
    max_spacing = WINDOW_SPACING_FACTOR / data.kappas[0]
    if window.spacing > max_spacing * (1.0 + 1e-12):
        raise WindowTooSmall(
            f"grid spacing {window.spacing:.4g} exceeds {max_spacing:.4g}"
        )
    evolved = evolve(data, t - data.t)
    profile = phase_shifts(data)
    xs = window.xs
    target = profile_eval(profile, xs, t)
    worst = 0.0
    for x, goal in zip(xs, target):
        worst = max(worst, abs(q_point(evolved, float(x)) - goal))
    return worst


def hat_eta(
    lambdas: Sequence[float],
    tags: Sequence[str],
    eta0: ExtendedReal | float,
) -> ExtendedReal:
    """Limit coupling constant when all other data runs off to zero or infinity.

    Each lambda is tagged "zero", "center" or "infinity"; exactly one center.
    For finite eta at the center,

        hat = eta0 * prod_zero (lam + lam0)/(lam - lam0)
                   * prod_inf  (lam - lam0)/(lam + lam0),

    and hat = ∞ when eta0 = ∞.
    """
    if not isinstance(eta0, ExtendedReal):
        eta0 = ExtendedReal.finite(eta0)
    if len(lambdas) != len(tags):
        raise ValueError("lambdas and tags must have equal length")
    centers = [lam for lam, tag in zip(lambdas, tags) if tag == "center"]
    if len(centers) != 1:
        raise ValueError(f"exactly one lambda must be tagged 'center', got {len(centers)}")
    lam0 = float(centers[0])
    if eta0.is_infinite:
        return ExtendedReal.infinity()
    out = eta0.value
    for lam, tag in zip(lambdas, tags):
        lam = float(lam)
        if tag == "zero":
            out *= (lam + lam0) / (lam - lam0)
        elif tag == "infinity":
            out *= (lam - lam0) / (lam + lam0)
        elif tag != "center":
            raise ValueError(f"unknown tag {tag!r}")
    return ExtendedReal.finite(out)


def limit_F(lambda0: float, hat: ExtendedReal | float, z: complex) -> complex:
    """Limiting value 1 + z^2/(lambda0^2 - z^2) * sech^2(log|hat|/2).

    The sech^2 factor extends continuously to 0 at hat in {0, ∞}.
    """
    if not isinstance(hat, ExtendedReal):
        hat = ExtendedReal.finite(hat)
    zc = complex(z)
    if zc * zc == lambda0 * lambda0:
        raise ValueError("z^2 must differ from lambda0^2")
    if hat.is_infinite or hat.value == 0.0:
        factor = 0.0
    else:
        u = 0.5 * math.log(abs(hat.value))
        factor = 0.0 if abs(u) > SECH_ARG_LIMIT else 1.0 / math.cosh(u) ** 2
    return 1.0 + zc * zc / (lambda0 * lambda0 - zc * zc) * factor


def tail_bound(kappas: Sequence[float], n_keep: int) -> float:
    """Sup-norm bound 2 sum_{n > n_keep} kappa_n^2 for the dropped profile tail."""
    ks = [float(k) for k in kappas]
    if not 0 <= n_keep <= len(ks):
        raise ValueError(f"n_keep={n_keep} out of range 0..{len(ks)}")
    return 2.0 * sum(k * k for k in ks[n_keep:])
