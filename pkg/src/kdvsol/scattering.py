"""Direct scattering checks: Jost solutions, transmission coefficient, bound states.

The reconstructed potential is sampled on [-L, L], interpolated, and fed to an
adaptive high-order integrator for -f'' + q f = k^2 f.  Matching the two Jost
solutions at x = 0 yields the transmission coefficient

    T(k) = 2ik / (f_+' f_- - f_+ f_-'),

whose modulus must be 1 on the real axis (reflectionless), whose value must
match the Blaschke product over the bound states, and whose imaginary-axis
Wronskian zeros recover the kappa_n.  Integrations start from unit-normalized
data (the plane-wave factor exp(ikL) is reattached analytically) so the state
stays within floating-point range for imaginary k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .errors import IntegratorFailure, MissedEigenvalue, NearPole, PoleAt
from .reconstruct import GridSpec, q_grid
from .spectral import SpectralData

END_DECAY_CUTOFF = 1e-10
DOMAIN_FACTOR = 20.0      # L = max(20/kappa_N, 30)
DOMAIN_MIN_HALF_WIDTH = 30.0
SAMPLE_FACTOR = 0.01      # h <= 0.01/kappa_1
WRONSKIAN_POLE_TOL = 1e-12
EIGEN_BISECT_TOL = 1e-9


@dataclass(frozen=True)
class SampledPotential:
    """Potential samples on a uniform grid over [-L, L]."""

    x: np.ndarray
    q: np.ndarray
    half_width: float
    end_cutoff: float = END_DECAY_CUTOFF

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if x.ndim != 1 or x.shape != q.shape or x.size < 4:
            raise ValueError("x and q must be equal-length 1-d arrays (>= 4 points)")
        steps = np.diff(x)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("x grid must be uniform")
        if abs(q[0]) > self.end_cutoff or abs(q[-1]) > self.end_cutoff:
            raise ValueError(
                f"|q| at the domain ends exceeds the decay cutoff {self.end_cutoff:g}"
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "q", q)

    @property
    def spacing(self) -> float:
        return float(self.x[1] - self.x[0])

    @cached_property
    def _interpolant(self) -> CubicSpline:
        return CubicSpline(self.x, self.q, bc_type="natural")

    def q_at(self, x):
        return self._interpolant(x)


def sample_potential(
    data: SpectralData,
    half_width: float | None = None,
    spacing: float | None = None,
) -> SampledPotential:
    """Sample the reconstructed q for scattering runs.

    Defaults follow the decay rule L = max(20/kappa_N, 30) and the resolution
    rule h <= 0.01/kappa_1.
    """
    if data.n:
        length = half_width if half_width is not None else max(
            DOMAIN_FACTOR / data.kappas[-1], DOMAIN_MIN_HALF_WIDTH
        )
        step = spacing if spacing is not None else SAMPLE_FACTOR / data.kappas[0]
    else:
        length = half_width if half_width is not None else DOMAIN_MIN_HALF_WIDTH
        step = spacing if spacing is not None else 0.05
    nx = 2 * int(math.ceil(length / step)) + 1
    grid = GridSpec(x_min=-length, x_max=length, nx=nx)
    (_, xs, qs), = q_grid(data, grid)
    return SampledPotential(x=xs, q=qs, half_width=length)


@dataclass(frozen=True)
class JostPair:
    """Values of the two Jost solutions and their x-derivatives at x = 0."""

    k: complex
    f_minus: complex
    df_minus: complex
    f_plus: complex
    df_plus: complex

    @property
    def wronskian(self) -> complex:
        return self.df_plus * self.f_minus - self.f_plus * self.df_minus


def _integrate_batch(
    p: SampledPotential, ks: np.ndarray, side: int, rtol: float = 1e-10, atol: float = 1e-12
) -> tuple[np.ndarray, np.ndarray]:
    """Normalized Jost data g(0), g'(0) for every k; g(∓L) = 1, g'(∓L) = ∓ik.

    ``side`` is -1 for the left solution f_- and +1 for the right solution f_+;
    the true Jost values are exp(ikL) * g.
    """
    ks = np.asarray(ks, dtype=complex)
    m = ks.size
    if m == 0:
        return np.empty(0, dtype=complex), np.empty(0, dtype=complex)
    length = p.half_width
    k_sq = ks**2
    interp = p._interpolant

    def rhs(x, y):
        g = y[:m]
        gp = y[m:]
        return np.concatenate((gp, (interp(x) - k_sq) * g))

    y0 = np.concatenate((np.ones(m, dtype=complex), side * 1j * ks))
    sol = solve_ivp(
        rhs,
        (side * length, 0.0),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise IntegratorFailure(f"Jost integration failed for side {side:+d}: {sol.message}")
    y_end = sol.y[:, -1]
    return y_end[:m], y_end[m:]


def _jost_batch(p: SampledPotential, ks: np.ndarray, rtol: float = 1e-10):
    """True Jost boundary data at x = 0 for a batch of k values."""
    ks = np.asarray(ks, dtype=complex)
    gm, gpm = _integrate_batch(p, ks, side=-1, rtol=rtol)
    gp, gpp = _integrate_batch(p, ks, side=+1, rtol=rtol)
    phase = np.exp(1j * ks * p.half_width)
    return phase * gm, phase * gpm, phase * gp, phase * gpp


def jost_pair(p: SampledPotential, k: complex) -> JostPair:
    """Integrate both Jost solutions of -f'' + q f = k^2 f to the matching point x = 0."""
    if k == 0:
        raise ValueError("k must be nonzero")
    fm, dfm, fp, dfp = _jost_batch(p, np.array([k]))
    return JostPair(
        k=complex(k),
        f_minus=complex(fm[0]),
        df_minus=complex(dfm[0]),
        f_plus=complex(fp[0]),
        df_plus=complex(dfp[0]),
    )


def transmission(p: SampledPotential, k: complex) -> complex:
    """Transmission coefficient T(k) = 2ik / Wronskian(f_+, f_-) at the matching point."""
    pair = jost_pair(p, k)
    w = pair.wronskian
    if abs(w) < WRONSKIAN_POLE_TOL:
        raise NearPole(f"Wronskian {abs(w):.3e} below {WRONSKIAN_POLE_TOL:g} at k={k}")
    return 2j * complex(k) / w


def blaschke_T(kappas: Sequence[float], k: complex) -> complex:
    """Blaschke product prod (k + i kappa_n)/(k - i kappa_n); T of a reflectionless potential."""
    kc = complex(k)
    out = 1.0 + 0.0j
    for kap in kappas:
        den = kc - 1j * kap
        if abs(den) < 1e-12:
            raise PoleAt(1j * kap)
        out *= (kc + 1j * kap) / den
    return out


def _wronskian_imag_axis(p: SampledPotential, kappas: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Real Wronskian values at k = i*kappa for a batch of positive kappa."""
    ks = 1j * np.asarray(kappas, dtype=float)
    fm, dfm, fp, dfp = _jost_batch(p, ks, rtol=rtol)
    w = dfp * fm - fp * dfm
    return w.real


def eigenvalues(
    p: SampledPotential,
    kappa_max: float,
    grid_step: float | None = None,
    expected_count: int | None = None,
    rtol: float = 1e-10,
) -> tuple[float, ...]:
    """Recover bound-state kappas as Wronskian zeros on the imaginary axis.

    Sign changes are bracketed on a kappa grid (default step kappa_max/64) and
    refined by bisection to 1e-9; all brackets bisect in lockstep so each sweep
    costs one batched integration.  If ``expected_count`` is given, a count
    mismatch raises MissedEigenvalue.
    """
    if kappa_max <= 0.0:
        raise ValueError("kappa_max must be positive")
    step = grid_step if grid_step is not None else kappa_max / 64.0
    grid = np.arange(step, kappa_max + 0.5 * step, step)
    if grid.size < 2:
        raise ValueError("search grid has fewer than two points; decrease grid_step")
    vals = _wronskian_imag_axis(p, grid, rtol=rtol)
    lo, hi, flo = [], [], []
    for i in range(grid.size - 1):
        if np.sign(vals[i]) != np.sign(vals[i + 1]) and vals[i] != 0.0:
            lo.append(grid[i])
            hi.append(grid[i + 1])
            flo.append(vals[i])
    lo = np.array(lo)
    hi = np.array(hi)
    flo = np.array(flo)
    if lo.size:
        n_iter = int(math.ceil(math.log2(step / EIGEN_BISECT_TOL)))
        for _ in range(n_iter):
            mid = 0.5 * (lo + hi)
            fmid = _wronskian_imag_axis(p, mid, rtol=rtol)
            left = np.sign(fmid) == np.sign(flo)
            lo = np.where(left, mid, lo)
            flo = np.where(left, fmid, flo)
            hi = np.where(left, hi, mid)
            if float(np.max(hi - lo)) <= EIGEN_BISECT_TOL:
                break
    found = tuple(sorted((float(v) for v in 0.5 * (lo + hi)), reverse=True))
    if expected_count is not None and len(found) != expected_count:
        raise MissedEigenvalue(f"expected {expected_count} eigenvalues, found {len(found)}")
    return found


@dataclass(frozen=True)
class ScatterConfig:
    k_min: float = 0.3
    k_max: float = 3.0
    n_k: int = 60
    rtol: float = 1e-10
    half_width: float | None = None
    spacing: float | None = None
    kappa_max: float | None = None


@dataclass(frozen=True)
class ScatteringReport:
    """Deviations of the direct-scattering picture from the reflectionless ideal."""

    k_grid: tuple[float, ...]
    max_t_modulus_dev: float          # max | |T(k)| - 1 | over the real-k grid
    max_blaschke_dev: float           # max |T_numeric(k) - Blaschke(k)|
    recovered_kappas: tuple[float, ...]
    eigenvalue_errors: tuple[float, ...]
    ratio_errors: tuple[float, ...]   # relative errors of f_-/f_+ against the stored c_n
    half_width: float
    spacing: float


def scatter_report(data: SpectralData, config: ScatterConfig | None = None) -> ScatteringReport:
    """Full ground-truth check: reflectionlessness, Blaschke match, bound states.

    Samples q from the reconstruction, runs the transmission coefficient over
    a real-k grid, recovers eigenvalues on the imaginary axis, and compares
    the Jost-solution ratio at each bound state against the stored coupling
    constants (which carry the data's time stamp).
    """
    cfg = config or ScatterConfig()
    p = sample_potential(data, half_width=cfg.half_width, spacing=cfg.spacing)

    ks = np.linspace(cfg.k_min, cfg.k_max, cfg.n_k)
    fm, dfm, fp, dfp = _jost_batch(p, ks.astype(complex), rtol=cfg.rtol)
    w = dfp * fm - fp * dfm
    t_num = 2j * ks / w
    max_mod = float(np.max(np.abs(np.abs(t_num) - 1.0)))
    blas = np.array([blaschke_T(data.kappas, k) for k in ks])
    max_blas = float(np.max(np.abs(t_num - blas)))

    if data.n:
        kappa_max = cfg.kappa_max if cfg.kappa_max is not None else 1.25 * data.kappas[0]
        if data.n >= 2:
            gaps = [data.kappas[i] - data.kappas[i + 1] for i in range(data.n - 1)]
            step = min(gaps) / 8.0
        else:
            step = data.kappas[0] / 8.0
        recovered = eigenvalues(
            p, kappa_max, grid_step=step, expected_count=data.n, rtol=cfg.rtol
        )
        eig_errors = tuple(abs(r - k) for r, k in zip(recovered, data.kappas))
        fm, _, fp, _ = _jost_batch(p, 1j * np.asarray(recovered), rtol=cfg.rtol)
        ratios = (fm / fp).real
        ratio_errors = tuple(
            float(abs(r - c) / abs(c)) for r, c in zip(ratios, data.c)
        )
    else:
        recovered = ()
        eig_errors = ()
        ratio_errors = ()

    return ScatteringReport(
        k_grid=tuple(float(k) for k in ks),
        max_t_modulus_dev=max_mod,
        max_blaschke_dev=max_blas,
        recovered_kappas=recovered,
        eigenvalue_errors=eig_errors,
        ratio_errors=ratio_errors,
        half_width=p.half_width,
        spacing=p.spacing,
    )
