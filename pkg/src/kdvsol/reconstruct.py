"""Soliton solutions q(x, t) reconstructed through the coupling-problem representation.

At each point the coupling constants eta(1/kappa_n) = c_n exp(-2 kappa_n x)
define a symmetric coupling problem whose solution pair gives

    q = -d^2/dz^2 [Phi_minus(z) Phi_plus(z) / W(z)]  at z = 0.

With Phi_plus = 1 + p_1 z + p_2 z^2 + ... and 1/W = 1 + (sum kappa_n^2) z^2 + ...
the series of the product starts 1 + (2 p_2 - p_1^2 + sum kappa_n^2) z^2, so

    q = -2 (2 p_2 - p_1^2 + sum kappa_n^2),

which is exact and avoids numerical differentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import coupling
from ._linalg import LD
from .spectral import (
    _ETA_LOG_LIMIT,
    ExtendedReal,
    SpectralData,
    _eta_signed_logs,
    evolve,
)


@dataclass(frozen=True)
class GridSpec:
    """Uniform evaluation grid, optionally over several time values."""

    x_min: float
    x_max: float
    nx: int
    t_values: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError("x_min must be below x_max")
        if self.nx < 2:
            raise ValueError("nx must be at least 2")
        if self.t_values is not None:
            object.__setattr__(self, "t_values", tuple(float(t) for t in self.t_values))

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)


def _coupling_ingredients(
    data: SpectralData, x: float
) -> tuple[coupling.CouplingSpec, list[np.longdouble | None]]:
    """Coupling spec at x plus extended-precision eta values for the solver.

    eta is evaluated in long double so that solutions stay smooth across
    nearby x; double-precision exp jitter would dominate the 1/h^3-amplified
    finite-difference stencils downstream.
    """
    kap = np.array(data.kappas, dtype=LD)
    cc = np.array(data.c, dtype=LD)
    logs = np.log(np.abs(cc)) - LD(2.0) * kap * LD(x)
    etas: list[ExtendedReal] = []
    eta_hp: list[np.longdouble | None] = []
    for c_i, lg in zip(data.c, logs):
        if float(lg) > _ETA_LOG_LIMIT:
            etas.append(ExtendedReal.infinity())
            eta_hp.append(None)
        elif float(lg) < -_ETA_LOG_LIMIT:
            etas.append(ExtendedReal.finite(0.0))
            eta_hp.append(LD(0.0))
        else:
            v = LD(math.copysign(1.0, c_i)) * np.exp(lg)
            etas.append(ExtendedReal.finite(float(v)))
            eta_hp.append(v)
    return coupling.CouplingSpec(lambdas=data.lambdas, eta=tuple(etas)), eta_hp


def coupling_spec_at(data: SpectralData, x: float) -> coupling.CouplingSpec:
    """The coupling problem for this data at position x (stored time)."""
    return _coupling_ingredients(data, x)[0]


def _q_point_ld(data: SpectralData, x: float) -> np.longdouble:
    if data.n == 0:
        return LD(0.0)
    _, logs = _eta_signed_logs(data, x)
    if all(abs(lg) > _ETA_LOG_LIMIT for lg in logs):
        # every soliton is exponentially far; q underflows to zero
        return LD(0.0)
    spec, eta_hp = _coupling_ingredients(data, x)
    sol = coupling.solve(spec, eta_hp=eta_hp)
    p = sol.p_ld
    p1 = p[1] if len(p) > 1 else LD(0.0)
    p2 = p[2] if len(p) > 2 else LD(0.0)
    ksq = np.sum(np.array(data.kappas, dtype=LD) ** 2)
    return LD(-2.0) * (LD(2.0) * p2 - p1 * p1 + ksq)


def q_point(data: SpectralData, x: float) -> float:
    """The solution value q(x) at the data's stored time."""
    return float(_q_point_ld(data, x))


def q_grid(data: SpectralData, grid: GridSpec) -> list[tuple[float, np.ndarray, np.ndarray]]:
    """Evaluate q over the grid; one (t, xs, qs) triple per time value.

    Grid times are absolute: the data is evolved from its stored time to each.
    """
    t_list = grid.t_values if grid.t_values is not None else (data.t,)
    xs = grid.xs
    out = []
    for t in t_list:
        d = evolve(data, t - data.t)
        qs = np.array([q_point(d, float(x)) for x in xs])
        out.append((float(t), xs, qs))
    return out


def pde_residual(data: SpectralData, x: float, t: float, h: float) -> float:
    """|q_t - 6 q q_x + q_xxx| by central differences (5-point in x, 2-point in t).

    The truncation error is O(h^2); evaluations run in extended precision so
    the 1/h^3 amplification of rounding noise stays far below it.
    """
    if h <= 0.0:
        raise ValueError("h must be positive")
    base = evolve(data, t - data.t)
    hl = LD(h)

    qm2 = _q_point_ld(base, x - 2.0 * h)
    qm1 = _q_point_ld(base, x - h)
    q0 = _q_point_ld(base, x)
    qp1 = _q_point_ld(base, x + h)
    qp2 = _q_point_ld(base, x + 2.0 * h)

    q_x = (-qp2 + LD(8.0) * qp1 - LD(8.0) * qm1 + qm2) / (LD(12.0) * hl)
    q_xxx = (qp2 - LD(2.0) * qp1 + LD(2.0) * qm1 - qm2) / (LD(2.0) * hl**3)

    q_tp = _q_point_ld(evolve(base, h), x)
    q_tm = _q_point_ld(evolve(base, -h), x)
    q_t = (q_tp - q_tm) / (LD(2.0) * hl)

    return float(abs(q_t - LD(6.0) * q0 * q_x + q_xxx))
