"""Independent evaluation of q(x, t) through the classical log-determinant formula.

With theta_i = 4 kappa_i^3 t - kappa_i x and the matrix

    A_ij = delta_ij + gamma_i gamma_j exp(theta_i + theta_j) / (kappa_i + kappa_j),

the solution is q = -2 d^2/dx^2 log det A.  Because dA/dx = -v v^T with
v_i = gamma_i exp(theta_i), the derivatives collapse to inner products:

    d/dx   log det A = -v^T A^{-1} v,
    d^2/dx^2 log det A = 2 (kappa ∘ v)^T A^{-1} v - (v^T A^{-1} v)^2,

where (kappa ∘ v)_i = kappa_i v_i.  A is symmetric positive definite (identity
plus a Gram matrix), so a Cholesky factorization does the solves.  Exponentials
are tamed by the congruence A = E Ahat E with E = diag(exp(s_i)),
s_i = max(theta_i, 0): the inner products above are invariant under replacing
(A, v) by (Ahat, vhat), which keeps every entry bounded out to |x| of several
hundred.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._linalg import LD, cho_solve_ld, cholesky_ld
from .errors import InvalidN, NegativeSquare
from .reconstruct import GridSpec, q_point
from .spectral import SpectralData, evolve


@dataclass(frozen=True)
class GammaData:
    """Norming constants gamma_n > 0 paired with the decay rates kappa_n."""

    gammas: tuple[float, ...]
    kappas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        object.__setattr__(self, "kappas", tuple(float(k) for k in self.kappas))
        if len(self.gammas) != len(self.kappas):
            raise ValueError("gammas and kappas must have equal length")

    @property
    def n(self) -> int:
        return len(self.kappas)


def residue_T(kappas, n: int) -> float:
    """-i times the transmission-coefficient residue at i*kappa_n (1-based n).

    From the Blaschke product: 2 kappa_n prod_{j != n} (kappa_n + kappa_j) /
    (kappa_n - kappa_j), with sign (-1)^(n-1) for decreasing kappas.
    """
    ks = [float(k) for k in kappas]
    if not 1 <= n <= len(ks):
        raise IndexError(f"n={n} out of range 1..{len(ks)}")
    kn = ks[n - 1]
    out = 2.0 * kn
    for j, kj in enumerate(ks):
        if j != n - 1:
            out *= (kn + kj) / (kn - kj)
    return out


def gamma_from_c(data: SpectralData) -> GammaData:
    """Norming constants from coupling constants: gamma_n^2 = c_n * (-i res T).

    Alternating coupling-constant signs make every square positive; a
    non-positive square raises NegativeSquare (invalid data reached this point).
    """
    gammas = []
    for i, c in enumerate(data.c):
        sq = c * residue_T(data.kappas, i + 1)
        if not sq > 0.0:
            raise NegativeSquare(f"gamma_{i + 1}^2 = {sq} is not positive")
        gammas.append(math.sqrt(sq))
    return GammaData(gammas=tuple(gammas), kappas=data.kappas)


def _scaled_parts(gd: GammaData, x: float, t: float):
    """Ahat, vhat and kappa vector in long double for the congruence-scaled matrix."""
    kap = np.array(gd.kappas, dtype=LD)
    gam = np.array(gd.gammas, dtype=LD)
    theta = LD(4.0) * kap**3 * LD(t) - kap * LD(x)
    s = np.maximum(theta, LD(0.0))
    vhat = gam * np.exp(theta - s)
    ahat = np.diag(np.exp(LD(-2.0) * s)) + np.outer(vhat, vhat) / (kap[:, None] + kap[None, :])
    return ahat, vhat, kap, s


def q_det(gd: GammaData, x: float, t: float) -> float:
    """q(x, t) from the log-determinant formula via the rank-one derivative identities.

    ``t`` is measured from the snapshot the gammas encode.
    """
    if gd.n < 1:
        raise InvalidN("determinant formula needs at least one bound state")
    ahat, vhat, kap, _ = _scaled_parts(gd, x, t)
    low = cholesky_ld(ahat)
    u = cho_solve_ld(low, vhat)
    quad = float(np.dot(vhat, u))
    quad_k = float(np.dot(kap * vhat, u))
    return -2.0 * (2.0 * quad_k - quad * quad)


def log_det(gd: GammaData, x: float, t: float) -> np.longdouble:
    """log det A in long double, for finite-difference validation of the analytic path.

    Second differences with steps near 1e-5 divide rounding error by 1e-10, so
    the value is returned without narrowing to double.
    """
    if gd.n < 1:
        raise InvalidN("determinant formula needs at least one bound state")
    ahat, _, _, s = _scaled_parts(gd, x, t)
    low = cholesky_ld(ahat)
    return LD(2.0) * np.sum(np.log(np.diag(low))) + LD(2.0) * np.sum(s)


def compare(data: SpectralData, grid: GridSpec) -> float:
    """Sup over grid nodes of |q_det - q_point|; the cross-oracle deviation."""
    if data.n < 1:
        raise InvalidN("oracle comparison needs at least one bound state")
    gd = gamma_from_c(data)
    t_list = grid.t_values if grid.t_values is not None else (data.t,)
    worst = 0.0
    for t in t_list:
        evolved = evolve(data, t - data.t)
        for x in grid.xs:
            worst = max(worst, abs(q_det(gd, float(x), t - data.t) - q_point(evolved, float(x))))
    return worst
