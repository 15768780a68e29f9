"""Finite symmetric coupling problems for polynomial pairs.

Given strictly increasing positive points lambda_1 < ... < lambda_N and
coupling constants eta(lambda_n) in R ∪ {∞} (the negative half of the zero
set carries eta(-lambda) = eta(lambda)^(-1)), find a polynomial
Phi_plus(z) = 1 + p_1 z + ... + p_N z^N such that, with
Phi_minus(z) = Phi_plus(-z) and W(z) = prod(1 - z^2/lambda_n^2):

* coupling:       Phi_plus(-lambda_n) = eta(lambda_n) Phi_plus(lambda_n),
                  read as Phi_plus(lambda_n) = 0 when eta(lambda_n) = ∞;
* positivity:     z Phi_minus(z) Phi_plus(z) / W(z) is a meromorphic
                  Herglotz-Nevanlinna function (real interlaced zeros and
                  poles, negative residues);
* normalization:  Phi_plus(0) = 1.

The coupling conditions form an N x N linear system in p_1..p_N which is
solved with row/column equilibration and extended-precision iterative
refinement; the positivity condition is verified after the fact and
solutions violating it are rejected.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._linalg import LD, solve_refined
from .errors import NotHerglotz, PoleAt, SingularSystem, Unsolvable
from .spectral import ExtendedReal, SigmaSet, w_eval, w_prime

_COND_LIMIT = 1e12
_FALLBACK_EPS = 1e-8
_FALLBACK_DISAGREE = 1e-4
_GATE_TOL = 1e-6

_polyval = np.polynomial.polynomial.polyval


@dataclass(frozen=True)
class CouplingSpec:
    """Positive-half zero set plus coupling constants for a symmetric problem."""

    lambdas: tuple[float, ...]
    eta: tuple[ExtendedReal, ...]

    def __post_init__(self):
        lams = tuple(float(v) for v in self.lambdas)
        etas = tuple(
            v if isinstance(v, ExtendedReal) else ExtendedReal.finite(v) for v in self.eta
        )
        if len(lams) != len(etas):
            raise ValueError("lambdas and eta must have equal length")
        for i in range(len(lams)):
            if not lams[i] > 0.0:
                raise ValueError(f"lambda[{i}] = {lams[i]} must be positive")
            if i and not lams[i] > lams[i - 1]:
                raise ValueError("lambdas must be strictly increasing")
        object.__setattr__(self, "lambdas", lams)
        object.__setattr__(self, "eta", etas)

    @property
    def n(self) -> int:
        return len(self.lambdas)

    def sigma(self) -> SigmaSet:
        return SigmaSet(self.lambdas)


@dataclass(frozen=True)
class CouplingSolution:
    """Coefficients p_0..p_N of Phi_plus; Phi_minus is the parity reflection."""

    p: tuple[float, ...]
    p_ld: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))
        if self.p_ld is None:
            object.__setattr__(self, "p_ld", np.array(self.p, dtype=LD))

    @property
    def degree(self) -> int:
        d = len(self.p) - 1
        while d > 0 and self.p[d] == 0.0:
            d -= 1
        return d

    def phi_plus(self, z):
        """Evaluate Phi_plus at z (scalar or array, real or complex)."""
        return _polyval(z, np.asarray(self.p))

    def phi_minus(self, z):
        """Evaluate Phi_minus(z) = Phi_plus(-z)."""
        return _polyval(np.negative(z), np.asarray(self.p))

    def roots(self) -> np.ndarray:
        """Zeros of Phi_plus (possibly complex due to roundoff), ascending by real part."""
        d = self.degree
        if d == 0:
            return np.empty(0, dtype=complex)
        r = np.roots(np.asarray(self.p[: d + 1][::-1]))
        return r[np.argsort(r.real)]

    def mus(self) -> np.ndarray:
        """Reciprocal roots mu_n with Phi_plus(z) = prod(1 - mu_n z), zero-padded to N."""
        n = len(self.p) - 1
        r = self.roots()
        mu = np.zeros(n, dtype=complex)
        mu[: len(r)] = 1.0 / r
        return mu[np.argsort(-np.abs(mu))]


def _spec_scales(lambdas: Sequence[float], r: float) -> tuple[float, float]:
    """(bound, wscale): the growth bound prod(1+r/lam)^2 and prod(1+r^2/lam^2)."""
    bound = 1.0
    wscale = 1.0
    for lam in lambdas:
        bound *= (1.0 + r / lam) ** 2
        wscale *= 1.0 + (r / lam) ** 2
    return bound, wscale


def solve(
    spec: CouplingSpec,
    check: bool = True,
    eta_hp: Sequence[np.longdouble | None] | None = None,
) -> CouplingSolution:
    """Solve the symmetric coupling problem for the given data.

    Builds the coupling conditions as a linear system in p_1..p_N, equilibrated
    by powers of the geometric-mean lambda and by row maxima, and solved with
    extended-precision refinement.  If the condition estimate exceeds 1e12 the
    data is perturbed by ±1e-8 relative and the two solutions are averaged;
    disagreement beyond 1e-4 raises SingularSystem.  Unless ``check`` is false,
    the positivity condition is verified afterwards (real zeros, negative
    residues, interlacing with the zeros of W) and NotHerglotz is raised on
    violation.

    ``eta_hp`` optionally supplies extended-precision coupling-constant values
    aligned with ``spec.eta`` (None entries fall back to the double value);
    callers that difference solutions across nearby evaluation points need it
    to keep pointwise rounding jitter below the double level.
    """
    n = spec.n
    if n == 0:
        return CouplingSolution(p=(1.0,))

    lam = np.array(spec.lambdas, dtype=LD)
    degrees = np.arange(1, n + 1)
    g = float(np.exp(np.mean(np.log(lam.astype(np.float64)))))
    pow_pos = np.power(lam[:, None] / LD(g), degrees[None, :])
    pow_neg = np.power(-lam[:, None] / LD(g), degrees[None, :])

    mat = np.empty((n, n), dtype=LD)
    rhs = np.empty(n, dtype=LD)
    finite_rows: list[int] = []
    for i, eta in enumerate(spec.eta):
        if eta.is_infinite:
            mat[i] = pow_pos[i]
            rhs[i] = LD(-1.0)
        else:
            e = LD(eta.value)
            if eta_hp is not None and eta_hp[i] is not None:
                e = LD(eta_hp[i])
            mat[i] = pow_neg[i] - e * pow_pos[i]
            rhs[i] = e - LD(1.0)
            finite_rows.append(i)

    row_scale = np.max(np.abs(mat), axis=1)
    row_scale[row_scale == 0.0] = LD(1.0)
    mat_eq = mat / row_scale[:, None]
    rhs_eq = rhs / row_scale

    cond = np.linalg.cond(mat_eq.astype(np.float64))
    if np.isfinite(cond) and cond <= _COND_LIMIT:
        y = solve_refined(mat_eq, rhs_eq)
    else:
        y = _solve_perturbed(mat_eq, rhs_eq, pow_pos, row_scale, spec, finite_rows)

    p_ld = np.empty(n + 1, dtype=LD)
    p_ld[0] = LD(1.0)
    p_ld[1:] = y / np.power(LD(g), degrees)
    sol = CouplingSolution(p=tuple(p_ld.astype(np.float64)), p_ld=p_ld)

    if check:
        report = verify(spec, sol, tol=_GATE_TOL)
        if not report.herglotz_ok:
            raise NotHerglotz(
                "solution violates the positivity condition: " + report.describe_failures()
            )
    return sol


def _solve_perturbed(mat_eq, rhs_eq, pow_pos, row_scale, spec, finite_rows):
    """Conditioning fallback: average the solutions for eta scaled by (1 ± eps)."""
    results = []
    for eps in (_FALLBACK_EPS, -_FALLBACK_EPS):
        mat_p = mat_eq.copy()
        rhs_p = rhs_eq.copy()
        for i in finite_rows:
            e = LD(spec.eta[i].value)
            de = e * LD(eps)
            mat_p[i] -= de * pow_pos[i] / row_scale[i]
            rhs_p[i] += de / row_scale[i]
        try:
            results.append(np.linalg.solve(mat_p.astype(np.float64), rhs_p.astype(np.float64)))
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(f"coupling system singular even after perturbation: {exc}")
    gap = float(np.max(np.abs(results[0] - results[1])))
    scale = 1.0 + float(np.max(np.abs(results[0] + results[1]))) / 2.0
    if gap / scale > _FALLBACK_DISAGREE:
        raise SingularSystem(
            f"perturbed solves disagree by {gap / scale:.3e} (> {_FALLBACK_DISAGREE:g})"
        )
    return ((results[0] + results[1]) / 2.0).astype(LD)


def solve_single_pair(lambda0: float, eta0: ExtendedReal | float) -> CouplingSolution:
    """Closed form for a single pair {±lambda0}: Phi_plus = 1 + (z/lambda0)(1-eta)/(1+eta).

    The fraction is read as -1 for eta = ∞.  Unsolvable for negative real eta.
    """
    if not isinstance(eta0, ExtendedReal):
        eta0 = ExtendedReal.finite(eta0)
    if lambda0 <= 0.0:
        raise ValueError("lambda0 must be positive")
    if eta0.is_finite and eta0.value < 0.0:
        raise Unsolvable(f"single-pair problem with negative coupling constant {eta0.value}")
    if eta0.is_infinite:
        b = LD(-1.0)
    else:
        e = LD(eta0.value)
        b = (LD(1.0) - e) / (LD(1.0) + e)
    p_ld = np.array([LD(1.0), b / LD(lambda0)], dtype=LD)
    return CouplingSolution(p=tuple(p_ld.astype(np.float64)), p_ld=p_ld)


def solve_zero_inf(spec: CouplingSpec) -> CouplingSolution:
    """Closed form when every coupling constant is 0 or ∞.

    Phi_plus picks up a factor (1 + z/lambda_n) where eta(lambda_n) = 0 and
    (1 - z/lambda_n) where eta(lambda_n) = ∞; then Phi_minus Phi_plus = W.
    """
    coeffs = np.array([LD(1.0)])
    for lam, eta in zip(spec.lambdas, spec.eta):
        if eta.is_infinite:
            factor = np.array([LD(1.0), LD(-1.0) / LD(lam)])
        elif eta.value == 0.0:
            factor = np.array([LD(1.0), LD(1.0) / LD(lam)])
        else:
            raise ValueError(f"coupling constant at lambda={lam} is neither 0 nor infinity")
        coeffs = np.convolve(coeffs, factor)
    return CouplingSolution(p=tuple(coeffs.astype(np.float64)), p_ld=coeffs)


@dataclass(frozen=True)
class CouplingVerification:
    """Measured residuals of the three coupling-problem conditions."""

    coupling_residual: float      # max |Phi+(-lam) - eta Phi+(lam)| / (1+|eta|), |Phi+(lam)| for eta=∞
    normalization_error: float    # |p_0 - 1|
    max_root_imag: float          # max |Im root| / max(1, |root|) over zeros of Phi_plus
    residue_max: float            # most positive residue of z Phi- Phi+ / W at surviving poles
    sign_test_max: float          # most positive value of eta Phi+^2 / (lam W') over finite eta
    interlacing_ok: bool
    growth_margin: float          # max |Phi_plus| / bound - 1 over sampled circles (<= 0 is good)
    tol: float

    @property
    def roots_real_ok(self) -> bool:
        return self.max_root_imag <= self.tol

    @property
    def growth_ok(self) -> bool:
        return self.growth_margin <= 1e-9

    @property
    def herglotz_ok(self) -> bool:
        return (
            self.roots_real_ok
            and self.residue_max <= self.tol
            and self.sign_test_max <= self.tol
            and self.interlacing_ok
        )

    @property
    def ok(self) -> bool:
        return (
            self.coupling_residual <= self.tol
            and self.normalization_error <= self.tol
            and self.herglotz_ok
            and self.growth_ok
        )

    def describe_failures(self) -> str:
        bad = []
        if self.coupling_residual > self.tol:
            bad.append(f"coupling residual {self.coupling_residual:.3e}")
        if self.normalization_error > self.tol:
            bad.append(f"normalization error {self.normalization_error:.3e}")
        if not self.roots_real_ok:
            bad.append(f"non-real roots (scaled imag {self.max_root_imag:.3e})")
        if self.residue_max > self.tol:
            bad.append(f"positive residue {self.residue_max:.3e}")
        if self.sign_test_max > self.tol:
            bad.append(f"coupling-sign test {self.sign_test_max:.3e}")
        if not self.interlacing_ok:
            bad.append("interlacing violated")
        if not self.growth_ok:
            bad.append(f"growth bound exceeded by {self.growth_margin:.3e}")
        return "; ".join(bad) if bad else "none"


def verify(spec: CouplingSpec, sol: CouplingSolution, tol: float = 1e-9) -> CouplingVerification:
    """Check a solution against every coupling-problem condition; report-valued.

    The positivity condition is operationalized as the finite triple that
    characterizes rational Herglotz-Nevanlinna functions of this shape: all
    zeros of Phi_plus real, residues of z Phi- Phi+ / W negative at the poles
    that survive cancelation, and zeros of z Phi- Phi+ interlacing the zeros
    of W after cancelation.  Poles where |Phi_plus(±lambda)| is below the
    cancelation threshold pass the residue test automatically.
    """
    lambdas = spec.lambdas
    sigma = spec.sigma()
    n = spec.n

    norm_err = abs(sol.p[0] - 1.0)

    # (a) coupling residuals
    resid = 0.0
    for lam, eta in zip(lambdas, spec.eta):
        plus = float(sol.phi_plus(lam))
        minus = float(sol.phi_plus(-lam))
        if eta.is_infinite:
            resid = max(resid, abs(plus))
        else:
            resid = max(resid, abs(minus - eta.value * plus) / (1.0 + abs(eta.value)))

    # (c) all roots of Phi_plus real
    roots = sol.roots()
    max_imag = 0.0
    for r in roots:
        max_imag = max(max_imag, abs(r.imag) / max(1.0, abs(r)))

    # (d) residue signs at surviving poles of z Phi- Phi+ / W, plus the
    # coupling-sign inequality eta Phi+^2 / (lam W') <= 0.  The residue at
    # -lambda equals the residue at +lambda by parity, so the positive half
    # suffices.
    residue_max = -math.inf
    sign_test_max = -math.inf
    for lam, eta in zip(lambdas, spec.eta):
        plus = float(sol.phi_plus(lam))
        minus = float(sol.phi_plus(-lam))
        bound, _ = _spec_scales(lambdas, lam)
        cancel_scale = tol * bound
        wp = w_prime(sigma, lam).real
        if eta.is_finite:
            sign_test_max = max(sign_test_max, eta.value * plus * plus / (lam * wp))
        if min(abs(plus), abs(minus)) <= cancel_scale:
            continue
        residue_max = max(residue_max, lam * minus * plus / wp)
    if residue_max == -math.inf:
        residue_max = 0.0
    if sign_test_max == -math.inf:
        sign_test_max = 0.0

    interlace = _interlacing_ok(roots.real, lambdas) if max_imag <= max(tol, 1e-6) else False

    # (e) growth bound on sampled circles
    growth_margin = -1.0
    if n:
        lam1, lam_n = lambdas[0], lambdas[-1]
        for r in (0.5 * lam1, 0.5 * (lam1 + lam_n), 2.0 * lam_n):
            bound, _ = _spec_scales(lambdas, r)
            for j in range(8):
                z = r * cmath.exp(1j * (2.0 * math.pi * j / 8.0))
                growth_margin = max(growth_margin, abs(sol.phi_plus(z)) / bound - 1.0)
    else:
        growth_margin = abs(sol.phi_plus(1.0)) / 1.0 - 1.0

    return CouplingVerification(
        coupling_residual=resid,
        normalization_error=norm_err,
        max_root_imag=max_imag,
        residue_max=residue_max,
        sign_test_max=sign_test_max,
        interlacing_ok=interlace,
        growth_margin=growth_margin,
        tol=tol,
    )


def _interlacing_ok(phi_roots_real: np.ndarray, lambdas: Sequence[float]) -> bool:
    """Zeros of z Phi- Phi+ and of W must alternate after cancelation.

    Numerator zeros are {0} ∪ roots(Phi_plus) ∪ -roots(Phi_plus); denominator
    zeros are ±lambda_n.  Each pole cancels at most one nearby numerator zero
    (within a relative 1e-6 window, covering both exact root conditions and
    root-finding noise); the survivors must strictly alternate.
    """
    num = [0.0]
    for r in phi_roots_real:
        num.append(float(r))
        num.append(-float(r))
    poles = [lam for lam in lambdas] + [-lam for lam in lambdas]

    num_left = sorted(num)
    survivors_poles = []
    for pole in poles:
        tol_here = 1e-6 * max(1.0, abs(pole))
        best = None
        for i, zr in enumerate(num_left):
            if abs(zr - pole) <= tol_here and (best is None or abs(zr - pole) < abs(num_left[best] - pole)):
                best = i
        if best is not None:
            num_left.pop(best)
        else:
            survivors_poles.append(pole)

    events = [(zr, 0) for zr in num_left] + [(pl, 1) for pl in survivors_poles]
    events.sort()
    for (a, ka), (b, kb) in zip(events, events[1:]):
        if ka == kb:
            return False
    return True


def eval_F(spec: CouplingSpec, sol: CouplingSolution, z: complex, pole_tol: float = 1e-12) -> complex:
    """Evaluate F(z) = Phi_minus(z) Phi_plus(z) / W(z).

    Numerator and denominator are evaluated separately; if z lands on a zero
    of W the value is recovered by averaging on a small circle when the
    singularity cancels, and PoleAt is raised otherwise.
    """
    zc = complex(z)
    sigma = spec.sigma()
    den = w_eval(sigma, zc)
    num = complex(sol.phi_plus(zc)) * complex(sol.phi_plus(-zc))
    bound, wscale = _spec_scales(spec.lambdas, abs(zc))
    if abs(den) >= pole_tol * wscale:
        return num / den
    if abs(num) > 1e-6 * bound:
        nearest = min(spec.lambdas, key=lambda lam: abs(abs(zc) - lam))
        raise PoleAt(nearest if zc.real >= 0 else -nearest)
    # removable singularity: average over a small circle around z
    delta = 1e-7 * (1.0 + abs(zc))
    samples = []
    for j in range(4):
        w = zc + delta * cmath.exp(1j * (math.pi * j / 2.0 + 0.3))
        samples.append(
            complex(sol.phi_plus(w)) * complex(sol.phi_plus(-w)) / w_eval(sigma, w)
        )
    return sum(samples) / 4.0
