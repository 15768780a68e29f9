"""Spectral data of reflectionless potentials: validation, time evolution, coupling constants.

The data consists of decay rates ``kappas`` (the bound-state parameters, strictly
decreasing) and nonzero real coupling constants ``c``, together with a time stamp.
Admissible data has alternating coupling-constant signs starting positive, which is
exactly the sign restriction a solvable symmetric coupling problem imposes at each
point of its zero set.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

# kappas closer than this relative gap make every downstream system singular
MIN_RELATIVE_GAP = 1e-12

# |log10 eta| beyond this is projectively clamped to 0 / infinity
ETA_LOG10_LIMIT = 300.0
_ETA_LOG_LIMIT = ETA_LOG10_LIMIT * math.log(10.0)


@dataclass(frozen=True)
class ExtendedReal:
    """An element of R ∪ {∞}, the one-point compactification of the reals.

    Reciprocal is a continuous involution with recip(0) = ∞ and recip(∞) = 0.
    """

    value: float = 0.0
    is_infinite: bool = False

    def __post_init__(self):
        if self.is_infinite:
            object.__setattr__(self, "value", 0.0)
        else:
            v = float(self.value)
            if math.isinf(v) or math.isnan(v):
                raise ValueError("finite ExtendedReal requires a finite float")
            object.__setattr__(self, "value", v)

    @classmethod
    def finite(cls, r: float) -> "ExtendedReal":
        return cls(float(r), False)

    @classmethod
    def infinity(cls) -> "ExtendedReal":
        return cls(0.0, True)

    @property
    def is_finite(self) -> bool:
        return not self.is_infinite

    def reciprocal(self) -> "ExtendedReal":
        if self.is_infinite:
            return ExtendedReal.finite(0.0)
        if self.value == 0.0:
            return ExtendedReal.infinity()
        return ExtendedReal.finite(1.0 / self.value)

    def __float__(self) -> float:
        if self.is_infinite:
            raise ValueError("cannot convert the point at infinity to float")
        return self.value

    def __repr__(self) -> str:
        return "ExtendedReal.infinity()" if self.is_infinite else f"ExtendedReal({self.value!r})"


INFINITY = ExtendedReal.infinity()


@dataclass(frozen=True)
class SpectralData:
    """Bound-state decay rates, coupling constants and a time stamp.

    ``kappas`` must be strictly decreasing positive reals; ``c`` carries one
    nonzero real per kappa.  Use :func:`validate` to check admissibility.
    """

    kappas: tuple[float, ...]
    c: tuple[float, ...]
    t: float = 0.0
    label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kappas", tuple(float(k) for k in self.kappas))
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        object.__setattr__(self, "t", float(self.t))

    @property
    def n(self) -> int:
        return len(self.kappas)

    @property
    def lambdas(self) -> tuple[float, ...]:
        """Zero-set points 1/kappa_n; strictly increasing for valid data."""
        return tuple(1.0 / k for k in self.kappas)

    def sigma(self) -> "SigmaSet":
        return SigmaSet(self.lambdas)


@dataclass(frozen=True)
class SigmaSet:
    """Positive half of a sign-symmetric zero set {±lambda_n}."""

    lambdas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(float(v) for v in self.lambdas))

    @property
    def kappas(self) -> tuple[float, ...]:
        return tuple(1.0 / lam for lam in self.lambdas)

    def reciprocal_sum(self) -> float:
        """Sum of 1/lambda_n = sum of kappa_n (finite-N summability sanity value)."""
        return float(sum(1.0 / lam for lam in self.lambdas))


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = field(default_factory=tuple)

    def __bool__(self) -> bool:
        return self.ok


def validate(data: SpectralData) -> ValidationReport:
    """Check all SpectralData invariants; report-valued, never raises.

    The alternating-sign rule sign(c_n) = (-1)^(n+1) is the admissibility
    condition: with strictly decreasing kappas, the factor lambda*W'(lambda)
    has sign (-1)^n at lambda_n = 1/kappa_n, so alternating signs starting
    positive are equivalent to eta/(lambda W') <= 0 at every lambda_n.
    """
    bad: list[str] = []
    k = data.kappas
    c = data.c
    if len(c) != len(k):
        bad.append(f"length mismatch: {len(k)} kappas vs {len(c)} coupling constants")
    for i, v in enumerate(k):
        if not (v > 0.0) or math.isinf(v) or math.isnan(v):
            bad.append(f"kappa[{i}] = {v} is not a positive finite real")
    for i in range(len(k) - 1):
        if not (k[i] > k[i + 1]):
            bad.append(f"kappas not strictly decreasing at index {i}: {k[i]} -> {k[i + 1]}")
        elif k[i] > 0 and (k[i] - k[i + 1]) / k[i] < MIN_RELATIVE_GAP:
            bad.append(
                f"kappas nearly coincident at index {i}: relative gap below {MIN_RELATIVE_GAP:g}"
            )
    for i, v in enumerate(c[: len(k)]):
        if v == 0.0 or math.isinf(v) or math.isnan(v):
            bad.append(f"c[{i}] = {v} is not a nonzero finite real")
        elif (v > 0.0) != (i % 2 == 0):
            want = "+" if i % 2 == 0 else "-"
            bad.append(f"sign rule violated at n={i + 1}: c[{i}] = {v}, expected sign {want}")
    if math.isinf(data.t) or math.isnan(data.t):
        bad.append(f"t = {data.t} is not finite")
    return ValidationReport(ok=not bad, violations=tuple(bad))


def evolve(data: SpectralData, dt: float) -> SpectralData:
    """Advance the data in time: kappas fixed, c_n -> exp(8 kappa_n^3 dt) c_n."""
    factors = [math.exp(8.0 * k**3 * dt) for k in data.kappas]
    return SpectralData(
        kappas=data.kappas,
        c=tuple(v * f for v, f in zip(data.c, factors)),
        t=data.t + dt,
        label=data.label,
    )


def _eta_signed_logs(data: SpectralData, x: float) -> tuple[list[float], list[float]]:
    """Signs and log-magnitudes of eta(lambda_n) = c_n exp(-2 kappa_n x)."""
    signs = [math.copysign(1.0, v) for v in data.c]
    logs = [math.log(abs(v)) - 2.0 * k * x for v, k in zip(data.c, data.kappas)]
    return signs, logs


def eta_at(data: SpectralData, x: float) -> dict[float, ExtendedReal]:
    """Coupling constants at position x: eta(1/kappa_n) = c_n exp(-2 kappa_n x).

    The stored c already carries the time evolution.  The negative half of the
    zero set is implied by the symmetry eta(-lambda) = eta(lambda)^(-1).
    Magnitudes beyond 1e±300 are clamped projectively to 0 / ∞ so downstream
    solves stay well posed in floating point.
    """
    signs, logs = _eta_signed_logs(data, x)
    out: dict[float, ExtendedReal] = {}
    for lam, s, lg in zip(data.lambdas, signs, logs):
        if lg > _ETA_LOG_LIMIT:
            out[lam] = ExtendedReal.infinity()
        elif lg < -_ETA_LOG_LIMIT:
            out[lam] = ExtendedReal.finite(0.0)
        else:
            out[lam] = ExtendedReal.finite(s * math.exp(lg))
    return out


def w_eval(sigma: SigmaSet, z: complex) -> complex:
    """The real entire function W(z) = prod (1 - z^2 kappa_n^2) of the zero set {±1/kappa_n}."""
    zz = complex(z) ** 2
    out = 1.0 + 0.0j
    for lam in sigma.lambdas:
        out *= 1.0 - zz / (lam * lam)
    return out


def w_prime(sigma: SigmaSet, z: complex) -> complex:
    """Derivative W'(z), by the product rule over the factors."""
    zc = complex(z)
    factors = [1.0 - zc * zc / (lam * lam) for lam in sigma.lambdas]
    total = 0.0 + 0.0j
    for j, lam in enumerate(sigma.lambdas):
        term = -2.0 * zc / (lam * lam)
        for i, f in enumerate(factors):
            if i != j:
                term *= f
        total += term
    return total


def kappa_sq_sum(data: SpectralData) -> float:
    """Sum of kappa_n^2 (the quadratic series coefficient of 1/W)."""
    return float(sum(k * k for k in data.kappas))


# --- JSON document schema ----------------------------------------------------

def spectral_data_from_dict(doc: dict) -> SpectralData:
    """Parse the JSON document schema {kappas, c, t?, label?} into SpectralData.

    Raises ValueError on structural problems; admissibility is left to validate().
    """
    if not isinstance(doc, dict):
        raise ValueError("spectral data document must be a JSON object")
    for key in ("kappas", "c"):
        if key not in doc:
            raise ValueError(f"missing required key {key!r}")
        if not isinstance(doc[key], list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in doc[key]
        ):
            raise ValueError(f"{key!r} must be an array of numbers")
    t = doc.get("t", 0.0)
    if not isinstance(t, (int, float)) or isinstance(t, bool):
        raise ValueError("'t' must be a number")
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise ValueError("'label' must be a string")
    return SpectralData(kappas=tuple(doc["kappas"]), c=tuple(doc["c"]), t=float(t), label=label)


def spectral_data_to_dict(data: SpectralData) -> dict:
    doc: dict = {"kappas": list(data.kappas), "c": list(data.c), "t": data.t}
    if data.label is not None:
        doc["label"] = data.label
    return doc


def read_spectral_data(path) -> SpectralData:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return spectral_data_from_dict(doc)
