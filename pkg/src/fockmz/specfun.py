"""Regularized incomplete gamma functions, erfc and the truncated exponential.

All gamma routines take arguments in the order ``(a, x)``: ``a`` is the order
and ``x`` the cutoff, so ``regularized_gamma(a, x).q`` is
``Gamma(a, x) / Gamma(a) = int_x^inf t^(a-1) e^(-t) dt / Gamma(a)``.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

TWO_PI = 2.0 * math.pi

# modified Lentz parameters
_TINY = 1e-300
_CF_TOL = 1e-15
_CF_MAX_ITER = 10_000
_SERIES_TOL = 1e-17
_SERIES_MAX_ITER = 200_000

# accumulators are renormalized when their magnitude leaves [_LOW, _HIGH]
_LOW = 1e-100
_HIGH = 1e100

# Bernoulli-number coefficients of the Stirling remainder B_2k / (2k (2k-1))
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
)


def wrap_phase(phi: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    w = math.remainder(phi, TWO_PI)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class ScaledComplex:
    """Complex number held as ``exp(log_modulus) * exp(1j * phase)``.

    Zero is ``log_modulus = -inf`` with phase 0.
    """

    log_modulus: float
    phase: float

    @classmethod
    def from_complex(cls, value: complex) -> ScaledComplex:
        if value == 0:
            return cls(-math.inf, 0.0)
        return cls(math.log(abs(value)), wrap_phase(math.atan2(value.imag, value.real)))

    @classmethod
    def zero(cls) -> ScaledComplex:
        return cls(-math.inf, 0.0)

    def to_complex(self) -> complex:
        if self.log_modulus == -math.inf:
            return 0j
        return cmath.rect(math.exp(self.log_modulus), self.phase)

    @property
    def modulus(self) -> float:
        return math.exp(self.log_modulus)

    def conjugate(self) -> ScaledComplex:
        if self.log_modulus == -math.inf:
            return self
        return ScaledComplex(self.log_modulus, wrap_phase(-self.phase))

    def __mul__(self, other: ScaledComplex) -> ScaledComplex:
        if not isinstance(other, ScaledComplex):
            return NotImplemented
        if self.log_modulus == -math.inf or other.log_modulus == -math.inf:
            return ScaledComplex.zero()
        return ScaledComplex(self.log_modulus + other.log_modulus,
                             wrap_phase(self.phase + other.phase))


class GammaMethod(str, enum.Enum):
    SERIES = "series"
    CONTINUED_FRACTION = "continued_fraction"
    TRUNCATED_EXP = "truncated_exp"


@dataclass(frozen=True)
class RegGammaValue:
    p: float
    q: float
    method: GammaMethod


def log_factorial(n: int) -> float:
    """ln(n!), by exact product up to 20! and ``math.lgamma`` above."""
    n = int(n)
    if n < 0:
        raise DomainError(f"log_factorial needs n >= 0, got {n}")
    if n <= 20:
        return math.log(math.factorial(n))
    return math.lgamma(n + 1.0)


def _stirling_remainder(a: float) -> float:
    # ln Gamma(a) - [(a - 1/2) ln a - a + ln(2 pi)/2], valid for a >= 10
    inv = 1.0 / a
    inv2 = inv * inv
    total = 0.0
    power = inv
    for c in _STIRLING:
        total += c * power
        power *= inv2
    return total


def _log_prefactor(a: float, x: float) -> float:
    """ln(x^a e^-x / Gamma(a)) without the cancellation of the naive form."""
    u = (x - a) / a
    if a < 10.0 or u < -0.5:
        # far below the peak the two terms have the same sign, nothing cancels
        return a * math.log(x) - x - math.lgamma(a)
    return (0.5 * math.log(a / TWO_PI) - a * (u - math.log1p(u))
            - _stirling_remainder(a))


def _check_gamma_args(a: float, x: float) -> None:
    if not (math.isfinite(a) and math.isfinite(x)):
        raise DomainError(f"regularized_gamma needs finite arguments, got a={a}, x={x}")
    if a <= 0.0:
        raise DomainError(f"order a must be positive, got {a}")
    if x < 0.0:
        raise DomainError(f"cutoff x must be nonnegative, got {x}")


def _lower_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(_SERIES_MAX_ITER):
        denom += 1.0
        term *= x / denom
        total += term
        if term < total * _SERIES_TOL:
            return math.exp(_log_prefactor(a, x)) * total
    raise ConvergenceError(f"gamma series did not converge for a={a}, x={x}")


def _upper_continued_fraction(a: float, x: float) -> float:
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0.0 else 1.0 / _TINY
    h = d
    for i in range(1, _CF_MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_TOL:
            return math.exp(_log_prefactor(a, x)) * h
    raise ConvergenceError(
        f"gamma continued fraction did not converge for a={a}, x={x}")


def regularized_gamma(a: float, x: float) -> RegGammaValue:
    """Lower and upper regularized incomplete gamma functions P(a, x), Q(a, x).

    Uses the power series for P when ``x < a + 1`` and the continued
    fraction for Q otherwise; the other value is the complement.
    """
    a = float(a)
    x = float(x)
    _check_gamma_args(a, x)
    if x == 0.0:
        return RegGammaValue(0.0, 1.0, GammaMethod.SERIES)
    if x < a + 1.0:
        p = min(_lower_series(a, x), 1.0)
        return RegGammaValue(p, 1.0 - p, GammaMethod.SERIES)
    q = min(_upper_continued_fraction(a, x), 1.0)
    return RegGammaValue(1.0 - q, q, GammaMethod.CONTINUED_FRACTION)


def gamma_q(a: float, x) -> np.ndarray | float:
    """Q(a, x) for a scalar or an array of cutoffs."""
    if np.ndim(x) == 0:
        return regularized_gamma(a, float(x)).q
    flat = np.asarray(x, dtype=float).ravel()
    out = np.array([regularized_gamma(a, xi).q for xi in flat])
    return out.reshape(np.shape(x))


def partial_exp_scaled(n: int, s: complex, log_t0: complex) -> ScaledComplex:
    """``exp(log_t0) * sum_{k<=n} s^k/k!`` accumulated with a floating log-scale.

    Terms follow t_{k+1} = t_k * s/(k+1), summed left to right; the running
    scale is adjusted whenever the accumulator leaves [1e-100, 1e100].
    """
    n = int(n)
    if n < 0:
        raise DomainError(f"degree must be nonnegative, got {n}")
    s = complex(s)
    log_t0 = complex(log_t0)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise DomainError(f"s must be finite, got {s}")
    scale = log_t0.real
    term = 1.0 + 0j
    acc = 1.0 + 0j
    for k in range(1, n + 1):
        term *= s / k
        acc += term
        m = max(abs(acc), abs(term))
        if m > _HIGH or 0.0 < m < _LOW:
            acc /= m
            term /= m
            scale += math.log(m)
    if acc == 0:
        return ScaledComplex.zero()
    return ScaledComplex(scale + math.log(abs(acc)),
                         wrap_phase(math.atan2(acc.imag, acc.real) + log_t0.imag))


def truncated_exp_ratio(n: int, s: complex) -> ScaledComplex:
    """Gamma(n+1, s)/n! = e^-s * sum_{k<=n} s^k/k! for complex s."""
    s = complex(s)
    return partial_exp_scaled(n, s, -s)


def scaled_exp_sum(n: int, s, log_t0) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``exp(log_t0) * sum_{k<=n} s^k/k!``.

    ``s`` and ``log_t0`` are broadcast complex arrays. Returns the natural log
    of the modulus and the wrapped phase of each result.
    """
    s = np.asarray(s, dtype=complex)
    log_t0 = np.asarray(log_t0, dtype=complex)
    s, log_t0 = np.broadcast_arrays(s, log_t0)
    scale = log_t0.real.astype(float).copy()
    term = np.ones(s.shape, dtype=complex)
    acc = np.ones(s.shape, dtype=complex)
    for k in range(1, int(n) + 1):
        term *= s / k
        acc += term
        m = np.maximum(np.abs(acc), np.abs(term))
        bad = (m > _HIGH) | ((m < _LOW) & (m > 0.0))
        if bad.any():
            acc[bad] /= m[bad]
            term[bad] /= m[bad]
            scale[bad] += np.log(m[bad])
    mod = np.abs(acc)
    with np.errstate(divide="ignore"):
        log_mod = np.where(mod > 0.0, scale + np.log(mod), -np.inf)
    phase = np.angle(acc) + log_t0.imag
    phase = np.where(mod > 0.0, np.remainder(phase + np.pi, TWO_PI) - np.pi, 0.0)
    phase = np.where(phase == -np.pi, np.pi, phase)
    return log_mod, phase


def erfc(y: float) -> float:
    """Complementary error function via erfc(y) = Q(1/2, y^2) for y >= 0."""
    y = float(y)
    if not math.isfinite(y):
        raise DomainError(f"erfc needs a finite argument, got {y}")
    if y < 0.0:
        return 2.0 - erfc(-y)
    return regularized_gamma(0.5, y * y).q


@dataclass(frozen=True)
class GapCheck:
    a: float
    tau: float
    q: float
    limit: float
    gap: float
    bound: float
    passed: bool


def asymptotic_gap_check(a: float, tau: float) -> GapCheck:
    """Compare Q(a, a + tau sqrt(a)) with its limit erfc(tau/sqrt 2)/2.

    The admissible gap is the leading correction |tau^2 - 1|/3 *
    e^(-tau^2/2) / sqrt(2 pi a), inflated by an additive 1 in the
    coefficient and a factor 2, since only the leading term is known.
    """
    a = float(a)
    tau = float(tau)
    if not (math.isfinite(a) and math.isfinite(tau)):
        raise DomainError("asymptotic_gap_check needs finite arguments")
    if a < 10.0:
        raise DomainError(f"asymptotic_gap_check needs a >= 10, got {a}")
    x = a + tau * math.sqrt(a)
    if x < 0.0:
        raise DomainError(f"cutoff a + tau*sqrt(a) = {x} is negative")
    q = regularized_gamma(a, x).q
    limit = 0.5 * erfc(tau / math.sqrt(2.0))
    gap = abs(q - limit)
    coeff = abs(tau * tau - 1.0) / 3.0 + 1.0
    bound = 2.0 * coeff * math.exp(-0.5 * tau * tau) / math.sqrt(TWO_PI * a)
    return GapCheck(a, tau, q, limit, gap, bound, gap <= bound)
