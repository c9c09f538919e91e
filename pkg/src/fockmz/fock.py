"""Reproducing kernels of the Fock space and its polynomial subspaces.

Kernels are always returned in Gaussian-normalized form

    K(z, w)   = e^{pi z conj(w)} e^{-pi(|z|^2 + |w|^2)/2}
    K_n(z, w) = k_n(z, w) e^{-pi(|z|^2 + |w|^2)/2}

so that |K(z, w)| = e^{-pi|z - w|^2/2} and nothing of size e^{pi|z|^2} is
ever formed. Points are plain Python/numpy complex numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError
from .specfun import (
    ScaledComplex,
    log_factorial,
    partial_exp_scaled,
    regularized_gamma,
    scaled_exp_sum,
    truncated_exp_ratio,
    wrap_phase,
)

PI = math.pi


def _point(z) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"point must be finite, got {z}")
    return z


def normalized_fock_kernel(z, w) -> ScaledComplex:
    z, w = _point(z), _point(w)
    return ScaledComplex(-0.5 * PI * abs(z - w) ** 2,
                         wrap_phase(PI * (z * w.conjugate()).imag))


def normalized_poly_kernel(n: int, z, w) -> ScaledComplex:
    """K_n(z, w) by the scaled recurrence t_{k+1} = t_k * pi z conj(w)/(k+1)."""
    z, w = _point(z), _point(w)
    log_t0 = -0.5 * PI * (abs(z) ** 2 + abs(w) ** 2)
    return partial_exp_scaled(n, PI * z * w.conjugate(), log_t0)


def poly_kernel_matrix(n: int, zs, ws=None) -> np.ndarray:
    """Matrix [K_n(z_i, w_j)] as ordinary complex numbers."""
    zs = np.asarray(zs, dtype=complex).ravel()
    ws = zs if ws is None else np.asarray(ws, dtype=complex).ravel()
    s = PI * zs[:, None] * ws.conj()[None, :]
    log_t0 = -0.5 * PI * (np.abs(zs[:, None]) ** 2 + np.abs(ws[None, :]) ** 2)
    log_mod, phase = scaled_exp_sum(n, s, log_t0)
    return np.exp(log_mod) * np.exp(1j * phase)


def weighted_basis(n: int, zs) -> np.ndarray:
    """U[j, k] = e_k(z_j) e^{-pi|z_j|^2/2} for k = 0..n, evaluated in log space."""
    zs = np.asarray(zs, dtype=complex).ravel()
    k = np.arange(n + 1)
    x = PI * np.abs(zs) ** 2
    log_fact = np.array([log_factorial(i) for i in k])
    with np.errstate(divide="ignore", invalid="ignore"):
        log_x = np.log(x)
        log_mod = 0.5 * (k[None, :] * log_x[:, None] - log_fact[None, :]) - 0.5 * x[:, None]
    # 0 * log(0) is taken as 0
    log_mod[:, 0] = -0.5 * x
    log_mod = np.where(np.isnan(log_mod), -np.inf, log_mod)
    phase = k[None, :] * np.angle(zs)[:, None]
    return np.exp(log_mod) * np.exp(1j * phase)


def monomial_disk_mass(k: int, rho: float) -> float:
    """Integral of |z|^{2k} e^{-pi|z|^2} over the closed disk of radius rho."""
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")
    p = regularized_gamma(k + 1, PI * rho * rho).p
    return math.exp(log_factorial(k) - k * math.log(PI)) * p


def tail_energy_exact(coeffs, rho: float) -> float:
    """Energy of p = sum a_k e_k outside the disk B_rho.

    Monomials stay orthogonal on centered disks, so the tail splits into
    sum |a_k|^2 Q(k+1, pi rho^2).
    """
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")
    a2 = np.abs(np.asarray(coeffs, dtype=complex)) ** 2
    x = PI * rho * rho
    return float(sum(w * regularized_gamma(k + 1, x).q for k, w in enumerate(a2)))


def tail_energy_bound(n: int, rho: float) -> float:
    if n < 0:
        raise DomainError(f"degree must be nonnegative, got {n}")
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")
    return regularized_gamma(n + 1, PI * rho * rho).q


def offdiag_gap(n: int, z, w) -> float:
    """|Gamma(n+1, pi z conj(w))/n! - Gamma(n+1, pi|z|^2)/n!|."""
    z, w = _point(z), _point(w)
    if PI * abs(z) ** 2 >= n:
        raise DomainError(f"need pi|z|^2 < n, got pi|z|^2 = {PI * abs(z) ** 2} and n = {n}")
    off = truncated_exp_ratio(n, PI * z * w.conjugate()).to_complex()
    diag = truncated_exp_ratio(n, PI * abs(z) ** 2).to_complex()
    return abs(off - diag)


@dataclass(frozen=True)
class BulkRatio:
    min_ratio: float
    max_ratio: float


def bulk_equivalence(n: int, tau: float, points: int = 200) -> BulkRatio:
    """Range of k_n(z,z)/k(z,z) = Q(n+1, pi|z|^2) over pi|z|^2 in [0, n + sqrt(n) tau]."""
    if n < 1:
        raise DomainError(f"degree must be >= 1, got {n}")
    top = n + math.sqrt(n) * tau
    if top < 0:
        raise DomainError(f"n + sqrt(n) tau = {top} is negative")
    ratios = [regularized_gamma(n + 1, x).q for x in np.linspace(0.0, top, points)]
    return BulkRatio(min(ratios), max(ratios))


def disk_integral(f: Callable[[np.ndarray], np.ndarray], rho: float,
                  rtol: float = 1e-8, max_doublings: int = 8) -> float:
    """Integral of f over the disk |z| <= rho on a polar tensor grid.

    Gauss-Legendre in the radius times the uniform rule in the angle; both
    resolutions double until two successive values agree to ``rtol``.
    """
    n_r, n_t = 32, 32
    prev = None
    for _ in range(max_doublings):
        x, wx = np.polynomial.legendre.leggauss(n_r)
        r = 0.5 * rho * (x + 1.0)
        wr = 0.5 * rho * wx * r
        theta = 2.0 * PI * np.arange(n_t) / n_t
        z = r[:, None] * np.exp(1j * theta)[None, :]
        val = float(np.sum(wr[:, None] * f(z)) * (2.0 * PI / n_t))
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return val
        prev = val
        n_r *= 2
        n_t *= 2
    raise ConvergenceError(f"disk quadrature did not settle to {rtol}")


def poly_values(coeffs, zs) -> np.ndarray:
    """p(z) = sum a_k e_k(z), direct evaluation (moderate |z| only)."""
    a = np.asarray(coeffs, dtype=complex)
    zs = np.asarray(zs, dtype=complex)
    out = np.zeros(zs.shape, dtype=complex)
    for k in range(len(a) - 1, -1, -1):
        out = out * zs + a[k] * math.sqrt(PI ** k / math.factorial(k))
    return out
