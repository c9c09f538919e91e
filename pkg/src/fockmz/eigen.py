"""Dense Hermitian eigenvalues: Householder tridiagonalization + implicit QL."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError

HERMITIAN_RTOL = 1e-12


@dataclass(frozen=True)
class SpectralBounds:
    lambda_min: float
    lambda_max: float
    residual: float


def hermitian(entries) -> np.ndarray:
    """Validate a square complex matrix and return its exact Hermitian part."""
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DomainError(f"need a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    scale = max(np.abs(m).max(), np.finfo(float).tiny)
    if np.abs(m - m.conj().T).max() > HERMITIAN_RTOL * scale * 1e3:
        raise DomainError("matrix is not Hermitian")
    return 0.5 * (m + m.conj().T)


def tridiagonalize(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduce a Hermitian matrix to a real symmetric tridiagonal one.

    Returns (diagonal, off-diagonal); the off-diagonal is the modulus of the
    complex Householder result, which a diagonal unitary similarity makes real.
    """
    a = np.array(m, dtype=complex)
    dim = a.shape[0]
    diag = np.empty(dim)
    off = np.zeros(max(dim - 1, 0))
    for k in range(dim - 2):
        x = a[k + 1:, k]
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            off[k] = 0.0
            diag[k] = a[k, k].real
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        alpha = -phase * norm_x
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        sub = a[k + 1:, k + 1:]
        p = sub @ v
        w = p - np.vdot(v, p).real * v
        sub -= 2.0 * (np.outer(v, w.conj()) + np.outer(w, v.conj()))
        diag[k] = a[k, k].real
        off[k] = abs(alpha)
        a[k + 1:, k] = 0.0
        a[k, k + 1:] = 0.0
    if dim >= 2:
        off[dim - 2] = abs(a[dim - 1, dim - 2])
        diag[dim - 2] = a[dim - 2, dim - 2].real
    diag[dim - 1] = a[dim - 1, dim - 1].real
    return diag, off


def tridiagonal_eigenvalues(diag, off, max_sweeps: int | None = None) -> np.ndarray:
    """Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL."""
    d = [float(v) for v in diag]
    dim = len(d)
    e = [float(v) for v in off] + [0.0]
    if max_sweeps is None:
        max_sweeps = 50 * dim
    sweeps = 0
    for l in range(dim):
        while True:
            m = l
            while m < dim - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= np.finfo(float).eps * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > max_sweeps:
                raise ConvergenceError(f"QL did not converge within {max_sweeps} sweeps")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.sort(np.array(d))


def eigenvalues(m) -> np.ndarray:
    a = hermitian(m)
    return tridiagonal_eigenvalues(*tridiagonalize(a))


def _eigen_residual(a: np.ndarray, lam: float) -> float:
    # inverse iteration with a shift just off the eigenvalue
    dim = a.shape[0]
    scale = max(np.abs(a).max(), 1.0)
    shift = lam + 1e-10 * scale
    rng = np.random.default_rng(dim)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    eye = np.eye(dim)
    for _ in range(3):
        try:
            v = np.linalg.solve(a - shift * eye, v)
        except np.linalg.LinAlgError:
            v = np.linalg.lstsq(a - shift * eye, v, rcond=None)[0]
        v /= np.linalg.norm(v)
    return float(np.linalg.norm(a @ v - lam * v))


def extreme_eigenvalues(m) -> SpectralBounds:
    a = hermitian(m)
    ev = tridiagonal_eigenvalues(*tridiagonalize(a))
    lo, hi = float(ev[0]), float(ev[-1])
    residual = max(_eigen_residual(a, lo), _eigen_residual(a, hi))
    return SpectralBounds(lo, hi, residual)
