"""Frame (MZ) matrices, Gram matrices of normalized kernels, and their bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from .eigen import SpectralBounds, extreme_eigenvalues, hermitian
from .errors import DomainError
from .fock import PI, poly_kernel_matrix, weighted_basis
from .pointsets import LatticeSpec, PointSet, nearest_lattice_points
from .specfun import gamma_q, scaled_exp_sum

QF_CHECK_VECTORS = 5
QF_RTOL = 1e-9


def _layer_points(layer) -> np.ndarray:
    pts = layer.points if isinstance(layer, PointSet) else np.asarray(layer, dtype=complex).ravel()
    if len(pts) == 0:
        raise DomainError("layer must be non-empty")
    return pts


def diagonal_q(n: int, pts: np.ndarray) -> np.ndarray:
    """q_l = k_n(l, l) / k(l, l) = Q(n+1, pi|l|^2)."""
    return np.asarray(gamma_q(n + 1, PI * np.abs(pts) ** 2), dtype=float)


def mz_frame_matrix(n: int, layer) -> np.ndarray:
    """S with a^H S a = sum_l |p(l)|^2 / k_n(l, l) for p = sum a_k e_k."""
    pts = _layer_points(layer)
    u = weighted_basis(n, pts)
    w = u / np.sqrt(diagonal_q(n, pts))[:, None]
    return hermitian(w.conj().T @ w)


def gram_matrix(n: int, layer) -> np.ndarray:
    """G[m, l] = <kappa_{n,l}, kappa_{n,m}> = K_n(m, l) / sqrt(q_l q_m).

    ``layer`` may be a raw sequence of points; duplicates are kept.
    """
    pts = _layer_points(layer)
    q = diagonal_q(n, pts)
    g = poly_kernel_matrix(n, pts) / np.sqrt(np.outer(q, q))
    g = hermitian(g)
    np.fill_diagonal(g, 1.0)
    return g


def mz_sum_pointwise(n: int, layer, coeffs) -> float:
    """sum_l |p(l)|^2 / k_n(l, l) along the pointwise kernel path.

    p(l) e^{-pi|l|^2/2} runs the recurrence b_k = b_{k-1} sqrt(pi/k) l from
    b_0 = e^{-pi|l|^2/2}, and k_n(l, l) e^{-pi|l|^2} comes from the scaled
    kernel recurrence rather than the incomplete gamma routine.
    """
    pts = _layer_points(layer)
    a = np.asarray(coeffs, dtype=complex)
    if len(a) != n + 1:
        raise DomainError(f"need {n + 1} coefficients, got {len(a)}")
    scale = -0.5 * PI * np.abs(pts) ** 2
    b = np.ones(len(pts), dtype=complex)
    acc = a[0] * b
    for k in range(1, n + 1):
        b = b * (math.sqrt(PI / k) * pts)
        acc = acc + a[k] * b
        m = np.maximum(np.abs(b), np.abs(acc))
        big = m > 1e100
        if big.any():
            b[big] /= m[big]
            acc[big] /= m[big]
            scale[big] += np.log(m[big])
    log_kn, _ = scaled_exp_sum(n, PI * np.abs(pts) ** 2, -PI * np.abs(pts) ** 2)
    with np.errstate(divide="ignore"):
        log_terms = 2.0 * (np.log(np.abs(acc)) + scale) - log_kn
    return float(np.sum(np.exp(log_terms)))


@dataclass(frozen=True)
class FrameReport:
    COLUMNS: ClassVar[tuple] = (("n", "n"), ("count", "count"), ("A", "a"),
                                ("B", "b"), ("cond", "cond"))
    n: int
    count: int
    a: float
    b: float
    cond: float
    residual: float = field(default=0.0, compare=False)
    quadratic_form_error: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class InterpReport:
    COLUMNS: ClassVar[tuple] = (("n", "n"), ("count", "count"),
                                ("lmin", "lambda_min"), ("lmax", "lambda_max"))
    n: int
    count: int
    lambda_min: float
    lambda_max: float
    residual: float = field(default=0.0, compare=False)


def _frame_report(n: int, layer, check_vectors: int, seed: int) -> FrameReport:
    s = mz_frame_matrix(n, layer)
    bounds = extreme_eigenvalues(s)
    err = 0.0
    rng = np.random.default_rng(seed + n)
    for _ in range(check_vectors):
        a = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
        matrix_path = float(np.vdot(a, s @ a).real)
        direct = mz_sum_pointwise(n, layer, a)
        err = max(err, abs(matrix_path - direct) / abs(direct))
    cond = bounds.lambda_max / bounds.lambda_min if bounds.lambda_min > 0 else math.inf
    return FrameReport(n, len(_layer_points(layer)), bounds.lambda_min, bounds.lambda_max,
                       cond, bounds.residual, err)


def mz_report(family: dict[int, PointSet], check_vectors: int = QF_CHECK_VECTORS,
              seed: int = 0) -> list[FrameReport]:
    """Frame bounds (A_n, B_n) of every layer, ascending in n.

    Each row also records the largest relative gap between a^H S a and the
    pointwise sum for ``check_vectors`` random coefficient vectors.
    """
    return [_frame_report(n, family[n], check_vectors, seed) for n in sorted(family)]


def interp_report(family: dict[int, PointSet]) -> list[InterpReport]:
    rows = []
    for n in sorted(family):
        bounds = extreme_eigenvalues(gram_matrix(n, family[n]))
        rows.append(InterpReport(n, len(family[n]), bounds.lambda_min, bounds.lambda_max,
                                 bounds.residual))
    return rows


def square_case_scan(lattice: LatticeSpec, n_list, check_vectors: int = 0) -> list[FrameReport]:
    """Frame bounds when each layer is exactly the n+1 lattice points nearest 0."""
    n_list = sorted(int(n) for n in n_list)
    if not n_list:
        raise DomainError("n_list must be non-empty")
    return [_frame_report(n, nearest_lattice_points(lattice, n + 1), check_vectors, 0)
            for n in n_list]


def frame_bounds(m) -> SpectralBounds:
    return extreme_eigenvalues(m)
