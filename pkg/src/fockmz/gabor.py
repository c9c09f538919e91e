"""Gabor side: Hermite functions, Gaussian time-frequency shifts, V_n frames.

The time-frequency shift of g by l = x + i xi is (pi(l) g)(t) = e^{2 pi i xi t} g(t - x)
and the window is h_0(t) = 2^{1/4} e^{-pi t^2}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .eigen import extreme_eigenvalues, hermitian
from .errors import ConvergenceError, DomainError
from .fock import PI, weighted_basis
from .pointsets import PointSet

H0_SCALE = 2.0 ** 0.25
QUAD_TOL = 1e-10
MAX_DOUBLINGS = 6

# Recurrence for the L2-normalized Hermite functions whose Bargmann transforms
# are the monomials e_k. With s = sqrt(2 pi) t they are the physicists'
# functions 2^{1/4} H_k(s) e^{-s^2/2} / sqrt(2^k k!), which gives
#     h_{k+1} = sqrt(4 pi/(k+1)) t h_k - sqrt(k/(k+1)) h_{k-1}.
# Accepted after the quadrature orthonormality and modulus checks in
# tests/test_gabor.py passed.


def hermite_values(k_max: int, t) -> np.ndarray:
    """h_0(t), ..., h_{k_max}(t); shape (k_max + 1,) + shape(t)."""
    if k_max < 0:
        raise DomainError(f"k_max must be nonnegative, got {k_max}")
    t = np.asarray(t, dtype=float)
    out = np.empty((k_max + 1,) + t.shape)
    out[0] = H0_SCALE * np.exp(-PI * t * t)
    if k_max >= 1:
        out[1] = math.sqrt(4.0 * PI) * t * out[0]
    for k in range(1, k_max):
        out[k + 1] = (math.sqrt(4.0 * PI / (k + 1)) * t * out[k]
                      - math.sqrt(k / (k + 1)) * out[k - 1])
    return out


@dataclass(frozen=True)
class QuadratureSpec:
    half_width: float
    step: float

    @classmethod
    def default(cls, n: int, lam: complex) -> QuadratureSpec:
        lam = complex(lam)
        width = math.sqrt((n + 8.0 * math.sqrt(n)) / PI) + 5.0 + abs(lam.real)
        step = 1.0 / (8.0 * (1.0 + abs(lam.imag) + math.sqrt(n)))
        return cls(width, step)


def _trapezoid_inner(k_max: int, lam: complex, width: float, step: float) -> np.ndarray:
    m = int(math.ceil(width / step))
    t = step * np.arange(-m, m + 1)
    x, xi = lam.real, lam.imag
    shifted = np.exp(-2j * PI * xi * t) * (H0_SCALE * np.exp(-PI * (t - x) ** 2))
    h = hermite_values(k_max, t)
    # endpoints are negligible by the choice of width, so the plain sum is the rule
    return (h @ shifted) * step


def tf_inner_products_quadrature(k_max: int, lam, quad: QuadratureSpec | None = None) -> np.ndarray:
    """<h_k, pi(l) h_0> for k = 0..k_max by the trapezoid rule.

    The step is halved until two successive results agree to 1e-10; the
    window is widened whenever the integrand is not negligible at its ends.
    """
    lam = complex(lam)
    quad = quad or QuadratureSpec.default(k_max, lam)
    width, step = quad.half_width, quad.step
    while True:
        edge = hermite_values(k_max, np.array([-width, width]))
        if np.abs(edge).max() * H0_SCALE < 1e-17:
            break
        width *= 1.5
    prev = _trapezoid_inner(k_max, lam, width, step)
    for _ in range(MAX_DOUBLINGS):
        step /= 2.0
        cur = _trapezoid_inner(k_max, lam, width, step)
        if np.abs(cur - prev).max() <= QUAD_TOL:
            return cur
        prev = cur
    raise ConvergenceError(f"trapezoid rule did not settle for k_max={k_max}, l={lam}")


def tf_inner_quadrature(k: int, lam, quad: QuadratureSpec | None = None) -> complex:
    return complex(tf_inner_products_quadrature(k, lam, quad)[k])


def tf_inner_products_closed_form(k_max: int, lams) -> np.ndarray:
    """V[j, k] = <h_k, pi(l_j) h_0> = e^{-pi i x xi} e_k(conj l) e^{-pi|l|^2/2}.

    Modulus |e_k(l)| e^{-pi|l|^2/2}; the phase convention (conjugated
    argument and the e^{-pi i x xi} factor) was fixed by matching the
    trapezoid values.
    """
    lams = np.asarray(lams, dtype=complex).ravel()
    u = weighted_basis(k_max, lams.conj())
    return np.exp(-1j * PI * lams.real * lams.imag)[:, None] * u


def tf_inner_closed_form(k: int, lam) -> complex:
    return complex(tf_inner_products_closed_form(k, [lam])[0, k])


def _layer_points(layer) -> np.ndarray:
    pts = layer.points if isinstance(layer, PointSet) else np.asarray(layer, dtype=complex).ravel()
    if len(pts) == 0:
        raise DomainError("layer must be non-empty")
    return pts


def inner_product_table(n: int, layer, source: str = "closed_form") -> np.ndarray:
    pts = _layer_points(layer)
    if source == "closed_form":
        return tf_inner_products_closed_form(n, pts)
    if source == "quadrature":
        return np.array([tf_inner_products_quadrature(n, lam) for lam in pts])
    raise DomainError(f"unknown source {source!r}")


def subspace_frame_matrix(n: int, layer, source: str = "closed_form") -> np.ndarray:
    """M = V^H V, so that c^H M c = sum_l |<f, pi(l) h_0>|^2 for f = sum c_k h_k."""
    v = inner_product_table(n, layer, source)
    return hermitian(v.conj().T @ v)


@dataclass(frozen=True)
class CrossCheck:
    COLUMNS = (("n", "n"), ("count", "count"), ("max_entry_gap", "max_entry_gap"),
               ("eig_gap", "eig_gap"), ("lambda_min", "lambda_min"),
               ("lambda_max", "lambda_max"))
    n: int
    count: int
    max_entry_gap: float
    eig_gap: float
    lambda_min: float
    lambda_max: float
    inner_gap: float = 0.0


def gabor_fock_crosscheck(n: int, layer) -> CrossCheck:
    """Compare the quadrature-built V_n frame matrix with the closed-form one.

    ``inner_gap`` is the largest deviation between the two inner-product
    tables, ``max_entry_gap`` and ``eig_gap`` compare the assembled matrices.
    """
    pts = _layer_points(layer)
    v_quad = inner_product_table(n, pts, "quadrature")
    v_closed = inner_product_table(n, pts, "closed_form")
    m_quad = hermitian(v_quad.conj().T @ v_quad)
    m_closed = hermitian(v_closed.conj().T @ v_closed)
    b_quad = extreme_eigenvalues(m_quad)
    b_closed = extreme_eigenvalues(m_closed)
    eig_gap = max(abs(b_quad.lambda_min - b_closed.lambda_min),
                  abs(b_quad.lambda_max - b_closed.lambda_max))
    return CrossCheck(
        n=n,
        count=len(pts),
        max_entry_gap=float(np.abs(m_quad - m_closed).max()),
        eig_gap=float(eig_gap),
        lambda_min=b_closed.lambda_min,
        lambda_max=b_closed.lambda_max,
        inner_gap=float(np.abs(v_quad - v_closed).max()),
    )
