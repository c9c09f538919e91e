import json
import math
from pathlib import Path

import mpmath
import numpy as np
import pytest
import scipy.linalg

from fockmz.eigen import (
    eigenvalues,
    extreme_eigenvalues,
    hermitian,
    tridiagonal_eigenvalues,
    tridiagonalize,
)
from fockmz.errors import ConvergenceError, DomainError
from fockmz.pointsets import FamilySpec, LatticeSpec, PointSet, build_family
from fockmz.spectral import (
    diagonal_q,
    gram_matrix,
    interp_report,
    mz_frame_matrix,
    mz_report,
    mz_sum_pointwise,
    square_case_scan,
)

PI = math.pi
FIXTURES = json.loads((Path(__file__).parent / "fixtures" / "regression.json").read_text())

# n = 1, layer {0, 1}: q_1 = (1 + pi) e^{-pi}, evaluated by hand
S00 = 1.2414530070052239
S01 = 0.42796431207912555
S11 = 0.7585469929947761


def random_hermitian(rng, dim, shift=0.0):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2 + shift * np.eye(dim)


def charpoly_roots(m):
    """Eigenvalues as roots of det(x - M), coefficients by Faddeev-LeVerrier at 50 digits."""
    with mpmath.workdps(50):
        a = mpmath.matrix([[mpmath.mpc(complex(v)) for v in row] for row in m])
        dim = a.rows
        coeffs = [mpmath.mpf(1)]
        mk = mpmath.zeros(dim)
        for k in range(1, dim + 1):
            mk = a * mk + coeffs[-1] * mpmath.eye(dim)
            am = a * mk
            coeffs.append(-sum(am[i, i] for i in range(dim)) / k)
        roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=100)
        return sorted(float(mpmath.re(r)) for r in roots)


class TestEigensolver:
    def test_identity(self):
        b = extreme_eigenvalues(np.eye(5))
        assert (b.lambda_min, b.lambda_max) == pytest.approx((1, 1), abs=1e-15)

    def test_diagonal(self):
        b = extreme_eigenvalues(np.diag([3.0, 1.0, 2.0]))
        assert (b.lambda_min, b.lambda_max) == pytest.approx((1, 3), abs=1e-15)

    def test_two_by_two(self):
        b = extreme_eigenvalues([[2, 1j], [-1j, 2]])
        assert b.lambda_min == pytest.approx(1, abs=1e-14)
        assert b.lambda_max == pytest.approx(3, abs=1e-14)
        assert b.residual <= 1e-12

    def test_one_by_one(self):
        assert eigenvalues([[4.5]]).tolist() == [4.5]

    @pytest.mark.parametrize("dim", [1, 2, 3, 4])
    def test_characteristic_polynomial(self, dim):
        rng = np.random.default_rng(dim)
        for _ in range(5):
            m = random_hermitian(rng, dim)
            ev = eigenvalues(m)
            ref = charpoly_roots(m)
            np.testing.assert_allclose(ev, ref, rtol=1e-9, atol=1e-12)

    @pytest.mark.parametrize("dim", [5, 12, 30, 50])
    def test_trace_and_determinant(self, dim):
        rng = np.random.default_rng(100 + dim)
        m = random_hermitian(rng, dim, shift=3.0 * math.sqrt(dim))
        ev = eigenvalues(m)
        assert ev.sum() == pytest.approx(np.trace(m).real, rel=1e-9)
        lu, piv = scipy.linalg.lu_factor(m)
        diag = np.diag(lu)
        sign = (-1) ** np.count_nonzero(piv != np.arange(dim))
        det_log = np.sum(np.log(np.abs(diag)))
        det_phase = sign * np.prod(diag / np.abs(diag))
        assert det_phase.real == pytest.approx(np.prod(np.sign(ev)), abs=1e-9)
        assert np.sum(np.log(np.abs(ev))) == pytest.approx(det_log, rel=1e-9)

    def test_against_numpy_at_moderate_size(self):
        rng = np.random.default_rng(7)
        m = random_hermitian(rng, 120)
        np.testing.assert_allclose(eigenvalues(m), np.linalg.eigvalsh(m), atol=1e-11)

    def test_residual_invariant(self):
        rng = np.random.default_rng(8)
        b = extreme_eigenvalues(random_hermitian(rng, 40))
        assert b.lambda_min <= b.lambda_max
        assert b.residual <= 1e-9 * max(1.0, b.lambda_max)

    def test_tridiagonal_form_preserves_spectrum(self):
        rng = np.random.default_rng(9)
        m = random_hermitian(rng, 9)
        d, e = tridiagonalize(hermitian(m))
        t = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
        np.testing.assert_allclose(np.linalg.eigvalsh(t), np.linalg.eigvalsh(m), atol=1e-12)

    def test_sweep_cap(self):
        with pytest.raises(ConvergenceError):
            tridiagonal_eigenvalues(np.array([1.0, 2.0, 3.0]), np.array([1.0, 1.0]), max_sweeps=0)

    @pytest.mark.parametrize("bad", [np.zeros((2, 3)), [[1, 2], [3, 4]], [[np.nan]], np.zeros((0, 0))])
    def test_invalid_input(self, bad):
        with pytest.raises(DomainError):
            eigenvalues(bad)


class TestFrameMatrix:
    def test_single_origin(self):
        assert mz_frame_matrix(0, PointSet([0])).tolist() == [[1.0]]

    @pytest.mark.parametrize("lam", [0.3, 2 - 1j, 5j])
    def test_single_point_degree_zero(self, lam):
        assert mz_frame_matrix(0, PointSet([lam]))[0, 0] == pytest.approx(1.0, rel=1e-13)

    def test_hand_values(self):
        s = mz_frame_matrix(1, PointSet([0, 1]))
        assert s[0, 0] == pytest.approx(S00, rel=1e-13)
        assert s[0, 1] == pytest.approx(S01, rel=1e-13)
        assert s[1, 0] == pytest.approx(S01, rel=1e-13)
        assert s[1, 1] == pytest.approx(S11, rel=1e-13)

    def test_hand_values_formula(self):
        r = 1.0
        q = (1 + PI * r * r) * math.exp(-PI * r * r)
        assert S00 == pytest.approx(1 + math.exp(-PI * r * r) / q, rel=1e-15)
        assert S01 == pytest.approx(math.sqrt(PI) * r * math.exp(-PI * r * r) / q, rel=1e-15)
        assert S11 == pytest.approx(PI * r * r * math.exp(-PI * r * r) / q, rel=1e-15)

    def test_quadratic_form_oracle(self):
        rng = np.random.default_rng(4)
        layer = build_family(FamilySpec(LatticeSpec.square(0.9), "sampling", 6, (60,)))[60]
        s = mz_frame_matrix(60, layer)
        for _ in range(5):
            a = rng.standard_normal(61) + 1j * rng.standard_normal(61)
            direct = mz_sum_pointwise(60, layer, a)
            assert np.vdot(a, s @ a).real == pytest.approx(direct, rel=1e-9)

    def test_psd_and_diagonal_q(self):
        layer = build_family(FamilySpec(LatticeSpec.square(0.95), "sampling", 6, (50,)))[50]
        ev = eigenvalues(mz_frame_matrix(50, layer))
        assert ev[0] >= -1e-10 * ev[-1]
        q = diagonal_q(50, layer.points)
        assert np.all((q > 0) & (q <= 1))

    def test_permutation_invariance(self):
        layer = build_family(FamilySpec(LatticeSpec.square(0.95), "sampling", 6, (40,)))[40]
        perm = np.random.default_rng(0).permutation(layer.points)
        a = extreme_eigenvalues(mz_frame_matrix(40, layer))
        b = extreme_eigenvalues(mz_frame_matrix(40, perm))
        assert a.lambda_min == pytest.approx(b.lambda_min, abs=1e-10)
        assert a.lambda_max == pytest.approx(b.lambda_max, abs=1e-10)

    def test_empty_layer(self):
        with pytest.raises(DomainError):
            mz_frame_matrix(3, PointSet([]))

    def test_wrong_coefficient_count(self):
        with pytest.raises(DomainError):
            mz_sum_pointwise(3, PointSet([0]), [1, 2])


class TestGramMatrix:
    def test_single_point(self):
        assert gram_matrix(7, PointSet([1 + 1j])).tolist() == [[1.0]]

    def test_duplicate_point(self):
        b = extreme_eigenvalues(gram_matrix(10, [0.5 + 0.5j, 0.5 + 0.5j]))
        assert b.lambda_min == pytest.approx(0.0, abs=1e-10)

    def test_far_points(self):
        g = gram_matrix(50, PointSet([0, 6]))
        q_floor = diagonal_q(50, np.array([0, 6])).min()
        assert abs(g[0, 1]) <= math.exp(-PI * 36 / 2) / q_floor
        np.testing.assert_allclose(g, np.eye(2), atol=1e-8)

    def test_near_coincident(self):
        b = extreme_eigenvalues(gram_matrix(20, PointSet([1.0, 1.0 + 1e-4])))
        assert b.lambda_min < 1e-6

    def test_diagonal_and_psd(self):
        layer = build_family(FamilySpec(LatticeSpec.square(1.1), "interpolation", 2, (100,)))[100]
        g = gram_matrix(100, layer)
        assert np.all(np.diag(g) == 1.0)
        ev = eigenvalues(g)
        assert ev[0] >= -1e-10 * ev[-1]


class TestReports:
    def test_mz_single_point(self):
        row = mz_report({0: PointSet([0])})[0]
        assert (row.a, row.b, row.count) == pytest.approx((1, 1, 1), abs=1e-15)

    def test_interp_single_point(self):
        row = interp_report({5: PointSet([0.2])})[0]
        assert (row.lambda_min, row.lambda_max) == (1.0, 1.0)

    def test_mz_regression(self):
        fix = FIXTURES["mz"]
        degrees = tuple(r["n"] for r in fix["rows"])
        fam = build_family(FamilySpec(LatticeSpec.square(fix["alpha"]), "sampling", fix["tau"],
                                      degrees))
        rows = mz_report(fam)
        for got, ref in zip(rows, fix["rows"]):
            assert got.count == ref["count"]
            assert got.a == pytest.approx(ref["A"], rel=FIXTURES["tolerance"])
            assert got.b == pytest.approx(ref["B"], rel=FIXTURES["tolerance"])
            assert got.quadratic_form_error <= 1e-9
            assert got.cond == pytest.approx(got.b / got.a)

    def test_interp_regression(self):
        fix = FIXTURES["interp"]
        degrees = tuple(r["n"] for r in fix["rows"])
        fam = build_family(FamilySpec(LatticeSpec.square(fix["alpha"]), "interpolation",
                                      fix["tau"], degrees))
        for got, ref in zip(interp_report(fam), fix["rows"]):
            assert got.count == ref["count"]
            assert got.lambda_min == pytest.approx(ref["lmin"], rel=FIXTURES["tolerance"])
            assert got.lambda_min > 0

    def test_square_case(self):
        rows = square_case_scan(LatticeSpec.square(0.95), [80, 0, 10])
        assert [r.n for r in rows] == [0, 10, 80]
        assert [r.count for r in rows] == [1, 11, 81]
        assert rows[0].a == pytest.approx(1.0) and rows[0].b == pytest.approx(1.0)
        assert rows[2].a <= 0.5 * rows[1].a

    def test_square_case_empty(self):
        with pytest.raises(DomainError):
            square_case_scan(LatticeSpec.square(0.95), [])
