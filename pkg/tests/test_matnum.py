import json
import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings
from hypothesis import strategies as st

from regdet.formulas import build_X_m
from regdet.freealg import NCPoly
from regdet.matnum import (
    ConvergenceError,
    DomainError,
    detm_log_exponent,
    detm_logseries,
    detm_regularized,
    detm_regularized_mp,
    detm_report,
    detm_spectral,
    dump_matrix,
    eigenvalues_qr,
    evaluate_ncpoly,
    fredholm_series,
    load_matrix,
    lu_determinant,
    matrix_exponential,
    product_formula_residual,
    random_test_matrix,
    relative_difference,
    schatten_norm,
    singular_values,
    trace_identity_check,
)

E = math.e


def crandn(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


class TestDeterminants:
    def test_lu_examples(self):
        assert lu_determinant(np.eye(3)) == 1
        assert lu_determinant(np.diag([2.0, 3.0])) == 6
        assert lu_determinant([[0, 1], [1, 0]]) == -1
        assert lu_determinant([[2.5 - 1j]]) == 2.5 - 1j
        assert lu_determinant(np.zeros((3, 3))) == 0

    @pytest.mark.parametrize("n", range(1, 9))
    def test_lu_against_numpy(self, rng, n):
        M = crandn(rng, n)
        assert relative_difference(lu_determinant(M), np.linalg.det(M)) < 1e-12

    def test_fredholm_series_examples(self):
        assert fredholm_series(np.diag([1.0, 2.0])) == pytest.approx(6)
        assert fredholm_series(np.zeros((4, 4))) == 1

    def test_fredholm_series_cross_path(self, rng):
        M = crandn(rng, 6)
        I = np.eye(6)
        assert relative_difference(fredholm_series(M), lu_determinant(I + M)) < 1e-10


class TestExponential:
    def test_examples(self):
        assert np.array_equal(matrix_exponential(np.zeros((3, 3))), np.eye(3))
        assert matrix_exponential([[1.0]])[0, 0] == pytest.approx(E, rel=1e-15)
        N = np.array([[0, 1], [0, 0]])
        assert np.array_equal(matrix_exponential(N), np.eye(2) + N)

    @pytest.mark.parametrize("scale", [0.01, 0.4, 2.0, 10.0])
    def test_against_scipy(self, rng, scale):
        M = crandn(rng, 6)
        M *= scale / np.linalg.norm(M, 2)
        ref = sla.expm(M)
        assert np.linalg.norm(matrix_exponential(M) - ref) <= 1e-13 * np.linalg.norm(ref) * max(1, scale)


class TestEigen:
    def test_examples(self):
        ev = eigenvalues_qr(np.diag([3, 1 + 2j]))
        assert ev[0] == pytest.approx(3) and ev[1] == pytest.approx(1 + 2j)
        ev = eigenvalues_qr([[0, 1], [-1, 0]])
        assert sorted(ev, key=lambda z: z.imag) == pytest.approx([-1j, 1j])
        assert np.allclose(eigenvalues_qr([[0, 1], [0, 0]]), [0, 0])

    @pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 12])
    def test_against_numpy(self, rng, n):
        M = crandn(rng, n)
        ours = np.sort_complex(eigenvalues_qr(M))
        ref = np.sort_complex(np.linalg.eigvals(M))
        assert np.max(np.abs(ours - ref)) < 1e-10 * np.linalg.norm(M)

    def test_sorted_by_modulus(self, rng):
        ev = eigenvalues_qr(crandn(rng, 7))
        assert np.all(np.diff(np.abs(ev)) <= 1e-12)

    def test_real_input_with_complex_pairs(self):
        M = np.array([[0, -2, 0], [1, 0, 0], [0, 0, 3.0]])
        ev = eigenvalues_qr(M)
        assert ev[0] == pytest.approx(3)
        assert sorted(ev[1:], key=lambda z: z.imag) == pytest.approx([-1j * 2**0.5, 1j * 2**0.5])

    def test_iteration_cap_is_an_error(self, monkeypatch):
        import regdet.matnum as mn

        monkeypatch.setattr(mn, "_qr_step", lambda blk, mu: blk)
        with pytest.raises(ConvergenceError, match="QR failed to converge"):
            eigenvalues_qr([[1, 2], [3, 4]])


class TestSingularValues:
    def test_examples(self, rng):
        assert singular_values(np.diag([3, -4])) == pytest.approx([4, 3])
        Q, _ = np.linalg.qr(crandn(rng, 5))
        assert singular_values(Q) == pytest.approx(np.ones(5), abs=1e-12)
        u = rng.normal(size=4) + 1j * rng.normal(size=4)
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        sv = singular_values(np.outer(u, v.conj()))
        assert sv[0] == pytest.approx(np.linalg.norm(u) * np.linalg.norm(v), rel=1e-12)
        # zeros are resolved only to sqrt(eps) * sigma_max through M^* M
        assert np.all(sv[1:] < 1e-7 * sv[0])

    @pytest.mark.parametrize("n", [2, 6, 9])
    def test_against_svd(self, rng, n):
        M = crandn(rng, n)
        ref = np.linalg.svd(M, compute_uv=False)
        assert np.allclose(singular_values(M), ref, rtol=0, atol=1e-11 * ref[0])

    def test_schatten(self, rng):
        assert schatten_norm(np.eye(4), 1) == pytest.approx(4)
        assert schatten_norm(np.diag([3, 4]), 2) == pytest.approx(5)
        M = crandn(rng, 5)
        assert schatten_norm(M, 2) == pytest.approx(np.linalg.norm(M), rel=1e-12)
        assert schatten_norm(M, math.inf) <= schatten_norm(M, 2) <= schatten_norm(M, 1)
        with pytest.raises(ValueError):
            schatten_norm(M, 0.5)


class TestRegularizedDeterminant:
    def test_scalar_m2(self):
        assert detm_regularized([[1.0]], 2) == pytest.approx(2 / E, rel=1e-14)
        assert detm_regularized([[1.0]], 2) == pytest.approx(0.73575888234, abs=1e-11)

    def test_m1_is_plain_determinant(self, rng):
        A = crandn(rng, 4)
        assert detm_regularized(A, 1) == lu_determinant(np.eye(4) + A)

    def test_zero_eigenfactor(self):
        assert abs(detm_regularized(np.diag([1.0, -1.0]), 2)) < 1e-15
        assert detm_spectral(np.diag([1.0, -1.0]), 2) == 0

    def test_spectral_examples(self):
        assert detm_spectral([[0, 1], [0, 0]], 4) == 1
        assert detm_spectral([[1.0]], 3) == pytest.approx(2 * math.exp(-0.5), rel=1e-15)

    def test_logseries_examples(self):
        assert detm_logseries([[0.5]], 2) == pytest.approx(1.5 * math.exp(-0.5), rel=1e-14)
        assert detm_logseries([[0.5]], 2) == pytest.approx(0.90979598957, abs=1e-11)
        assert detm_logseries(np.zeros((3, 3)), 3) == 1
        with pytest.raises(DomainError, match="norm < 1"):
            detm_logseries(np.diag([1.5, 0]), 2)

    @pytest.mark.parametrize("m", range(1, 6))
    def test_three_routes(self, m):
        A = random_test_matrix(6, 0.4, 7 + m)
        reg = detm_regularized(A, m)
        assert relative_difference(reg, detm_spectral(A, m)) < 1e-8
        assert relative_difference(reg, detm_logseries(A, m)) < 1e-9

    @pytest.mark.parametrize("m", [1, 3, 6])
    def test_mp_route(self, m):
        A = random_test_matrix(5, 0.8, m)
        assert relative_difference(complex(detm_regularized_mp(A, m)), detm_regularized(A, m)) < 1e-12

    def test_log_exponent(self):
        A = random_test_matrix(4, 0.3, 0)
        assert np.exp(detm_log_exponent(A, 3)) == pytest.approx(detm_regularized(A, 3), rel=1e-12)

    def test_report(self):
        rep = detm_report([[1.0]], 2, ["regularized", "spectral"])
        d = rep.to_dict()
        assert d["value_regularized"][0] == pytest.approx(2 / E)
        assert d["cross_path_spread"] < 1e-12
        rep = detm_report([[1.5]], 2)
        assert "logseries" in rep.errors and set(rep.values) == {"regularized", "spectral"}


class TestInsertion:
    def test_examples(self, rng):
        A, B = crandn(rng, 3), crandn(rng, 3)
        assert np.allclose(evaluate_ncpoly(NCPoly.parse("1 ab"), A, B), A @ B)
        assert evaluate_ncpoly(NCPoly.parse("-1 ab"), [[1]], [[1]])[0, 0] == -1
        assert evaluate_ncpoly(build_X_m(3), [[1]], [[1]])[0, 0] == 2.5
        assert np.allclose(evaluate_ncpoly(NCPoly.one(), A, B), np.eye(3))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            evaluate_ncpoly(NCPoly.parse("1 ab"), np.eye(2), np.eye(3))

    def test_residual_scalar(self):
        # L = det_2(4) = 4 e^-3 = R
        assert product_formula_residual([[1.0]], [[1.0]], 2) < 1e-15
        assert product_formula_residual([[1.0]], [[1.0]], 1) < 1e-15

    def test_trace_identity_examples(self):
        assert trace_identity_check([[1.0]], [[1.0]], 3) < 1e-15
        A = random_test_matrix(4, 0.7, 1)
        B = random_test_matrix(4, 0.7, 2)
        assert trace_identity_check(A, B, 2) == 0


class TestRandomAndIO:
    def test_determinism(self):
        assert np.array_equal(random_test_matrix(5, 0.4, 3), random_test_matrix(5, 0.4, 3))
        assert not np.array_equal(random_test_matrix(5, 0.4, 3), random_test_matrix(5, 0.4, 4))

    @pytest.mark.parametrize("norm", [0.4, 1.0, 3.0])
    def test_norm(self, norm):
        M = random_test_matrix(6, norm, 11)
        assert abs(schatten_norm(M, math.inf) - norm) < 1e-12
        assert abs(np.linalg.norm(M, 2) - norm) < 1e-12

    def test_json_round_trip(self, rng):
        M = crandn(rng, 3)
        assert np.array_equal(load_matrix(dump_matrix(M)), M)
        obj = json.loads(dump_matrix(np.eye(2)))
        assert obj == {"dim": 2, "data": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}

    @pytest.mark.parametrize(
        "text",
        [
            '{"dim": 2, "data": [[1, 0], [0, 0], [0, 0]]}',
            '{"dim": 1, "data": [[1, 0, 0]]}',
            '{"dim": 0, "data": []}',
            '{"dim": 1, "data": [["x", 0]]}',
            '{"dim": 1}',
            "not json",
            '{"dim": 1, "data": [[1, 0]], "extra": 1}',
        ],
    )
    def test_json_rejects(self, text):
        with pytest.raises(ValueError):
            load_matrix(text)


# kernel invariants

@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_det_multiplicative(n, seed):
    rng = np.random.default_rng(seed)
    M, N = crandn(rng, n), crandn(rng, n)
    assert relative_difference(lu_determinant(M @ N), lu_determinant(M) * lu_determinant(N)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_eigen_sum_and_product(n, seed):
    M = crandn(np.random.default_rng(seed), n)
    ev = eigenvalues_qr(M)
    assert abs(ev.sum() - np.trace(M)) <= 1e-9 * max(abs(np.trace(M)), np.linalg.norm(M))
    assert relative_difference(np.prod(ev), lu_determinant(M)) < 1e-8


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_normal_singular_values(n, seed):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(crandn(rng, n))
    lam = rng.normal(size=n) + 1j * rng.normal(size=n)
    M = Q @ np.diag(lam) @ Q.conj().T
    sv = singular_values(M)
    assert np.allclose(sv, np.sort(np.abs(eigenvalues_qr(M)))[::-1], rtol=0, atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 8), st.floats(0.01, 5.0), st.integers(0, 2**32 - 1))
def test_exp_inverse(n, norm, seed):
    M = random_test_matrix(n, norm, seed)
    prod = matrix_exponential(M) @ matrix_exponential(-M)
    assert np.max(np.abs(prod - np.eye(n))) < 1e-10
