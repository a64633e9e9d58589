import numpy as np
import pytest

from summakit import (
    ConvergenceError,
    MatrixValidationError,
    cesaro_matrix,
    lazy,
    limit_matrix,
    load_matrix_csv,
    validate,
)
from summakit.markov import inf_norm


def random_stochastic(rng, dim, sparsity=0.0):
    M = rng.random((dim, dim)) ** 2
    if sparsity:
        M = M * (rng.random((dim, dim)) >= sparsity)
        for r in range(dim):
            if M[r].sum() == 0.0:
                M[r, rng.integers(dim)] = 1.0
    return M / M.sum(axis=1)[:, None]


class TestValidate:
    def test_identity_accepted_unchanged(self):
        P = validate(np.eye(3))
        np.testing.assert_array_equal(P.matrix, np.eye(3))
        assert P.dim == 3

    def test_rows_renormalized_within_tolerance(self):
        P = validate([[0.5, 0.5001], [0.3, 0.7]], row_tol=1e-3)
        np.testing.assert_allclose(P.matrix.sum(axis=1), 1.0, atol=1e-15)

    def test_negative_entry_rejected(self):
        with pytest.raises(MatrixValidationError, match="row 0"):
            validate([[1.2, -0.2], [0.0, 1.0]])

    def test_tiny_negative_clamped(self):
        P = validate([[1.0 + 5e-13, -5e-13], [0.5, 0.5]])
        assert P.matrix.min() >= 0.0

    def test_bad_row_sum_names_row(self):
        with pytest.raises(MatrixValidationError, match="row 1"):
            validate([[0.5, 0.5], [0.9, 0.3]])

    def test_shape_checked(self):
        with pytest.raises(MatrixValidationError):
            validate([[0.5, 0.5]])
        with pytest.raises(MatrixValidationError):
            validate(np.zeros((0, 0)))

    def test_non_finite_rejected(self):
        with pytest.raises(MatrixValidationError):
            validate([[np.inf, 0.0], [0.5, 0.5]])


class TestLazy:
    def test_identity_fixed(self):
        P = validate(np.eye(4))
        np.testing.assert_array_equal(lazy(P).matrix, np.eye(4))

    def test_swap_chain(self):
        P = validate([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_array_equal(lazy(P).matrix, [[0.5, 0.5], [0.5, 0.5]])

    def test_absorbing(self):
        P = validate([[1.0, 0.0], [0.5, 0.5]])
        np.testing.assert_array_equal(lazy(P).matrix, [[1.0, 0.0], [0.25, 0.75]])

    def test_preserves_stochasticity_tightly(self):
        rng = np.random.default_rng(3)
        for dim in (1, 2, 5, 20):
            P = validate(random_stochastic(rng, dim))
            sums = lazy(P).matrix.sum(axis=1)
            assert np.max(np.abs(sums - 1.0)) <= 1e-15 * dim


class TestLimitMatrix:
    def test_identity(self):
        report = limit_matrix(validate(np.eye(3)))
        np.testing.assert_array_equal(report.A.matrix, np.eye(3))
        assert report.residual_fix == 0.0
        assert report.residual_idem == 0.0

    def test_period_two_chain(self):
        report = limit_matrix(validate([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_allclose(report.A.matrix, np.full((2, 2), 0.5), atol=1e-12)

    def test_absorbing_closed_form(self):
        report = limit_matrix(validate([[1.0, 0.0], [0.5, 0.5]]))
        np.testing.assert_allclose(report.A.matrix, [[1.0, 0.0], [1.0, 0.0]], atol=1e-10)

    def test_cycle_averages_uniformly(self):
        P = np.zeros((5, 5))
        for i in range(5):
            P[i, (i + 1) % 5] = 1.0
        report = limit_matrix(validate(P))
        np.testing.assert_allclose(report.A.matrix, 0.2, atol=1e-12)

    def test_random_chains_residuals(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            dim = int(rng.integers(1, 21))
            P = validate(random_stochastic(rng, dim, sparsity=0.3))
            report = limit_matrix(P)
            assert report.residual_fix <= 1e-9
            assert report.residual_idem <= 1e-9
            assert np.max(np.abs(report.A.matrix.sum(axis=1) - 1.0)) <= 1e-10

    def test_non_convergence_carries_residual(self):
        P = validate([[0.9999, 0.0001], [0.0001, 0.9999]])
        with pytest.raises(ConvergenceError) as err:
            limit_matrix(P, tol=1e-12, max_squarings=4)
        assert err.value.residual is not None
        assert err.value.residual > 1e-12

    def test_bad_tol_rejected(self):
        with pytest.raises(MatrixValidationError):
            limit_matrix(validate(np.eye(2)), tol=0.0)


class TestCesaroMatrix:
    def test_identity(self):
        P = validate(np.eye(3))
        np.testing.assert_array_equal(cesaro_matrix(P, 1000), np.eye(3))

    def test_single_step_average(self):
        P = validate([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_array_equal(cesaro_matrix(P, 1), [[0.5, 0.5], [0.5, 0.5]])

    def test_approaches_limit_matrix(self):
        rng = np.random.default_rng(9)
        P = validate(random_stochastic(rng, 5))
        A = limit_matrix(P).A.matrix
        gap = np.max(np.abs(cesaro_matrix(P, 2000) - A))
        assert gap <= 0.01

    def test_negative_N_rejected(self):
        with pytest.raises(MatrixValidationError):
            cesaro_matrix(validate(np.eye(2)), -1)


class TestCsvIngest:
    def test_roundtrip(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0.5,0.5\n0.25,0.75\n")
        M = load_matrix_csv(path)
        np.testing.assert_array_equal(M, [[0.5, 0.5], [0.25, 0.75]])

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("1.0\n\n")
        np.testing.assert_array_equal(load_matrix_csv(path), [[1.0]])

    def test_ragged_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0.5,0.5\n1.0\n")
        with pytest.raises(MatrixValidationError):
            load_matrix_csv(path)

    def test_garbage_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("0.5,spam\n")
        with pytest.raises(MatrixValidationError, match="line 1"):
            load_matrix_csv(path)

    def test_empty_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("\n")
        with pytest.raises(MatrixValidationError):
            load_matrix_csv(path)


def test_inf_norm_is_max_row_sum():
    assert inf_norm([[1.0, -2.0], [0.5, 0.25]]) == 3.0
