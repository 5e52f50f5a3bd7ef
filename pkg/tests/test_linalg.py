import numpy as np
import pytest

from varsel.errors import (
    EmptySupportError,
    FullSupportError,
    IndexOutOfRangeError,
    NearSingularError,
    NotSymmetricError,
    ValidationError,
    ZeroColumnError,
)
from varsel.linalg import (
    DesignMatrix,
    SupportSet,
    gram_partition,
    inf_operator_norm,
    min_eigenvalue,
    project_residual_norms,
    solve_spd,
    standardize_columns,
)


def family_matrix(c):
    """3x3 signal Gram block whose smallest eigenvalue is 1 - sqrt(c^2 + 1/4)."""
    return np.array([[1.0, -0.5, c], [-0.5, 1.0, 0.0], [c, 0.0, 1.0]])


class TestStandardize:
    def test_three_four_five_column(self):
        x = DesignMatrix(np.array([[3.0, 1.0], [4.0, 0.0], [0.0, 1.0]]))
        out = standardize_columns(x)
        np.testing.assert_allclose(out.values[:, 0], [0.6, 0.8, 0.0])
        assert out.standardized

    def test_identity_unchanged(self):
        x = DesignMatrix(np.eye(2))
        out = standardize_columns(x)
        np.testing.assert_array_equal(out.values, np.eye(2))

    def test_zero_column_rejected(self):
        x = DesignMatrix(np.array([[1.0, 0.0], [0.0, 0.0]]))
        with pytest.raises(ZeroColumnError) as err:
            standardize_columns(x)
        assert err.value.column == 1

    def test_input_not_mutated(self):
        values = np.array([[3.0], [4.0]])
        standardize_columns(DesignMatrix(values))
        np.testing.assert_array_equal(values, [[3.0], [4.0]])


class TestSupportSet:
    def test_requires_strictly_increasing(self):
        with pytest.raises(ValidationError):
            SupportSet((1, 1, 2))

    def test_from_iterable_sorts_and_dedups(self):
        assert SupportSet.from_iterable([3, 1, 3]).indices == (1, 3)

    def test_complement(self):
        np.testing.assert_array_equal(SupportSet((0, 2)).complement(4), [1, 3])


class TestGramPartition:
    def test_identity_single_support(self):
        x = DesignMatrix(np.eye(3), standardized=True)
        gp = gram_partition(x, SupportSet((0,)))
        np.testing.assert_allclose(gp.c_ss, [[1.0]])
        np.testing.assert_allclose(gp.c_ns, [[0.0], [0.0]])

    def test_two_column_correlation(self):
        rho = 0.3
        base = np.array([[1.0, rho], [0.0, np.sqrt(1 - rho ** 2)]])
        x = DesignMatrix(base, standardized=True)
        gp = gram_partition(x, SupportSet((0,)))
        np.testing.assert_allclose(gp.c_ss, [[1.0]], atol=1e-15)
        np.testing.assert_allclose(gp.c_ns, [[rho]], atol=1e-15)

    def test_full_support_rejected(self):
        x = DesignMatrix(np.eye(3), standardized=True)
        with pytest.raises(FullSupportError):
            gram_partition(x, SupportSet((0, 1, 2)))

    def test_empty_support_rejected(self):
        x = DesignMatrix(np.eye(3), standardized=True)
        with pytest.raises(EmptySupportError):
            gram_partition(x, SupportSet(()))

    def test_requires_standardized(self):
        with pytest.raises(ValidationError):
            gram_partition(DesignMatrix(2 * np.eye(3)), SupportSet((0,)))

    def test_orthogonal_design_blocks(self):
        rng = np.random.default_rng(5)
        q, _ = np.linalg.qr(rng.normal(size=(12, 6)))
        gp = gram_partition(DesignMatrix(q, standardized=True), SupportSet((1, 4)))
        np.testing.assert_allclose(gp.c_ss, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(gp.c_ns, 0.0, atol=1e-12)


class TestMinEigenvalue:
    def test_closed_form_family(self):
        for c in np.arange(0.1, 0.85, 0.1):
            expected = 1.0 - np.sqrt(c ** 2 + 0.25)
            assert abs(min_eigenvalue(family_matrix(c)) - expected) <= 1e-10

    def test_family_near_singular_point(self):
        assert min_eigenvalue(family_matrix(0.85)) == pytest.approx(0.014, abs=5e-3)

    def test_identity(self):
        assert min_eigenvalue(np.eye(4)) == pytest.approx(1.0, abs=1e-14)

    def test_not_symmetric(self):
        with pytest.raises(NotSymmetricError):
            min_eigenvalue(np.array([[1.0, 1.0], [0.0, 1.0]]))


class TestInfOperatorNorm:
    def test_row_sums(self):
        assert inf_operator_norm(np.array([[1.0, -2.0], [0.0, 0.5]])) == 3.0

    def test_zero_matrix(self):
        assert inf_operator_norm(np.zeros((3, 3))) == 0.0

    def test_scalar_matrix(self):
        assert inf_operator_norm(np.array([[0.3]])) == pytest.approx(0.3)


class TestSolveSpd:
    def test_diagonal(self):
        np.testing.assert_allclose(solve_spd(2 * np.eye(2), np.array([4.0, 6.0])),
                                   [2.0, 3.0])

    def test_equicorrelated_closed_form(self):
        for rho in (0.2, 0.5, -0.4):
            m = np.array([[1.0, rho], [rho, 1.0]])
            v = solve_spd(m, np.ones(2))
            np.testing.assert_allclose(v, np.full(2, 1.0 / (1.0 + rho)), rtol=1e-12)
            np.testing.assert_allclose(m @ v, np.ones(2), atol=1e-12)

    def test_singular_rejected(self):
        m = np.array([[1.0, 1.0], [1.0, 1.0]])
        with pytest.raises(NearSingularError):
            solve_spd(m, np.ones(2))

    def test_random_spd_roundtrip(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            dim = int(rng.integers(1, 51))
            a = rng.normal(size=(dim + 5, dim))
            m = a.T @ a / (dim + 5) + 1e-3 * np.eye(dim)
            b = rng.normal(size=dim)
            v = solve_spd(m, b)
            scale = max(np.abs(b).max(), 1e-300)
            assert np.abs(m @ v - b).max() <= 1e-8 * scale


def projector(cols):
    return cols @ np.linalg.pinv(cols)


class TestProjectResidualNorms:
    def test_orthogonal_picks_coordinates(self):
        x = DesignMatrix(np.eye(3), standardized=True)
        d = project_residual_norms(x, (0, 1, 2), np.array([5.0, 3.0, 0.0]))
        np.testing.assert_allclose(d, [3.0, 0.0])

    def test_duplicate_column_adds_nothing(self):
        base = np.column_stack([np.eye(3)[:, 0], np.eye(3)[:, 1], np.eye(3)[:, 0]])
        x = DesignMatrix(base, standardized=True)
        d = project_residual_norms(x, (0, 2, 1), np.array([1.0, 2.0, 3.0]))
        assert d[0] == 0.0
        assert d[1] == pytest.approx(2.0)

    def test_matches_projection_matrix_oracle(self):
        rng = np.random.default_rng(3)
        x = standardize_columns(DesignMatrix(rng.normal(size=(10, 4))))
        y = rng.normal(size=10)
        order = [2, 0, 3, 1]
        d = project_residual_norms(x, order, y)
        for k in range(1, 4):
            h_k = projector(x.values[:, order[:k]])
            h_k1 = projector(x.values[:, order[:k + 1]])
            oracle = np.linalg.norm((h_k1 - h_k) @ y)
            assert abs(d[k - 1] - oracle) <= 1e-8

    def test_pythagoras_over_nested_projections(self):
        rng = np.random.default_rng(9)
        for trial in range(20):
            n, L = 15, 8
            x = standardize_columns(DesignMatrix(rng.normal(size=(n, 10))))
            y = rng.normal(size=n)
            order = list(rng.permutation(10)[:L])
            d = project_residual_norms(x, order, y)
            h1 = projector(x.values[:, order[:1]])
            hl = projector(x.values[:, order])
            total = (d ** 2).sum() + (h1 @ y) @ (h1 @ y) + (y - hl @ y) @ (y - hl @ y)
            assert abs(total - y @ y) <= 1e-8

    def test_index_validation(self):
        x = DesignMatrix(np.eye(3), standardized=True)
        with pytest.raises(IndexOutOfRangeError):
            project_residual_norms(x, (0, 5), np.zeros(3))
        with pytest.raises(IndexOutOfRangeError):
            project_residual_norms(x, (1, 1), np.zeros(3))
        with pytest.raises(ValidationError):
            project_residual_norms(x, (1,), np.zeros(3))
