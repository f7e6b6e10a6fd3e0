import numpy as np
import pytest
from helpers import SQRT2, basis, random_sequence
from numpy.testing import assert_allclose

from ucfactor.core.errors import (
    CertificationError,
    DimensionMismatchError,
    NotHermitianError,
    NotPositiveSemidefiniteError,
    RowNormError,
)
from ucfactor.core.hilbert import bessel_bound, c0_operator_norm, gram, orlicz_sum, spectral_norm, synthesis_matrix
from ucfactor.core.models import PietschSolution
from ucfactor.core.oracle import dual_value
from ucfactor.core.pietsch import (
    check_gram,
    construct_alpha_f,
    factorization_cost,
    factorize,
    min_dominating_diagonal,
    pietsch_factorize,
)

OFF = 1 / SQRT2


def assert_certificate(solution, G, tol=1e-8):
    total = float(np.sum(solution.v))
    assert solution.certified
    assert solution.pi2_sq == pytest.approx(total)
    assert solution.gap <= tol * max(1.0, total)
    g_norm = max(np.linalg.eigvalsh(G)[-1], 0.0)
    assert np.linalg.eigvalsh(np.diag(solution.v) - G)[0] >= -1e-10 * g_norm
    assert np.all(np.diag(solution.dualX) == 1.0)
    assert dual_value(G, solution.dualX).value >= total - solution.gap - 1e-12 * max(1.0, total)


class TestMinDominatingDiagonal:
    @pytest.mark.parametrize(
        "G, v, expected",
        [
            (np.eye(2), [1, 1], 2.0),
            (np.ones((2, 2)), [2, 2], 4.0),
            ([[1, OFF], [OFF, 1]], None, 2 + SQRT2),
        ],
    )
    def test_closed_forms(self, G, v, expected):
        solution = min_dominating_diagonal(G)
        assert solution.pi2_sq == pytest.approx(expected, abs=1e-6)
        if v is not None:
            assert_allclose(solution.v, v, atol=1e-6)
        assert_certificate(solution, np.asarray(G, dtype=complex))

    @pytest.mark.parametrize("seed", range(100))
    def test_random_gram_is_certified(self, seed):
        rng = np.random.default_rng(seed)
        n, d = rng.integers(1, 7, size=2)
        G = gram(random_sequence(rng, n, d))
        assert_certificate(min_dominating_diagonal(G), G)

    def test_single_index(self):
        solution = min_dominating_diagonal([[3.0]])
        assert solution.pi2_sq == pytest.approx(3.0, rel=1e-15)
        assert solution.gap <= 1e-15

    def test_zero_rows_get_zero_weight(self, rng):
        vectors = np.vstack([rng.standard_normal((3, 2)), np.zeros((2, 2))])
        G = gram(vectors)
        solution = min_dominating_diagonal(G)
        assert_allclose(solution.v[3:], 0.0)
        assert_allclose(solution.dualX[3:, 3:], np.eye(2))
        assert solution.pi2_sq == pytest.approx(min_dominating_diagonal(G[:3, :3]).pi2_sq, rel=1e-8)

    def test_all_zero(self):
        solution = min_dominating_diagonal(np.zeros((3, 3)))
        assert solution.pi2_sq == 0.0
        assert solution.certified

    @pytest.mark.parametrize("t", [0.25, 4.0, 1024.0])
    def test_scales_quadratically(self, rng, t):
        seq = random_sequence(rng, 4, 3)
        base = min_dominating_diagonal(gram(seq)).pi2_sq
        scaled = min_dominating_diagonal(gram(seq.vectors * t)).pi2_sq
        assert scaled == pytest.approx(t * t * base, rel=1e-7)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            min_dominating_diagonal([[1, 1], [0, 1]])

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositiveSemidefiniteError):
            min_dominating_diagonal([[1, 2], [2, 1]])

    def test_rejects_non_square(self):
        with pytest.raises(NotHermitianError):
            check_gram(np.ones((2, 3)))

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            min_dominating_diagonal(np.eye(2), backend="simplex")

    def test_budget_exhaustion_raises_with_best_iterate(self):
        with pytest.raises(CertificationError) as info:
            min_dominating_diagonal(np.ones((3, 3)), max_iter=1)
        solution = info.value.solution
        assert isinstance(solution, PietschSolution)
        assert not solution.certified
        assert np.linalg.eigvalsh(np.diag(solution.v) - np.ones((3, 3)))[0] >= -1e-10

    @pytest.mark.parametrize("seed", range(10))
    def test_cvxpy_backend_certifies_at_default_tol(self, seed):
        cp = pytest.importorskip("cvxpy")
        if cp.CLARABEL not in cp.installed_solvers():
            pytest.skip("Clarabel is not installed")
        rng = np.random.default_rng(300 + seed)
        n, d = rng.integers(2, 7, size=2)
        G = gram(random_sequence(rng, n, d))
        reference = min_dominating_diagonal(G)
        solution = min_dominating_diagonal(G, backend="cvxpy")
        assert solution.backend == "cvxpy"
        assert_certificate(solution, G)
        assert solution.pi2_sq == pytest.approx(reference.pi2_sq, rel=1e-7)

    def test_certificate_roundtrip(self, rng):
        solution = min_dominating_diagonal(gram(random_sequence(rng, 3, 2)))
        restored = PietschSolution.from_dict(solution.to_dict())
        assert_allclose(restored.v, solution.v)
        assert_allclose(restored.dualX, solution.dualX)
        assert restored.certified


class TestSandwich:
    @pytest.mark.parametrize("seed", range(20))
    def test_chain(self, seed):
        rng = np.random.default_rng(100 + seed)
        n = int(rng.integers(1, 11))
        seq = random_sequence(rng, n, int(rng.integers(1, 5)))
        pi2_sq = min_dominating_diagonal(gram(seq)).pi2_sq
        bessel = bessel_bound(seq)
        c0 = c0_operator_norm(seq)
        slack = 1e-8 * max(1.0, pi2_sq)
        assert orlicz_sum(seq) <= pi2_sq + slack
        assert bessel <= c0**2 + slack
        assert c0**2 <= pi2_sq + slack
        assert pi2_sq <= n * bessel + slack


class TestPietschFactorize:
    def test_rank_one(self):
        nuclear = pietsch_factorize(basis(2, 0, 0))
        assert_allclose(nuclear.lam, [SQRT2, SQRT2], atol=1e-6)
        assert_allclose(nuclear.S, [[OFF, OFF], [0, 0]], atol=1e-6)
        assert spectral_norm(nuclear.S) == pytest.approx(1.0, abs=1e-8)

    def test_product_reproduces_synthesis(self, rng):
        seq = random_sequence(rng, 5, 3)
        nuclear = pietsch_factorize(seq)
        assert_allclose(nuclear.product(), synthesis_matrix(seq), atol=1e-10)
        assert spectral_norm(nuclear.S) <= 1 + 1e-8
        assert np.all(np.sum(np.abs(nuclear.B), axis=1) <= 1)

    def test_zero_weight_columns_are_zero(self):
        nuclear = pietsch_factorize([[1, 0], [0, 0]])
        assert nuclear.lam[1] == 0
        assert_allclose(nuclear.S[:, 1], 0)


class TestConstructAlphaF:
    def test_half_rows(self):
        B = [[0.5, 0.5], [0.5, -0.5]]
        alpha, f = construct_alpha_f([1, 1], B)
        assert_allclose(alpha, [1, 1])
        assert_allclose(f.vectors, [[0.5, 0.5], [0.5, -0.5]])
        assert bessel_bound(f) == pytest.approx(0.5)

    def test_zero_weight(self):
        alpha, f = construct_alpha_f([1, 0], np.eye(2))
        assert_allclose(alpha, [1, 0])
        assert_allclose(f.vectors, [[1, 0], [0, 0]])

    @pytest.mark.parametrize("seed", range(100))
    def test_weight_identity_and_bessel(self, seed):
        rng = np.random.default_rng(seed)
        rows, cols = rng.integers(1, 6, size=2)
        B = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
        B /= np.sum(np.abs(B), axis=1, keepdims=True)
        lam = rng.uniform(0.1, 2.0, size=rows)
        alpha, f = construct_alpha_f(lam, B)
        expected = np.sum(lam**2 * np.sum(np.abs(B), axis=1))
        assert np.sum(alpha**2) == pytest.approx(expected, rel=1e-12)
        assert bessel_bound(f) <= 1 + 1e-8

    def test_row_norm_above_one(self):
        with pytest.raises(RowNormError) as info:
            construct_alpha_f([1, 1], [[0.5, 0.5], [1.0, 0.5]])
        assert info.value.index == 1

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            construct_alpha_f([1, 1, 1], np.eye(2))


class TestFactorize:
    def test_diagonal(self):
        fact = factorize([[1, 0], [0, 2]])
        assert_allclose(fact.alpha, [1, 2], atol=1e-7)
        assert_allclose(fact.frame.vectors, np.eye(2), atol=1e-7)
        assert fact.bessel == pytest.approx(1.0)
        assert fact.cost == pytest.approx(5.0, abs=1e-7)

    def test_rank_one(self):
        fact = factorize(basis(2, 0, 0))
        assert_allclose(fact.alpha, [SQRT2, SQRT2], atol=1e-6)
        assert_allclose(fact.frame.vectors, [[OFF, 0], [OFF, 0]], atol=1e-6)
        assert fact.cost == pytest.approx(4.0, abs=1e-7)

    def test_tilted_pair(self):
        fact = factorize([[1, 0], [OFF, OFF]])
        assert fact.cost == pytest.approx(2 + SQRT2, abs=1e-7)

    @pytest.mark.parametrize("seed", range(500))
    def test_soundness(self, seed):
        rng = np.random.default_rng(1000 + seed)
        n, d = rng.integers(1, 7, size=2)
        seq = random_sequence(rng, n, d)
        fact = factorize(seq)
        assert fact.residual <= 1e-10 * np.max(seq.norms())
        assert fact.bessel <= 1 + 1e-8
        assert fact.cost == pytest.approx(fact.solution.pi2_sq, rel=1e-8)

    @pytest.mark.parametrize("t", [0.3, 7.0, 1e3])
    @pytest.mark.parametrize("seed", range(50))
    def test_scale_equivariance(self, seed, t):
        rng = np.random.default_rng(2000 + seed)
        n, d = rng.integers(1, 7, size=2)
        seq = random_sequence(rng, n, d)
        base = factorize(seq)
        scaled = factorize(seq.vectors * t)
        assert_allclose(scaled.alpha, t * base.alpha, rtol=1e-10, atol=0)
        assert_allclose(scaled.frame.vectors, base.frame.vectors, rtol=1e-10, atol=1e-12)

    def test_zero_vector(self):
        fact = factorize([[1, 1], [0, 0]])
        assert fact.alpha[1] == 0
        assert_allclose(fact.frame.vectors[1], 0)
        assert fact.residual <= 1e-15


class TestFactorizationCost:
    def test_rank_one(self):
        assert factorization_cost([SQRT2, SQRT2], [[OFF, 0], [OFF, 0]]) == pytest.approx(4.0)

    def test_unbalanced(self):
        assert factorization_cost([2, 1], [[0.5, 0], [1, 0]]) == pytest.approx(6.25)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            factorization_cost([1, 1], [[1, 0]])
