import numpy as np
import pytest
from helpers import SQRT2, basis, random_sequence

from ucfactor.core.errors import DimensionMismatchError, EnumerationCapError, ProblemTooLargeError
from ucfactor.core.hilbert import c0_operator_norm, gram
from ucfactor.core.oracle import brute_pietsch, brute_sign_norm, dual_value, random_factorization_cost
from ucfactor.core.pietsch import factorize, min_dominating_diagonal

OFF = 1 / SQRT2


class TestBrutePietsch:
    @pytest.mark.parametrize("resolution", [8, 50, 400])
    def test_identity(self, resolution):
        assert brute_pietsch(np.eye(2), resolution) == pytest.approx(2.0, abs=2.0 / resolution)

    def test_rank_one(self):
        assert brute_pietsch(np.ones((2, 2)), 400) == pytest.approx(4.0, abs=1e-12)

    def test_tilted(self):
        assert brute_pietsch([[1, OFF], [OFF, 1]], 400) == pytest.approx(2 + SQRT2, abs=1e-12)

    def test_three_orthonormal(self):
        assert brute_pietsch(np.eye(3), 30) == pytest.approx(3.0, abs=1e-12)

    @pytest.mark.parametrize("seed", range(100))
    def test_agrees_with_solver(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 4))
        G = gram(random_sequence(rng, n, 3))
        pi2_sq = min_dominating_diagonal(G).pi2_sq
        brute = brute_pietsch(G, 2000)
        assert brute >= pi2_sq * (1 - 1e-8)
        assert brute - pi2_sq <= 3.0 / 2000 * pi2_sq

    def test_refinement_never_increases(self, rng):
        G = gram(random_sequence(rng, 2, 2))
        values = [brute_pietsch(G, r) for r in (10, 20, 40, 80)]
        assert all(later <= earlier + 1e-12 for earlier, later in zip(values, values[1:]))

    def test_zero_rows_are_ignored(self):
        G = np.zeros((4, 4))
        G[0, 0] = 2.0
        assert brute_pietsch(G, 8) == pytest.approx(2.0)

    def test_too_large(self):
        with pytest.raises(ProblemTooLargeError):
            brute_pietsch(np.eye(4), 8)

    def test_resolution_floor(self):
        with pytest.raises(ValueError):
            brute_pietsch(np.eye(2), 2)


class TestBruteSignNorm:
    @pytest.mark.parametrize(
        "vectors, expected",
        [
            (basis(2, 0, 0), 2.0),
            ([[1, 0], [-1, 0]], 2.0),
            ([[1, 0], [0, 1], [1, 1]], 2 * SQRT2),
        ],
    )
    def test_examples(self, vectors, expected):
        assert brute_sign_norm(vectors) == pytest.approx(expected)

    @pytest.mark.parametrize("n", [1, 5, 9, 12])
    def test_matches_exact_enumeration(self, rng, n):
        seq = random_sequence(rng, n, 3)
        assert brute_sign_norm(seq) == pytest.approx(c0_operator_norm(seq), rel=1e-12)

    def test_cap(self, rng):
        with pytest.raises(EnumerationCapError):
            brute_sign_norm(random_sequence(rng, 5, 2), max_enum=4)


class TestDualValue:
    def test_identity(self):
        check = dual_value(np.eye(2), np.eye(2))
        assert check.value == pytest.approx(2.0)
        assert check.feasible

    def test_all_ones(self):
        check = dual_value(np.ones((2, 2)), np.ones((2, 2)))
        assert check.value == pytest.approx(4.0)
        assert check.feasible

    def test_diagonal_two_is_flagged(self):
        check = dual_value(np.eye(2), 2 * np.eye(2))
        assert not check.feasible
        assert check.max_diagonal_error == pytest.approx(1.0)

    def test_indefinite_is_flagged(self):
        check = dual_value(np.eye(2), [[1, 2], [2, 1]])
        assert not check.feasible
        assert check.min_eigenvalue == pytest.approx(-1.0)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            dual_value(np.eye(2), np.eye(3))

    def test_solver_certificate(self, rng):
        G = gram(random_sequence(rng, 5, 3))
        solution = min_dominating_diagonal(G)
        check = dual_value(G, solution.dualX)
        assert check.feasible
        assert check.value >= solution.pi2_sq - solution.gap - 1e-12 * solution.pi2_sq


class TestRandomFactorizationCost:
    def test_orthonormal(self):
        assert random_factorization_cost(basis(2, 0, 1), trials=500) >= 2 - 1e-8

    def test_rank_one(self):
        assert random_factorization_cost(basis(2, 0, 0), trials=500) >= 4 - 1e-8

    def test_no_trials(self):
        assert random_factorization_cost(basis(2, 0, 1), trials=0) == float("inf")

    def test_deterministic(self, rng):
        seq = random_sequence(rng, 4, 3)
        assert random_factorization_cost(seq, 300, seed=9) == random_factorization_cost(seq, 300, seed=9)

    @pytest.mark.parametrize("seed", range(50))
    def test_never_beats_certified_optimum(self, seed):
        rng = np.random.default_rng(seed)
        seq = random_sequence(rng, int(rng.integers(1, 6)), int(rng.integers(1, 4)))
        optimum = factorize(seq).solution.pi2_sq
        assert random_factorization_cost(seq, trials=10_000, seed=seed) >= optimum * (1 - 1e-8) - 1e-8
