from math import log

import numpy as np
import pytest

from unigraph.entropy import (EmptyKeepSet, FullKeepSet, NormViolation,
                              NotAProbabilityVector, OrderViolation,
                              ZeroNormProjection, element_entropy,
                              eigenvector_entropy, mean_purity,
                              mean_random_vector_entropy, page_mean_entropy,
                              partial_trace, project_onto_basis, purity,
                              shannon_entropy, von_neumann_entropy)
from unigraph.rand import RandomStream, haar_unitary
from unigraph.spectral import eigendecompose

LN2 = log(2)


def fourier_matrix(n):
    j = np.arange(n)
    return np.exp(2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)


def random_state(dim, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


class TestShannonEntropy:
    def test_point_mass(self):
        assert shannon_entropy([1.0, 0.0, 0.0]) == 0.0

    def test_uniform(self):
        for d in (2, 5, 16):
            assert abs(shannon_entropy(np.full(d, 1 / d)) - log(d)) < 1e-12

    def test_dyadic(self):
        assert abs(shannon_entropy([0.5, 0.25, 0.25]) - 1.5 * LN2) < 1e-12

    def test_rejects_non_probability(self):
        with pytest.raises(NotAProbabilityVector):
            shannon_entropy([0.5, 0.4])
        with pytest.raises(NotAProbabilityVector):
            shannon_entropy([1.5, -0.5])


class TestEigenvectorEntropy:
    def test_diagonal_unitary_has_basis_eigenvectors(self):
        u = np.diag(np.exp(1j * np.array([0.3, 1.1, 2.9, 4.0])))
        assert eigenvector_entropy(eigendecompose(u)) < 1e-20

    def test_fourier_eigenbasis(self):
        # a unitary whose eigenvector matrix is the flat Fourier matrix
        n = 8
        f = fourier_matrix(n)
        u = f @ np.diag(np.exp(1j * np.linspace(0.1, 5.9, n))) @ f.conj().T
        assert abs(eigenvector_entropy(eigendecompose(u)) - log(n)) < 1e-9

    def test_cue_mean_matches_harmonic_sum(self):
        # mean component entropy of a Haar-random unit vector is
        # sum_{j=2}^{N} 1/j = 2.380729 at N=16
        draws = 1000
        values = [eigenvector_entropy(eigendecompose(haar_unitary(16, RandomStream(30, t))))
                  for t in range(draws)]
        expected = mean_random_vector_entropy(16)
        assert abs(expected - 2.380728993228994) < 1e-12
        assert abs(np.mean(values) - expected) / expected < 0.01

    def test_invariance_under_column_permutation_and_phases(self):
        data = eigendecompose(haar_unitary(8, RandomStream(31, 0)))
        base = eigenvector_entropy(data)
        rng = np.random.default_rng(0)
        data.vectors = data.vectors[:, rng.permutation(8)] * np.exp(
            1j * rng.uniform(0, 2 * np.pi, 8))[None, :]
        assert abs(eigenvector_entropy(data) - base) < 1e-12


class TestElementEntropy:
    def test_identity(self):
        assert element_entropy(np.eye(7, dtype=complex)) == 0.0

    def test_fourier(self):
        assert abs(element_entropy(fourier_matrix(9)) - log(9)) < 1e-12

    def test_additive_over_kron(self):
        a = haar_unitary(4, RandomStream(32, 0))
        b = haar_unitary(8, RandomStream(32, 1))
        total = element_entropy(np.kron(a, b))
        assert abs(total - element_entropy(a) - element_entropy(b)) <= 1e-10

    def test_invariant_under_permutations(self):
        u = haar_unitary(6, RandomStream(33, 0))
        rng = np.random.default_rng(1)
        p = np.eye(6)[rng.permutation(6)]
        q = np.eye(6)[rng.permutation(6)]
        assert abs(element_entropy(p @ u @ q) - element_entropy(u)) < 1e-12


class TestMeanFormulas:
    def test_mean_random_vector_entropy_values(self):
        assert mean_random_vector_entropy(1) == 0.0
        assert mean_random_vector_entropy(2) == 0.5
        assert abs(mean_random_vector_entropy(4) - 13 / 12) < 1e-15

    def test_gap_to_log_approaches_one_minus_gamma(self):
        for n in (2, 64, 4096):
            assert mean_random_vector_entropy(n) < log(n)
        gap = log(100_000) - mean_random_vector_entropy(100_000)
        assert abs(gap - (1 - np.euler_gamma)) < 1e-4

    def test_page_mean(self):
        assert abs(page_mean_entropy(16, 16) - (0.5 * log(256) - 0.5 + 1 / 32)) < 1e-12
        assert page_mean_entropy(1, 5) == 0.0
        assert abs(page_mean_entropy(2, 4) - (LN2 - 0.125)) < 1e-15

    def test_page_equal_halves_identity(self):
        # ln sqrt(N) - (sqrt(N)-1)/(2 sqrt(N)) ~ ln(N)/2 - 1/2 for large N
        n_a = 64
        approx = 0.5 * log(n_a**2) - 0.5
        assert abs(page_mean_entropy(n_a, n_a) - approx) < 1 / (2 * n_a) + 1e-12

    def test_page_order_violation(self):
        with pytest.raises(OrderViolation):
            page_mean_entropy(8, 4)

    def test_mean_purity(self):
        assert mean_purity(2, 2) == 0.8
        assert mean_purity(1, 17) == 1.0
        assert mean_purity(3, 7) == mean_purity(7, 3)


def partial_trace_oracle(state, dims, keep):
    """Explicit index-sum partial trace."""
    from itertools import product as iproduct
    from math import prod
    k = len(dims)
    kept0 = sorted(p - 1 for p in keep)
    rest0 = [p for p in range(k) if p not in kept0]
    dim_a = prod(dims[p] for p in kept0)
    psi = np.asarray(state).reshape(dims)
    sigma = np.zeros((dim_a, dim_a), dtype=complex)
    kept_ranges = [range(dims[p]) for p in kept0]
    rest_ranges = [range(dims[p]) for p in rest0]
    for ai, a in enumerate(iproduct(*kept_ranges)):
        for bi, b in enumerate(iproduct(*kept_ranges)):
            for r in iproduct(*rest_ranges):
                ia = [0] * k
                ib = [0] * k
                for p, v in zip(kept0, a):
                    ia[p] = v
                for p, v in zip(kept0, b):
                    ib[p] = v
                for p, v in zip(rest0, r):
                    ia[p] = v
                    ib[p] = v
                sigma[ai, bi] += psi[tuple(ia)] * np.conj(psi[tuple(ib)])
    return sigma


class TestPartialTrace:
    def test_product_state_is_pure(self):
        psi = np.kron(np.array([1, 0]), random_state(3, 0))
        sigma = partial_trace(psi, (2, 3), keep=(1,))
        assert np.allclose(sigma, np.diag([1, 0]))
        assert abs(purity(sigma) - 1.0) < 1e-12

    def test_bell_state(self):
        bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
        sigma = partial_trace(bell, (2, 2), keep=(1,))
        assert np.allclose(sigma, np.eye(2) / 2)
        assert abs(von_neumann_entropy(sigma) - LN2) < 1e-12

    def test_three_qubit_matches_oracle(self):
        psi = random_state(8, 7)
        got = partial_trace(psi, (2, 2, 2), keep=(1, 3))
        expected = partial_trace_oracle(psi, (2, 2, 2), keep=(1, 3))
        assert np.abs(got - expected).max() <= 1e-12

    def test_schmidt_symmetry(self):
        psi = random_state(24, 8)
        ha = von_neumann_entropy(partial_trace(psi, (4, 6), keep=(1,)))
        hb = von_neumann_entropy(partial_trace(psi, (4, 6), keep=(2,)))
        assert abs(ha - hb) <= 1e-9

    def test_bad_keep_sets(self):
        psi = random_state(4, 9)
        with pytest.raises(EmptyKeepSet):
            partial_trace(psi, (2, 2), keep=())
        with pytest.raises(FullKeepSet):
            partial_trace(psi, (2, 2), keep=(1, 2))
        with pytest.raises(NormViolation):
            partial_trace(2 * psi, (2, 2), keep=(1,))


class TestVonNeumannAndPurity:
    def test_pure_state(self):
        sigma = np.diag([1.0, 0.0, 0.0]).astype(complex)
        assert von_neumann_entropy(sigma) == 0.0
        assert purity(sigma) == 1.0

    def test_maximally_mixed(self):
        d = 5
        sigma = np.eye(d) / d
        assert abs(von_neumann_entropy(sigma) - log(d)) < 1e-12
        assert abs(purity(sigma) - 1 / d) < 1e-15

    def test_bell_diagonal_weights(self):
        sigma = np.diag([0.5, 0.25, 0.125, 0.125]).astype(complex)
        assert abs(von_neumann_entropy(sigma) - 1.75 * LN2) < 1e-12
        assert abs(purity(sigma) - 11 / 32) < 1e-15

    def test_bounds_and_pure_iff(self):
        for seed in range(4):
            psi = random_state(12, 40 + seed)
            sigma = partial_trace(psi, (3, 4), keep=(1,))
            d = sigma.shape[0]
            assert 1 / d - 1e-12 <= purity(sigma) <= 1 + 1e-12
            assert -1e-12 <= von_neumann_entropy(sigma) <= log(d) + 1e-12


class TestProjection:
    def test_product_state_slice(self):
        a, c = random_state(2, 10), random_state(2, 11)
        basis = np.zeros(3)
        basis[1] = 1.0
        psi = np.kron(np.kron(a, basis), c)
        projected, weight = project_onto_basis(psi, (2, 3, 2), particle=2,
                                               basis_index=1)
        assert abs(weight - 1.0) < 1e-12
        assert np.allclose(projected, np.kron(a, c))

    def test_orthogonal_slice_is_null(self):
        a, c = random_state(2, 12), random_state(2, 13)
        basis = np.zeros(3)
        basis[1] = 1.0
        psi = np.kron(np.kron(a, basis), c)
        with pytest.raises(ZeroNormProjection):
            project_onto_basis(psi, (2, 3, 2), particle=2, basis_index=0)

    def test_weights_sum_to_one(self):
        psi = random_state(24, 14)
        total = 0.0
        for idx in range(3):
            _, weight = project_onto_basis(psi, (2, 3, 4), particle=2,
                                           basis_index=idx)
            total += weight
        assert abs(total - 1.0) < 1e-10
