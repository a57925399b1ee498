"""Entropy functionals, partial traces, projections, and ensemble means.

All entropies are in nats; the harmonic-sum mean psi(N+1) - psi(2) of a
random complex vector only holds with the natural logarithm, which fixes
the log base everywhere. Conversion to bits is a display concern.
"""

from __future__ import annotations

from math import log
from typing import Sequence

import numpy as np

LN2 = log(2.0)

#: eigenvalues of a reduced state may dip this far below zero before we
#: treat the state as invalid rather than as rounding noise
EIGENVALUE_FLOOR = -1e-10


class NotAProbabilityVector(ValueError):
    pass


class EmptyKeepSet(ValueError):
    pass


class FullKeepSet(ValueError):
    pass


class NormViolation(ValueError):
    pass


class ZeroNormProjection(ValueError):
    pass


class OrderViolation(ValueError):
    pass


class InvalidReducedState(ValueError):
    pass


def _plogp(p: np.ndarray) -> np.ndarray:
    # 0 * log 0 := 0
    out = np.zeros_like(p)
    positive = p > 0
    out[positive] = p[positive] * np.log(p[positive])
    return out


def shannon_entropy(p: Sequence[float]) -> float:
    """-sum p_i ln p_i for a probability vector (entries >= 0, sum 1)."""
    arr = np.asarray(p, dtype=float)
    if arr.min(initial=0.0) < -1e-12:
        raise NotAProbabilityVector(f"negative entry {arr.min()}")
    if abs(arr.sum() - 1.0) > 1e-8:
        raise NotAProbabilityVector(f"entries sum to {arr.sum()}, expected 1")
    return float(-_plogp(np.clip(arr, 0.0, None)).sum())


def eigenvector_entropy(spec) -> float:
    """Average Shannon entropy of the eigenvector components,
    -(1/N) sum_{i,j} |chi_ji|^2 ln |chi_ji|^2."""
    weights = np.abs(spec.vectors) ** 2
    return float(-_plogp(weights).sum() / spec.dim)


def element_entropy(u: np.ndarray) -> float:
    """Same functional applied to the matrix entries themselves; additive
    over tensor products and so sensitive to graph structure."""
    weights = np.abs(np.asarray(u)) ** 2
    return float(-_plogp(weights).sum() / u.shape[0])


def mean_random_vector_entropy(dim: int) -> float:
    """Expected component entropy of a Haar-random unit vector:
    psi(N+1) - psi(2) = sum_{j=2}^{N} 1/j."""
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    return float(np.sum(1.0 / np.arange(2, dim + 1)))


def page_mean_entropy(dim_a: int, dim_b: int) -> float:
    """Page-type mean entanglement entropy of random bipartite pure states,
    ln N_A - (N_A - 1) / (2 N_B), valid for N_B >= N_A."""
    if dim_a < 1 or dim_b < 1:
        raise ValueError("subsystem dimensions must be >= 1")
    if dim_a > dim_b:
        raise OrderViolation(
            f"requires N_B >= N_A; swap the arguments ({dim_a} > {dim_b})")
    return log(dim_a) - (dim_a - 1) / (2.0 * dim_b)


def mean_purity(dim_a: int, dim_b: int) -> float:
    """Mean purity of the reduced state of random bipartite pure states:
    (N_A + N_B) / (N_A N_B + 1)."""
    if dim_a < 1 or dim_b < 1:
        raise ValueError("subsystem dimensions must be >= 1")
    return (dim_a + dim_b) / (dim_a * dim_b + 1.0)


def partial_trace(state: np.ndarray, dims: Sequence[int], keep) -> np.ndarray:
    """Reduced density matrix of a pure state over the kept particles.

    ``keep`` holds 1-based particle indices (a non-empty proper subset);
    rows/columns follow the multi-index order of the kept particles.
    """
    dims = tuple(dims)
    state = np.asarray(state).ravel()
    keep = tuple(sorted(set(keep)))
    if not keep:
        raise EmptyKeepSet("keep set must name at least one particle")
    if len(keep) >= len(dims):
        raise FullKeepSet("keep set must be a proper subset of the particles")
    if any(p < 1 or p > len(dims) for p in keep):
        raise IndexError(f"keep set {keep} outside 1..{len(dims)}")
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-10:
        raise NormViolation(f"state norm {norm} is not 1")

    kept0 = [p - 1 for p in keep]
    rest0 = [p for p in range(len(dims)) if p not in kept0]
    psi = state.reshape(dims)
    psi = np.transpose(psi, kept0 + rest0)
    dim_a = int(np.prod([dims[p] for p in kept0]))
    m = psi.reshape(dim_a, -1)
    sigma = m @ m.conj().T
    return (sigma + sigma.conj().T) / 2.0


def _validated_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    sigma = np.asarray(sigma)
    if np.abs(sigma - sigma.conj().T).max() > 1e-12:
        raise InvalidReducedState("matrix is not Hermitian")
    if abs(np.trace(sigma).real - 1.0) > 1e-10:
        raise InvalidReducedState(f"trace {np.trace(sigma)} is not 1")
    eigs = np.linalg.eigvalsh(sigma)
    if eigs.min() < EIGENVALUE_FLOOR:
        raise InvalidReducedState(f"eigenvalue {eigs.min()} below floor")
    return np.clip(eigs, 0.0, None)


def von_neumann_entropy(sigma: np.ndarray) -> float:
    """-Tr sigma ln sigma via the eigenvalues, tiny negatives clamped to 0."""
    return float(-_plogp(_validated_eigenvalues(sigma)).sum())


def purity(sigma: np.ndarray) -> float:
    """Tr sigma^2, computed as the squared Frobenius norm."""
    sigma = np.asarray(sigma)
    return float(np.sum(np.abs(sigma) ** 2))


def project_onto_basis(state: np.ndarray, dims: Sequence[int], particle: int,
                       basis_index: int) -> tuple[np.ndarray, float]:
    """Project one particle onto a computational basis vector.

    Returns the renormalized state of the remaining particles and the
    squared norm of the slice (the outcome weight); weights over all
    basis_index values sum to 1. A numerically null slice raises
    ZeroNormProjection and should be skipped by averaging callers.
    """
    dims = tuple(dims)
    if not 1 <= particle <= len(dims):
        raise IndexError(f"particle {particle} outside 1..{len(dims)}")
    if not 0 <= basis_index < dims[particle - 1]:
        raise IndexError(f"basis index {basis_index} outside local dimension")
    psi = np.asarray(state).ravel().reshape(dims)
    slice_ = np.take(psi, basis_index, axis=particle - 1).ravel()
    weight = float(np.sum(np.abs(slice_) ** 2))
    if weight < 1e-14:
        raise ZeroNormProjection(f"slice weight {weight} is numerically null")
    return slice_ / np.sqrt(weight), weight


def nats_to_bits(value: float) -> float:
    return value / LN2
