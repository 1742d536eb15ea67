"""Density operators on the full space and its factors.

Validation, supports, partial traces, product-state factorization, and
reproducible random sampling.  Matrices are dense complex numpy arrays;
all equality checks are residual-norm checks in the Frobenius norm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hilbert import SpaceDecomposition

__all__ = [
    "DensityOperator",
    "Subspace",
    "CRestriction",
    "FactorResult",
    "support",
    "tensor",
    "partial_trace_A",
    "partial_trace_B",
    "restrict_to_C",
    "factor_product",
    "random_density",
]


class DensityOperator:
    """Hermitian, positive-semidefinite, unit-trace complex matrix.

    Raises ValueError when any of the three invariants is violated beyond
    ``tol``.  The stored matrix is read-only.
    """

    def __init__(self, matrix: np.ndarray, tol: float = 1e-9):
        m = np.array(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density operator must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("density operator has non-finite entries")
        herm = np.linalg.norm(m - m.conj().T)
        if herm > tol:
            raise ValueError(f"not Hermitian: residual {herm:.3e} > tol {tol:.3e}")
        min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
        if min_eig < -tol:
            raise ValueError(f"not positive semidefinite: min eigenvalue {min_eig:.3e}")
        trace_err = abs(np.trace(m) - 1.0)
        if trace_err > tol:
            raise ValueError(f"trace differs from 1 by {trace_err:.3e}")
        m.setflags(write=False)
        self._matrix = m

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim})"


@dataclass(frozen=True)
class Subspace:
    """Subspace of C^ambient_dim given by an orthonormal column basis."""

    ambient_dim: int
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis)
        if b.ndim != 2 or b.shape[0] != self.ambient_dim:
            raise ValueError(f"basis shape {b.shape} inconsistent with ambient dim")
        gram = b.conj().T @ b
        if np.linalg.norm(gram - np.eye(b.shape[1])) > 1e-9:
            raise ValueError("basis columns are not orthonormal")

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T


@dataclass(frozen=True)
class CRestriction:
    """C-block of a state plus the probability weight lost to C_perp."""

    block: np.ndarray
    leak: float


@dataclass(frozen=True)
class FactorResult:
    """Outcome of testing a C-state for rho_A tensor sigma_B structure."""

    ok: bool
    rho_A: np.ndarray
    sigma_B: np.ndarray
    residual: float


def support(rho: DensityOperator, tol: float = 1e-9) -> Subspace:
    """Span of the eigenvectors of rho with eigenvalue above ``tol``."""
    eigvals, eigvecs = np.linalg.eigh(rho.matrix)
    keep = eigvals > tol
    return Subspace(ambient_dim=rho.dim, basis=eigvecs[:, keep])


def tensor(rho_left: DensityOperator, rho_right: DensityOperator) -> DensityOperator:
    """Kronecker product state, left factor major."""
    return DensityOperator(np.kron(rho_left.matrix, rho_right.matrix))


def partial_trace_A(rho_C: np.ndarray, decomp: SpaceDecomposition) -> np.ndarray:
    """Trace out the A factor of a C-block matrix, leaving dim_B x dim_B."""
    rho_C = np.asarray(rho_C, dtype=complex)
    if rho_C.shape != (decomp.dim_C, decomp.dim_C):
        raise ValueError(
            f"expected a {decomp.dim_C} x {decomp.dim_C} C-block, got {rho_C.shape}"
        )
    reshaped = rho_C.reshape(decomp.dim_A, decomp.dim_B, decomp.dim_A, decomp.dim_B)
    return np.trace(reshaped, axis1=0, axis2=2)


def partial_trace_B(rho_C: np.ndarray, decomp: SpaceDecomposition) -> np.ndarray:
    """Trace out the B factor of a C-block matrix, leaving dim_A x dim_A."""
    rho_C = np.asarray(rho_C, dtype=complex)
    if rho_C.shape != (decomp.dim_C, decomp.dim_C):
        raise ValueError(
            f"expected a {decomp.dim_C} x {decomp.dim_C} C-block, got {rho_C.shape}"
        )
    reshaped = rho_C.reshape(decomp.dim_A, decomp.dim_B, decomp.dim_A, decomp.dim_B)
    return np.trace(reshaped, axis1=1, axis2=3)


def restrict_to_C(rho: DensityOperator, decomp: SpaceDecomposition) -> CRestriction:
    """C-block of a full-space state and the weight leaked to C_perp."""
    if rho.dim != decomp.total_dim:
        raise ValueError(f"state dim {rho.dim} does not match total_dim")
    block = rho.matrix[: decomp.dim_C, : decomp.dim_C].copy()
    leak = float(1.0 - np.trace(block).real)
    return CRestriction(block=block, leak=leak)


def factor_product(
    rho_C: np.ndarray, decomp: SpaceDecomposition, tol: float = 1e-9
) -> FactorResult:
    """Decide whether a C-block state is rho_A tensor sigma_B.

    The candidate factors are the partial traces; when the state is a
    product these are the exact factors.  The residual is the Frobenius
    distance to the candidate product, and ``ok`` reflects residual <= tol.
    """
    rho_C = np.asarray(rho_C, dtype=complex)
    rho_a = partial_trace_B(rho_C, decomp)
    sigma_b = partial_trace_A(rho_C, decomp)
    # Normalize one factor so the product carries the state's full trace once.
    total = np.trace(rho_C)
    if abs(total) > 1e-300:
        candidate = np.kron(rho_a, sigma_b) / total
    else:
        candidate = np.kron(rho_a, sigma_b)
    residual = float(np.linalg.norm(rho_C - candidate))
    return FactorResult(ok=residual <= tol, rho_A=rho_a, sigma_B=sigma_b, residual=residual)


def random_density(dim: int, seed) -> DensityOperator:
    """Random full-rank density operator from the Ginibre ensemble.

    ``seed`` may be an integer or a numpy Generator; an integer gives a
    deterministic result.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return DensityOperator(rho / np.trace(rho).real)
