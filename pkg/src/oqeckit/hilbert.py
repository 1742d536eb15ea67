"""Hilbert-space decomposition and projector algebra.

The full space is H = (H^A tensor H^B) + C_perp (orthogonal direct sum),
with a distinguished subspace H^B1 inside H^B.  The code block C is
ordered A-major: the composite index of |e_alpha> tensor |beta_k> is
alpha * dim_B + (k - 1), with alpha in [0, dim_A) and k in [1, dim_B].
The dim_perp trailing indices span C_perp, and H^B1 always occupies the
first dim_B1 basis slots of the B factor.  B-factor indices (k, l, i, j)
are 1-based throughout; A-factor and composite indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "SpaceDecomposition",
    "BlockProjectors",
    "projector_pkl",
    "block_projectors",
    "a_block",
    "basis_injection",
    "b1_column_indices",
    "embed_c_block",
    "c_block",
    "hermitian_basis",
    "fold_to_b1",
]


@dataclass(frozen=True)
class SpaceDecomposition:
    """Dimensions of H = (H^A tensor H^B) + C_perp with H^B1 inside H^B."""

    dim_A: int
    dim_B: int
    dim_B1: int
    dim_perp: int = 0

    def __post_init__(self):
        if self.dim_A < 1:
            raise ValueError(f"dim_A must be positive, got {self.dim_A}")
        if self.dim_B < 1:
            raise ValueError(f"dim_B must be positive, got {self.dim_B}")
        if not 1 <= self.dim_B1 <= self.dim_B:
            raise ValueError(
                f"dim_B1 must satisfy 1 <= dim_B1 <= dim_B, got {self.dim_B1}"
            )
        if self.dim_perp < 0:
            raise ValueError(f"dim_perp must be nonnegative, got {self.dim_perp}")

    @property
    def dim_C(self) -> int:
        """Dimension of the code block C = H^A tensor H^B."""
        return self.dim_A * self.dim_B

    @property
    def total_dim(self) -> int:
        return self.dim_A * self.dim_B + self.dim_perp

    def index(self, alpha: int, k: int) -> int:
        """Composite index of |e_alpha> tensor |beta_k| (alpha 0-based, k 1-based)."""
        return alpha * self.dim_B + (k - 1)


@dataclass(frozen=True)
class BlockProjectors:
    """Orthogonal projectors onto C, onto H^A tensor H^B1, and onto C_perp."""

    P_B: np.ndarray
    P_B1: np.ndarray
    P_B_perp: np.ndarray


def _check_b_index(decomp: SpaceDecomposition, k: int, name: str) -> None:
    if not 1 <= k <= decomp.dim_B:
        raise IndexError(
            f"{name}={k} out of range [1, {decomp.dim_B}] for the B factor"
        )


def projector_pkl(decomp: SpaceDecomposition, k: int, l: int) -> np.ndarray:
    """Partial isometry P_kl = I^A tensor |beta_k><beta_l| on the full space.

    Zero on all C_perp rows and columns.  k and l are 1-based B indices.
    """
    _check_b_index(decomp, k, "k")
    _check_b_index(decomp, l, "l")
    n = decomp.total_dim
    out = np.zeros((n, n), dtype=complex)
    for alpha in range(decomp.dim_A):
        out[decomp.index(alpha, k), decomp.index(alpha, l)] = 1.0
    return out


def block_projectors(decomp: SpaceDecomposition) -> BlockProjectors:
    """P_B (onto C), P_B1 (onto H^A tensor H^B1), and P_B_perp = I - P_B."""
    n = decomp.total_dim
    p_b = np.zeros((n, n), dtype=complex)
    p_b[: decomp.dim_C, : decomp.dim_C] = np.eye(decomp.dim_C)
    p_b1 = np.zeros((n, n), dtype=complex)
    for alpha in range(decomp.dim_A):
        for k in range(1, decomp.dim_B1 + 1):
            idx = decomp.index(alpha, k)
            p_b1[idx, idx] = 1.0
    return BlockProjectors(P_B=p_b, P_B1=p_b1, P_B_perp=np.eye(n) - p_b)


def a_block(E: np.ndarray, decomp: SpaceDecomposition, l: int, i: int) -> np.ndarray:
    """A-factor block of a full-space operator between two B basis states.

    Returns the dim_A x dim_A matrix G with
    G[alpha, alpha'] = <e_alpha, beta_l| E |e_alpha', beta_i>,
    so that P_kl E P_ij = G tensor |beta_k><beta_j| for any valid k, j.
    """
    E = np.asarray(E)
    n = decomp.total_dim
    if E.shape != (n, n):
        raise ValueError(f"operator shape {E.shape} does not match total_dim {n}")
    _check_b_index(decomp, l, "l")
    _check_b_index(decomp, i, "i")
    rows = slice(l - 1, decomp.dim_C, decomp.dim_B)
    cols = slice(i - 1, decomp.dim_C, decomp.dim_B)
    return E[rows, cols].copy()


def basis_injection(decomp: SpaceDecomposition, k: int) -> np.ndarray:
    """Isometry I^A tensor |beta_k> from H^A into the full space (total_dim x dim_A)."""
    _check_b_index(decomp, k, "k")
    out = np.zeros((decomp.total_dim, decomp.dim_A), dtype=complex)
    for alpha in range(decomp.dim_A):
        out[decomp.index(alpha, k), alpha] = 1.0
    return out


def b1_column_indices(decomp: SpaceDecomposition) -> np.ndarray:
    """Composite indices of the H^A tensor H^B1 basis states, in A-major order."""
    return np.array(
        [
            decomp.index(alpha, k)
            for alpha in range(decomp.dim_A)
            for k in range(1, decomp.dim_B1 + 1)
        ],
        dtype=int,
    )


def embed_c_block(block: np.ndarray, decomp: SpaceDecomposition) -> np.ndarray:
    """Embed a dim_C x dim_C matrix into the full space with zero C_perp part."""
    block = np.asarray(block, dtype=complex)
    if block.shape != (decomp.dim_C, decomp.dim_C):
        raise ValueError(
            f"block shape {block.shape} does not match dim_C {decomp.dim_C}"
        )
    out = np.zeros((decomp.total_dim, decomp.total_dim), dtype=complex)
    out[: decomp.dim_C, : decomp.dim_C] = block
    return out


def c_block(M: np.ndarray, decomp: SpaceDecomposition) -> np.ndarray:
    """The C x C sub-block of a full-space matrix."""
    M = np.asarray(M)
    n = decomp.total_dim
    if M.shape != (n, n):
        raise ValueError(f"matrix shape {M.shape} does not match total_dim {n}")
    return M[: decomp.dim_C, : decomp.dim_C].copy()


def hermitian_basis(dim: int) -> list[np.ndarray]:
    """Hermitian operator basis of dim x dim matrices (dim**2 elements).

    Diagonal matrix units |p><p| first, then for each p < q the symmetric
    combination |p><q| + |q><p| and the antisymmetric one
    i(|p><q| - |q><p|).  Spans all Hermitian matrices over the reals.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    basis = []
    for p in range(dim):
        unit = np.zeros((dim, dim), dtype=complex)
        unit[p, p] = 1.0
        basis.append(unit)
    for p in range(dim):
        for q in range(p + 1, dim):
            sym = np.zeros((dim, dim), dtype=complex)
            sym[p, q] = 1.0
            sym[q, p] = 1.0
            basis.append(sym)
            anti = np.zeros((dim, dim), dtype=complex)
            anti[p, q] = 1.0j
            anti[q, p] = -1.0j
            basis.append(anti)
    return basis


def fold_to_b1(decomp: SpaceDecomposition) -> tuple[SpaceDecomposition, np.ndarray]:
    """Reread the decomposition with B1 as the whole noisy factor.

    Everything outside H^A tensor H^B1 is folded into the complement.
    Returns the folded decomposition together with the basis permutation
    ``perm``: a matrix M in the original ordering reads
    ``M[np.ix_(perm, perm)]`` in the folded one.
    """
    d = decomp
    first = [
        d.index(alpha, k)
        for alpha in range(d.dim_A)
        for k in range(1, d.dim_B1 + 1)
    ]
    rest = [
        d.index(alpha, k)
        for alpha in range(d.dim_A)
        for k in range(d.dim_B1 + 1, d.dim_B + 1)
    ]
    perp = list(range(d.dim_C, d.total_dim))
    folded = SpaceDecomposition(
        dim_A=d.dim_A,
        dim_B=d.dim_B1,
        dim_B1=d.dim_B1,
        dim_perp=d.dim_perp + d.dim_A * (d.dim_B - d.dim_B1),
    )
    return folded, np.array(first + rest + perp, dtype=int)
