"""Kraus-form channels and completely positive maps.

Validation, application, composition, the block-twirl map, the two
recovery transformers between the fixed-B1 and enlarged-B settings, a
built-in demo channel, and seeded random channel generators.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .hilbert import (
    SpaceDecomposition,
    b1_column_indices,
    projector_pkl,
    hermitian_basis,
)
from .states import DensityOperator

__all__ = [
    "CPMap",
    "KrausChannel",
    "CptpCheck",
    "ChannelOnSpace",
    "validate_cptp",
    "apply",
    "compose",
    "identity_channel",
    "gamma_map",
    "build_eta1",
    "build_eta2",
    "demo_channel",
    "random_channel",
    "random_ampliate_channel",
    "reindex_channel",
    "max_apply_difference",
]

# Kraus products with Frobenius norm below this are dropped in compose();
# keeps operator counts bounded in iterated compositions.
_PRUNE_CUTOFF = 1e-14


class CPMap:
    """Completely positive map given by a finite list of equal-sized operators."""

    def __init__(self, operators):
        ops = [np.array(op, dtype=complex) for op in operators]
        if not ops:
            raise ValueError("a CP map needs at least one operator")
        shape = ops[0].shape
        if len(shape) != 2 or shape[0] != shape[1]:
            raise ValueError(f"operators must be square, got shape {shape}")
        for op in ops:
            if op.shape != shape:
                raise ValueError("all operators must share dimensions")
            if not np.all(np.isfinite(op)):
                raise ValueError("operator has non-finite entries")
            op.setflags(write=False)
        self._ops = tuple(ops)

    @property
    def operators(self) -> tuple[np.ndarray, ...]:
        return self._ops

    @property
    def dim(self) -> int:
        return self._ops[0].shape[0]

    def __len__(self) -> int:
        return len(self._ops)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim}, operators={len(self._ops)})"


class KrausChannel(CPMap):
    """Trace-preserving CP map: sum of E_a^dagger E_a equals the identity."""

    def __init__(self, operators, tol: float = 1e-9):
        super().__init__(operators)
        check = validate_cptp(self, tol)
        if not check.ok:
            raise ValueError(
                f"Kraus operators are not trace-preserving: "
                f"residual {check.residual:.3e} > tol {tol:.3e}"
            )


class CptpCheck(NamedTuple):
    ok: bool
    residual: float


class ChannelOnSpace(NamedTuple):
    channel: KrausChannel
    decomp: SpaceDecomposition


def validate_cptp(ch: CPMap, tol: float = 1e-9) -> CptpCheck:
    """Residual of sum E_a^dagger E_a against the identity."""
    acc = np.zeros((ch.dim, ch.dim), dtype=complex)
    for op in ch.operators:
        acc += op.conj().T @ op
    residual = float(np.linalg.norm(acc - np.eye(ch.dim)))
    return CptpCheck(ok=residual <= tol, residual=residual)


def _as_matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityOperator):
        return rho.matrix
    return np.asarray(rho, dtype=complex)


def apply(ch: CPMap, rho) -> np.ndarray:
    """Evaluate the map: sum_a E_a rho E_a^dagger.

    Accepts a DensityOperator or a bare matrix (the map is linear, so
    arbitrary operators are fine as inputs).
    """
    mat = _as_matrix(rho)
    if mat.shape != (ch.dim, ch.dim):
        raise ValueError(f"input shape {mat.shape} does not match channel dim {ch.dim}")
    out = np.zeros_like(mat)
    for op in ch.operators:
        out += op @ mat @ op.conj().T
    return out


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """Channel composition outer(inner(.)) with the product Kraus set."""
    if outer.dim != inner.dim:
        raise ValueError("cannot compose channels of different dimensions")
    products = []
    for r in outer.operators:
        for e in inner.operators:
            p = r @ e
            if np.linalg.norm(p) >= _PRUNE_CUTOFF:
                products.append(p)
    return KrausChannel(products)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel([np.eye(dim, dtype=complex)])


def gamma_map(decomp: SpaceDecomposition) -> CPMap:
    """Block-twirl CP map with operator set {P_kl : k <= dim_B1, l <= dim_B}.

    Completely positive but not trace-preserving.  Its output is always
    proportional to (some A operator) tensor I^B1, embedded in C.
    """
    ops = [
        projector_pkl(decomp, k, l)
        for k in range(1, decomp.dim_B1 + 1)
        for l in range(1, decomp.dim_B + 1)
    ]
    return CPMap(ops)


def _perp_dump_operators(decomp: SpaceDecomposition) -> list[np.ndarray]:
    # |alpha_m><alpha_m| for each trailing C_perp basis state
    ops = []
    n = decomp.total_dim
    for m in range(decomp.dim_C, n):
        op = np.zeros((n, n), dtype=complex)
        op[m, m] = 1.0
        ops.append(op)
    return ops


def build_eta1(decomp: SpaceDecomposition) -> KrausChannel:
    """Recovery transformer that spreads the B factor uniformly over all of B.

    Kraus set {P_kl / sqrt(r) : k, l in [1, r]} plus a diagonal dump on
    each C_perp basis state; r = dim_B.  Maps rho_A tensor sigma_B to
    rho_A tensor I^B / r.
    """
    r = decomp.dim_B
    scale = 1.0 / np.sqrt(r)
    ops = [
        scale * projector_pkl(decomp, k, l)
        for k in range(1, r + 1)
        for l in range(1, r + 1)
    ]
    ops.extend(_perp_dump_operators(decomp))
    return KrausChannel(ops)


def build_eta2(decomp: SpaceDecomposition) -> KrausChannel:
    """Recovery transformer that funnels the B factor back into B1.

    Kraus set {P_kl / sqrt(r1) : k in [1, r1], l in [1, r]} plus the
    C_perp dumps.  Maps rho_A tensor sigma_B to rho_A tensor I^B1 / r1.
    """
    r1 = decomp.dim_B1
    scale = 1.0 / np.sqrt(r1)
    ops = [
        scale * projector_pkl(decomp, k, l)
        for k in range(1, r1 + 1)
        for l in range(1, decomp.dim_B + 1)
    ]
    ops.extend(_perp_dump_operators(decomp))
    return KrausChannel(ops)


def demo_channel(gamma: float) -> ChannelOnSpace:
    """Built-in two-qubit channel with a protected A factor.

    The B qubit cycles |0> -> |1> -> |0|; while B drops from |1> the A
    qubit suffers amplitude damping with strength gamma.  States with B
    prepared in |0> come out as rho_A tensor |1><1| exactly, so A is
    protected when the noisy factor is allowed to grow from span{|0>}
    to the whole B qubit.

    Kraus operators: F0 tensor |0><1|, F1 tensor |0><1|, I2 tensor |1><0|
    with F0 = diag(1, sqrt(1-gamma)) and F1 = sqrt(gamma) |0><1|.
    """
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie strictly between 0 and 1, got {gamma}")
    f0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
    f1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    i2 = np.eye(2, dtype=complex)
    lower = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |0><1|
    raise_ = lower.conj().T  # |1><0|
    ops = [np.kron(f0, lower), np.kron(f1, lower), np.kron(i2, raise_)]
    decomp = SpaceDecomposition(dim_A=2, dim_B=2, dim_B1=1, dim_perp=0)
    return ChannelOnSpace(channel=KrausChannel(ops, tol=1e-12), decomp=decomp)


def _haar_isometry(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    if rows < cols:
        raise ValueError(f"no isometry from dimension {cols} into {rows}")
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(g)
    # Phase fix keeps the column distribution Haar.
    diag = np.diagonal(r).copy()
    diag[diag == 0] = 1.0
    return q * (diag / np.abs(diag))


def random_channel(dim: int, kraus_count: int, seed) -> KrausChannel:
    """Haar-random channel: a random isometry sliced into Kraus blocks."""
    if dim < 1 or kraus_count < 1:
        raise ValueError("dim and kraus_count must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    iso = _haar_isometry(dim * kraus_count, dim, rng)
    ops = [iso[a * dim : (a + 1) * dim, :] for a in range(kraus_count)]
    return KrausChannel(ops)


def random_ampliate_channel(
    decomp: SpaceDecomposition, env_dim: int, seed
) -> KrausChannel:
    """Random channel that protects the A factor on B1 inputs by construction.

    On H^A tensor H^B1 every Kraus operator acts as I^A tensor M_a, where
    the M_a are slices of a random isometry from H^B1 into H^B tensor a
    size-env_dim environment.  This makes the A-block of every Kraus
    operator proportional to the identity on B1 columns and keeps those
    columns out of C_perp, both exactly.  The remaining columns are
    completed to a random stacked isometry so the whole map is
    trace-preserving.
    """
    d = decomp
    if env_dim < 1:
        raise ValueError("env_dim must be positive")
    if env_dim * d.dim_B < d.dim_B1:
        raise ValueError(
            f"infeasible dimensions: env_dim * dim_B = {env_dim * d.dim_B} "
            f"< dim_B1 = {d.dim_B1}"
        )
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = d.total_dim
    iso = _haar_isometry(env_dim * d.dim_B, d.dim_B1, rng)

    stacked = np.zeros((env_dim * n, n), dtype=complex)
    b1_cols = b1_column_indices(d)
    for a in range(env_dim):
        m_a = iso[a * d.dim_B : (a + 1) * d.dim_B, :]
        for alpha in range(d.dim_A):
            rows = a * n + alpha * d.dim_B + np.arange(d.dim_B)
            for k in range(1, d.dim_B1 + 1):
                stacked[rows, d.index(alpha, k)] = m_a[:, k - 1]

    other_cols = np.array(sorted(set(range(n)) - set(b1_cols.tolist())), dtype=int)
    if other_cols.size:
        structured = stacked[:, b1_cols]
        g = rng.standard_normal((env_dim * n, other_cols.size)) + 1j * rng.standard_normal(
            (env_dim * n, other_cols.size)
        )
        g -= structured @ (structured.conj().T @ g)
        q, _ = np.linalg.qr(g)
        stacked[:, other_cols] = q[:, : other_cols.size]

    ops = [stacked[a * n : (a + 1) * n, :] for a in range(env_dim)]
    return KrausChannel(ops)


def reindex_channel(ch: CPMap, perm: np.ndarray):
    """Conjugate every operator by the basis permutation ``perm``.

    ``perm`` lists, for each new index, the original index it came from
    (the convention returned by ``fold_to_b1``).
    """
    perm = np.asarray(perm, dtype=int)
    if perm.shape != (ch.dim,) or sorted(perm.tolist()) != list(range(ch.dim)):
        raise ValueError("perm must be a permutation of the channel's indices")
    ops = [op[np.ix_(perm, perm)] for op in ch.operators]
    if isinstance(ch, KrausChannel):
        return KrausChannel(ops)
    return CPMap(ops)


def max_apply_difference(ch_a: CPMap, ch_b: CPMap) -> float:
    """Largest Frobenius disagreement of the two maps over an operator basis.

    Kraus decompositions are non-unique, so channel equality is defined as
    agreement of apply() on the dim**2 Hermitian matrix units.
    """
    if ch_a.dim != ch_b.dim:
        raise ValueError("channels act on different dimensions")
    worst = 0.0
    for h in hermitian_basis(ch_a.dim):
        diff = float(np.linalg.norm(apply(ch_a, h) - apply(ch_b, h)))
        worst = max(worst, diff)
    return worst
