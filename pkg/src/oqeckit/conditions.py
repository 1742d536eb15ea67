"""Decision procedures for noiseless-subsystem and correctability conditions.

Every checker reduces a quantified operator identity to a finite family of
A-factor blocks that must be proportional to the identity, records the
proportionality coefficients, and reports the worst Frobenius residual
with a witness for the first violating block.  A sampling oracle provides
an independent brute-force cross-check of the algebraic checkers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channels import CPMap, KrausChannel, apply, compose, reindex_channel
from .hilbert import (
    SpaceDecomposition,
    a_block,
    b1_column_indices,
    embed_c_block,
    fold_to_b1,
    hermitian_basis,
)
from .states import (
    DensityOperator,
    factor_product,
    partial_trace_A,
    random_density,
    support,
)

__all__ = [
    "Witness",
    "ConditionReport",
    "QuadrupleReport",
    "OracleReport",
    "SupportCase",
    "check_ampliate_noiseless",
    "check_normal_noiseless",
    "check_correctable",
    "check_quadruple",
    "bruteforce_noiseless_oracle",
    "classify_support_case",
]


@dataclass(frozen=True)
class Witness:
    """First violating block: its index tuple and Frobenius residual."""

    indices: tuple
    residual: float


@dataclass(frozen=True)
class ConditionReport:
    """Verdict, proportionality coefficients, worst residual, and witness.

    ``witness`` is present exactly when the condition fails.  Keys of
    ``lambda_table`` are (a, l, i) or (a, b, k, l) tuples with 0-based
    Kraus index a (and b) and 1-based B-factor indices.
    """

    holds: bool
    lambda_table: dict
    max_residual: float
    witness: Witness | None


@dataclass(frozen=True)
class QuadrupleReport:
    """Outcome of the recovery-after-error correctability test."""

    holds: bool
    sigma: np.ndarray | None
    residual: float


@dataclass(frozen=True)
class OracleReport:
    """Outcome of the brute-force sampling oracle."""

    holds: bool
    worst_residual: float
    per_basis_sigmas: tuple


class SupportCase(enum.Enum):
    """Relation between the supports of the fixed input and output B states."""

    A = "a"  # the input state already spans all of B
    B = "b"  # strict subspace, and the output stays inside it
    C = "c"  # strict subspace that the output escapes


def _identity_fit(block: np.ndarray, dim_A: int) -> tuple[complex, float]:
    # Least-squares coefficient for block ~ coeff * I and the fit residual.
    coeff = complex(np.trace(block)) / dim_A
    residual = float(np.linalg.norm(block - coeff * np.eye(dim_A)))
    return coeff, residual


def check_ampliate_noiseless(
    E: KrausChannel, decomp: SpaceDecomposition, tol: float = 1e-9
) -> ConditionReport:
    """Decide whether the A factor is noiseless for B1 inputs with outputs in B.

    Two families of blocks must vanish or be proportional to I^A:
    every A-block of every Kraus operator taken between a B1 column
    (i <= dim_B1) and any B row (l <= dim_B) must be a multiple of the
    identity, and the C_perp rows of the B1 columns must vanish.
    """
    d = decomp
    if E.dim != d.total_dim:
        raise ValueError(f"channel dim {E.dim} does not match total_dim {d.total_dim}")
    lam: dict = {}
    worst = 0.0
    witness = None
    for a, op in enumerate(E.operators):
        for l in range(1, d.dim_B + 1):
            for i in range(1, d.dim_B1 + 1):
                coeff, residual = _identity_fit(a_block(op, d, l, i), d.dim_A)
                lam[(a, l, i)] = coeff
                worst = max(worst, residual)
                if residual > tol and witness is None:
                    witness = Witness(indices=(a, l, i), residual=residual)
    if d.dim_perp:
        cols = b1_column_indices(d)
        for a, op in enumerate(E.operators):
            residual = float(np.linalg.norm(op[d.dim_C :, cols]))
            worst = max(worst, residual)
            if residual > tol and witness is None:
                witness = Witness(indices=(a,), residual=residual)
    return ConditionReport(
        holds=worst <= tol, lambda_table=lam, max_residual=worst, witness=witness
    )


def check_normal_noiseless(
    E: KrausChannel, decomp: SpaceDecomposition, tol: float = 1e-9
) -> ConditionReport:
    """Decide the fixed-decomposition condition: B1 inputs must stay in B1.

    Equivalent to the ampliate check on the folded decomposition where B1
    is the whole noisy factor and everything else joins the complement;
    the basis is reordered internally so B1 columns stay contiguous.
    """
    folded, perm = fold_to_b1(decomp)
    return check_ampliate_noiseless(reindex_channel(E, perm), folded, tol)


def check_correctable(
    E: KrausChannel, decomp: SpaceDecomposition, tol: float = 1e-9
) -> ConditionReport:
    """Decide whether some recovery exists for A-factor data on B1 inputs.

    For every Kraus pair (a, b) and every k, l <= dim_B1, the A-block of
    E_a^dagger E_b between B1 columns k and l must be proportional to the
    identity; the coefficients form the correctability table.
    """
    d = decomp
    if E.dim != d.total_dim:
        raise ValueError(f"channel dim {E.dim} does not match total_dim {d.total_dim}")
    lam: dict = {}
    worst = 0.0
    witness = None
    adjoints = [op.conj().T for op in E.operators]
    for a in range(len(E.operators)):
        for b in range(len(E.operators)):
            product = adjoints[a] @ E.operators[b]
            for k in range(1, d.dim_B1 + 1):
                for l in range(1, d.dim_B1 + 1):
                    coeff, residual = _identity_fit(a_block(product, d, k, l), d.dim_A)
                    lam[(a, b, k, l)] = coeff
                    worst = max(worst, residual)
                    if residual > tol and witness is None:
                        witness = Witness(indices=(a, b, k, l), residual=residual)
    return ConditionReport(
        holds=worst <= tol, lambda_table=lam, max_residual=worst, witness=witness
    )


def _uniform_b1_state(decomp: SpaceDecomposition) -> np.ndarray:
    out = np.zeros((decomp.dim_B, decomp.dim_B), dtype=complex)
    for k in range(decomp.dim_B1):
        out[k, k] = 1.0 / decomp.dim_B1
    return out


def _density_defect(matrix: np.ndarray) -> float:
    herm = float(np.linalg.norm(matrix - matrix.conj().T))
    min_eig = float(np.linalg.eigvalsh((matrix + matrix.conj().T) / 2).min())
    trace_err = float(abs(np.trace(matrix) - 1.0))
    return max(herm, -min_eig, trace_err, 0.0)


def check_quadruple(
    R: KrausChannel, E: KrausChannel, decomp: SpaceDecomposition, tol: float = 1e-9
) -> QuadrupleReport:
    """Test whether recovery R after error E restores every A state.

    The composed map must send rho_A tensor (uniform B1 state) to
    rho_A tensor sigma for one fixed density operator sigma on B.  By
    linearity the universally quantified rho_A is replaced by a spanning
    set: the normalized identity plus the Hermitian matrix units of the
    A factor.  sigma is extracted from the identity input and every other
    output is compared against it.
    """
    d = decomp
    if R.dim != d.total_dim or E.dim != d.total_dim:
        raise ValueError("channel dims do not match the decomposition")
    composed = compose(R, E)
    u_b1 = _uniform_b1_state(d)
    inputs = [np.eye(d.dim_A, dtype=complex) / d.dim_A] + hermitian_basis(d.dim_A)

    outputs = [
        apply(composed, embed_c_block(np.kron(h, u_b1), d)) for h in inputs
    ]
    sigma = partial_trace_A(outputs[0][: d.dim_C, : d.dim_C], d)
    worst = 0.0
    for h, out in zip(inputs, outputs):
        expected = embed_c_block(np.kron(h, sigma), d)
        worst = max(worst, float(np.linalg.norm(out - expected)))
    sigma_defect = _density_defect(sigma)
    worst = max(worst, sigma_defect)
    return QuadrupleReport(holds=worst <= tol, sigma=sigma, residual=worst)


def _embed_b_state(rho_b1: np.ndarray, decomp: SpaceDecomposition) -> np.ndarray:
    out = np.zeros((decomp.dim_B, decomp.dim_B), dtype=complex)
    r1 = rho_b1.shape[0]
    out[:r1, :r1] = rho_b1
    return out


def bruteforce_noiseless_oracle(
    E: KrausChannel,
    decomp: SpaceDecomposition,
    samples: int = 20,
    seed=0,
    tol: float = 1e-9,
) -> OracleReport:
    """Sampling cross-check of the ampliate-noiseless condition.

    Draws random (rho_A, rho_B1) pairs, pushes the product state through
    the channel, and requires each output to stay inside C and factor as
    rho_A tensor sigma_B with the A factor intact.  Each B1 basis state is
    additionally checked to produce an A-independent sigma across three
    random A states.  A channel that survives sampling is re-checked with
    the algebraic condition before being reported as noiseless, since
    samples alone cannot certify a universally quantified statement.
    """
    d = decomp
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    worst = 0.0

    def push(rho_a: np.ndarray, rho_b: np.ndarray) -> tuple[np.ndarray, float]:
        state = embed_c_block(np.kron(rho_a, rho_b), d)
        out = apply(E, state)
        block = out[: d.dim_C, : d.dim_C]
        leak = float(abs(1.0 - np.trace(block).real))
        return block, leak

    for _ in range(samples):
        rho_a = random_density(d.dim_A, rng).matrix
        rho_b1 = random_density(d.dim_B1, rng).matrix
        block, leak = push(rho_a, _embed_b_state(rho_b1, d))
        fac = factor_product(block, d, tol)
        mismatch = float(np.linalg.norm(fac.rho_A - rho_a))
        worst = max(worst, leak, fac.residual, mismatch)

    per_basis = []
    for k in range(decomp.dim_B1):
        basis_state = np.zeros((d.dim_B, d.dim_B), dtype=complex)
        basis_state[k, k] = 1.0
        sigmas = []
        for _ in range(3):
            rho_a = random_density(d.dim_A, rng).matrix
            block, leak = push(rho_a, basis_state)
            fac = factor_product(block, d, tol)
            mismatch = float(np.linalg.norm(fac.rho_A - rho_a))
            worst = max(worst, leak, fac.residual, mismatch)
            sigmas.append(fac.sigma_B)
        for later in sigmas[1:]:
            worst = max(worst, float(np.linalg.norm(later - sigmas[0])))
        per_basis.append(sigmas[0])

    holds = worst <= tol
    if holds:
        algebraic = check_ampliate_noiseless(E, d, tol)
        if not algebraic.holds:
            holds = False
            worst = max(worst, algebraic.max_residual)
    return OracleReport(
        holds=holds, worst_residual=worst, per_basis_sigmas=tuple(per_basis)
    )


def classify_support_case(
    rho1: DensityOperator,
    rho2: DensityOperator,
    decomp: SpaceDecomposition,
    tol: float = 1e-9,
) -> SupportCase:
    """Classify how the output support sits relative to the input support.

    Both states live on the B factor.  Case A: the input support is all of
    B.  Case B: it is a strict subspace that contains the output support.
    Case C: the output support escapes the input support.
    """
    if rho1.dim != decomp.dim_B or rho2.dim != decomp.dim_B:
        raise ValueError("states must live on the B factor")
    sup1 = support(rho1, tol)
    if sup1.dimension == decomp.dim_B:
        return SupportCase.A
    sup2 = support(rho2, tol)
    outside = (np.eye(decomp.dim_B) - sup1.projector()) @ sup2.projector()
    if float(np.linalg.norm(outside, 2)) <= tol:
        return SupportCase.B
    return SupportCase.C
