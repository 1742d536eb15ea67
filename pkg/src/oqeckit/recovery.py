"""Recovery synthesis from correctability coefficients.

The correctability coefficients of a channel form a Hermitian PSD Gram
matrix over the composite (Kraus index, B1 basis index).  Diagonalizing
it yields isometries that carry the protected A factor into orthogonal
error sectors; reversing each isometry onto a fixed B1 state gives a
recovery channel.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel
from .conditions import ConditionReport, check_correctable
from .hilbert import SpaceDecomposition, basis_injection

__all__ = [
    "GramMatrix",
    "RankProfile",
    "CorrectabilityError",
    "build_gram",
    "rank_profile",
    "recovery_isometries",
    "synthesize_recovery",
]


class CorrectabilityError(ValueError):
    """Raised when a channel fails the correctability condition."""

    def __init__(self, report: ConditionReport):
        self.report = report
        witness = report.witness
        detail = (
            f"block {witness.indices} has residual {witness.residual:.3e}"
            if witness is not None
            else f"max residual {report.max_residual:.3e}"
        )
        super().__init__(f"channel is not correctable: {detail}")


@dataclass(frozen=True)
class GramMatrix:
    """Correctability coefficients over the composite index (a, k).

    Entry (a * dim_B1 + k - 1, b * dim_B1 + l - 1) holds the coefficient
    for the Kraus pair (a, b) and B1 indices (k, l).  Hermitian, positive
    semidefinite, with trace dim_B1.
    """

    matrix: np.ndarray
    kraus_count: int
    dim_B1: int
    source_tol: float

    def __post_init__(self):
        m = np.asarray(self.matrix)
        n = self.kraus_count * self.dim_B1
        if m.shape != (n, n):
            raise ValueError(f"Gram matrix shape {m.shape} does not match size {n}")
        herm = float(np.linalg.norm(m - m.conj().T))
        if herm > 1e-12:
            raise ValueError(f"Gram matrix not Hermitian: residual {herm:.3e}")
        min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2).min())
        if min_eig < -1e-10:
            raise ValueError(f"Gram matrix not PSD: min eigenvalue {min_eig:.3e}")
        trace_err = float(abs(np.trace(m).real - self.dim_B1))
        if trace_err > 1e-10:
            raise ValueError(f"Gram trace differs from dim_B1 by {trace_err:.3e}")


@dataclass(frozen=True)
class RankProfile:
    """Numerical rank and descending spectrum of a Gram matrix."""

    rank: int
    eigenvalues: tuple


def build_gram(
    E: KrausChannel, decomp: SpaceDecomposition, tol: float = 1e-9
) -> GramMatrix:
    """Assemble the correctability Gram matrix, verifying the condition first."""
    report = check_correctable(E, decomp, tol)
    if not report.holds:
        raise CorrectabilityError(report)
    r1 = decomp.dim_B1
    count = len(E.operators)
    gram = np.zeros((count * r1, count * r1), dtype=complex)
    for (a, b, k, l), value in report.lambda_table.items():
        gram[a * r1 + (k - 1), b * r1 + (l - 1)] = value
    return GramMatrix(matrix=gram, kraus_count=count, dim_B1=r1, source_tol=tol)


def rank_profile(g: GramMatrix, tol: float = 1e-9) -> RankProfile:
    """Eigenvalues sorted descending and the count above ``tol``."""
    eigenvalues = np.linalg.eigvalsh(g.matrix)[::-1]
    return RankProfile(
        rank=int(np.sum(eigenvalues > tol)),
        eigenvalues=tuple(float(v) for v in eigenvalues),
    )


def _error_injections(E: KrausChannel, decomp: SpaceDecomposition) -> list[np.ndarray]:
    # T_(a,k): |psi> -> E_a(|psi> tensor |beta_k>), ordered by a * dim_B1 + (k-1).
    return [
        op @ basis_injection(decomp, k)
        for op in E.operators
        for k in range(1, decomp.dim_B1 + 1)
    ]


def recovery_isometries(
    E: KrausChannel, decomp: SpaceDecomposition, tol: float = 1e-9
) -> tuple[list[float], list[np.ndarray]]:
    """Spectral decomposition of the Kraus action on uniform-B1 inputs.

    Returns eigenvalues d_m (descending, above ``tol``) and isometries S_m
    from H^A into the full space with S_m^dagger S_n = delta_mn I^A; they
    satisfy sum_mu T_mu rho T_mu^dagger = sum_m d_m S_m rho S_m^dagger.
    """
    gram = build_gram(E, decomp, tol)
    eigenvalues, vectors = np.linalg.eigh(gram.matrix)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    vectors = vectors[:, order]

    small = [v for v in eigenvalues if tol / 10 < v <= tol]
    if small:
        warnings.warn(
            f"Gram eigenvalues {small} fall between tol/10 and tol; "
            "the synthesized recovery may be unstable",
            RuntimeWarning,
            stacklevel=2,
        )
    kept = [m for m in range(len(eigenvalues)) if eigenvalues[m] > tol]
    gaps = [
        abs(eigenvalues[m] - eigenvalues[m2])
        for idx, m in enumerate(kept)
        for m2 in kept[idx + 1 :]
    ]
    if any(gap < 1e-10 for gap in gaps):
        warnings.warn(
            "degenerate Gram spectrum; eigenvector ordering follows the "
            "diagonalizer and is stable only within this implementation",
            RuntimeWarning,
            stacklevel=2,
        )

    injections = _error_injections(E, decomp)
    values: list[float] = []
    isometries: list[np.ndarray] = []
    for m in kept:
        vec = vectors[:, m].copy()
        # Phase convention: largest-magnitude entry rotated real positive.
        pivot = int(np.argmax(np.abs(vec)))
        if abs(vec[pivot]) > 0:
            vec *= np.conj(vec[pivot]) / abs(vec[pivot])
        s_m = sum(vec[mu] * injections[mu] for mu in range(len(injections)))
        s_m /= np.sqrt(eigenvalues[m])
        values.append(float(eigenvalues[m]))
        isometries.append(s_m)
    return values, isometries


def synthesize_recovery(
    E: KrausChannel, decomp: SpaceDecomposition, tol: float = 1e-9
) -> KrausChannel:
    """Construct a recovery channel certified by the quadruple check.

    Each isometry sector is mapped back onto H^A tensor |beta_1>; the
    orthogonal complement of the sectors is preserved by a single
    projector operator, which completes trace preservation.  The recovery
    sends every correctable input to rho_A tensor |beta_1><beta_1|.
    """
    _, isometries = recovery_isometries(E, decomp, tol)
    inj1 = basis_injection(decomp, 1)
    ops = [inj1 @ s_m.conj().T for s_m in isometries]
    n = decomp.total_dim
    sector_sum = np.zeros((n, n), dtype=complex)
    for s_m in isometries:
        sector_sum += s_m @ s_m.conj().T
    complement = np.eye(n) - sector_sum
    if np.trace(complement).real > 0.5:
        ops.append(complement)
    return KrausChannel(ops, tol=10 * tol)
