"""Dense numeric kernel: rank decisions, orthonormalization, operator norms.

All routines are thin wrappers over LAPACK via numpy.linalg; the value
added is a single shared rank-cutoff convention and defensive checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DomainError, GridMismatch, NumericError

__all__ = [
    "DEFAULT_RANK_EPSILON",
    "OperatorMatrix",
    "RankDecision",
    "orthonormalize",
    "hermitian_sqrt",
    "commutator_norms",
    "operator_norm",
    "as_entries",
]

# Relative rank tolerance shared by every rank decision in the package.
DEFAULT_RANK_EPSILON = 1e-8


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense complex matrix, optionally tagged with source/target grids.

    When tags are present the shape must match the grid sizes: rows index
    the target basis, columns the source basis.
    """

    entries: np.ndarray
    src_grid: Optional[object] = None
    dst_grid: Optional[object] = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=np.complex128)
        if entries.ndim != 2:
            raise GridMismatch(f"operator entries must be 2-d, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise NumericError("operator entries contain non-finite values")
        object.__setattr__(self, "entries", entries)
        if self.src_grid is not None and entries.shape[1] != self.src_grid.size:
            raise GridMismatch(
                f"{entries.shape[1]} columns but source grid has {self.src_grid.size} basis elements"
            )
        if self.dst_grid is not None and entries.shape[0] != self.dst_grid.size:
            raise GridMismatch(
                f"{entries.shape[0]} rows but target grid has {self.dst_grid.size} basis elements"
            )

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(
            self.entries.conj().T, src_grid=self.dst_grid, dst_grid=self.src_grid
        )

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.complex128)
        if x.shape[0] != self.cols:
            raise GridMismatch(
                f"operand of length {x.shape[0]} fed to operator with {self.cols} columns"
            )
        return self.entries @ x

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise GridMismatch(
                f"cannot compose {self.entries.shape} with {other.entries.shape}"
            )
        return OperatorMatrix(
            self.entries @ other.entries, src_grid=other.src_grid, dst_grid=self.dst_grid
        )

    def norm(self) -> float:
        return operator_norm(self.entries)


@dataclass(frozen=True)
class RankDecision:
    """Outcome of a rank decision: kept rank, spectrum, and the cutoff used."""

    rank: int
    singular_values: tuple
    cutoff: float


def as_entries(a: Union[OperatorMatrix, np.ndarray]) -> np.ndarray:
    return a.entries if isinstance(a, OperatorMatrix) else np.asarray(a, dtype=np.complex128)


def _rank_cutoff(singular_values: np.ndarray, rank_epsilon: float) -> float:
    smax = float(singular_values[0]) if singular_values.size else 0.0
    return rank_epsilon * max(smax, 1.0)


def orthonormalize(columns, rank_epsilon: float = DEFAULT_RANK_EPSILON):
    """Orthonormal basis of the column span, with an explicit rank decision.

    Returns (basis, decision).  The basis has `decision.rank` columns; the
    cutoff is rank_epsilon * max(largest singular value, 1), so the decision
    is stable under small scalings of the input.  The returned object has
    the same kind as the input (plain ndarray in, plain ndarray out).
    """
    entries = as_entries(columns)
    if entries.ndim != 2:
        raise GridMismatch(f"expected a matrix of columns, got shape {entries.shape}")
    if not np.all(np.isfinite(entries)):
        raise NumericError("non-finite entries in orthonormalize")
    if entries.shape[1] == 0:
        decision = RankDecision(rank=0, singular_values=(), cutoff=rank_epsilon)
        basis = entries.copy()
    else:
        u, s, _ = np.linalg.svd(entries, full_matrices=False)
        cutoff = _rank_cutoff(s, rank_epsilon)
        rank = int(np.sum(s > cutoff))
        decision = RankDecision(rank=rank, singular_values=tuple(float(x) for x in s), cutoff=cutoff)
        basis = u[:, :rank]
    if isinstance(columns, OperatorMatrix):
        return OperatorMatrix(basis, dst_grid=columns.dst_grid), decision
    return basis, decision


def hermitian_sqrt(a, herm_tol: float = 1e-10):
    """Principal square root of a Hermitian PSD matrix.

    Eigenvalues in [-herm_tol * scale, 0) are clamped to zero; anything more
    negative, or a significantly non-Hermitian input, raises DomainError.
    """
    entries = as_entries(a)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise GridMismatch(f"hermitian_sqrt needs a square matrix, got {entries.shape}")
    scale = max(1.0, float(np.max(np.abs(entries))) if entries.size else 0.0)
    dev = float(np.max(np.abs(entries - entries.conj().T))) if entries.size else 0.0
    if dev > herm_tol * scale:
        raise DomainError(f"matrix is not Hermitian (deviation {dev:.3e})")
    sym = 0.5 * (entries + entries.conj().T)
    w, v = np.linalg.eigh(sym)
    clamp = herm_tol * max(1.0, float(w[-1]) if w.size else 0.0)
    if w.size and w[0] < -clamp:
        raise DomainError(f"matrix is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    w = np.clip(w, 0.0, None)
    root = (v * np.sqrt(w)) @ v.conj().T
    if isinstance(a, OperatorMatrix):
        return OperatorMatrix(root, src_grid=a.src_grid, dst_grid=a.dst_grid)
    return root


def commutator_norms(a, b) -> tuple:
    """Spectral norms (‖AB - BA‖, ‖A*B - BA*‖) for square same-size A, B."""
    ae, be = as_entries(a), as_entries(b)
    if ae.shape != be.shape or ae.shape[0] != ae.shape[1]:
        raise GridMismatch(f"commutator needs equal square shapes, got {ae.shape} and {be.shape}")
    plain = operator_norm(ae @ be - be @ ae)
    star = operator_norm(ae.conj().T @ be - be @ ae.conj().T)
    return plain, star


def operator_norm(a) -> float:
    """Largest singular value; 0 for an empty matrix."""
    entries = as_entries(a)
    if entries.size == 0:
        return 0.0
    if not np.all(np.isfinite(entries)):
        raise NumericError("non-finite entries in operator_norm")
    if entries.ndim == 2:
        m, n = entries.shape
        # very tall or wide: the small Gram is much cheaper than a full
        # SVD, and its top eigenvalue keeps full relative accuracy (the
        # entries scale with the norm squared, no cancellation).
        if min(m, n) * 4 <= max(m, n):
            g = (
                entries.conj().T @ entries
                if m >= n
                else entries @ entries.conj().T
            )
            top = float(np.linalg.eigvalsh(g)[-1])
            return float(np.sqrt(max(top, 0.0)))
    return float(np.linalg.norm(entries, 2))
