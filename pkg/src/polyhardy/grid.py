"""Truncated monomial grids on the polydisc.

A grid with caps (d_1, ..., d_n) indexes the monomials z^k with
0 <= k_j <= d_j.  Linear order is lexicographic with the *last* variable
fastest, i.e. the C order of a coefficient tensor of shape
(d_1 + 1, ..., d_n + 1).  With that convention, regrouping the variables
into a left/right block is a plain reshape.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DegreeOverflow, GridMismatch

__all__ = [
    "MultiIndex",
    "TruncationGrid",
    "GridSplit",
    "embed",
    "matricize",
    "unmatricize",
]

# A multi-index is a plain tuple of non-negative ints, one per variable.
MultiIndex = tuple


@dataclass(frozen=True)
class TruncationGrid:
    """Degree caps for a truncated polynomial space on the polydisc."""

    caps: tuple

    def __post_init__(self):
        caps = tuple(int(c) for c in self.caps)
        object.__setattr__(self, "caps", caps)
        if len(caps) < 1:
            raise GridMismatch("grid needs at least one variable")
        if any(c < 0 for c in caps):
            raise DegreeOverflow(f"negative degree cap in {caps}")

    @property
    def nvars(self) -> int:
        return len(self.caps)

    @property
    def shape(self) -> tuple:
        return tuple(c + 1 for c in self.caps)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def validate(self, k) -> tuple:
        k = tuple(int(x) for x in k)
        if len(k) != self.nvars:
            raise GridMismatch(
                f"multi-index {k} has {len(k)} entries, grid has {self.nvars} variables"
            )
        for x, c in zip(k, self.caps):
            if x < 0 or x > c:
                raise DegreeOverflow(f"multi-index {k} outside caps {self.caps}")
        return k

    def lin_index(self, k) -> int:
        """Linear position of monomial z^k, last variable fastest."""
        k = self.validate(k)
        i = 0
        for x, s in zip(k, self.shape):
            i = i * s + x
        return i

    def multi_index(self, i: int) -> tuple:
        """Inverse of lin_index."""
        i = int(i)
        if i < 0 or i >= self.size:
            raise DegreeOverflow(f"linear index {i} outside grid of size {self.size}")
        out = []
        for s in reversed(self.shape):
            out.append(i % s)
            i //= s
        return tuple(reversed(out))

    def indices(self) -> Iterator[tuple]:
        """All multi-indices in linear order."""
        return iter(np.ndindex(*self.shape))

    def contains(self, other: "TruncationGrid") -> bool:
        """True when every monomial of `other` fits in this grid."""
        return self.nvars == other.nvars and all(
            a >= b for a, b in zip(self.caps, other.caps)
        )


@dataclass(frozen=True)
class GridSplit:
    """Split of the variables of `parent` into a left block (first k) and the rest."""

    parent: TruncationGrid
    k: int

    def __post_init__(self):
        if not 1 <= self.k < self.parent.nvars:
            raise GridMismatch(
                f"split position {self.k} invalid for {self.parent.nvars} variables"
            )

    @property
    def left(self) -> TruncationGrid:
        return TruncationGrid(self.parent.caps[: self.k])

    @property
    def right(self) -> TruncationGrid:
        return TruncationGrid(self.parent.caps[self.k :])


def embed(src: TruncationGrid, dst: TruncationGrid):
    """Isometric inclusion of a small grid into a larger one.

    Returns the rectangular 0/1 matrix sending the coefficient of z^k in
    `src` to the coefficient of z^k in `dst`.
    """
    from .numkernel import OperatorMatrix

    if not dst.contains(src):
        raise GridMismatch(f"cannot embed caps {src.caps} into caps {dst.caps}")
    entries = np.zeros((dst.size, src.size), dtype=np.complex128)
    rows = embed_rows(src, dst)
    entries[rows, np.arange(src.size)] = 1.0
    return OperatorMatrix(entries, src_grid=src, dst_grid=dst)


def embed_rows(src: TruncationGrid, dst: TruncationGrid) -> np.ndarray:
    """Linear positions in `dst` of the monomials of `src` (in src order)."""
    if not dst.contains(src):
        raise GridMismatch(f"cannot embed caps {src.caps} into caps {dst.caps}")
    grids = np.ix_(*[np.arange(s) for s in src.shape])
    return np.ravel_multi_index(grids, dst.shape).ravel()


def matricize(split: GridSplit, coeffs: np.ndarray) -> np.ndarray:
    """Coefficient vector -> (left block) x (right block) matrix.

    Exact regrouping: row i is the left multi-index, column j the right
    multi-index, both in grid order.  Because the linear order is C order,
    this is a reshape and preserves the l2 norm.
    """
    coeffs = np.asarray(coeffs)
    if coeffs.shape[0] != split.parent.size:
        raise GridMismatch("coefficient length does not match the parent grid")
    return coeffs.reshape(split.left.size, split.right.size)


def unmatricize(split: GridSplit, mat: np.ndarray) -> np.ndarray:
    """Inverse of matricize."""
    mat = np.asarray(mat)
    if mat.shape != (split.left.size, split.right.size):
        raise GridMismatch(
            f"matrix shape {mat.shape} does not match split "
            f"({split.left.size}, {split.right.size})"
        )
    return mat.reshape(split.parent.size)
