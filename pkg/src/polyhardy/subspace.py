"""Subspaces of a truncated Hardy space and their shift compressions.

A Subspace is stored as an orthonormal column basis over the grid.  All
heavy routines work on (grid size) x (subspace dim) arrays and never
materialize a full grid-by-grid operator, which keeps three and four
variable computations affordable.

Forward invariance at a truncation is always tested on the interior: the
vectors of S whose top slice in the shifted variable vanishes.  For those
vectors multiplication by z_j is exact, so the residual measures invariance
and not truncation loss.  Backward invariance needs no such care because
the backward shift never leaves the grid.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    DomainError,
    GridMismatch,
    NumericError,
    PrereqFailed,
    Unsupported,
)
from .grid import TruncationGrid
from .hardy import (
    Blaschke1D,
    HardyElement,
    InnerFunction,
    Monomial,
    RawSeries,
    TensorProduct,
    backward_within,
    inner_blaschke,
    monomial_shift,
    shift_within,
    support_degrees,
)
from .numkernel import (
    DEFAULT_RANK_EPSILON,
    OperatorMatrix,
    commutator_norms,
    operator_norm,
    orthonormalize,
)

__all__ = [
    "Subspace",
    "CompressedTuple",
    "DCReport",
    "ClassifyReport",
    "WoldReport",
    "subspace_from_columns",
    "span_closure",
    "model_space",
    "beurling_subspace",
    "compress",
    "compressed_tuple",
    "dc_report",
    "wandering",
    "wold_verify",
    "classify",
]

GRAM_TOL = 1e-10


@dataclass(frozen=True)
class Subspace:
    """Orthonormal basis of a subspace of the truncated Hardy space."""

    grid: TruncationGrid
    basis: np.ndarray

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=np.complex128)
        if basis.ndim != 2 or basis.shape[0] != self.grid.size:
            raise GridMismatch(
                f"basis shape {basis.shape} does not match grid size {self.grid.size}"
            )
        if not np.all(np.isfinite(basis)):
            raise NumericError("non-finite basis entries")
        if basis.shape[1]:
            gram = basis.conj().T @ basis
            dev = float(np.max(np.abs(gram - np.eye(basis.shape[1]))))
            if dev > GRAM_TOL:
                raise DomainError(f"basis is not orthonormal (Gram deviation {dev:.3e})")
        basis = basis.copy()
        basis.flags.writeable = False
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def project_columns(self, x: np.ndarray) -> np.ndarray:
        """Orthogonal projection of grid vectors (columns) onto the subspace."""
        return self.basis @ (self.basis.conj().T @ x)

    def coords(self, x: np.ndarray) -> np.ndarray:
        return self.basis.conj().T @ x


def subspace_from_columns(
    grid: TruncationGrid,
    columns: np.ndarray,
    rank_epsilon: float = DEFAULT_RANK_EPSILON,
) -> Subspace:
    """Orthonormalize a set of grid vectors into a Subspace."""
    columns = np.asarray(columns, dtype=np.complex128)
    if columns.ndim == 1:
        columns = columns[:, None]
    basis, _ = orthonormalize(columns, rank_epsilon=rank_epsilon)
    return Subspace(grid, basis)


def span_closure(
    generators: Sequence[HardyElement],
    vars: Sequence[int],
    max_steps: Optional[int] = None,
    rank_epsilon: float = DEFAULT_RANK_EPSILON,
) -> Subspace:
    """Smallest subspace containing the generators and closed under the
    listed shifts, at the truncation.

    Shift monomials are applied only while the exact coefficient support
    stays inside the caps, so every column is an exact product z^m * f.
    max_steps, when given, bounds the total shift order |m|.
    """
    generators = list(generators)
    if not generators:
        raise DomainError("span_closure needs at least one generator")
    grid = generators[0].grid
    vars = _check_vars(grid, vars)
    columns = []
    for f in generators:
        if f.grid != grid:
            raise GridMismatch("generators live on different grids")
        sup = support_degrees(f)
        if sup is None:
            continue
        allow = [0] * grid.nvars
        for j in vars:
            allow[j] = grid.caps[j] - sup[j]
        for m in itertools.product(*[range(a + 1) for a in allow]):
            if max_steps is not None and sum(m) > max_steps:
                continue
            columns.append(monomial_shift(f, m).coeffs)
    if not columns:
        return Subspace(grid, np.zeros((grid.size, 0), dtype=np.complex128))
    return subspace_from_columns(grid, np.column_stack(columns), rank_epsilon)


def model_space(theta: InnerFunction, grid: TruncationGrid) -> Subspace:
    """Truncated model space of a structured inner function.

    For a one-variable Blaschke product with zeros a_i this is the span of
    the truncated reproducing kernels at the a_i (derivative kernels for
    repeated zeros); for z^m it is span{1, ..., z^(m-1)}; for a tensor
    product it is the tensor product of the factor model spaces, one
    variable each, matching the grid caps in order.
    """
    structure = theta.structure
    if isinstance(structure, RawSeries):
        raise Unsupported("model spaces are only realized for structured inner functions")
    if isinstance(structure, TensorProduct):
        if grid.nvars != len(structure.factors):
            raise GridMismatch("grid has a different variable count than the tensor product")
        blocks = [
            model_space(f, TruncationGrid((cap,))).basis
            for f, cap in zip(structure.factors, grid.caps)
        ]
        basis = blocks[0]
        for b in blocks[1:]:
            basis = np.kron(basis, b)
        return Subspace(grid, basis)
    if grid.nvars != 1:
        raise GridMismatch("one-variable inner function but a multi-variable grid")
    cap = grid.caps[0]
    if isinstance(structure, Monomial):
        m = structure.k[0]
        dim = min(m, cap + 1)
        basis = np.zeros((cap + 1, dim), dtype=np.complex128)
        for t in range(dim):
            basis[t, t] = 1.0
        return Subspace(grid, basis)
    if isinstance(structure, Blaschke1D):
        zeros = structure.zeros
        p = len(zeros)
        if p == 0:
            raise DomainError("a Blaschke product with no zeros has a trivial model space")
        if cap + 1 < p:
            raise DomainError(f"cap {cap} too small for {p} zeros")
        degrees = np.arange(cap + 1)
        seen = {}
        columns = []
        for a in zeros:
            t = seen.get(a, 0)
            seen[a] = t + 1
            # d^t/d(conj a)^t of the kernel coefficients conj(a)^k.
            col = np.zeros(cap + 1, dtype=np.complex128)
            if a == 0:
                col[t] = 1.0
            else:
                fall = np.ones(cap + 1)
                for i in range(t):
                    fall *= np.maximum(degrees - i, 0)
                col[t:] = fall[t:] * np.conj(a) ** (degrees[t:] - t)
            columns.append(col)
        basis, decision = orthonormalize(np.column_stack(columns))
        if decision.rank != p:
            raise NumericError(
                f"kernel columns for zeros {zeros} are numerically dependent at cap {cap}"
            )
        return Subspace(grid, basis)
    raise Unsupported(f"unknown inner structure {type(structure).__name__}")


def _ideal_columns(structure, cap: int) -> np.ndarray:
    """One-variable orthonormal basis of the multiples of an inner factor.

    Multiples of z^m are exactly the monomials z^m..z^cap.  Multiples of a
    Blaschke product are the polynomials vanishing at its zeros, i.e. the
    orthocomplement of the truncated model space.
    """
    if isinstance(structure, Monomial):
        m = structure.k[0]
        if m > cap:
            return np.zeros((cap + 1, 0), dtype=np.complex128)
        basis = np.zeros((cap + 1, cap + 1 - m), dtype=np.complex128)
        for t in range(cap + 1 - m):
            basis[m + t, t] = 1.0
        return basis
    if isinstance(structure, Blaschke1D):
        zeros = list(structure.zeros)
        if not zeros:
            return np.eye(cap + 1, dtype=np.complex128)
        model = model_space(inner_blaschke(zeros, cap), TruncationGrid((cap,)))
        return _null_space(model.basis.conj().T, DEFAULT_RANK_EPSILON)
    raise Unsupported(
        f"cannot realize multiples of a {type(structure).__name__} factor"
    )


def beurling_subspace(theta: InnerFunction, grid: TruncationGrid) -> Subspace:
    """All grid polynomials divisible by a structured inner function.

    This is the honest truncation of the shift invariant subspace the
    function generates: the orthocomplement of its model space, variable by
    variable.  Unlike a span of shifted copies of the truncated series, it
    is exactly forward invariant inside the grid, so interior invariance
    tests come back at roundoff level.  The grid caps may differ from the
    caps the series was truncated at; only the zero structure matters here.
    """
    structure = theta.structure
    if isinstance(structure, RawSeries):
        raise Unsupported("divisibility needs a structured inner function")
    if grid.nvars != theta.grid.nvars:
        raise GridMismatch(
            f"inner function has {theta.grid.nvars} variables, grid has {grid.nvars}"
        )
    if isinstance(structure, TensorProduct):
        factor_structs = [f.structure for f in structure.factors]
    elif isinstance(structure, Monomial):
        factor_structs = [Monomial((kj,)) for kj in structure.k]
    else:
        if grid.nvars != 1:
            raise GridMismatch("one-variable inner function but a multi-variable grid")
        factor_structs = [structure]
    blocks = [_ideal_columns(fs, cap) for fs, cap in zip(factor_structs, grid.caps)]
    basis = blocks[0]
    for b in blocks[1:]:
        basis = np.kron(basis, b)
    return Subspace(grid, basis)


# ---------------------------------------------------------------------------
# compressions


def _check_vars(grid: TruncationGrid, vars: Sequence[int]) -> tuple:
    vars = tuple(int(j) for j in vars)
    if len(set(vars)) != len(vars):
        raise GridMismatch(f"repeated variables in {vars}")
    for j in vars:
        if not 0 <= j < grid.nvars:
            raise GridMismatch(f"variable {j} out of range")
    return vars


def _compress_entries(s: Subspace, j: int) -> np.ndarray:
    return s.basis.conj().T @ shift_within(s.grid, j, s.basis)


def compress(s: Subspace, j: int) -> OperatorMatrix:
    """Compression P_S M_(z_j) P_S in the coordinates of the subspace basis."""
    return OperatorMatrix(_compress_entries(s, j))


@dataclass(frozen=True)
class CompressedTuple:
    """All shift compressions of a subspace, with coarse kind tags.

    kinds[j] is "isometry-like" when the Gram V*V is idempotent within
    1e-8 (V is a partial isometry, e.g. a truncated shift), else
    "pure-contraction-like" when the spectral radius is below 1, else
    "other".
    """

    subspace: Subspace
    ops: tuple
    kinds: tuple


def _tag_kind(v: np.ndarray, tol: float = 1e-8) -> str:
    if v.shape[1] == 0:
        return "isometry-like"
    gram = v.conj().T @ v
    if operator_norm(gram @ gram - gram) <= tol * max(1.0, operator_norm(gram)):
        return "isometry-like"
    radius = float(np.max(np.abs(np.linalg.eigvals(v)))) if v.size else 0.0
    if radius < 1.0 - 1e-10:
        return "pure-contraction-like"
    return "other"


def compressed_tuple(s: Subspace) -> CompressedTuple:
    ops = tuple(_compress_entries(s, j) for j in range(s.grid.nvars))
    kinds = tuple(_tag_kind(v) for v in ops)
    return CompressedTuple(s, ops, kinds)


@dataclass(frozen=True)
class DCReport:
    """Pairwise commutator norms of a tuple of operators.

    pair_norms maps (i, j) with i < j to (‖[V_i, V_j]‖, ‖[V_i*, V_j]‖).
    """

    pair_norms: dict
    max_commutator: float
    tolerance: float
    is_doubly_commuting: bool


def dc_report(ops, tol: float = 1e-8) -> DCReport:
    if isinstance(ops, CompressedTuple):
        ops = ops.ops
    ops = [np.asarray(v, dtype=np.complex128) for v in ops]
    pair_norms = {}
    worst = 0.0
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            plain, star = commutator_norms(ops[i], ops[j])
            pair_norms[(i, j)] = (plain, star)
            worst = max(worst, plain, star)
    return DCReport(pair_norms, worst, float(tol), worst <= tol)


# ---------------------------------------------------------------------------
# wandering subspaces and the Wold tiling


def _null_space(mat: np.ndarray, rank_epsilon: float) -> np.ndarray:
    """Orthonormal basis of the kernel, with the shared rank convention."""
    m, n = mat.shape
    if m == 0 or n == 0:
        return np.eye(n, dtype=np.complex128)
    if m >= 4 * n and m > 256 and rank_epsilon >= 1e-6:
        # tall case via the small Gram; the Gram floors tiny singular
        # values near sqrt(eps) * smax, so only take this route when the
        # cutoff sits well above that floor.
        g = mat.conj().T @ mat
        lam, vec = np.linalg.eigh(g)
        sig = np.sqrt(np.clip(lam, 0.0, None))
        cutoff = rank_epsilon * max(float(sig[-1]), 1.0)
        rank = int(np.sum(sig > cutoff))
        return vec[:, : n - rank]
    # vh needs all n rows; avoid the huge left factor when m >> n.
    _, sing, vh = np.linalg.svd(mat, full_matrices=(m < n))
    cutoff = rank_epsilon * max(float(sing[0]) if sing.size else 0.0, 1.0)
    rank = int(np.sum(sing > cutoff))
    return vh[rank:].conj().T


def wandering(
    s: Subspace,
    vars: Sequence[int],
    rank_epsilon: float = DEFAULT_RANK_EPSILON,
    entries: Optional[Sequence[np.ndarray]] = None,
) -> Subspace:
    """S minus the shifted copies: the joint kernel of the adjoint compressions.

    x in S is wandering iff <x, z_j y> = 0 for all y in S and listed j,
    i.e. V_j* x = 0 for every compression V_j.  entries, when given, must
    be the compression matrices for vars in order (skips recomputing them).
    """
    vars = _check_vars(s.grid, vars)
    if not vars:
        raise DomainError("wandering needs at least one variable")
    if s.dim == 0:
        return s
    if entries is None:
        entries = [_compress_entries(s, j) for j in vars]
    elif len(entries) != len(vars):
        raise GridMismatch(f"{len(entries)} compressions for {len(vars)} variables")
    stacked = np.vstack([v.conj().T for v in entries])
    null = _null_space(stacked, rank_epsilon)
    return Subspace(s.grid, s.basis @ null)


@dataclass(frozen=True)
class WoldReport:
    """Ledger for the tiling of S by shifted wandering copies."""

    wandering_dim: int
    tile_dims: dict
    total: int
    expected: int
    orthogonality_residual: float
    tolerance: float
    passed: bool


def wold_verify(
    s: Subspace,
    vars: Sequence[int],
    interior_caps: Sequence[int],
    tol: float = 1e-8,
    iso_tol: float = 1e-3,
    rank_epsilon: float = DEFAULT_RANK_EPSILON,
) -> WoldReport:
    """Check that the shifted wandering copies tile the interior of S.

    Tiles V^m W are formed for shift exponents m_j <= interior_caps_j in the
    listed variables.  The report records each tile's dimension and the
    joint orthogonality residual; it passes when the residual is within tol
    and every tile keeps the full wandering dimension, so the tiles account
    for the declared interior.  A compression that visibly fails to act
    isometrically on a tile that should shift further (norm drop beyond
    iso_tol) raises PrereqFailed.
    """
    vars = _check_vars(s.grid, vars)
    caps = tuple(int(c) for c in interior_caps)
    if len(caps) != len(vars):
        raise GridMismatch("interior_caps must list one bound per tiled variable")
    w = wandering(s, vars, rank_epsilon)
    if w.dim == 0:
        raise PrereqFailed("no wandering directions: compressions are not jointly pure")
    ops = {j: _compress_entries(s, j) for j in vars}
    w_coords = s.coords(w.basis)
    tiles = {(0,) * len(vars): w_coords}
    order = sorted(itertools.product(*[range(c + 1) for c in caps]), key=sum)
    for m in order:
        if m in tiles:
            continue
        i = next(i for i, mi in enumerate(m) if mi > 0)
        prev = tuple(mi - (1 if idx == i else 0) for idx, mi in enumerate(m))
        base = tiles[prev]
        advanced = ops[vars[i]] @ base
        norms_before = np.linalg.norm(base, axis=0)
        norms_after = np.linalg.norm(advanced, axis=0)
        drop = float(np.max(norms_before - norms_after)) if base.size else 0.0
        if drop > iso_tol:
            raise PrereqFailed(
                f"compression in variable {vars[i]} loses norm {drop:.3e} inside the tiling range"
            )
        tiles[m] = advanced
    tile_dims = {}
    blocks = []
    for m in order:
        block, decision = orthonormalize(tiles[m], rank_epsilon)
        tile_dims[m] = decision.rank
        if decision.rank:
            blocks.append(block)
    stacked = np.hstack(blocks) if blocks else np.zeros((s.dim, 0), dtype=np.complex128)
    total = stacked.shape[1]
    if total:
        gram = stacked.conj().T @ stacked
        residual = operator_norm(gram - np.eye(total))
    else:
        residual = 0.0
    expected = w.dim * int(np.prod([c + 1 for c in caps]))
    passed = residual <= tol and total == expected
    return WoldReport(
        wandering_dim=w.dim,
        tile_dims=tile_dims,
        total=total,
        expected=expected,
        orthogonality_residual=float(residual),
        tolerance=float(tol),
        passed=passed,
    )


# ---------------------------------------------------------------------------
# invariance classification


@dataclass(frozen=True)
class ClassifyReport:
    """Invariance verdict of a subspace for a given variable split.

    verdict takes values "invariant" (forward in every variable),
    "mixed-invariant" (forward in the first k, backward in the rest),
    "backward-invariant" (backward in every variable), or "neither".
    Forward residuals are interior-restricted; interior_dims records how
    many directions of S each forward test actually probed.
    """

    verdict: str
    split: int
    forward_residuals: tuple
    backward_residuals: tuple
    interior_dims: tuple
    dc: DCReport
    tolerance: float


def _top_slice_rows(grid: TruncationGrid, j: int) -> np.ndarray:
    ranges = [np.arange(s) for s in grid.shape]
    ranges[j] = np.array([grid.caps[j]])
    return np.ravel_multi_index(np.ix_(*ranges), grid.shape).ravel()


def _interior_null(s: Subspace, j: int, rank_epsilon: float) -> np.ndarray:
    """Coordinates basis of {x in S : top slice of x in variable j vanishes}."""
    rows = s.basis[_top_slice_rows(s.grid, j), :]
    if rows.shape[0] == 0 or s.dim == 0:
        return np.eye(s.dim, dtype=np.complex128)
    return _null_space(rows, rank_epsilon)


def classify(
    s: Subspace,
    k: int,
    tol: float = 1e-8,
    rank_epsilon: float = DEFAULT_RANK_EPSILON,
) -> ClassifyReport:
    """Classify invariance of S for the split (first k forward, rest backward)."""
    n = s.grid.nvars
    if not 0 <= k <= n:
        raise GridMismatch(f"split {k} out of range for {n} variables")
    forward = []
    interior_dims = []
    backward = []
    for j in range(n):
        null = _interior_null(s, j, rank_epsilon)
        interior_dims.append(null.shape[1])
        if null.shape[1] == 0:
            forward.append(0.0)
        else:
            x = s.basis @ null
            mx = shift_within(s.grid, j, x)
            forward.append(operator_norm(mx - s.project_columns(mx)))
        bx = backward_within(s.grid, j, s.basis)
        backward.append(operator_norm(bx - s.project_columns(bx)) if s.dim else 0.0)
    fwd_all = all(r <= tol for r in forward)
    bwd_all = all(r <= tol for r in backward)
    mixed = all(forward[j] <= tol for j in range(k)) and all(
        backward[j] <= tol for j in range(k, n)
    )
    if fwd_all:
        verdict = "invariant"
    elif mixed and k >= 1:
        verdict = "mixed-invariant"
    elif bwd_all:
        verdict = "backward-invariant"
    else:
        verdict = "neither"
    report = dc_report(compressed_tuple(s), tol)
    return ClassifyReport(
        verdict=verdict,
        split=k,
        forward_residuals=tuple(float(r) for r in forward),
        backward_residuals=tuple(float(r) for r in backward),
        interior_dims=tuple(interior_dims),
        dc=report,
        tolerance=float(tol),
    )
