"""Numerical realizations of the structure theory on truncated grids.

The routines here verify, at a truncation, the structure facts this
package is built around: commutant operators of the shift tuple expand in
backward-shift Fourier coefficients with analytic operator symbols;
isometric intertwiners of backward shifts on finite kernel spans are
unimodular scalars; doubly commuting pure tuples dilate into a
vector-valued Hardy space through the defect operator; and doubly
commuting mixed invariant subspaces factor as an inner multiple of the
forward block tensored with model spaces in the backward block.

Every routine takes explicit tolerances and reports the residuals it
measured; nothing is asserted silently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    DegreeOverflow,
    DomainError,
    GridMismatch,
    NumericError,
    PrereqFailed,
    StructureViolation,
    Unsupported,
)
from .grid import GridSplit, TruncationGrid, matricize
from .hardy import (
    HardyElement,
    InnerFunction,
    RawSeries,
    backward_within,
    inner_blaschke,
    inner_check,
    shift_within,
    szego_kernel,
    KernelPoint,
)
from .numkernel import (
    DEFAULT_RANK_EPSILON,
    OperatorMatrix,
    as_entries,
    hermitian_sqrt,
    operator_norm,
    orthonormalize,
)
from .subspace import (
    ClassifyReport,
    CompressedTuple,
    DCReport,
    Subspace,
    beurling_subspace,
    classify,
    compressed_tuple,
    dc_report,
    model_space,
    subspace_from_columns,
    wandering,
    _interior_null,
    _null_space,
)

__all__ = [
    "SymbolSeries",
    "ModelFactor",
    "FullAtTruncation",
    "Factorization",
    "PhiSymbol",
    "UnitWanderingData",
    "UnitWanderingReport",
    "DilationReport",
    "normalize_unimodular",
    "cluster_points",
    "commutant_symbol",
    "theta_fourier",
    "range_classify",
    "scalar_detect",
    "verify_forward",
    "defect_and_dilate",
    "factorize_mixed",
    "kernel_product_subspace",
    "unit_wandering_subspace",
]


def normalize_unimodular(vec: np.ndarray, rel: float = 1e-6):
    """Rotate a coefficient vector so its first significant entry is real positive.

    "First" is grid order; "significant" means modulus above rel times the
    largest modulus, which makes the convention stable under small noise.
    Returns (rotated copy, lam) with rotated = lam * vec and |lam| = 1.
    """
    vec = np.asarray(vec, dtype=np.complex128)
    mx = float(np.max(np.abs(vec))) if vec.size else 0.0
    if mx == 0.0:
        return vec.copy(), complex(1.0)
    idx = int(np.argmax(np.abs(vec) > rel * mx))
    lead = vec[idx]
    lam = np.conj(lead) / abs(lead)
    return lam * vec, complex(lam)


def cluster_points(points: Sequence[complex], radius: float):
    """Greedy clustering of points in the plane; returns cluster means with
    multiplicity, deterministically ordered by (real, imag)."""
    pts = sorted((complex(p) for p in points), key=lambda z: (z.real, z.imag))
    clusters: List[List[complex]] = []
    for p in pts:
        for c in clusters:
            mean = sum(c) / len(c)
            if abs(p - mean) <= radius:
                c.append(p)
                break
        else:
            clusters.append([p])
    out = []
    for c in clusters:
        mean = sum(c) / len(c)
        out.extend([mean] * len(c))
    return tuple(sorted(out, key=lambda z: (z.real, z.imag)))


# ---------------------------------------------------------------------------
# commutant symbols


@dataclass(frozen=True)
class SymbolSeries:
    """Backward-shift Fourier coefficients of a commutant operator.

    coeffs[k], for k in the degree window grid_z, is the block
    P_W V^(*k) T restricted to the wandering space W.  All blocks share a
    shape (square dim W x dim W for endomorphisms).
    """

    grid_z: TruncationGrid
    wandering_dim: int
    coeffs: Dict[tuple, np.ndarray]

    def __post_init__(self):
        shape = None
        for k, block in self.coeffs.items():
            self.grid_z.validate(k)
            if shape is None:
                shape = block.shape
            if block.shape != shape:
                raise GridMismatch(f"coefficient {k} has shape {block.shape}, not {shape}")


def _as_degree_tuple(max_degree, count: int) -> tuple:
    if isinstance(max_degree, int):
        return (max_degree,) * count
    md = tuple(int(x) for x in max_degree)
    if len(md) != count:
        raise GridMismatch("max_degree must give one bound per operator")
    return md


def commutant_symbol(
    t,
    v: Sequence,
    max_degree,
    tol: float = 1e-8,
    rank_epsilon: float = DEFAULT_RANK_EPSILON,
) -> SymbolSeries:
    """Fourier coefficients of an operator commuting with an isometry-like tuple.

    The wandering space W of the tuple is the joint kernel of the adjoints.
    Commutation of T with each V_j, and double commutation of the tuple, are
    checked on the span actually probed by the expansion (the tiles V^m W
    with m below max_degree); violation raises PrereqFailed.
    """
    te = as_entries(t)
    vs = [as_entries(x) for x in v]
    h = te.shape[0]
    if te.shape != (h, h) or any(x.shape != (h, h) for x in vs):
        raise GridMismatch("T and all V_j must be square of equal size")
    md = _as_degree_tuple(max_degree, len(vs))
    stacked = np.vstack([x.conj().T for x in vs])
    w = _null_space(stacked, rank_epsilon)
    r = w.shape[1]
    if r == 0:
        raise PrereqFailed("the tuple has no wandering directions")
    # tiles V^m W for the probe region
    tiles = {(0,) * len(vs): w}
    order = sorted(itertools.product(*[range(m + 1) for m in md]), key=sum)
    for m in order:
        if m in tiles:
            continue
        i = next(i for i, mi in enumerate(m) if mi > 0)
        prev = tuple(mi - (1 if idx == i else 0) for idx, mi in enumerate(m))
        tiles[m] = vs[i] @ tiles[prev]
    probe = np.hstack([tiles[m] for m in order])
    inner_cols = np.hstack(
        [tiles[m] for m in order if all(mi < mdi for mi, mdi in zip(m, md))]
    ) if any(all(mi < mdi for mi, mdi in zip(m, md)) for m in order) else probe[:, :0]
    scale = max(1.0, operator_norm(te))
    if inner_cols.shape[1]:
        for j, vj in enumerate(vs):
            resid = operator_norm(te @ (vj @ inner_cols) - vj @ (te @ inner_cols))
            if resid > tol * scale:
                raise PrereqFailed(
                    f"T does not commute with V_{j} on the probed span (residual {resid:.3e})"
                )
        for i in range(len(vs)):
            for j in range(i + 1, len(vs)):
                plain = operator_norm(vs[i] @ (vs[j] @ inner_cols) - vs[j] @ (vs[i] @ inner_cols))
                star = operator_norm(
                    vs[i].conj().T @ (vs[j] @ inner_cols) - vs[j] @ (vs[i].conj().T @ inner_cols)
                )
                if max(plain, star) > tol * scale:
                    raise PrereqFailed(
                        f"V_{i}, V_{j} are not doubly commuting on the probed span"
                    )
    coeffs = {}
    for m in order:
        coeffs[m] = w.conj().T @ _adjoint_power_apply(vs, m, te @ w)
    return SymbolSeries(TruncationGrid(md), r, coeffs)


def _adjoint_power_apply(vs: List[np.ndarray], m: tuple, x: np.ndarray) -> np.ndarray:
    for i, mi in enumerate(m):
        for _ in range(mi):
            x = vs[i].conj().T @ x
    return x


# ---------------------------------------------------------------------------
# multi-grading Fourier extraction on a product grid


def theta_fourier(
    t,
    split: GridSplit,
    max_k,
    tol: float = 1e-8,
) -> Dict[tuple, HardyElement]:
    """Extract the analytic symbols Theta_k of a mixed multiplier.

    For an operator on the split grid commuting with the forward shifts of
    the left block and with the adjoint shifts of the right block, the
    coefficient of w^l in Theta_k is <z^k * 1, T w^l>.  Returns a map from
    the left exponent k to an element of the right-block grid.
    """
    te = as_entries(t)
    grid = split.parent
    n = te.shape[0]
    if te.shape != (grid.size, grid.size):
        raise GridMismatch("operator does not act on the split's parent grid")
    k = split.k
    md = _as_degree_tuple(max_k, k)
    for j, m in enumerate(md):
        if m > grid.caps[j]:
            raise DegreeOverflow(f"max_k {md} exceeds the left caps {grid.caps[:k]}")
    scale = max(1.0, operator_norm(te))
    shape = grid.shape
    # forward commutation in the left block, on columns that can shift
    for j in range(k):
        deg = np.array([idx[j] for idx in grid.indices()])
        cols = np.nonzero(deg <= grid.caps[j] - 1)[0]
        if cols.size:
            x = np.zeros((n, cols.size), dtype=np.complex128)
            x[cols, np.arange(cols.size)] = 1.0
            resid = operator_norm(
                te @ shift_within(grid, j, x) - shift_within(grid, j, te @ x)
            )
            if resid > tol * scale:
                raise PrereqFailed(
                    f"operator does not commute with the forward shift in variable {j}"
                    f" (residual {resid:.3e})"
                )
    # adjoint intertwining in the right block, exact on the whole grid
    for j in range(k, grid.nvars):
        resid = operator_norm(
            te @ backward_within(grid, j, np.eye(n, dtype=np.complex128))
            - backward_within(grid, j, te)
        )
        if resid > tol * scale:
            raise PrereqFailed(
                f"operator does not intertwine the adjoint shift in variable {j}"
                f" (residual {resid:.3e})"
            )
    right = split.right
    zero_right = (0,) * right.nvars
    zero_left = (0,) * k
    out = {}
    for km in itertools.product(*[range(m + 1) for m in md]):
        row = grid.lin_index(km + zero_right)
        coeffs = np.empty(right.size, dtype=np.complex128)
        for c, l in enumerate(right.indices()):
            col = grid.lin_index(zero_left + tuple(l))
            coeffs[c] = np.conj(te[row, col])
        out[km] = HardyElement(right, coeffs)
    return out


def range_classify(
    t,
    split: GridSplit,
    tol: float = 1e-8,
    rank_epsilon: float = DEFAULT_RANK_EPSILON,
):
    """Orthonormalize the range of T and classify its invariance for the split."""
    te = as_entries(t)
    if te.shape[0] != split.parent.size:
        raise GridMismatch("operator rows do not match the split's parent grid")
    s = subspace_from_columns(split.parent, te, rank_epsilon)
    return s, classify(s, split.k, tol)


# ---------------------------------------------------------------------------
# scalar detection on finite kernel spans


def scalar_detect(
    t,
    q: Subspace,
    tol: float = 1e-10,
    pre_tol: float = 1e-6,
) -> Optional[complex]:
    """Detect whether an isometric intertwiner on a backward-invariant span
    is a unimodular scalar.

    Preconditions (gated at pre_tol, which absorbs kernel truncation tails):
    Q is backward invariant in every variable, T restricted to Q is
    isometric, and T intertwines every adjoint shift.  When they hold,
    returns lam with |lam| close to 1 if ‖T - lam I‖ <= tol on Q, else None.
    """
    te = as_entries(t)
    b = q.basis
    n, r = b.shape
    if r == 0:
        raise DomainError("scalar detection on a zero-dimensional span")
    if te.shape == (n, n):
        tq = te @ b
    elif te.shape == (n, r):
        tq = te
    else:
        raise GridMismatch(f"operator shape {te.shape} fits neither the grid nor the span")
    for j in range(q.grid.nvars):
        bb = backward_within(q.grid, j, b)
        resid = operator_norm(bb - q.project_columns(bb))
        if resid > pre_tol:
            raise PrereqFailed(
                f"span is not backward invariant in variable {j} (residual {resid:.3e})"
            )
    gram = tq.conj().T @ tq
    iso = operator_norm(gram - np.eye(r))
    if iso > pre_tol:
        raise PrereqFailed(f"operator is not isometric on the span (defect {iso:.3e})")
    for j in range(q.grid.nvars):
        a = q.coords(backward_within(q.grid, j, b))
        resid = operator_norm(backward_within(q.grid, j, tq) - tq @ a)
        if resid > pre_tol:
            raise PrereqFailed(
                f"operator does not intertwine the adjoint shift in variable {j}"
                f" (residual {resid:.3e})"
            )
    lam = complex(np.trace(b.conj().T @ tq) / r)
    if abs(abs(lam) - 1.0) > tol:
        return None
    if operator_norm(tq - lam * b) > tol:
        return None
    return lam


# ---------------------------------------------------------------------------
# forward verification of the factored form


@dataclass(frozen=True)
class ModelFactor:
    """A backward-block factor: the model space of the Blaschke product
    with these zeros (zeros at the origin give monomial model spaces)."""

    zeros: tuple

    def __post_init__(self):
        object.__setattr__(self, "zeros", tuple(complex(a) for a in self.zeros))
        if not self.zeros:
            raise DomainError("a model factor needs at least one zero")


@dataclass(frozen=True)
class FullAtTruncation:
    """A backward-block factor that fills its whole truncated variable."""


def _factor_basis(factor, cap: int) -> np.ndarray:
    if isinstance(factor, FullAtTruncation):
        return np.eye(cap + 1, dtype=np.complex128)
    if isinstance(factor, ModelFactor):
        inner = inner_blaschke(factor.zeros, cap)
        return model_space(inner, TruncationGrid((cap,))).basis
    raise Unsupported(f"unknown factor specification {factor!r}")


def verify_forward(
    theta: InnerFunction,
    factors: Sequence,
    grid: TruncationGrid,
    tol: float = 1e-8,
    rank_epsilon: float = DEFAULT_RANK_EPSILON,
):
    """Build the factored subspace (multiples of theta) (x) model factors and
    check double commutation of its compressed tuple.

    The forward block is the divisibility subspace of the symbol, which is
    exactly shift invariant at the truncation.  Returns (subspace,
    DCReport); the commutator tolerance is tol plus the symbol's defect
    certificate, since a truncated inner function is only isometric up to
    its defect.
    """
    k = theta.grid.nvars
    if len(factors) != grid.nvars - k:
        raise GridMismatch(
            f"{len(factors)} factors for {grid.nvars - k} backward variables"
        )
    left = TruncationGrid(grid.caps[:k])
    lb = beurling_subspace(theta, left)
    if lb.dim == 0:
        raise DomainError("the symbol generates a zero-dimensional forward block")
    basis = lb.basis
    for i, factor in enumerate(factors):
        fb = _factor_basis(factor, grid.caps[k + i])
        basis = np.kron(basis, fb)
    s = Subspace(grid, basis)
    allowance = float(tol + theta.defect_bound)
    report = dc_report(compressed_tuple(s), allowance)
    return s, report


# ---------------------------------------------------------------------------
# defect operator and dilation


@dataclass(frozen=True)
class DilationReport:
    """Ledger for the isometric embedding h -> sum_k z^k (x) D T^(*k) h."""

    defect: np.ndarray
    blocks: np.ndarray
    grid: TruncationGrid
    intertwining_residuals: tuple
    isometry_defects: tuple
    dc: DCReport

    @property
    def embedding(self) -> np.ndarray:
        size, h, _ = self.blocks.shape
        return self.blocks.reshape(size * h, h)


def defect_and_dilate(
    ops,
    grid: Optional[TruncationGrid] = None,
    tol: float = 1e-8,
) -> DilationReport:
    """Defect operator and truncated dilation of a doubly commuting pure tuple.

    ops is a CompressedTuple or a plain list of square contractions (the
    latter needs an explicit grid for the dilation caps; a CompressedTuple
    defaults to the caps of its home grid).  The defect is
    (prod_j (I - T_j T_j*))^(1/2); the embedding sends h to the
    grid-indexed family D T^(*k) h.  Purity (spectral radius < 1) and
    double commutation are checked; the reported isometry defects are the
    geometric tails 1 - ‖Pi e_i‖^2, which vanish as caps grow.
    """
    if isinstance(ops, CompressedTuple):
        if grid is None:
            grid = ops.subspace.grid
        ops = ops.ops
    if grid is None:
        raise GridMismatch("a plain operator list needs an explicit dilation grid")
    vs = [as_entries(x) for x in ops]
    h = vs[0].shape[0]
    if any(x.shape != (h, h) for x in vs):
        raise GridMismatch("all tuple entries must be square of equal size")
    if len(vs) != grid.nvars:
        raise GridMismatch("dilation grid must have one variable per operator")
    for j, x in enumerate(vs):
        if operator_norm(x) > 1.0 + tol:
            raise PrereqFailed(f"operator {j} is not a contraction")
        radius = float(np.max(np.abs(np.linalg.eigvals(x))))
        if radius >= 1.0 - 1e-8:
            raise PrereqFailed(
                f"operator {j} has spectral radius {radius:.6f}; adjoint powers do not decay"
            )
    report = dc_report(vs, tol)
    if not report.is_doubly_commuting:
        raise PrereqFailed(
            f"tuple is not doubly commuting (worst commutator {report.max_commutator:.3e})"
        )
    prod = np.eye(h, dtype=np.complex128)
    for x in vs:
        prod = prod @ (np.eye(h, dtype=np.complex128) - x @ x.conj().T)
    prod = 0.5 * (prod + prod.conj().T)
    defect = hermitian_sqrt(prod)
    blocks = np.empty((grid.size, h, h), dtype=np.complex128)
    for i, k in enumerate(grid.indices()):
        x = np.eye(h, dtype=np.complex128)
        for j, kj in enumerate(k):
            for _ in range(kj):
                x = vs[j].conj().T @ x
        blocks[i] = defect @ x
    # Pi T_j* and (backward_j (x) I) Pi agree except on the top slice, where
    # the truncation drops one adjoint power; report that tail.
    inter = []
    for j in range(grid.nvars):
        left = np.einsum("khl,lm->khm", blocks, vs[j].conj().T)
        right = backward_within(grid, j, blocks.reshape(grid.size, h * h)).reshape(
            grid.size, h, h
        )
        inter.append(float(np.linalg.norm((left - right).reshape(grid.size * h, h), 2)))
    sq = np.einsum("khl,khm->lm", blocks.conj(), blocks)
    defects = tuple(float(x) for x in (1.0 - np.real(np.diag(sq))))
    return DilationReport(
        defect=defect,
        blocks=blocks,
        grid=grid,
        intertwining_residuals=tuple(inter),
        isometry_defects=defects,
        dc=report,
    )


# ---------------------------------------------------------------------------
# the main factorization


@dataclass(frozen=True)
class Factorization:
    """Recovered factored form of a doubly commuting mixed invariant subspace.

    theta is the recovered forward symbol (raw series, defect measured);
    left_zeros lists, per forward variable, the zero multiset of the inner
    factor the forward block is divisible by (empty when the block fills
    its variable), and left_dims the per-variable block dimensions.
    """

    split: int
    theta: InnerFunction
    lam: complex
    wandering_dim: int
    factors: tuple
    left_zeros: tuple
    left_dims: tuple
    residuals: dict
    tolerances: dict


def _shift_drop(shape: tuple, tensor: np.ndarray, m: tuple) -> np.ndarray:
    """z^m placement inside a fixed tensor shape, truncating what overflows."""
    out = np.zeros(shape, dtype=np.complex128)
    src = tuple(slice(0, s - mj) for mj, s in zip(m, shape))
    dst = tuple(slice(mj, s) for mj, s in zip(m, shape))
    out[dst] = tensor[src]
    return out


def factorize_mixed(
    s: Subspace,
    k: int,
    tol: float = 1e-8,
    prereq_tol: Optional[float] = None,
    rank_epsilon: float = DEFAULT_RANK_EPSILON,
    inner_tol: float = 1e-3,
    cluster_radius: float = 1e-4,
) -> Factorization:
    """Factor a doubly commuting mixed invariant subspace at its truncation.

    Recovers the inner symbol of the forward block from the wandering
    space (whose matricization across the split must have rank-one left
    column space), the backward-block factor spaces from mode fibers of
    the wandering block, the forward-block structure from mode fibers of
    the full matricized basis, and all zero multisets from eigenvalues of
    compressed shifts.

    prereq_tol gates the invariance and double commutation checks; it
    defaults to tol but usually needs room for backward truncation tails
    of kernel spans.  rank_epsilon must sit above the symbol truncation
    tails (the adjoint compression does not kill the wandering directions
    exactly, only up to the symbol's first dropped coefficient).
    StructureViolation means the data contradicts the factored form;
    PrereqFailed means a hypothesis visibly fails.
    """
    n = s.grid.nvars
    if not 1 <= k < n:
        raise GridMismatch(f"split {k} must leave at least one backward variable")
    gate = float(tol if prereq_tol is None else prereq_tol)
    basis = s.basis
    # one pass over the variables: keep the compressions (shared by the
    # commutation gate and the wandering computation below) and test only
    # the invariance direction the split actually requires of each var.
    comps = []
    fwd_res = []
    bwd_res = []
    for j in range(n):
        shifted = shift_within(s.grid, j, basis)
        cj = basis.conj().T @ shifted
        comps.append(cj)
        if j < k:
            null = _interior_null(s, j, rank_epsilon)
            if null.shape[1] == 0:
                fwd_res.append(0.0)
            else:
                mx = shifted @ null
                fwd_res.append(operator_norm(mx - basis @ (cj @ null)))
        else:
            bx = backward_within(s.grid, j, basis)
            bwd_res.append(operator_norm(bx - basis @ (basis.conj().T @ bx)))
    if any(r > gate for r in fwd_res):
        raise PrereqFailed(
            f"not forward invariant in the first {k} variables: {tuple(fwd_res)}"
        )
    if any(r > gate for r in bwd_res):
        raise PrereqFailed(f"not backward invariant past the split: {tuple(bwd_res)}")
    dc = dc_report(comps, gate)
    if dc.max_commutator > gate:
        raise PrereqFailed(
            f"compressed tuple is not doubly commuting (worst {dc.max_commutator:.3e})"
        )
    w = wandering(s, tuple(range(k)), rank_epsilon, entries=comps[:k])
    r = w.dim
    if r == 0:
        raise PrereqFailed("empty wandering space")
    split = GridSplit(s.grid, k)
    mats = [matricize(split, w.basis[:, i]) for i in range(r)]
    stacked = np.hstack(mats)
    u, sing, _ = np.linalg.svd(stacked, full_matrices=False)
    ratio = float(sing[1] / sing[0]) if sing.size > 1 else 0.0
    if ratio > 1e-6:
        raise StructureViolation(
            f"wandering matricization is not rank one across the split "
            f"(singular value ratio {ratio:.3e})"
        )
    theta_raw = u[:, 0]
    theta_vec, lam = normalize_unimodular(theta_raw)
    theta_el = HardyElement(split.left, theta_vec)
    ok_inner, inner_defect = inner_check(theta_el, inner_tol)
    if not ok_inner:
        raise StructureViolation(
            f"recovered forward symbol is not close to inner (defect {inner_defect:.3e})"
        )
    # each matricization is theta (outer) q_i, so q_i = mat.T conj(theta)
    qcols = np.column_stack([mat.T @ np.conj(theta_raw) for mat in mats])
    qbasis, qdec = orthonormalize(qcols, rank_epsilon)
    if qdec.rank != r:
        raise StructureViolation(
            f"backward block of the wandering space has rank {qdec.rank}, expected {r}"
        )
    right = split.right
    fibers = []
    fiber_dims = []
    for i in range(right.nvars):
        t = qbasis.reshape(right.shape + (r,))
        unfold = np.moveaxis(t, i, 0).reshape(right.shape[i], -1)
        fb, fdec = orthonormalize(unfold, rank_epsilon)
        fibers.append(fb)
        fiber_dims.append(fdec.rank)
    if int(np.prod(fiber_dims)) != r:
        raise StructureViolation(
            f"mode fiber dimensions {fiber_dims} do not multiply to the wandering dim {r}"
        )
    kron = fibers[0]
    for fb in fibers[1:]:
        kron = np.kron(kron, fb)
    tensor_resid = max(
        operator_norm(qbasis - kron @ (kron.conj().T @ qbasis)),
        operator_norm(kron - qbasis @ (qbasis.conj().T @ kron)),
    )
    factors = []
    for i, fb in enumerate(fibers):
        cap = right.caps[i]
        if fiber_dims[i] == cap + 1:
            factors.append(FullAtTruncation())
            continue
        var_grid = TruncationGrid((cap,))
        v = fb.conj().T @ shift_within(var_grid, 0, fb)
        eigs = np.linalg.eigvals(v)
        factors.append(ModelFactor(cluster_points(eigs, cluster_radius)))
    # left column space across the split, from the full matricized basis
    left_grid = split.left
    smats = np.hstack([matricize(split, s.basis[:, i]) for i in range(s.dim)])
    if smats.shape[1] >= 4 * smats.shape[0] and rank_epsilon >= 1e-6:
        # the span survives in the small Gram, far cheaper than the SVD
        # of the wide stack; same rank convention on sqrt(eigenvalues),
        # valid because the cutoff clears the Gram's sqrt(eps) floor.
        evals, evecs = np.linalg.eigh(smats @ smats.conj().T)
        sig = np.sqrt(np.clip(evals, 0.0, None))[::-1]
        cutoff = rank_epsilon * max(float(sig[0]) if sig.size else 0.0, 1.0)
        ldim = int(np.sum(sig > cutoff))
        lbasis = evecs[:, ::-1][:, :ldim]
    else:
        lbasis, ldec = orthonormalize(smats, rank_epsilon)
        ldim = ldec.rank
    if ldim * r != s.dim:
        raise StructureViolation(
            f"left space dim {ldim} times wandering dim {r} is not dim S = {s.dim}"
        )
    lfibers = []
    for j in range(k):
        t = lbasis.reshape(left_grid.shape + (ldim,))
        unfold = np.moveaxis(t, j, 0).reshape(left_grid.shape[j], -1)
        fb, fdec = orthonormalize(unfold, rank_epsilon)
        lfibers.append(fb)
    if int(np.prod([fb.shape[1] for fb in lfibers])) != ldim:
        raise StructureViolation(
            f"forward fiber dims {[fb.shape[1] for fb in lfibers]} do not multiply "
            f"to the forward block dim {ldim}"
        )
    lkron = lfibers[0]
    for fb in lfibers[1:]:
        lkron = np.kron(lkron, fb)
    left_split_resid = max(
        operator_norm(lbasis - lkron @ (lkron.conj().T @ lbasis)),
        operator_norm(lkron - lbasis @ (lbasis.conj().T @ lkron)),
    )
    # zeros of the forward inner factors: the complement of each fiber is
    # a truncated model space, and the compressed shift there has the
    # zeros as eigenvalues
    left_zeros = []
    for j, fb in enumerate(lfibers):
        comp = _null_space(fb.conj().T, rank_epsilon)
        if comp.shape[1] == 0:
            left_zeros.append(())
            continue
        var_grid = TruncationGrid((left_grid.caps[j],))
        v = comp.conj().T @ shift_within(var_grid, 0, comp)
        eigs = np.linalg.eigvals(v)
        left_zeros.append(cluster_points(eigs, cluster_radius))
    membership = float(np.linalg.norm(theta_vec - lbasis @ (lbasis.conj().T @ theta_vec)))
    rec = np.kron(lbasis, qbasis)
    recon_resid = max(
        operator_norm(s.basis - rec @ (rec.conj().T @ s.basis)),
        operator_norm(rec - s.basis @ (s.basis.conj().T @ rec)),
    )
    residuals = {
        "forward_invariance": float(max(fwd_res)),
        "backward_invariance": float(max(bwd_res)),
        "double_commutation": float(dc.max_commutator),
        "left_rank_ratio": ratio,
        "inner_defect": float(inner_defect),
        "symbol_membership": membership,
        "tensor_split": float(tensor_resid),
        "left_split": float(left_split_resid),
        "reconstruction": float(recon_resid),
    }
    tolerances = {
        "tol": float(tol),
        "prereq_tol": gate,
        "rank_epsilon": float(rank_epsilon),
        "inner_tol": float(inner_tol),
        "cluster_radius": float(cluster_radius),
    }
    theta_inner = InnerFunction(
        split.left, theta_el, RawSeries(), 2.0 * float(inner_defect)
    )
    return Factorization(
        split=k,
        theta=theta_inner,
        lam=lam,
        wandering_dim=r,
        factors=tuple(factors),
        left_zeros=tuple(left_zeros),
        left_dims=tuple(fb.shape[1] for fb in lfibers),
        residuals=residuals,
        tolerances=tolerances,
    )


# ---------------------------------------------------------------------------
# worked constructions


def kernel_product_subspace(alphas: Sequence, grid: TruncationGrid) -> Subspace:
    """Full first variable tensored with a span of kernels in the rest.

    alphas lists pairwise distinct points of the polydisc in the backward
    variables; the resulting subspace has wandering dimension len(alphas)
    for the first-variable shift.
    """
    if grid.nvars < 2:
        raise GridMismatch("need at least one backward variable")
    right = TruncationGrid(grid.caps[1:])
    pts = []
    for a in alphas:
        w = (a,) if np.isscalar(a) or isinstance(a, complex) else tuple(a)
        pts.append(KernelPoint(tuple(complex(x) for x in w)))
    if len(set(p.w for p in pts)) != len(pts):
        raise DomainError("kernel points must be pairwise distinct")
    cols = np.column_stack([szego_kernel(p, right).coeffs for p in pts])
    rbasis, rdec = orthonormalize(cols)
    if rdec.rank != len(pts):
        raise NumericError("kernel columns are numerically dependent at this truncation")
    left = np.eye(grid.caps[0] + 1, dtype=np.complex128)
    return Subspace(grid, np.kron(left, rbasis))


@dataclass(frozen=True)
class PhiSymbol:
    """A disc-to-disc symbol used in the rank-one-wandering construction:
    either the constant c or the linear map c * z."""

    kind: str
    c: complex

    def __post_init__(self):
        if self.kind not in ("const", "linear"):
            raise Unsupported(f"phi symbols are 'const' or 'linear', got {self.kind!r}")
        object.__setattr__(self, "c", complex(self.c))
        if abs(self.c) > 1 - 1e-6:
            raise DomainError(f"phi coefficient {self.c} too close to the boundary")


@dataclass(frozen=True)
class UnitWanderingData:
    """Data for the construction with a single wandering direction.

    phis gives one symbol per backward variable; psi, when provided, must
    satisfy |psi|^2 = prod (1 - |phi_j|^2) on the torus (both sides are
    constant for the supported symbols).
    """

    phis: tuple
    psi: Optional[complex] = None


@dataclass(frozen=True)
class UnitWanderingReport:
    wandering_dim: int
    sampled_deviation: float
    tail_bound: float
    samples: int
    psi: complex
    verdict: str
    invariance_residual: float


def unit_wandering_subspace(
    data: UnitWanderingData,
    grid: TruncationGrid,
    samples: int = 64,
    cls_tol: float = 1e-3,
    rank_epsilon: float = DEFAULT_RANK_EPSILON,
):
    """Build the subspace generated by psi(z) prod_j (1 - phi_j(z) w_j)^(-1).

    The generator, as a function of the backward variables, is the kernel
    at the point with coordinates conj(phi_j(z)); multiplied by all powers
    of the forward variable it spans a mixed invariant subspace with a one
    dimensional wandering space.  Returns (subspace, report); the report
    samples the generator's slice norms on the torus, which equal 1 up to
    the declared truncation tail.
    """
    phis = tuple(data.phis)
    if grid.nvars != 1 + len(phis):
        raise GridMismatch(f"{len(phis)} symbols need {1 + len(phis)} variables")
    moduli = [abs(p.c) for p in phis]
    target = 1.0
    for m in moduli:
        target *= 1.0 - m * m
    psi = data.psi
    if psi is None:
        psi = complex(np.sqrt(target))
    else:
        psi = complex(psi)
        if abs(abs(psi) ** 2 - target) > 1e-10:
            raise DomainError(
                f"|psi|^2 = {abs(psi)**2:.6e} does not match prod(1 - |phi|^2) = {target:.6e}"
            )
    zcap = grid.caps[0]
    right = TruncationGrid(grid.caps[1:])
    z_degree_needed = sum(
        cap for p, cap in zip(phis, right.caps) if p.kind == "linear"
    )
    if z_degree_needed > zcap:
        raise DegreeOverflow(
            f"linear symbols need z degree {z_degree_needed}, cap is {zcap}"
        )
    gen = np.zeros(grid.shape, dtype=np.complex128)
    for l in right.indices():
        coef = psi
        zdeg = 0
        for p, lj in zip(phis, l):
            coef *= p.c ** lj
            if p.kind == "linear":
                zdeg += lj
        gen[(zdeg,) + tuple(l)] += coef
    # every truncated forward translate, including the partially dropped
    # ones near the cap: with them the span is exactly forward invariant
    # inside the grid, and the backward shift of a dropped-tail column is
    # exactly a multiple of the next column.
    cols = np.column_stack(
        [_shift_drop(grid.shape, gen, (m,) + (0,) * right.nvars).reshape(-1) for m in range(zcap + 1)]
    )
    s = subspace_from_columns(grid, cols, rank_epsilon)
    w = wandering(s, (0,), rank_epsilon)
    if w.dim != 1:
        raise StructureViolation(f"wandering dimension {w.dim}, expected 1")
    # backward invariance in the w variables holds only up to kernel tails
    # of order |c|^(cap+1), hence the separate classification gate
    cls = classify(s, 1, cls_tol, rank_epsilon)
    inv_residual = float(
        max([cls.forward_residuals[0]] + list(cls.backward_residuals[1:]))
    )
    # torus samples of the generator's slice norms
    angles = 2.0 * np.pi * np.arange(samples) / samples
    vander = np.exp(1j * np.outer(angles, np.arange(zcap + 1)))
    slices = np.tensordot(vander, gen.reshape(zcap + 1, -1), axes=(1, 0))
    norms = np.linalg.norm(slices, axis=1)
    deviation = float(np.max(np.abs(norms - 1.0)))
    tail = sum(m ** (2 * (cap + 1)) for m, cap in zip(moduli, right.caps)) + 1e-13
    report = UnitWanderingReport(
        wandering_dim=w.dim,
        sampled_deviation=deviation,
        tail_bound=float(tail),
        samples=int(samples),
        psi=psi,
        verdict=cls.verdict,
        invariance_residual=inv_residual,
    )
    return s, report
