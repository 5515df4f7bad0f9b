"""Elements of truncated Hardy spaces and the operators that move them.

Conventions used throughout:

* inner products are linear in the first slot: <f, g> = sum f_k conj(g_k);
* forward shifts and multipliers are exact maps into an enlarged grid,
  so they are honest isometries / Toeplitz actions with no truncation loss;
* backward shifts lower degrees and are exact on a fixed grid;
* "within"-variants compress the result back to the fixed grid and are the
  building blocks for compressions of shifts to subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.signal import fftconvolve

from .errors import DegreeOverflow, DomainError, GridMismatch, NumericError, Unsupported
from .grid import GridSplit, TruncationGrid, embed_rows, matricize, unmatricize
from .numkernel import OperatorMatrix

__all__ = [
    "HardyElement",
    "KernelPoint",
    "InnerFunction",
    "Monomial",
    "Blaschke1D",
    "TensorProduct",
    "RawSeries",
    "zero_element",
    "monomial",
    "from_tensor",
    "hardy_inner",
    "evaluate",
    "regroup",
    "ungroup",
    "shift",
    "backward_shift",
    "shift_within",
    "backward_within",
    "multiplier",
    "multiplier_within",
    "multiply",
    "monomial_shift",
    "support_degrees",
    "blaschke_coeffs",
    "blaschke_tail_estimate",
    "szego_kernel",
    "inner_check",
    "autocorrelation",
    "inner_monomial",
    "inner_blaschke",
    "inner_tensor",
    "inner_raw",
]


@dataclass(frozen=True)
class HardyElement:
    """Coefficient vector of a truncated analytic function on a grid."""

    grid: TruncationGrid
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128).reshape(-1)
        if coeffs.shape[0] != self.grid.size:
            raise GridMismatch(
                f"{coeffs.shape[0]} coefficients for a grid of size {self.grid.size}"
            )
        if not np.all(np.isfinite(coeffs)):
            raise NumericError("non-finite coefficients")
        coeffs = coeffs.copy()
        coeffs.flags.writeable = False
        object.__setattr__(self, "coeffs", coeffs)

    def tensor(self) -> np.ndarray:
        return self.coeffs.reshape(self.grid.shape)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


def zero_element(grid: TruncationGrid) -> HardyElement:
    return HardyElement(grid, np.zeros(grid.size, dtype=np.complex128))


def monomial(grid: TruncationGrid, k) -> HardyElement:
    """The basis element z^k."""
    c = np.zeros(grid.size, dtype=np.complex128)
    c[grid.lin_index(k)] = 1.0
    return HardyElement(grid, c)


def from_tensor(grid: TruncationGrid, tensor: np.ndarray) -> HardyElement:
    tensor = np.asarray(tensor, dtype=np.complex128)
    if tensor.shape != grid.shape:
        raise GridMismatch(f"tensor shape {tensor.shape}, grid shape {grid.shape}")
    return HardyElement(grid, tensor.reshape(-1))


def hardy_inner(f: HardyElement, g: HardyElement) -> complex:
    """<f, g>, linear in f and conjugate-linear in g."""
    if f.grid != g.grid:
        raise GridMismatch("inner product needs a common grid")
    return complex(np.vdot(g.coeffs, f.coeffs))


def evaluate(f: HardyElement, w) -> complex:
    """Point evaluation f(w) by contracting one variable at a time."""
    w = tuple(complex(x) for x in w)
    if len(w) != f.grid.nvars:
        raise GridMismatch(f"point has {len(w)} entries, grid has {f.grid.nvars} variables")
    t = f.tensor()
    for wj in w:
        powers = wj ** np.arange(t.shape[0])
        t = np.tensordot(powers, t, axes=(0, 0))
    return complex(t)


def regroup(split: GridSplit, f: HardyElement) -> np.ndarray:
    """Coefficients as a (left block) x (right block) matrix; norm preserving."""
    if f.grid != split.parent:
        raise GridMismatch("element does not live on the split's parent grid")
    return matricize(split, f.coeffs)


def ungroup(split: GridSplit, mat: np.ndarray) -> HardyElement:
    """Inverse of regroup."""
    return HardyElement(split.parent, unmatricize(split, mat))


# ---------------------------------------------------------------------------
# shifts and multipliers


def _axis_slices(ndim: int, axis: int, sl: slice) -> tuple:
    return tuple(sl if i == axis else slice(None) for i in range(ndim))


def _check_var(grid: TruncationGrid, j: int) -> int:
    j = int(j)
    if not 0 <= j < grid.nvars:
        raise GridMismatch(f"variable {j} out of range for {grid.nvars} variables")
    return j


def shift(grid: TruncationGrid, j: int) -> OperatorMatrix:
    """Multiplication by z_j as an exact isometry into the grid with cap d_j + 1."""
    j = _check_var(grid, j)
    dst_caps = list(grid.caps)
    dst_caps[j] += 1
    dst = TruncationGrid(tuple(dst_caps))
    entries = np.zeros((dst.size, grid.size), dtype=np.complex128)
    ranges = [np.arange(s) for s in grid.shape]
    ranges[j] = ranges[j] + 1
    rows = np.ravel_multi_index(np.ix_(*ranges), dst.shape).ravel()
    entries[rows, np.arange(grid.size)] = 1.0
    return OperatorMatrix(entries, src_grid=grid, dst_grid=dst)


def backward_shift(grid: TruncationGrid, j: int) -> OperatorMatrix:
    """The adjoint shift z^k -> z^(k - e_j), exact on a fixed grid."""
    j = _check_var(grid, j)
    entries = np.zeros((grid.size, grid.size), dtype=np.complex128)
    src_ranges = [np.arange(s) for s in grid.shape]
    src_ranges[j] = np.arange(1, grid.shape[j])
    dst_ranges = list(src_ranges)
    dst_ranges[j] = src_ranges[j] - 1
    cols = np.ravel_multi_index(np.ix_(*src_ranges), grid.shape).ravel()
    rows = np.ravel_multi_index(np.ix_(*dst_ranges), grid.shape).ravel()
    entries[rows, cols] = 1.0
    return OperatorMatrix(entries, src_grid=grid, dst_grid=grid)


def shift_within(grid: TruncationGrid, j: int, x: np.ndarray) -> np.ndarray:
    """Truncated forward shift on a fixed grid, applied columnwise.

    Coefficients pushed past the cap are dropped; this is the compression
    P M_{z_j} P used when a subspace of a fixed grid is all there is.
    Accepts a vector of length grid.size or a (grid.size, r) matrix.
    """
    j = _check_var(grid, j)
    x = np.asarray(x, dtype=np.complex128)
    tail = x.shape[1:]
    t = x.reshape(grid.shape + tail)
    out = np.zeros_like(t)
    nd = len(grid.shape)
    out[_axis_slices(nd, j, slice(1, None))] = t[_axis_slices(nd, j, slice(None, -1))]
    return out.reshape(x.shape)


def backward_within(grid: TruncationGrid, j: int, x: np.ndarray) -> np.ndarray:
    """Backward shift along variable j, applied columnwise (exact)."""
    j = _check_var(grid, j)
    x = np.asarray(x, dtype=np.complex128)
    tail = x.shape[1:]
    t = x.reshape(grid.shape + tail)
    out = np.zeros_like(t)
    nd = len(grid.shape)
    out[_axis_slices(nd, j, slice(None, -1))] = t[_axis_slices(nd, j, slice(1, None))]
    return out.reshape(x.shape)


def multiplier(phi: HardyElement, domain: TruncationGrid) -> OperatorMatrix:
    """Exact multiplication operator f -> phi * f into the sum grid.

    The target caps are domain caps plus phi's caps, so no coefficient is
    lost.  Column k of the matrix is phi shifted by the multi-index k.
    """
    if phi.grid.nvars != domain.nvars:
        raise GridMismatch("multiplier symbol and domain need the same variable count")
    dst = TruncationGrid(tuple(a + b for a, b in zip(domain.caps, phi.grid.caps)))
    pt = phi.tensor()
    entries = np.zeros((dst.size, domain.size), dtype=np.complex128)
    col = np.zeros(dst.shape, dtype=np.complex128)
    for c, k in enumerate(domain.indices()):
        col[:] = 0.0
        block = tuple(slice(kj, kj + s) for kj, s in zip(k, pt.shape))
        col[block] = pt
        entries[:, c] = col.reshape(-1)
    return OperatorMatrix(entries, src_grid=domain, dst_grid=dst)


def multiplier_within(phi: HardyElement, grid: TruncationGrid) -> OperatorMatrix:
    """Square compression of multiplication by phi to a fixed grid.

    Column k holds the coefficients of z^k * phi that survive truncation;
    this is P M_phi restricted to the grid, exact on columns whose shifted
    support stays within caps.
    """
    if phi.grid.nvars != grid.nvars:
        raise GridMismatch("multiplier symbol and grid need the same variable count")
    pt = phi.tensor()
    shape = grid.shape
    entries = np.zeros((grid.size, grid.size), dtype=np.complex128)
    col = np.zeros(shape, dtype=np.complex128)
    for c, k in enumerate(grid.indices()):
        col[:] = 0.0
        src = tuple(
            slice(0, min(ps, s - kj)) for ps, kj, s in zip(pt.shape, k, shape)
        )
        dst = tuple(slice(kj, kj + sl.stop) for kj, sl in zip(k, src))
        col[dst] = pt[src]
        entries[:, c] = col.reshape(-1)
    return OperatorMatrix(entries, src_grid=grid, dst_grid=grid)


def multiply(f: HardyElement, g: HardyElement) -> HardyElement:
    """Exact product on the sum grid (coefficient convolution)."""
    if f.grid.nvars != g.grid.nvars:
        raise GridMismatch("product needs the same variable count")
    dst = TruncationGrid(tuple(a + b for a, b in zip(f.grid.caps, g.grid.caps)))
    prod = fftconvolve(f.tensor(), g.tensor())
    return from_tensor(dst, prod)


def support_degrees(f: HardyElement) -> Optional[tuple]:
    """Per-variable maximal degree of the exact nonzero support, None if f = 0."""
    nz = np.nonzero(f.tensor())
    if nz[0].size == 0:
        return None
    return tuple(int(ix.max()) for ix in nz)


def monomial_shift(f: HardyElement, m) -> HardyElement:
    """Exact product z^m * f on the same grid.

    Raises DegreeOverflow when the shifted support would leave the grid,
    so the result is never silently truncated.
    """
    m = tuple(int(x) for x in m)
    if len(m) != f.grid.nvars:
        raise GridMismatch("shift exponent has wrong length")
    if any(x < 0 for x in m):
        raise DegreeOverflow(f"negative shift exponent {m}")
    sup = support_degrees(f)
    if sup is None:
        return f
    if any(s + mj > c for s, mj, c in zip(sup, m, f.grid.caps)):
        raise DegreeOverflow(
            f"support {sup} shifted by {m} leaves caps {f.grid.caps}"
        )
    t = f.tensor()
    out = np.zeros_like(t)
    block_src = tuple(slice(0, s + 1) for s in sup)
    block_dst = tuple(slice(mj, mj + s + 1) for mj, s in zip(m, sup))
    out[block_dst] = t[block_src]
    return from_tensor(f.grid, out)


# ---------------------------------------------------------------------------
# Blaschke products, kernels, inner certificates


def blaschke_coeffs(zeros, cap: int) -> HardyElement:
    """Taylor coefficients, through degree `cap`, of the finite Blaschke
    product with the given zeros.

    Each zero a != 0 contributes (conj(a)/|a|) * (a - z) / (1 - conj(a) z);
    a zero at the origin contributes the factor -z.
    """
    zeros = [complex(a) for a in zeros]
    cap = int(cap)
    if cap < 0:
        raise DegreeOverflow("cap must be non-negative")
    for a in zeros:
        if abs(a) > 1 - 1e-6:
            raise DomainError(f"Blaschke zero {a} too close to the boundary")
    coeffs = np.zeros(cap + 1, dtype=np.complex128)
    coeffs[0] = 1.0
    for a in zeros:
        if a == 0:
            factor = np.zeros(min(cap, 1) + 1, dtype=np.complex128)
            if cap >= 1:
                factor[1] = -1.0
        else:
            u = np.conj(a) / abs(a)
            factor = np.empty(cap + 1, dtype=np.complex128)
            factor[0] = u * a
            if cap >= 1:
                powers = np.conj(a) ** np.arange(cap)
                factor[1:] = -u * (1 - abs(a) ** 2) * powers
        coeffs = np.convolve(coeffs, factor)[: cap + 1]
    return HardyElement(TruncationGrid((cap,)), coeffs)


def blaschke_tail_estimate(zeros, cap: int) -> float:
    """Order-of-magnitude envelope for the truncation defect,
    2 p rho^(cap+1) / (1 - rho); clustered zeros can exceed it by small
    combinatorial factors.  The certified figure is the measured
    defect_bound of the InnerFunction, not this."""
    zeros = [complex(a) for a in zeros]
    if not zeros:
        return 0.0
    rho = max(abs(a) for a in zeros)
    if rho == 0.0:
        return 0.0
    return 2.0 * len(zeros) * rho ** (cap + 1) / (1.0 - rho)


@dataclass(frozen=True)
class KernelPoint:
    """A point of the open polydisc, used to sample reproducing kernels."""

    w: tuple

    def __post_init__(self):
        w = tuple(complex(x) for x in self.w)
        object.__setattr__(self, "w", w)
        if len(w) < 1:
            raise GridMismatch("kernel point needs at least one coordinate")
        for x in w:
            if abs(x) >= 1.0 - 1e-12:
                raise DomainError(f"kernel point coordinate {x} not inside the disc")


def szego_kernel(point: KernelPoint, grid: TruncationGrid) -> HardyElement:
    """Truncation of the product Szego kernel K(., w); coefficient at k is conj(w)^k."""
    if len(point.w) != grid.nvars:
        raise GridMismatch("kernel point and grid have different variable counts")
    t = np.ones((), dtype=np.complex128)
    for wj, s in zip(point.w, grid.shape):
        t = np.multiply.outer(t, np.conj(wj) ** np.arange(s))
    return from_tensor(grid, t)


def autocorrelation(f: HardyElement) -> np.ndarray:
    """Exact two-sided autocorrelation array R_t = sum_m conj(c_m) c_(m+t).

    The result has shape (2 d_1 + 1, ..., 2 d_n + 1) with lag 0 at the
    centre.  Computed by direct summation, so a monomial gives an exactly
    zero off-centre array.
    """
    t = f.tensor()
    shape = t.shape
    out_shape = tuple(2 * s - 1 for s in shape)
    out = np.zeros(out_shape, dtype=np.complex128)
    for lag in np.ndindex(*out_shape):
        lag_vec = [l - (s - 1) for l, s in zip(lag, shape)]
        src = tuple(
            slice(max(0, -lv), min(s, s - lv)) for lv, s in zip(lag_vec, shape)
        )
        dst = tuple(
            slice(max(0, lv), min(s, s + lv)) for lv, s in zip(lag_vec, shape)
        )
        a = t[src]
        b = t[dst]
        if a.size:
            out[lag] = np.sum(np.conj(a) * b)
    return out


def inner_check(theta: HardyElement, tol: float = 1e-6):
    """Certificate that a truncated series is (close to) inner.

    Returns (ok, r) with r measuring the l1 deviation of the two-sided
    autocorrelation from the delta at lag zero (off-centre lags come in
    conjugate pairs, so r sums each pair once, plus |R_0 - 1|).
    The sup over the torus of | |theta|^2 - 1 | is at most 2 r, and 2 r
    is what InnerFunction stores as defect_bound.
    """
    r_arr = autocorrelation(theta)
    centre = tuple(s - 1 for s in theta.grid.shape)
    c0 = r_arr[centre]
    dev_centre = abs(c0 - 1.0)
    total = float(np.sum(np.abs(r_arr))) - abs(c0) + dev_centre
    r = 0.5 * (total + dev_centre)
    return (r <= tol), float(r)


# ---------------------------------------------------------------------------
# structured inner functions


@dataclass(frozen=True)
class Monomial:
    k: tuple


@dataclass(frozen=True)
class Blaschke1D:
    zeros: tuple
    var: int = 0


@dataclass(frozen=True)
class TensorProduct:
    factors: tuple


@dataclass(frozen=True)
class RawSeries:
    pass


@dataclass(frozen=True)
class InnerFunction:
    """A truncated inner function together with a defect certificate.

    defect_bound is the computed l1 norm of the full two-sided
    autocorrelation minus the lag-zero delta (twice the r of inner_check).
    It dominates both sup| |theta|^2 - 1 | on the torus and the Gram
    deviation ‖M_theta* M_theta - I‖ of the exact multiplier, whose Gram
    rows are autocorrelation slices.
    """

    grid: TruncationGrid
    element: HardyElement
    structure: Union[Monomial, Blaschke1D, TensorProduct, RawSeries]
    defect_bound: float

    def __post_init__(self):
        if self.element.grid != self.grid:
            raise GridMismatch("inner function element lives on the wrong grid")


def inner_monomial(grid: TruncationGrid, k) -> InnerFunction:
    k = grid.validate(k)
    return InnerFunction(grid, monomial(grid, k), Monomial(k), 0.0)


def inner_blaschke(zeros, cap: int, var: int = 0) -> InnerFunction:
    """One-variable truncated Blaschke product with a computed defect bound."""
    el = blaschke_coeffs(zeros, cap)
    _, r = inner_check(el, tol=np.inf)
    structure = Blaschke1D(tuple(complex(a) for a in zeros), var)
    return InnerFunction(el.grid, el, structure, 2.0 * float(r))


def inner_tensor(factors) -> InnerFunction:
    """Tensor product of one-variable inner functions on consecutive variables."""
    factors = tuple(factors)
    if not factors:
        raise DomainError("tensor product needs at least one factor")
    for f in factors:
        if f.grid.nvars != 1:
            raise Unsupported("tensor factors must be one-variable inner functions")
    t = np.ones((), dtype=np.complex128)
    caps = []
    tagged = []
    for i, f in enumerate(factors):
        t = np.multiply.outer(t, f.element.tensor())
        caps.extend(f.grid.caps)
        if isinstance(f.structure, Blaschke1D) and f.structure.var != i:
            f = InnerFunction(
                f.grid, f.element, Blaschke1D(f.structure.zeros, i), f.defect_bound
            )
        tagged.append(f)
    grid = TruncationGrid(tuple(caps))
    # the autocorrelation of a tensor product factorizes across variables,
    # so the l1 deviations compound multiplicatively
    defect = 1.0
    for f in tagged:
        defect *= 1.0 + f.defect_bound
    defect -= 1.0
    return InnerFunction(grid, from_tensor(grid, t), TensorProduct(tuple(tagged)), float(defect))


def inner_raw(element: HardyElement) -> InnerFunction:
    """Wrap an arbitrary coefficient series; the defect is measured, not derived."""
    _, r = inner_check(element, tol=np.inf)
    return InnerFunction(element.grid, element, RawSeries(), 2.0 * float(r))
