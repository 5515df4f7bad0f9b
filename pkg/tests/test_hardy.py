import numpy as np
import pytest

from polyhardy.errors import DegreeOverflow, DomainError, GridMismatch, Unsupported
from polyhardy.grid import GridSplit, TruncationGrid
from polyhardy.hardy import (
    Blaschke1D,
    HardyElement,
    KernelPoint,
    Monomial,
    TensorProduct,
    autocorrelation,
    backward_shift,
    backward_within,
    blaschke_coeffs,
    blaschke_tail_estimate,
    evaluate,
    from_tensor,
    hardy_inner,
    inner_blaschke,
    inner_check,
    inner_monomial,
    inner_raw,
    inner_tensor,
    monomial,
    monomial_shift,
    multiplier,
    multiplier_within,
    multiply,
    regroup,
    shift,
    shift_within,
    support_degrees,
    szego_kernel,
    ungroup,
    zero_element,
)
from polyhardy.numkernel import operator_norm


def test_element_validation():
    g = TruncationGrid((2,))
    with pytest.raises(GridMismatch):
        HardyElement(g, [1.0, 2.0])
    f = HardyElement(g, [1.0, 2.0, 3.0])
    assert f.norm() == pytest.approx(np.sqrt(14.0))
    with pytest.raises(ValueError):
        f.coeffs[0] = 5.0  # frozen


def test_monomial_and_evaluate():
    g = TruncationGrid((2, 2))
    f = monomial(g, (1, 2))
    assert evaluate(f, (0.5, 2.0)) == pytest.approx(0.5 * 4.0)
    assert support_degrees(f) == (1, 2)
    assert support_degrees(zero_element(g)) is None


def test_hardy_inner_convention():
    g = TruncationGrid((1,))
    f = HardyElement(g, [1.0, 1j])
    e = monomial(g, (1,))
    # linear in the first slot, conjugate-linear in the second
    assert hardy_inner(f, e) == pytest.approx(1j)
    assert hardy_inner(e, f) == pytest.approx(-1j)


def test_regroup_roundtrip():
    rng = np.random.default_rng(8)
    g = TruncationGrid((2, 1, 2))
    sp = GridSplit(g, 1)
    f = HardyElement(g, rng.standard_normal(g.size))
    m = regroup(sp, f)
    assert abs(np.linalg.norm(m) - f.norm()) <= 1e-12
    np.testing.assert_array_equal(ungroup(sp, m).coeffs, f.coeffs)


# shifts


def test_shift_enlarges_and_maps_monomials():
    g = TruncationGrid((1,))
    s = shift(g, 0)
    assert s.dst_grid.caps == (2,)
    # 1 -> z and z -> z^2, columns stay orthonormal
    np.testing.assert_array_equal(s.entries[:, 0], monomial(s.dst_grid, (1,)).coeffs)
    np.testing.assert_array_equal(s.entries[:, 1], monomial(s.dst_grid, (2,)).coeffs)
    np.testing.assert_allclose(s.entries.conj().T @ s.entries, np.eye(2), atol=1e-15)


def test_shift_is_isometry_with_adjoint_inverse():
    rng = np.random.default_rng(12)
    g = TruncationGrid((2, 3))
    for j in range(2):
        s = shift(g, j)
        x = rng.standard_normal(g.size) + 1j * rng.standard_normal(g.size)
        np.testing.assert_allclose(s.adjoint().entries @ (s.entries @ x), x, atol=1e-14)


def test_shift_monomial_product_two_vars():
    g = TruncationGrid((1, 1))
    s = shift(g, 0)
    out = s.apply(monomial(g, (0, 1)).coeffs)
    np.testing.assert_array_equal(out, monomial(s.dst_grid, (1, 1)).coeffs)


def test_backward_shift_kills_constants():
    g = TruncationGrid((3,))
    b = backward_shift(g, 0)
    np.testing.assert_array_equal(b.apply(monomial(g, (0,)).coeffs), np.zeros(4))


def test_backward_shift_lowers_monomials():
    g = TruncationGrid((2, 3))
    b = backward_shift(g, 1)
    out = b.apply(monomial(g, (1, 2)).coeffs)
    np.testing.assert_array_equal(out, monomial(g, (1, 1)).coeffs)


def test_backward_then_forward_within():
    rng = np.random.default_rng(0)
    g = TruncationGrid((3, 2))
    x = rng.standard_normal((g.size, 3))
    for j in range(2):
        # the forward shift drops the top slice, so the round trip zeroes
        # exactly that slice and nothing else
        got = backward_within(g, j, shift_within(g, j, x))
        want = x.reshape(g.shape + (3,)).copy()
        idx = [slice(None)] * 3
        idx[j] = g.caps[j]
        want[tuple(idx)] = 0.0
        np.testing.assert_allclose(got, want.reshape(x.shape), atol=1e-15)
    # exact identity on elements supported strictly below the caps
    low = np.zeros(g.size)
    low[g.lin_index((1, 1))] = 1.0
    for j in range(2):
        np.testing.assert_array_equal(
            backward_within(g, j, shift_within(g, j, low)), low
        )


def test_backward_shift_kernel_eigenrelation():
    # K(., a) has coefficients conj(a)^k, so the backward shift acts as
    # multiplication by conj(a) except for the dropped top term; the
    # residual norm is exactly |a|^(d+1)
    a, d = 0.35 + 0.2j, 10
    g = TruncationGrid((d,))
    k = szego_kernel(KernelPoint((a,)), g)
    resid = np.linalg.norm(backward_within(g, 0, k.coeffs) - np.conj(a) * k.coeffs)
    assert resid == pytest.approx(abs(a) ** (d + 1), rel=1e-12)


# multipliers


def test_multiplier_unit_symbol_is_inclusion():
    g = TruncationGrid((2,))
    one = monomial(TruncationGrid((0,)), (0,))
    m = multiplier(one, g)
    np.testing.assert_array_equal(m.entries, np.eye(3))


def test_multiplier_z1_equals_shift():
    g = TruncationGrid((1, 1))
    z1 = monomial(TruncationGrid((1, 0)), (1, 0))
    m = multiplier(z1, g)
    s = shift(g, 0)
    assert m.dst_grid == s.dst_grid
    np.testing.assert_array_equal(m.entries, s.entries)


def test_multiplier_telescoping_tail():
    # (1 - z/2) times the truncated geometric series leaves exactly
    # 1 - (1/2)^(d+1) z^(d+1) on the sum grid
    d = 9
    phi = HardyElement(TruncationGrid((1,)), [1.0, -0.5])
    geo = HardyElement(TruncationGrid((d,)), 0.5 ** np.arange(d + 1))
    prod = multiply(phi, geo)
    want = np.zeros(d + 2, dtype=np.complex128)
    want[0] = 1.0
    want[d + 1] = -(0.5 ** (d + 1))
    np.testing.assert_allclose(prod.coeffs, want, atol=1e-16)
    m = multiplier(phi, geo.grid)
    np.testing.assert_allclose(m.apply(geo.coeffs), want, atol=1e-16)


def test_multiplier_within_truncates():
    g = TruncationGrid((2,))
    z = monomial(TruncationGrid((1,)), (1,))
    m = multiplier_within(z, g)
    want = np.zeros((3, 3))
    want[1, 0] = 1.0
    want[2, 1] = 1.0
    np.testing.assert_array_equal(m.entries, want)


def test_monomial_shift_overflow():
    g = TruncationGrid((2,))
    f = monomial(g, (2,))
    with pytest.raises(DegreeOverflow):
        monomial_shift(f, (1,))


# Blaschke series


def test_blaschke_single_zero_at_origin():
    el = blaschke_coeffs([0.0], 4)
    want = np.zeros(5)
    want[1] = -1.0
    np.testing.assert_array_equal(el.coeffs, want)


def test_blaschke_half_closed_form():
    # (a - z)/(1 - a z) at a = 1/2 expands to 1/2 - 3 sum_k (1/2)^(k+1) z^k
    el = blaschke_coeffs([0.5], 4)
    want = np.array([0.5] + [-3.0 * 0.5 ** (k + 1) for k in range(1, 5)])
    np.testing.assert_allclose(el.coeffs, want, atol=1e-15)


def test_blaschke_rejects_boundary_zero():
    with pytest.raises(DomainError):
        blaschke_coeffs([1.0 - 1e-9], 8)


def test_blaschke_autocorrelation_tail():
    # the analytic tail 2 (1/2)^65 / (1 - 1/2) is below roundoff here, so
    # the deviation floor is the accumulation noise of 65-term products
    el = blaschke_coeffs([0.5], 64)
    r_arr = autocorrelation(el)
    centre = 64
    off = np.abs(r_arr.copy())
    off[centre] = 0.0
    dev = max(float(np.max(off)), abs(r_arr[centre] - 1.0))
    assert dev <= 2.0 * 0.5**65 / (1.0 - 0.5) + 65 * np.finfo(float).eps


def test_autocorrelation_of_monomial_is_delta():
    g = TruncationGrid((3,))
    r = autocorrelation(monomial(g, (2,)))
    want = np.zeros(7)
    want[3] = 1.0
    np.testing.assert_array_equal(r, want)


# kernels


def test_szego_kernel_at_origin():
    g = TruncationGrid((3, 2))
    k = szego_kernel(KernelPoint((0.0, 0.0)), g)
    np.testing.assert_array_equal(k.coeffs, monomial(g, (0, 0)).coeffs)


def test_szego_kernel_geometric_coeffs():
    g = TruncationGrid((3,))
    k = szego_kernel(KernelPoint((0.5,)), g)
    np.testing.assert_allclose(k.coeffs, [1.0, 0.5, 0.25, 0.125], atol=1e-15)


def test_szego_kernel_reproduces_point_values():
    rng = np.random.default_rng(21)
    g = TruncationGrid((4, 3))
    f = HardyElement(g, rng.standard_normal(g.size) + 1j * rng.standard_normal(g.size))
    w = (0.3 - 0.1j, -0.4 + 0.2j)
    k = szego_kernel(KernelPoint(w), g)
    assert hardy_inner(f, k) == pytest.approx(evaluate(f, w), abs=1e-12)


def test_kernel_point_inside_disc():
    with pytest.raises(DomainError):
        KernelPoint((1.0,))


# inner certificates


def test_inner_check_monomial_exact():
    g = TruncationGrid((4, 2))
    ok, r = inner_check(monomial(g, (3, 1)))
    assert ok and r == 0.0


def test_inner_check_half_sum():
    # autocorrelation of (1/2, 1/2) is (1/4, 1/2, 1/4); the certificate
    # counts the off-centre pair once (1/4) plus |R_0 - 1| = 1/2
    g = TruncationGrid((1,))
    ok, r = inner_check(HardyElement(g, [0.5, 0.5]))
    assert not ok
    assert r == pytest.approx(0.75, abs=1e-15)
    assert r >= 0.5


def test_inner_check_truncated_blaschke():
    el = blaschke_coeffs([0.3], 32)
    ok, r = inner_check(el, tol=1e-6)
    assert ok and r <= 1e-8


def test_blaschke_tail_estimate_envelope():
    # order-of-magnitude envelope: within 10x of the measured defect for
    # separated zeros, and decreasing in the cap
    cases = [([0.3], 12), ([0.5], 16), ([0.7j], 24), ([0.3, -0.2 + 0.4j], 24)]
    for zeros, cap in cases:
        _, r = inner_check(blaschke_coeffs(zeros, cap), tol=np.inf)
        est = blaschke_tail_estimate(zeros, cap)
        assert est / 10.0 <= 2.0 * r <= 10.0 * est
        assert blaschke_tail_estimate(zeros, cap + 8) < est
    assert blaschke_tail_estimate([], 10) == 0.0
    assert blaschke_tail_estimate([0.0], 10) == 0.0


# structured inner functions


def test_inner_monomial_structure():
    g = TruncationGrid((3, 2))
    th = inner_monomial(g, (2, 1))
    assert isinstance(th.structure, Monomial)
    assert th.defect_bound == 0.0
    np.testing.assert_array_equal(th.element.coeffs, monomial(g, (2, 1)).coeffs)


def test_inner_blaschke_defect_is_twice_r():
    th = inner_blaschke([0.4], 20)
    _, r = inner_check(th.element, tol=np.inf)
    assert th.defect_bound == pytest.approx(2.0 * r)
    assert isinstance(th.structure, Blaschke1D)


def test_inner_tensor_compounds_defects():
    a = inner_blaschke([0.3], 16)
    b = inner_blaschke([0.5], 16)
    t = inner_tensor([a, b])
    assert isinstance(t.structure, TensorProduct)
    assert t.grid.caps == (16, 16)
    want = (1.0 + a.defect_bound) * (1.0 + b.defect_bound) - 1.0
    assert t.defect_bound == pytest.approx(want)
    # variables are retagged in order
    assert t.structure.factors[1].structure.var == 1


def test_inner_tensor_rejects_multivar_factor():
    g = TruncationGrid((2, 2))
    with pytest.raises(Unsupported):
        inner_tensor([inner_monomial(g, (1, 1))])


def test_multiplier_isometry_within_defect_bound():
    th = inner_blaschke([0.3, -0.45], 40)
    dom = TruncationGrid((10,))
    m = multiplier(th.element, dom)
    gram = m.entries.conj().T @ m.entries
    assert operator_norm(gram - np.eye(dom.size)) <= th.defect_bound + 1e-12


def test_inner_raw_measures_defect():
    g = TruncationGrid((1,))
    th = inner_raw(HardyElement(g, [0.5, 0.5]))
    assert th.defect_bound == pytest.approx(1.5, abs=1e-14)


def test_from_tensor_shape_check():
    g = TruncationGrid((2, 1))
    with pytest.raises(GridMismatch):
        from_tensor(g, np.zeros((2, 2)))
