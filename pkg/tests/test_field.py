"""Scalar/complex fields: backends, Wirtinger calculus, grid FD order, CSV I/O."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from riccati2d import (
    ComplexField,
    DomainSpec,
    ExprField,
    FuncField,
    GridField,
    NonvanishingError,
    Point,
    ResolutionError,
    check_nonvanishing,
    constant_field,
    d_z,
    d_zbar,
    exp_field,
    gradient_norm_ratio,
    laplacian,
    max_abs,
    read_complex_csv,
    read_grid_csv,
    wirtinger,
    write_complex_csv,
    write_grid_csv,
)
from riccati2d import expressions as ex


def test_point_rejects_nonfinite():
    with pytest.raises(Exception):
        Point(float("nan"), 0.0)


def test_domain_validation():
    with pytest.raises(Exception):
        DomainSpec(1.0, 0.0, 0.0, 1.0)
    with pytest.raises(ResolutionError):
        DomainSpec(0.0, 1.0, 0.0, 1.0, 2, 5)


def test_domain_base_defaults_to_lower_left(unit_square):
    assert unit_square.base == Point(0.0, 0.0)
    d = DomainSpec(-1.0, 2.0, 3.0, 4.0)
    assert d.base == Point(-1.0, 3.0)


def test_expr_field_exact_derivatives(unit_square):
    f = ExprField(unit_square, "exp(0.6*x + 0.8*y)")
    xg, yg = unit_square.mesh()
    np.testing.assert_allclose(f.dx()(xg, yg), 0.6 * f(xg, yg), rtol=1e-13)
    np.testing.assert_allclose(f.dy()(xg, yg), 0.8 * f(xg, yg), rtol=1e-13)


def test_wirtinger_of_analytic_field(centered_square):
    """exp(z) has d_zbar = 0 and d_z = itself, machine-exactly for expressions."""
    W = ComplexField(
        ExprField(centered_square, ex.Exp(ex.X) * ex.Cos(ex.Y)),
        ExprField(centered_square, ex.Exp(ex.X) * ex.Sin(ex.Y)),
    )
    assert max_abs(W.dzbar()) < 1e-13
    assert max_abs(W.dz() - W) < 1e-13


def test_laplacian_equals_four_dzbar_dz(unit_square):
    u = ExprField(unit_square, "sin(x)*cosh(y) + x**3")
    dz = d_z(u)
    four = 4.0 * dz.dzbar().re
    assert max_abs(laplacian(u) - four) < 1e-12


@given(a=st.floats(-1.2, 1.2), b=st.floats(-1.2, 1.2))
@settings(max_examples=40, deadline=None)
def test_wirtinger_split_recombines(a, b):
    """d_z + d_zbar = d_x and i(d_z - d_zbar) = d_y on a generic field."""
    dom = DomainSpec(0.0, 1.0, 0.0, 1.0, 21, 21)
    u = ExprField(dom, ex.Exp(ex.Const(a) * ex.X) * ex.Cos(ex.Const(b) * ex.Y))
    dz, dzbar = wirtinger(u)
    xg, yg = dom.mesh()
    got_dx = (dz + dzbar)(xg, yg)
    got_dy = ((dz - dzbar).times_i())(xg, yg)
    np.testing.assert_allclose(got_dx.real, u.dx()(xg, yg), atol=1e-12)
    np.testing.assert_allclose(got_dx.imag, 0.0, atol=1e-12)
    np.testing.assert_allclose(got_dy.real, u.dy()(xg, yg), atol=1e-12)


def grid_of(expr_text, n):
    dom = DomainSpec(0.0, 1.0, 0.0, 1.0, n, n)
    return ExprField(dom, expr_text).to_grid()


def test_grid_field_fd_order_two():
    """Halving h shrinks the first-derivative error by about 4."""
    errs = []
    for n in (17, 33, 65):
        g = grid_of("sin(2*x)*cosh(y)", n)
        exact = ExprField(g.domain, "2*cos(2*x)*cosh(y)")
        xg, yg = g.domain.mesh()
        errs.append(float(np.max(np.abs(g.dx()(xg, yg) - exact(xg, yg)))))
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.0 < coarse / fine < 5.0


def test_grid_laplacian_order_two():
    errs = []
    for n in (17, 33, 65):
        g = grid_of("exp(x)*cos(y) + x**4", n)
        exact = ExprField(g.domain, "12*x**2")
        xg, yg = g.domain.mesh()
        errs.append(float(np.max(np.abs(g.laplacian_values() - exact(xg, yg)))))
    for coarse, fine in zip(errs, errs[1:]):
        assert 3.0 < coarse / fine < 5.0


def test_grid_bilinear_interpolation_exact_on_bilinear():
    g = grid_of("2 + 3*x - y + 0.5*x*y", 11)
    xs = np.array([0.123, 0.77, 0.981])
    ys = np.array([0.05, 0.5, 0.87])
    want = 2 + 3 * xs - ys + 0.5 * xs * ys
    np.testing.assert_allclose(g(xs, ys), want, rtol=1e-13)


def test_func_field_exact_partials(unit_square):
    f = FuncField(
        unit_square,
        lambda x, y: np.exp(x) * np.cos(y),
        dx=lambda: FuncField(unit_square, lambda x, y: np.exp(x) * np.cos(y)),
        dy=lambda: FuncField(unit_square, lambda x, y: -np.exp(x) * np.sin(y)),
    )
    assert max_abs(f.dx() - f) < 1e-13
    xg, yg = unit_square.mesh()
    np.testing.assert_allclose(f.dy()(xg, yg), -np.exp(xg) * np.sin(yg), atol=1e-13)


def test_func_field_numeric_fallback(unit_square):
    f = FuncField(unit_square, lambda x, y: np.sin(x) * np.cosh(y))
    xg, yg = unit_square.mesh()
    np.testing.assert_allclose(f.dx()(xg, yg), np.cos(xg) * np.cosh(yg), atol=1e-8)


def test_arithmetic_combinations(unit_square):
    a = ExprField(unit_square, "x + 1")
    b = ExprField(unit_square, "y + 2")
    combos = [a + b, a - b, a * b, a / b, 2.0 * a, a + 1.0, -a, 1.0 / b]
    xg, yg = unit_square.mesh()
    av, bv = xg + 1, yg + 2
    wants = [av + bv, av - bv, av * bv, av / bv, 2 * av, av + 1, -av, 1 / bv]
    for f, w in zip(combos, wants):
        np.testing.assert_allclose(f(xg, yg), w, rtol=1e-13)
        assert isinstance(f, ExprField)  # expression algebra stays symbolic


def test_mixed_backend_combination_keeps_derivatives(unit_square):
    a = ExprField(unit_square, "x**2")
    b = FuncField(unit_square, lambda x, y: np.cos(y), dy=lambda: ExprField(unit_square, "0-sin(y)"))
    prod = a * b
    xg, yg = unit_square.mesh()
    np.testing.assert_allclose(prod.dx()(xg, yg), 2 * xg * np.cos(yg), atol=1e-12)
    np.testing.assert_allclose(prod.dy()(xg, yg), -(xg**2) * np.sin(yg), atol=1e-12)


def test_exp_field_chain_rule(unit_square):
    g = exp_field(ExprField(unit_square, "x*y"))
    xg, yg = unit_square.mesh()
    np.testing.assert_allclose(g.dx()(xg, yg), yg * np.exp(xg * yg), rtol=1e-12)
    np.testing.assert_allclose(g.dy()(xg, yg), xg * np.exp(xg * yg), rtol=1e-12)


def test_complex_field_algebra(unit_square):
    z = ComplexField(ExprField(unit_square, "x"), ExprField(unit_square, "y"))
    w = ComplexField.constant(complex(0.3, -0.4), unit_square)
    xg, yg = unit_square.mesh()
    zv = xg + 1j * yg
    np.testing.assert_allclose((z * w)(xg, yg), zv * complex(0.3, -0.4), rtol=1e-13)
    shifted = z + ComplexField.constant(2.0, unit_square)
    np.testing.assert_allclose((z / shifted)(xg, yg), zv / (zv + 2), rtol=1e-12)
    np.testing.assert_allclose(z.conj()(xg, yg), np.conj(zv), rtol=1e-13)
    np.testing.assert_allclose(z.abs2()(xg, yg), np.abs(zv) ** 2, rtol=1e-13)
    np.testing.assert_allclose(z.times_i()(xg, yg), 1j * zv, rtol=1e-13)


def test_gradient_norm_ratio(unit_square):
    f = ExprField(unit_square, "exp(x)")
    assert max_abs(gradient_norm_ratio(f) - constant_field(1.0, unit_square)) < 1e-12
    with pytest.raises(NonvanishingError):
        gradient_norm_ratio(ExprField(unit_square, "x - 0.5"))


def test_check_nonvanishing(unit_square):
    check_nonvanishing(ExprField(unit_square, "x + 1"), "f")
    with pytest.raises(NonvanishingError) as err:
        check_nonvanishing(ExprField(unit_square, "x*y"), "f")
    assert "f" in str(err.value)


def test_grid_csv_roundtrip(tmp_path, unit_square):
    g = ExprField(unit_square, "sin(x) + y**2").to_grid()
    path = tmp_path / "field.csv"
    write_grid_csv(path, g)
    back = read_grid_csv(path)
    assert back.domain.nx == g.domain.nx and back.domain.ny == g.domain.ny
    np.testing.assert_allclose(back.values, g.values, rtol=1e-15)


def test_complex_csv_roundtrip(tmp_path, unit_square):
    cf = ComplexField(ExprField(unit_square, "x"), ExprField(unit_square, "y*y"))
    base = str(tmp_path / "cf")
    write_complex_csv(base, cf)
    back = read_complex_csv(base)
    xg, yg = unit_square.mesh()
    np.testing.assert_allclose(back(xg, yg), cf(xg, yg), atol=1e-14)
