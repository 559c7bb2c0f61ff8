"""Scalar and complex fields on planar rectangles.

Three interchangeable backends:

* ``ExprField``  -- expression tree, partial derivatives are exact;
* ``GridField``  -- uniform samples, order-2 finite differences (central in
  the interior, one-sided at the boundary) and bilinear off-node evaluation;
* ``FuncField`` -- an arbitrary evaluation rule, optionally carrying
  analytically known partial-derivative fields (used for the outputs of the
  antiderivative operators, whose partials are known exactly even though the
  values come from quadrature).

Complex fields are stored as a pair of real fields, mirroring the systematic
Re/Im decomposition used everywhere downstream.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Union

import numpy as np

from . import expressions as ex
from .errors import (
    DomainError,
    NonvanishingError,
    ParameterError,
    ResolutionError,
)

NONVANISHING_EPS = 1e-10


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ParameterError(f"point components must be finite, got ({self.x}, {self.y})")

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class DomainSpec:
    """Rectangle [x_min, x_max] x [y_min, y_max] with a base point and grid counts."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    nx: int = 41
    ny: int = 41
    base: Optional[Point] = None

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ParameterError("domain bounds must satisfy x_min < x_max and y_min < y_max")
        if self.nx < 3 or self.ny < 3:
            raise ResolutionError(f"grid counts must be >= 3, got nx={self.nx}, ny={self.ny}")
        if self.base is None:
            object.__setattr__(self, "base", Point(self.x_min, self.y_min))
        if not self.contains(self.base.x, self.base.y):
            raise ParameterError(f"base point {self.base} lies outside the rectangle")

    @property
    def hx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def hy(self) -> float:
        return (self.y_max - self.y_min) / (self.ny - 1)

    def xs(self, nx: Optional[int] = None) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, nx or self.nx)

    def ys(self, ny: Optional[int] = None) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, ny or self.ny)

    def mesh(self, nx: Optional[int] = None, ny: Optional[int] = None, margin: int = 0):
        """Meshgrid (X, Y) of sample points; ``margin`` trims that many cells per side."""
        xs = self.xs(nx)
        ys = self.ys(ny)
        if margin:
            if 2 * margin >= len(xs) or 2 * margin >= len(ys):
                raise ResolutionError("margin removes the whole sample grid")
            xs = xs[margin:-margin]
            ys = ys[margin:-margin]
        return np.meshgrid(xs, ys)

    def contains(self, x, y, tol: float = 1e-12) -> bool:
        return bool(
            np.all(x >= self.x_min - tol)
            and np.all(x <= self.x_max + tol)
            and np.all(y >= self.y_min - tol)
            and np.all(y <= self.y_max + tol)
        )

    def with_resolution(self, nx: int, ny: int) -> "DomainSpec":
        return DomainSpec(self.x_min, self.x_max, self.y_min, self.y_max, nx, ny, self.base)


# ---------------------------------------------------------------------------
# Scalar fields
# ---------------------------------------------------------------------------


class ScalarField:
    """Real-valued field on a rectangle.  Immutable; all operations are pure."""

    domain: DomainSpec

    # backend hooks -----------------------------------------------------
    def _values(self, x, y):
        raise NotImplementedError

    def dx(self) -> "ScalarField":
        raise NotImplementedError

    def dy(self) -> "ScalarField":
        raise NotImplementedError

    # public evaluation -------------------------------------------------
    def evaluate(self, p: Point) -> float:
        if not self.domain.contains(p.x, p.y):
            raise DomainError(f"point ({p.x}, {p.y}) outside domain")
        return float(self._values(np.asarray(p.x, float), np.asarray(p.y, float)))

    def __call__(self, x, y):
        return self._values(np.asarray(x, float), np.asarray(y, float))

    def sample(self, nx: Optional[int] = None, ny: Optional[int] = None, margin: int = 0):
        xg, yg = self.domain.mesh(nx, ny, margin)
        return self._values(xg, yg)

    def to_grid(self, domain: Optional[DomainSpec] = None) -> "GridField":
        dom = domain or self.domain
        xg, yg = dom.mesh()
        return GridField(dom, np.asarray(self._values(xg, yg), float) + np.zeros_like(xg))

    # arithmetic --------------------------------------------------------
    def __add__(self, other):
        return _combine(self, _coerce(other, self.domain), "add")

    def __radd__(self, other):
        return _combine(_coerce(other, self.domain), self, "add")

    def __sub__(self, other):
        return _combine(self, _coerce(other, self.domain), "sub")

    def __rsub__(self, other):
        return _combine(_coerce(other, self.domain), self, "sub")

    def __mul__(self, other):
        return _combine(self, _coerce(other, self.domain), "mul")

    def __rmul__(self, other):
        return _combine(_coerce(other, self.domain), self, "mul")

    def __truediv__(self, other):
        return _combine(self, _coerce(other, self.domain), "div")

    def __rtruediv__(self, other):
        return _combine(_coerce(other, self.domain), self, "div")

    def __neg__(self):
        return _combine(_coerce(-1.0, self.domain), self, "mul")


class ExprField(ScalarField):
    def __init__(self, domain: DomainSpec, expr: Union[ex.Expr, str, float]):
        if isinstance(expr, str):
            expr = ex.parse_expression(expr)
        self.domain = domain
        self.expr = ex.as_expr(expr)

    def _values(self, x, y):
        out = self.expr.ev(x, y)
        return np.broadcast_to(np.asarray(out, float), np.broadcast(x, y).shape)

    def dx(self) -> "ExprField":
        return ExprField(self.domain, self.expr.diff("x"))

    def dy(self) -> "ExprField":
        return ExprField(self.domain, self.expr.diff("y"))

    def __repr__(self):
        return f"ExprField({self.expr})"


def _fd1(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """First derivative: central interior, 3-point one-sided ends (order 2)."""
    if values.shape[axis] < 3:
        raise ResolutionError("need at least 3 samples per axis for derivatives")
    v = np.moveaxis(values, axis, 0)
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - v[:-2]) / (2 * h)
    d[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h)
    d[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * h)
    return np.moveaxis(d, 0, axis)


def _fd2(values: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Second derivative: central interior, 4-point one-sided ends (order 2)."""
    if values.shape[axis] < 4:
        raise ResolutionError("need at least 4 samples per axis for second derivatives")
    v = np.moveaxis(values, axis, 0)
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - 2 * v[1:-1] + v[:-2]) / (h * h)
    d[0] = (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) / (h * h)
    d[-1] = (2 * v[-1] - 5 * v[-2] + 4 * v[-3] - v[-4]) / (h * h)
    return np.moveaxis(d, 0, axis)


class GridField(ScalarField):
    def __init__(self, domain: DomainSpec, values: np.ndarray):
        values = np.asarray(values, float)
        if values.shape != (domain.ny, domain.nx):
            raise DomainError(
                f"grid shape {values.shape} does not match domain (ny={domain.ny}, nx={domain.nx})"
            )
        if not np.all(np.isfinite(values)):
            raise ParameterError("grid samples must be finite")
        self.domain = domain
        self.values = values
        self.values.setflags(write=False)

    def _values(self, x, y):
        # bilinear interpolation; exact at the nodes, clamped at the edges
        d = self.domain
        fx = np.clip((np.asarray(x, float) - d.x_min) / d.hx, 0.0, d.nx - 1.0)
        fy = np.clip((np.asarray(y, float) - d.y_min) / d.hy, 0.0, d.ny - 1.0)
        i0 = np.minimum(fx.astype(int), d.nx - 2)
        j0 = np.minimum(fy.astype(int), d.ny - 2)
        tx = fx - i0
        ty = fy - j0
        v = self.values
        return (
            (1 - tx) * (1 - ty) * v[j0, i0]
            + tx * (1 - ty) * v[j0, i0 + 1]
            + (1 - tx) * ty * v[j0 + 1, i0]
            + tx * ty * v[j0 + 1, i0 + 1]
        )

    def dx(self) -> "GridField":
        return GridField(self.domain, _fd1(self.values, self.domain.hx, axis=1))

    def dy(self) -> "GridField":
        return GridField(self.domain, _fd1(self.values, self.domain.hy, axis=0))

    def laplacian_values(self) -> np.ndarray:
        """5-point stencil in the interior, order-2 one-sided at the boundary."""
        return _fd2(self.values, self.domain.hx, axis=1) + _fd2(
            self.values, self.domain.hy, axis=0
        )


class FuncField(ScalarField):
    """Field defined by an evaluation rule, with optional exact partials."""

    def __init__(
        self,
        domain: DomainSpec,
        fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
        dx: Union[ScalarField, Callable[[], ScalarField], None] = None,
        dy: Union[ScalarField, Callable[[], ScalarField], None] = None,
    ):
        self.domain = domain
        self.fn = fn
        self._dx = dx
        self._dy = dy

    def _values(self, x, y):
        out = self.fn(x, y)
        return np.broadcast_to(np.asarray(out, float), np.broadcast(x, y).shape)

    def _resolve(self, slot: str) -> ScalarField:
        cur = getattr(self, slot)
        if cur is None:
            axis = 0 if slot == "_dx" else 1
            cur = _numeric_partial(self, axis)
        elif callable(cur) and not isinstance(cur, ScalarField):
            cur = cur()
        setattr(self, slot, cur)
        return cur

    def dx(self) -> ScalarField:
        return self._resolve("_dx")

    def dy(self) -> ScalarField:
        return self._resolve("_dy")


def _numeric_partial(f: ScalarField, axis: int) -> FuncField:
    """Central-difference fallback for fields without analytic partials."""

    def fn(x, y):
        h = 1e-6 * (1.0 + np.abs(x if axis == 0 else y))
        if axis == 0:
            return (f._values(x + h, y) - f._values(x - h, y)) / (2 * h)
        return (f._values(x, y + h) - f._values(x, y - h)) / (2 * h)

    return FuncField(f.domain, fn)


def _coerce(other, domain: DomainSpec) -> ScalarField:
    if isinstance(other, ScalarField):
        return other
    if isinstance(other, (int, float)):
        return ExprField(domain, ex.Const(float(other)))
    return NotImplemented  # pragma: no cover


_EXPR_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}
_NP_OPS = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
    "div": np.divide,
}


def _combine(a: ScalarField, b: ScalarField, op: str) -> ScalarField:
    if isinstance(a, ExprField) and isinstance(b, ExprField):
        return ExprField(a.domain, _EXPR_OPS[op](a.expr, b.expr))
    if isinstance(a, GridField) or isinstance(b, GridField):
        grid = a if isinstance(a, GridField) else b
        xg, yg = grid.domain.mesh()
        return GridField(grid.domain, _NP_OPS[op](a._values(xg, yg), b._values(xg, yg)))
    npop = _NP_OPS[op]
    out = FuncField(a.domain, lambda x, y: npop(a._values(x, y), b._values(x, y)))
    if op in ("add", "sub"):
        out._dx = lambda: _combine(a.dx(), b.dx(), op)
        out._dy = lambda: _combine(a.dy(), b.dy(), op)
    elif op == "mul":
        out._dx = lambda: a.dx() * b + a * b.dx()
        out._dy = lambda: a.dy() * b + a * b.dy()
    else:  # div
        out._dx = lambda: (a.dx() * b - a * b.dx()) / (b * b)
        out._dy = lambda: (a.dy() * b - a * b.dy()) / (b * b)
    return out


def exp_field(f: ScalarField) -> ScalarField:
    """Pointwise exponential with exact derivative propagation."""
    if isinstance(f, ExprField):
        return ExprField(f.domain, ex.Exp(f.expr))
    if isinstance(f, GridField):
        return GridField(f.domain, np.exp(f.values))
    out = FuncField(f.domain, lambda x, y: np.exp(f._values(x, y)))
    out._dx = lambda: out * f.dx()
    out._dy = lambda: out * f.dy()
    return out


def constant_field(value: float, domain: DomainSpec) -> ExprField:
    return ExprField(domain, ex.Const(float(value)))


# ---------------------------------------------------------------------------
# Complex fields
# ---------------------------------------------------------------------------


class ComplexField:
    """Complex-valued field stored as a pair of real fields on one rectangle."""

    def __init__(self, re: ScalarField, im: ScalarField):
        self.re = re
        self.im = im

    @property
    def domain(self) -> DomainSpec:
        return self.re.domain

    @classmethod
    def constant(cls, value: complex, domain: DomainSpec) -> "ComplexField":
        return cls(constant_field(value.real, domain), constant_field(value.imag, domain))

    @classmethod
    def from_real(cls, f: ScalarField) -> "ComplexField":
        return cls(f, constant_field(0.0, f.domain))

    def evaluate(self, p: Point) -> complex:
        return complex(self.re.evaluate(p), self.im.evaluate(p))

    def __call__(self, x, y):
        return self.re(x, y) + 1j * self.im(x, y)

    def sample(self, nx=None, ny=None, margin: int = 0):
        return self.re.sample(nx, ny, margin) + 1j * self.im.sample(nx, ny, margin)

    # arithmetic --------------------------------------------------------
    def _coerce(self, other) -> "ComplexField":
        if isinstance(other, ComplexField):
            return other
        if isinstance(other, ScalarField):
            return ComplexField.from_real(other)
        if isinstance(other, (int, float, complex)):
            return ComplexField.constant(complex(other), self.domain)
        return NotImplemented  # pragma: no cover

    def __add__(self, other):
        o = self._coerce(other)
        return ComplexField(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return ComplexField(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        return ComplexField(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            return ComplexField(self.re * other, self.im * other)
        if isinstance(other, (int, float)):
            return ComplexField(self.re * other, self.im * other)
        o = self._coerce(other)
        return ComplexField(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScalarField):
            return ComplexField(self.re / other, self.im / other)
        if isinstance(other, (int, float)):
            return ComplexField(self.re / other, self.im / other)
        o = self._coerce(other)
        den = o.abs2()
        num = self * o.conj()
        return ComplexField(num.re / den, num.im / den)

    def __neg__(self):
        return ComplexField(-self.re, -self.im)

    def conj(self) -> "ComplexField":
        return ComplexField(self.re, -self.im)

    def abs2(self) -> ScalarField:
        return self.re * self.re + self.im * self.im

    def times_i(self) -> "ComplexField":
        return ComplexField(-self.im, self.re)

    # calculus ----------------------------------------------------------
    def dx(self) -> "ComplexField":
        return ComplexField(self.re.dx(), self.im.dx())

    def dy(self) -> "ComplexField":
        return ComplexField(self.re.dy(), self.im.dy())

    def dz(self) -> "ComplexField":
        ux, uy = self.re.dx(), self.re.dy()
        vx, vy = self.im.dx(), self.im.dy()
        return ComplexField(0.5 * (ux + vy), 0.5 * (vx - uy))

    def dzbar(self) -> "ComplexField":
        ux, uy = self.re.dx(), self.re.dy()
        vx, vy = self.im.dx(), self.im.dy()
        return ComplexField(0.5 * (ux - vy), 0.5 * (vx + uy))


FieldLike = Union[ScalarField, ComplexField]


def d_z(f: FieldLike) -> ComplexField:
    if isinstance(f, ScalarField):
        return ComplexField(0.5 * f.dx(), -0.5 * f.dy())
    return f.dz()


def d_zbar(f: FieldLike) -> ComplexField:
    if isinstance(f, ScalarField):
        return ComplexField(0.5 * f.dx(), 0.5 * f.dy())
    return f.dzbar()


def wirtinger(f: FieldLike) -> tuple[ComplexField, ComplexField]:
    """Return (d_z f, d_zbar f)."""
    return d_z(f), d_zbar(f)


def laplacian(f: FieldLike) -> FieldLike:
    if isinstance(f, ComplexField):
        return ComplexField(laplacian(f.re), laplacian(f.im))
    if isinstance(f, GridField):
        return GridField(f.domain, f.laplacian_values())
    return f.dx().dx() + f.dy().dy()


def gradient_norm_ratio(f: ScalarField) -> ScalarField:
    """(|grad f| / f)**2 pointwise; f must be nonvanishing on the rectangle."""
    check_nonvanishing(f, "f")
    return (f.dx() * f.dx() + f.dy() * f.dy()) / (f * f)


# ---------------------------------------------------------------------------
# Sampling diagnostics
# ---------------------------------------------------------------------------


def max_abs(f: FieldLike, nx=None, ny=None, margin: int = 0) -> float:
    vals = f.sample(nx, ny, margin) if isinstance(f, ComplexField) else f.sample(nx, ny, margin)
    return float(np.max(np.abs(vals)))


def min_abs_location(f: FieldLike, nx=None, ny=None) -> tuple[float, Point]:
    dom = f.domain
    xg, yg = dom.mesh(nx, ny)
    vals = np.abs(f.re(xg, yg) + 1j * f.im(xg, yg)) if isinstance(f, ComplexField) else np.abs(f(xg, yg))
    k = int(np.argmin(vals))
    return float(vals.flat[k]), Point(float(xg.flat[k]), float(yg.flat[k]))


def check_nonvanishing(f: FieldLike, name: str, threshold: float = NONVANISHING_EPS) -> None:
    m, at = min_abs_location(f)
    if m <= threshold:
        raise NonvanishingError(name, m, (at.x, at.y))


# ---------------------------------------------------------------------------
# CSV grid interchange
# ---------------------------------------------------------------------------


def write_grid_csv(path, grid: GridField) -> None:
    d = grid.domain
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{d.nx},{d.ny},{d.x_min!r},{d.x_max!r},{d.y_min!r},{d.y_max!r}\n")
        for row in grid.values:  # y increasing per line
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def read_grid_csv(path) -> GridField:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if len(header) != 6:
            raise DomainError(f"{path}: malformed CSV header")
        nx, ny = int(header[0]), int(header[1])
        x_min, x_max, y_min, y_max = map(float, header[2:])
        rows = [list(map(float, line.strip().split(","))) for line in fh if line.strip()]
    values = np.asarray(rows, float)
    if values.shape != (ny, nx):
        raise DomainError(f"{path}: expected {ny} rows of {nx} values, got {values.shape}")
    return GridField(DomainSpec(x_min, x_max, y_min, y_max, nx, ny), values)


def write_complex_csv(base_path: str, cf: ComplexField) -> None:
    write_grid_csv(base_path + "_re.csv", cf.re.to_grid())
    write_grid_csv(base_path + "_im.csv", cf.im.to_grid())


def read_complex_csv(base_path: str) -> ComplexField:
    return ComplexField(read_grid_csv(base_path + "_re.csv"), read_grid_csv(base_path + "_im.csv"))
