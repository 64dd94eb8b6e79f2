"""Second-order forward-mode differentiation.

A :class:`Jet2` carries value, gradient and Hessian of a scalar function of
``d`` parameters. All three may have a common leading batch shape, so one
pass of jet arithmetic evaluates a whole grid of points at once::

    value: B        grad: B + (d,)        hess: B + (d, d)

Arithmetic is exact up to rounding (no truncation): the chain rule for a
scalar function ``phi`` reads

    grad(phi(a)) = phi'(a) grad a
    hess(phi(a)) = phi'(a) hess a + phi''(a) grad a grad a^T
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, UnknownIdentifier
from .expr import BinOp, Call, Expr, Neg, Num, Param, evaluate, free_params, parse_expression


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., :, None] * b[..., None, :]


def _col(x: np.ndarray) -> np.ndarray:
    return np.asarray(x)[..., None]


def _mat(x: np.ndarray) -> np.ndarray:
    return np.asarray(x)[..., None, None]


class Jet2:
    __slots__ = ("value", "grad", "hess")

    def __init__(self, value, grad, hess):
        self.value = np.asarray(value, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = np.asarray(hess, dtype=float)

    @property
    def dim(self) -> int:
        return self.grad.shape[-1]

    @classmethod
    def constant(cls, c: float, dim: int, batch: tuple = ()) -> "Jet2":
        return cls(np.full(batch, float(c)), np.zeros(batch + (dim,)), np.zeros(batch + (dim, dim)))

    @classmethod
    def coordinate(cls, values, index: int, dim: int) -> "Jet2":
        values = np.asarray(values, dtype=float)
        grad = np.zeros(values.shape + (dim,))
        grad[..., index] = 1.0
        return cls(values, grad, np.zeros(values.shape + (dim, dim)))

    def _lift(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return other
        return Jet2(np.broadcast_to(float(other), self.value.shape), np.zeros_like(self.grad), np.zeros_like(self.hess))

    def __add__(self, other):
        other = self._lift(other)
        return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        a, b = self, other
        hess = (
            _mat(a.value) * b.hess
            + _mat(b.value) * a.hess
            + _outer(a.grad, b.grad)
            + _outer(b.grad, a.grad)
        )
        return Jet2(a.value * b.value, _col(a.value) * b.grad + _col(b.value) * a.grad, hess)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        if np.any(self.value == 0.0):
            raise DomainError("division by zero")
        r = 1.0 / self.value
        return self.apply(r, -r * r, 2.0 * r * r * r)

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def apply(self, f0, f1, f2) -> "Jet2":
        """Compose with a scalar function given its value and two derivatives at ``self.value``."""
        grad = _col(f1) * self.grad
        hess = _mat(f1) * self.hess + _mat(f2) * _outer(self.grad, self.grad)
        return Jet2(f0, grad, hess)

    def __pow__(self, c: float) -> "Jet2":
        c = float(c)
        x = self.value
        if c == 0.0:
            return Jet2.constant(1.0, self.dim, x.shape)
        if c == 1.0:
            return self
        if c.is_integer():
            if c < 0 and np.any(x == 0.0):
                raise DomainError("zero raised to a negative power")
            if c >= 2:
                p2 = x ** (c - 2.0)
                return self.apply(p2 * x * x, c * p2 * x, c * (c - 1.0) * p2)
            return self.apply(x**c, c * x ** (c - 1.0), c * (c - 1.0) * x ** (c - 2.0))
        if np.any(x <= 0.0):
            raise DomainError(f"non-integer power {c} of a non-positive value")
        return self.apply(x**c, c * x ** (c - 1.0), c * (c - 1.0) * x ** (c - 2.0))

    def sin(self):
        s, c = np.sin(self.value), np.cos(self.value)
        return self.apply(s, c, -s)

    def cos(self):
        s, c = np.sin(self.value), np.cos(self.value)
        return self.apply(c, -s, -c)

    def tan(self):
        c = np.cos(self.value)
        if np.any(c == 0.0):
            raise DomainError("tan at a pole")
        t = np.tan(self.value)
        sec2 = 1.0 + t * t
        return self.apply(t, sec2, 2.0 * t * sec2)

    def exp(self):
        e = np.exp(self.value)
        return self.apply(e, e, e)

    def log(self):
        if np.any(self.value <= 0.0):
            raise DomainError("log of a non-positive value")
        r = 1.0 / self.value
        return self.apply(np.log(self.value), r, -r * r)

    def sqrt(self):
        if np.any(self.value <= 0.0):
            raise DomainError("sqrt of a non-positive value")
        s = np.sqrt(self.value)
        return self.apply(s, 0.5 / s, -0.25 / (s * s * s))

    def __repr__(self):
        return f"Jet2(value={self.value!r}, grad={self.grad!r}, hess={self.hess!r})"


JetFunction = Callable[[Sequence[Jet2]], Jet2]


def compile_jet(node: Expr, params: Sequence[str]) -> JetFunction:
    """Turn an AST into a closure mapping coordinate jets to a result jet.

    Identifiers are bound here, so an undeclared name fails at compile time.
    """
    index = {name: i for i, name in enumerate(params)}
    unknown = free_params(node) - set(index)
    if unknown:
        raise UnknownIdentifier(f"undeclared identifier(s): {', '.join(sorted(unknown))}")
    return _compile(node, index)


def _compile(node: Expr, index: dict[str, int]) -> JetFunction:
    if isinstance(node, Num):
        c = node.value
        return lambda xs: Jet2.constant(c, xs[0].dim, xs[0].value.shape)
    if isinstance(node, Param):
        i = index[node.name]
        return lambda xs: xs[i]
    if isinstance(node, Neg):
        f = _compile(node.operand, index)
        return lambda xs: -f(xs)
    if isinstance(node, BinOp):
        left = _compile(node.left, index)
        if node.op == "^":
            c = evaluate(node.right)
            return lambda xs: left(xs) ** c
        right = _compile(node.right, index)
        if node.op == "+":
            return lambda xs: left(xs) + right(xs)
        if node.op == "-":
            return lambda xs: left(xs) - right(xs)
        if node.op == "*":
            return lambda xs: left(xs) * right(xs)
        if node.op == "/":
            return lambda xs: left(xs) / right(xs)
    if isinstance(node, Call):
        arg = _compile(node.arg, index)
        method = node.func
        return lambda xs: getattr(arg(xs), method)()
    raise TypeError(f"cannot compile {node!r}")


def coordinate_jets(points, dim: int | None = None) -> list[Jet2]:
    """Coordinate jets u_i for a point (shape (d,)) or a batch (shape B + (d,))."""
    points = np.asarray(points, dtype=float)
    d = points.shape[-1] if dim is None else dim
    return [Jet2.coordinate(points[..., i], i, d) for i in range(d)]


def evaluate_jet2(expr: Expr | str, point, params: Sequence[str]) -> Jet2:
    """Exact value, gradient and Hessian of ``expr`` at ``point``."""
    if isinstance(expr, str):
        expr = parse_expression(expr)
    point = np.asarray(point, dtype=float)
    if point.shape[-1] != len(params):
        raise ValueError(f"point has {point.shape[-1]} coordinates, expected {len(params)}")
    with np.errstate(all="raise", under="ignore"):
        try:
            return compile_jet(expr, params)(coordinate_jets(point))
        except FloatingPointError as exc:
            raise DomainError(str(exc)) from None


def finite_difference_jet(func: Callable[[np.ndarray], float], point, h: float = 1e-5):
    """Central differences for gradient and Hessian. Cross-check oracle only."""
    x = np.asarray(point, dtype=float)
    d = x.size
    f0 = func(x)
    grad = np.zeros(d)
    hess = np.zeros((d, d))
    eye = np.eye(d) * h
    for i in range(d):
        grad[i] = (func(x + eye[i]) - func(x - eye[i])) / (2 * h)
        hess[i, i] = (func(x + eye[i]) - 2 * f0 + func(x - eye[i])) / (h * h)
        for j in range(i):
            hess[i, j] = hess[j, i] = (
                func(x + eye[i] + eye[j])
                - func(x + eye[i] - eye[j])
                - func(x - eye[i] + eye[j])
                + func(x - eye[i] - eye[j])
            ) / (4 * h * h)
    return f0, grad, hess


__all__ = [
    "Jet2",
    "compile_jet",
    "coordinate_jets",
    "evaluate_jet2",
    "finite_difference_jet",
]
