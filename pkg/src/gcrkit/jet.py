"""Forward-mode jet arithmetic: truncated Taylor data up to third order.

A Jet carries a scalar value together with its partial derivatives up to
``order`` (at most 3) with respect to ``n`` chart variables (at most 3).
Arithmetic propagates derivatives exactly via the Leibniz and chain rules,
so downstream curvature code never touches a finite difference.  Jets are
treated as immutable values; no operation mutates its operands.

``finite_difference_jet`` is the independent test oracle.  It estimates the
same derivative slots from central differences of plain evaluations and must
never be used in a production code path.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence

import numpy as np

__all__ = [
    "Jet",
    "JetDomainError",
    "FiniteDifferenceError",
    "ELEMENTARY_TAGS",
    "jet_variable",
    "jet_constant",
    "jet_elementary",
    "finite_difference_jet",
    "sin",
    "cos",
    "tan",
    "exp",
    "log",
    "sqrt",
    "asin",
    "acos",
    "atan",
    "atan2",
]

_EPS = float(np.finfo(float).eps)


class JetDomainError(ValueError):
    """An elementary function was evaluated where it is not differentiable."""

    def __init__(self, tag: str, value: float):
        super().__init__(f"{tag} is undefined or not differentiable at {value!r}")
        self.tag = tag
        self.value = value


class FiniteDifferenceError(RuntimeError):
    """The finite-difference stencil could not be evaluated."""


def _sym3(grad: np.ndarray, hess: np.ndarray) -> np.ndarray:
    # symmetrized grad (x) hess contribution: g_i h_jk + g_j h_ik + g_k h_ij
    t = np.einsum("i,jk->ijk", grad, hess)
    return t + t.transpose(1, 0, 2) + t.transpose(2, 1, 0)


class Jet:
    """Truncated Taylor expansion of a scalar field at a chart point.

    Derivative slots above ``order`` are kept identically zero.  ``hess`` is
    symmetric and ``third`` is symmetric under every index permutation; all
    operations preserve both properties.
    """

    __slots__ = ("n", "order", "value", "grad", "hess", "third")

    def __init__(
        self,
        n: int,
        order: int,
        value: float,
        grad: np.ndarray | None = None,
        hess: np.ndarray | None = None,
        third: np.ndarray | None = None,
    ):
        if n not in (1, 2, 3):
            raise ValueError(f"jet arity must be 1, 2 or 3, got {n}")
        if order not in (0, 1, 2, 3):
            raise ValueError(f"jet order must be between 0 and 3, got {order}")
        self.n = n
        self.order = order
        self.value = float(value)
        self.grad = np.zeros(n) if grad is None else np.asarray(grad, dtype=float)
        self.hess = np.zeros((n, n)) if hess is None else np.asarray(hess, dtype=float)
        self.third = (
            np.zeros((n, n, n)) if third is None else np.asarray(third, dtype=float)
        )

    # -- construction helpers ------------------------------------------------

    @classmethod
    def _raw(cls, n: int, order: int, value: float, grad, hess, third) -> "Jet":
        out = object.__new__(cls)
        out.n = n
        out.order = order
        out.value = value
        out.grad = grad
        out.hess = hess
        out.third = third
        return out

    def _zero_like(self, value: float = 0.0) -> "Jet":
        n = self.n
        return Jet._raw(
            n, self.order, value, np.zeros(n), np.zeros((n, n)), np.zeros((n, n, n))
        )

    def _coerce(self, other) -> "Jet | None":
        if isinstance(other, Jet):
            if other.n != self.n:
                raise ValueError(
                    f"jet arity mismatch: {self.n} versus {other.n}"
                )
            if other.order != self.order:
                raise ValueError(
                    f"jet order mismatch: {self.order} versus {other.order}"
                )
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self._zero_like(float(other))
        return None

    # -- derived views --------------------------------------------------------

    def partial(self, axis: int) -> "Jet":
        """Jet of the partial derivative along ``axis``, one order lower."""
        if not 0 <= axis < self.n:
            raise ValueError(f"axis {axis} out of range for arity {self.n}")
        if self.order < 1:
            raise ValueError("cannot take a partial of an order-0 jet")
        n = self.n
        return Jet._raw(
            n,
            self.order - 1,
            float(self.grad[axis]),
            self.hess[axis].copy(),
            self.third[axis].copy(),
            np.zeros((n, n, n)),
        )

    def truncated(self, order: int) -> "Jet":
        """Copy of this jet with derivative data above ``order`` dropped."""
        if order > self.order:
            raise ValueError(f"cannot extend a jet of order {self.order} to {order}")
        n = self.n
        grad = self.grad.copy() if order >= 1 else np.zeros(n)
        hess = self.hess.copy() if order >= 2 else np.zeros((n, n))
        third = self.third.copy() if order >= 3 else np.zeros((n, n, n))
        return Jet._raw(n, order, self.value, grad, hess, third)

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet._raw(
            self.n,
            self.order,
            self.value + o.value,
            self.grad + o.grad,
            self.hess + o.hess,
            self.third + o.third,
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Jet._raw(
            self.n,
            self.order,
            self.value - o.value,
            self.grad - o.grad,
            self.hess - o.hess,
            self.third - o.third,
        )

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o.__sub__(self)

    def __neg__(self):
        return Jet._raw(
            self.n, self.order, -self.value, -self.grad, -self.hess, -self.third
        )

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            c = float(other)
            return Jet._raw(
                self.n,
                self.order,
                self.value * c,
                self.grad * c,
                self.hess * c,
                self.third * c,
            )
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self, o
        value = a.value * b.value
        grad = a.grad if a.order < 1 else a.value * b.grad + b.value * a.grad
        n = self.n
        hess = np.zeros((n, n))
        third = np.zeros((n, n, n))
        if a.order >= 2:
            cross = np.outer(a.grad, b.grad)
            hess = a.value * b.hess + b.value * a.hess + cross + cross.T
        if a.order >= 3:
            third = (
                a.value * b.third
                + b.value * a.third
                + _sym3(a.grad, b.hess)
                + _sym3(b.grad, a.hess)
            )
        return Jet._raw(n, a.order, value, grad, hess, third)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * (1.0 / float(other))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o._reciprocal()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self._reciprocal()

    def _reciprocal(self) -> "Jet":
        v = self.value
        if v == 0.0:
            raise JetDomainError("reciprocal", v)
        iv = 1.0 / v
        return _compose(self, iv, -iv * iv, 2.0 * iv**3, -6.0 * iv**4)

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            return _int_pow(self, int(p))
        if isinstance(p, (float, np.floating)):
            if float(p).is_integer():
                return _int_pow(self, int(p))
            return _real_pow(self, float(p))
        return NotImplemented

    def __abs__(self):
        v = self.value
        if v == 0.0:
            raise JetDomainError("abs", v)
        return self if v > 0 else -self

    def __repr__(self):
        return f"Jet(n={self.n}, order={self.order}, value={self.value!r})"


def jet_variable(index: int, value: float, n: int, order: int) -> Jet:
    """Seed jet for chart variable ``index`` at ``value``.

    The gradient is the ``index``-th unit vector; all higher slots are zero.
    """
    if n not in (1, 2, 3):
        raise ValueError(f"jet arity must be 1, 2 or 3, got {n}")
    if order not in (1, 2, 3):
        raise ValueError(f"variable jets need order 1, 2 or 3, got {order}")
    if not 0 <= index < n:
        raise ValueError(f"variable index {index} out of range for arity {n}")
    grad = np.zeros(n)
    grad[index] = 1.0
    return Jet._raw(n, order, float(value), grad, np.zeros((n, n)), np.zeros((n, n, n)))


def jet_constant(value: float, n: int, order: int) -> Jet:
    """Constant jet: value with all derivative slots zero."""
    return Jet(n, order, float(value))


def _compose(g: Jet, f0: float, f1: float, f2: float, f3: float) -> Jet:
    """Univariate chain rule: jet of f(g) from derivatives of f at g.value."""
    n = g.n
    grad = np.zeros(n)
    hess = np.zeros((n, n))
    third = np.zeros((n, n, n))
    if g.order >= 1:
        grad = f1 * g.grad
    if g.order >= 2:
        hess = f1 * g.hess + f2 * np.outer(g.grad, g.grad)
    if g.order >= 3:
        third = (
            f1 * g.third
            + f2 * _sym3(g.grad, g.hess)
            + f3 * np.einsum("i,j,k->ijk", g.grad, g.grad, g.grad)
        )
    return Jet._raw(n, g.order, f0, grad, hess, third)


def _int_pow(x: Jet, p: int) -> Jet:
    if p == 0:
        return x._zero_like(1.0)
    if p < 0:
        return _int_pow(x, -p)._reciprocal()
    # square-and-multiply keeps the operation count small and deterministic
    result = None
    base = x
    k = p
    while k:
        if k & 1:
            result = base if result is None else result * base
        k >>= 1
        if k:
            base = base * base
    return result


def _real_pow(x: Jet, p: float) -> Jet:
    v = x.value
    if v <= 0.0:
        raise JetDomainError("power", v)
    f0 = v**p
    return _compose(
        x,
        f0,
        p * v ** (p - 1.0),
        p * (p - 1.0) * v ** (p - 2.0),
        p * (p - 1.0) * (p - 2.0) * v ** (p - 3.0),
    )


# -- elementary functions ------------------------------------------------------


def sin(x: Jet | float):
    if not isinstance(x, Jet):
        return math.sin(x)
    s, c = math.sin(x.value), math.cos(x.value)
    return _compose(x, s, c, -s, -c)


def cos(x: Jet | float):
    if not isinstance(x, Jet):
        return math.cos(x)
    s, c = math.sin(x.value), math.cos(x.value)
    return _compose(x, c, -s, -c, s)


def tan(x: Jet | float):
    if not isinstance(x, Jet):
        return math.tan(x)
    t = math.tan(x.value)
    d = 1.0 + t * t
    return _compose(x, t, d, 2.0 * t * d, d * (2.0 + 6.0 * t * t))


def exp(x: Jet | float):
    if not isinstance(x, Jet):
        return math.exp(x)
    e = math.exp(x.value)
    return _compose(x, e, e, e, e)


def log(x: Jet | float):
    if not isinstance(x, Jet):
        return math.log(x)
    v = x.value
    if v <= 0.0:
        raise JetDomainError("log", v)
    return _compose(x, math.log(v), 1.0 / v, -1.0 / (v * v), 2.0 / v**3)


def sqrt(x: Jet | float):
    if not isinstance(x, Jet):
        return math.sqrt(x)
    v = x.value
    if v <= 0.0:
        raise JetDomainError("sqrt", v)
    r = math.sqrt(v)
    return _compose(x, r, 0.5 / r, -0.25 / (v * r), 0.375 / (v * v * r))


def asin(x: Jet | float):
    if not isinstance(x, Jet):
        return math.asin(x)
    v = x.value
    if not -1.0 < v < 1.0:
        raise JetDomainError("asin", v)
    d = 1.0 - v * v
    return _compose(
        x, math.asin(v), d**-0.5, v * d**-1.5, (1.0 + 2.0 * v * v) * d**-2.5
    )


def acos(x: Jet | float):
    if not isinstance(x, Jet):
        return math.acos(x)
    v = x.value
    if not -1.0 < v < 1.0:
        raise JetDomainError("acos", v)
    d = 1.0 - v * v
    return _compose(
        x, math.acos(v), -(d**-0.5), -v * d**-1.5, -(1.0 + 2.0 * v * v) * d**-2.5
    )


def atan(x: Jet | float):
    if not isinstance(x, Jet):
        return math.atan(x)
    v = x.value
    d = 1.0 + v * v
    return _compose(
        x, math.atan(v), 1.0 / d, -2.0 * v / (d * d), (6.0 * v * v - 2.0) / d**3
    )


def atan2(y: Jet | float, x: Jet | float):
    """Two-argument arctangent.

    Away from the origin the derivative slots agree with atan(y/x) (or
    -atan(x/y)) up to a locally constant branch shift, so the chain rule for
    atan applies after a branch-correct value fix-up.
    """
    if not isinstance(y, Jet) and not isinstance(x, Jet):
        return math.atan2(y, x)
    if not isinstance(y, Jet):
        y = x._zero_like(float(y))
    if not isinstance(x, Jet):
        x = y._zero_like(float(x))
    value = math.atan2(y.value, x.value)
    if y.value == 0.0 and x.value == 0.0:
        raise JetDomainError("atan2", 0.0)
    if abs(x.value) >= abs(y.value):
        base = atan(y / x)
    else:
        base = -atan(x / y)
    return Jet._raw(base.n, base.order, value, base.grad, base.hess, base.third)


def _abs_jet(x: Jet) -> Jet:
    return abs(x)


ELEMENTARY_TAGS = {
    "sin": sin,
    "cos": cos,
    "tan": tan,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "abs": _abs_jet,
    "asin": asin,
    "acos": acos,
    "atan": atan,
    "atan2": atan2,
    "power": _real_pow,
}


def jet_elementary(tag: str, x: Jet, y: "Jet | float | None" = None) -> Jet:
    """Apply the elementary function named ``tag`` to a jet.

    ``atan2`` and ``power`` take a second argument; every other tag is unary.
    """
    try:
        fn = ELEMENTARY_TAGS[tag]
    except KeyError:
        raise ValueError(f"unknown elementary function tag {tag!r}") from None
    if tag in ("atan2", "power"):
        if y is None:
            raise ValueError(f"{tag} requires a second argument")
        return fn(x, y)
    if y is not None:
        raise ValueError(f"{tag} takes a single argument")
    return fn(x)


# -- finite-difference oracle ----------------------------------------------------


def _fd_steps(p: np.ndarray, h) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    scale = np.maximum(1.0, np.abs(p))
    if h is not None:
        base = np.broadcast_to(np.asarray(h, dtype=float), p.shape).copy()
        return base, base, base
    # Truncation/round-off balance differs per derivative order: the classic
    # cbrt(eps) step is right for first derivatives, but second and third
    # derivatives divide by h^2 and h^3, so they need wider stencils.
    return (
        _EPS ** (1.0 / 3.0) * scale,
        _EPS ** (1.0 / 4.0) * scale,
        _EPS ** (1.0 / 5.0) * scale,
    )


def finite_difference_jet(
    f: Callable[[np.ndarray], float],
    p: Sequence[float],
    h: float | Sequence[float] | None = None,
    order: int = 3,
) -> Jet:
    """Estimate a jet of ``f`` at ``p`` from central differences.

    Test oracle only: O(h^2) truncation error per slot, far too slow and too
    noisy for production use.  ``f`` must be evaluable on the full stencil
    (radius two steps along every axis).
    """
    p = np.asarray(p, dtype=float)
    n = p.size
    if order not in (1, 2, 3):
        raise ValueError(f"finite-difference order must be 1, 2 or 3, got {order}")
    h1, h2, h3 = _fd_steps(p, h)

    def ev(*shifts: tuple[int, float]) -> float:
        q = p.copy()
        for axis, delta in shifts:
            q[axis] += delta
        try:
            return float(f(q))
        except Exception as exc:  # noqa: BLE001 - oracle boundary
            raise FiniteDifferenceError(
                f"stencil evaluation failed at {q.tolist()}"
            ) from exc

    f0 = ev()
    grad = np.zeros(n)
    hess = np.zeros((n, n))
    third = np.zeros((n, n, n))

    for i in range(n):
        grad[i] = (ev((i, h1[i])) - ev((i, -h1[i]))) / (2.0 * h1[i])

    if order >= 2:
        for i in range(n):
            hess[i, i] = (ev((i, h2[i])) - 2.0 * f0 + ev((i, -h2[i]))) / h2[i] ** 2
            for j in range(i + 1, n):
                val = (
                    ev((i, h2[i]), (j, h2[j]))
                    - ev((i, h2[i]), (j, -h2[j]))
                    - ev((i, -h2[i]), (j, h2[j]))
                    + ev((i, -h2[i]), (j, -h2[j]))
                ) / (4.0 * h2[i] * h2[j])
                hess[i, j] = hess[j, i] = val

    if order >= 3:
        for i in range(n):
            third[i, i, i] = (
                ev((i, 2.0 * h3[i]))
                - 2.0 * ev((i, h3[i]))
                + 2.0 * ev((i, -h3[i]))
                - ev((i, -2.0 * h3[i]))
            ) / (2.0 * h3[i] ** 3)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                # d^2/di^2 d/dj stencil for the iij slot
                val = (
                    ev((i, h3[i]), (j, h3[j]))
                    - 2.0 * ev((j, h3[j]))
                    + ev((i, -h3[i]), (j, h3[j]))
                    - ev((i, h3[i]), (j, -h3[j]))
                    + 2.0 * ev((j, -h3[j]))
                    - ev((i, -h3[i]), (j, -h3[j]))
                ) / (2.0 * h3[i] ** 2 * h3[j])
                third[i, i, j] = third[i, j, i] = third[j, i, i] = val
        if n == 3:
            val = 0.0
            for si in (1.0, -1.0):
                for sj in (1.0, -1.0):
                    for sk in (1.0, -1.0):
                        val += si * sj * sk * ev(
                            (0, si * h3[0]), (1, sj * h3[1]), (2, sk * h3[2])
                        )
            third[0, 1, 2] = third[0, 2, 1] = third[1, 0, 2] = third[1, 2, 0] = third[
                2, 0, 1
            ] = third[2, 1, 0] = val / (8.0 * h3[0] * h3[1] * h3[2])

    if order < 3:
        third[:] = 0.0
    if order < 2:
        hess[:] = 0.0
    return Jet._raw(n, order, f0, grad, hess, third)
