"""Small closed expression language over mean values at one pair ``(a, b)``.

Shapes: a named mean, a rational affine combination of sub-expressions, a
named mean applied to two sub-expressions (``H(A, H)``, ``S(A, H)`` ...), and
``min``/``max`` of the endpoints.  Expressions are built with ordinary
operators::

    (2 * H + S) / 3
    S + H - G
    Fraction(1, 3) * M("SH")

Evaluation is vectorized and returns, alongside the value, a *scale*: an
upper bound on the magnitude of the quantities combined, which bounds the
rounding error of the value.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from numbers import Rational
from typing import Union

import numpy as np
from numpy.typing import NDArray

from meanforge.generating import DifferenceKind
from meanforge.means import MeanKind, mean_values

__all__ = [
    "Expr",
    "Leaf",
    "Affine",
    "Nested",
    "Extreme",
    "M",
    "LeafCache",
    "evaluate",
    "H",
    "G",
    "N1",
    "N2",
    "N3",
    "A",
    "S",
    "MIN",
    "MAX",
]

Number = Union[int, Fraction]


def _coef(c) -> Fraction:
    if isinstance(c, Rational):
        return Fraction(c)
    raise TypeError(f"expression coefficients must be rational, got {c!r}")


class Expr:
    """Base class; supplies the arithmetic that builds :class:`Affine` nodes."""

    def _terms(self) -> tuple[tuple[Fraction, Expr], ...]:
        return ((Fraction(1), self),)

    def _const(self) -> Fraction:
        return Fraction(0)

    def __add__(self, other) -> Affine:
        if isinstance(other, Expr):
            return Affine(self._terms() + other._terms(), self._const() + other._const())
        return Affine(self._terms(), self._const() + _coef(other))

    __radd__ = __add__

    def __neg__(self) -> Affine:
        return Affine(tuple((-c, e) for c, e in self._terms()), -self._const())

    def __sub__(self, other) -> Affine:
        return self + (-other if isinstance(other, Expr) else -_coef(other))

    def __rsub__(self, other) -> Affine:
        return (-self) + other

    def __mul__(self, k) -> Affine:
        k = _coef(k)
        return Affine(tuple((k * c, e) for c, e in self._terms()), k * self._const())

    __rmul__ = __mul__

    def __truediv__(self, k) -> Affine:
        return self * (1 / _coef(k))

    # rendering
    def infix(self) -> str:
        raise NotImplementedError

    def prefix(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.infix()


@dataclass(frozen=True, eq=True)
class Leaf(Expr):
    kind: MeanKind

    def infix(self) -> str:
        return self.kind.value

    def prefix(self) -> str:
        return self.kind.value


@dataclass(frozen=True, eq=True)
class Extreme(Expr):
    op: str  # "min" | "max"

    def __post_init__(self) -> None:
        if self.op not in ("min", "max"):
            raise ValueError(f"unknown extreme {self.op!r}")

    def infix(self) -> str:
        return f"{self.op}(a,b)"

    def prefix(self) -> str:
        return f"({self.op} a b)"


@dataclass(frozen=True, eq=True)
class Nested(Expr):
    """The mean ``kind`` applied to two (positive) sub-expressions."""

    kind: MeanKind
    left: Expr
    right: Expr

    def infix(self) -> str:
        return f"{self.kind.value}({self.left.infix()}, {self.right.infix()})"

    def prefix(self) -> str:
        return f"(mean {self.kind.value} {self.left.prefix()} {self.right.prefix()})"


@dataclass(frozen=True, eq=True)
class Affine(Expr):
    terms: tuple[tuple[Fraction, Expr], ...]
    const: Fraction = Fraction(0)
    name: str | None = None

    def _terms(self):
        if self.name is not None:
            return ((Fraction(1), self),)
        return self.terms

    def _const(self):
        return Fraction(0) if self.name is not None else self.const

    def named(self, name: str) -> Affine:
        return Affine(self.terms, self.const, name)

    def infix(self) -> str:
        if self.name is not None:
            return self.name
        dens = [c.denominator for c, _ in self.terms] + [self.const.denominator]
        d = lcm(*dens)
        parts: list[str] = []
        for c, e in self.terms:
            n = c * d
            body = e.infix()
            if isinstance(e, Affine) and e.name is None and len(e.terms) > 1:
                body = f"({body})"
            if n == 1:
                s = body
            elif n == -1:
                s = f"-{body}"
            else:
                s = f"{n}{'' if isinstance(e, (Leaf,)) else ' '}{body}"
            parts.append(s)
        if self.const:
            parts.append(str(self.const * d))
        text = parts[0]
        for p in parts[1:]:
            text += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        if d == 1:
            return text
        if len(parts) == 1:
            # a single scaled term reads better as a coefficient
            (c, e), = self.terms
            return f"{c} {e.infix()}" if not self.const else f"({text})/{d}"
        return f"({text})/{d}"

    def prefix(self) -> str:
        if self.name is not None and self.name.startswith("M_"):
            (_, x), (_, y) = self.terms
            return f"(- {x.prefix()} {y.prefix()})"
        items = []
        for c, e in self.terms:
            items.append(e.prefix() if c == 1 else f"(* {c} {e.prefix()})")
        if self.const:
            items.append(str(self.const))
        if len(items) == 1:
            return items[0]
        return f"(+ {' '.join(items)})"


H, G, N1, N2, N3, A, S = (Leaf(k) for k in (MeanKind.H, MeanKind.G, MeanKind.N1, MeanKind.N2,
                                             MeanKind.N3, MeanKind.A, MeanKind.S))
MIN, MAX = Extreme("min"), Extreme("max")


def M(kind: DifferenceKind | str) -> Affine:
    """The difference measure ``M_XY = X - Y`` as an expression."""
    kind = DifferenceKind(kind) if not isinstance(kind, DifferenceKind) else kind
    return (Leaf(kind.upper) - Leaf(kind.lower)).named(f"M_{kind.value}")


class LeafCache:
    """Mean values at arrays ``a``, ``b``, computed at most once per kind."""

    def __init__(self, a: NDArray[np.float64], b: NDArray[np.float64]):
        self.a = np.asarray(a, dtype=np.float64)
        self.b = np.asarray(b, dtype=np.float64)
        self._cache: dict[MeanKind, NDArray[np.float64]] = {}

    def __getitem__(self, kind: MeanKind) -> NDArray[np.float64]:
        v = self._cache.get(kind)
        if v is None:
            v = self._cache[kind] = mean_values(kind, self.a, self.b)
        return v


def evaluate(expr: Expr, leaves: LeafCache) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Return ``(value, scale)`` arrays for ``expr`` at the pairs in ``leaves``."""
    if isinstance(expr, Leaf):
        v = leaves[expr.kind]
        return v, v
    if isinstance(expr, Affine):
        value = np.full(leaves.a.shape, float(expr.const))
        scale = np.full(leaves.a.shape, abs(float(expr.const)))
        for c, e in expr.terms:
            v, s = evaluate(e, leaves)
            value = value + float(c) * v
            scale = scale + abs(float(c)) * s
        return value, scale
    if isinstance(expr, Nested):
        lv, ls = evaluate(expr.left, leaves)
        rv, rs = evaluate(expr.right, leaves)
        v = mean_values(expr.kind, lv, rv)
        return v, np.maximum(v, np.maximum(ls, rs))
    if isinstance(expr, Extreme):
        v = np.minimum(leaves.a, leaves.b) if expr.op == "min" else np.maximum(leaves.a, leaves.b)
        return v, v
    raise TypeError(f"cannot evaluate {expr!r}")
