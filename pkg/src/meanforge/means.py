"""Two-variable means: the power mean of order t and seven named means.

Every named mean is evaluated in the scaled form ``hi * m(q)`` with
``hi = max(a, b)`` and ``q = min(a, b) / max(a, b)`` in (0, 1].  This keeps
intermediates bounded, makes each mean exactly symmetric, and exactly
reflexive (``m(a, a) == a``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = [
    "MeanforgeError",
    "DomainError",
    "PreconditionError",
    "ToleranceConfig",
    "DEFAULT_TOLERANCE",
    "PositivePair",
    "MeanKind",
    "power_mean",
    "mean",
    "mean_values",
    "DragomirPearce",
    "dragomir_pearce_check",
]

# Below this |t| the direct formula loses ~eps/|t| relative accuracy, so the
# log-space form is used instead.
STABLE_ORDER_THRESHOLD = 0.25
GEOMETRIC_CUTOFF = 1e-20


class MeanforgeError(Exception):
    """Base class for errors raised by this package."""


class DomainError(MeanforgeError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(MeanforgeError, ValueError):
    """An argument is in the domain but excluded by the operation's contract."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Shared comparison policy for every ``holds`` flag.

    ``lhs <= rhs`` is accepted when ``lhs - rhs <= max(rel * scale, abs_floor)``
    where ``scale`` is the magnitude of the quantities that were combined to
    form the two sides (defaults to ``max(|lhs|, |rhs|)``).
    """

    rel: float = 1e-12
    abs_floor: float = 1e-300

    def __post_init__(self) -> None:
        if not (self.rel >= 0 and math.isfinite(self.rel)):
            raise DomainError(f"relative tolerance must be finite and >= 0, got {self.rel}")
        if not (self.abs_floor >= 0 and math.isfinite(self.abs_floor)):
            raise DomainError(f"absolute floor must be finite and >= 0, got {self.abs_floor}")

    def slack(self, scale):
        return np.maximum(self.rel * np.abs(scale), self.abs_floor)

    def le(self, lhs: float, rhs: float, scale: float | None = None) -> bool:
        if scale is None:
            scale = max(abs(lhs), abs(rhs))
        return bool(lhs - rhs <= self.slack(scale))


DEFAULT_TOLERANCE = ToleranceConfig()


@dataclass(frozen=True)
class PositivePair:
    """An ordered pair ``(a, b)`` of strictly positive finite reals."""

    a: float
    b: float

    def __post_init__(self) -> None:
        for name in ("a", "b"):
            v = getattr(self, name)
            try:
                v = float(v)
            except (TypeError, ValueError):
                raise DomainError(f"{name} must be a real number, got {v!r}") from None
            if not math.isfinite(v) or v <= 0:
                raise DomainError(f"{name} must be finite and > 0, got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def ratio(self) -> float:
        return self.b / self.a

    def swapped(self) -> PositivePair:
        return PositivePair(self.b, self.a)

    def scaled(self, lam: float) -> PositivePair:
        return PositivePair(lam * self.a, lam * self.b)


class MeanKind(str, Enum):
    H = "H"
    G = "G"
    N1 = "N1"
    N3 = "N3"
    N2 = "N2"
    A = "A"
    S = "S"

    @classmethod
    def parse(cls, tag: str) -> MeanKind:
        try:
            return cls(tag.strip().upper())
        except ValueError:
            raise DomainError(
                f"unknown mean {tag!r}; expected one of {', '.join(k.value for k in cls)}"
            ) from None


# Power means reproducing each named mean, for the ones that are power means.
POWER_ORDER = {MeanKind.H: -1.0, MeanKind.G: 0.0, MeanKind.N1: 0.5, MeanKind.A: 1.0, MeanKind.S: 2.0}


def _check_order(t: float) -> float:
    t = float(t)
    if math.isnan(t):
        raise DomainError("mean order t must not be NaN")
    return t


_TINY = np.finfo(np.float64).tiny


def _geometric(lo: float, hi: float) -> float:
    q = lo / hi
    # the scaled form loses everything once lo/hi is subnormal
    return hi * math.sqrt(q) if q >= _TINY else math.sqrt(lo) * math.sqrt(hi)


def power_mean(t: float, p: PositivePair) -> float:
    """Mean of order ``t``: ``((a**t + b**t) / 2) ** (1/t)``, with limits
    ``sqrt(ab)`` at 0 and ``max``/``min`` at ``+inf``/``-inf``.

    The extreme argument is factored out so the powered ratio never exceeds 1.
    For ``0 < |t| < 0.25`` the value is computed as
    ``base * exp(log(q) * log1p(expm1(y) / 2) / y)`` with ``y = t log q``,
    which tends smoothly to the geometric mean; ``|y| < 1e-20`` takes the
    geometric branch.
    """
    t = _check_order(t)
    lo, hi = (p.a, p.b) if p.a <= p.b else (p.b, p.a)
    if t == math.inf:
        return hi
    if t == -math.inf:
        return lo
    if t == 0.0 or lo == hi:
        return _geometric(lo, hi)
    # base is the endpoint for which q**t <= 1
    if t > 0:
        base, q = hi, lo / hi
        log_q = math.log(q) if q > 0 else math.log(lo) - math.log(hi)
    else:
        base, q = lo, hi / lo
        log_q = math.log(q) if math.isfinite(q) else math.log(hi) - math.log(lo)
    if abs(t) >= STABLE_ORDER_THRESHOLD:
        return base * ((1.0 + q**t) / 2.0) ** (1.0 / t)
    y = t * log_q
    # B_t = G exp(y log q / 8 + ...); below this the correction is under one ulp
    # and subnormal y would only add rounding noise
    if abs(y) < GEOMETRIC_CUTOFF:
        return _geometric(lo, hi)
    return base * math.exp(log_q * (math.log1p(math.expm1(y) / 2.0) / y))


def mean_values(kind: MeanKind, a: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    """Vectorized evaluation of a named mean over arrays of positive ``a``, ``b``.

    No validation is performed; callers are responsible for positivity.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    q = lo / hi
    rq = np.sqrt(q)
    if kind is MeanKind.H:
        return 2.0 * lo / (1.0 + q)
    if kind is MeanKind.G:
        # the scaled form loses everything once lo/hi is subnormal
        return np.where(q >= _TINY, hi * rq, np.sqrt(lo) * np.sqrt(hi))
    if kind is MeanKind.N1:
        m = ((rq + 1.0) / 2.0) ** 2
    elif kind is MeanKind.N2:
        m = ((rq + 1.0) / 2.0) * np.sqrt((1.0 + q) / 2.0)
    elif kind is MeanKind.N3:
        m = (1.0 + rq + q) / 3.0
    elif kind is MeanKind.A:
        m = (1.0 + q) / 2.0
    elif kind is MeanKind.S:
        m = np.sqrt((1.0 + q * q) / 2.0)
    else:  # pragma: no cover - closed enum
        raise DomainError(f"unknown mean kind {kind!r}")
    return hi * m


def mean(kind: MeanKind, p: PositivePair) -> float:
    """Value of the named mean ``kind`` at ``p``."""
    return float(mean_values(MeanKind(kind), p.a, p.b))


class DragomirPearce(NamedTuple):
    lhs: float
    mid: float
    rhs: float
    holds: bool


def dragomir_pearce_check(
    r: float, p: PositivePair, tol: ToleranceConfig = DEFAULT_TOLERANCE
) -> DragomirPearce:
    """Evaluate ``(a^r+b^r)/2 <= (b^(r+1)-a^(r+1))/((r+1)(b-a)) <= ((a+b)/2)^r``.

    Requires ``0 < r < 1`` and ``a != b``; the diagonal is rejected rather than
    evaluated as a limit.
    """
    r = float(r)
    if not (0.0 < r < 1.0):
        raise DomainError(f"exponent r must lie in (0, 1), got {r}")
    a, b = p.a, p.b
    if a == b:
        raise PreconditionError("dragomir_pearce_check requires a != b")
    lhs = (a**r + b**r) / 2.0
    mid = (b ** (r + 1.0) - a ** (r + 1.0)) / ((r + 1.0) * (b - a))
    rhs = ((a + b) / 2.0) ** r
    return DragomirPearce(lhs, mid, rhs, tol.le(lhs, mid) and tol.le(mid, rhs))
