"""Optimal constants from ratios of second derivatives.

If ``alpha <= f1''/f2'' <= beta`` on ``(0, inf)`` with ``f2'' > 0`` and both
generating functions vanish with their first derivative at 1, then
``alpha M2 <= M1 <= beta M2``.  This module profiles ``g = f1''/f2''``,
extracts ``alpha`` and ``beta``, and checks the resulting inequality by
sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
from numpy.typing import ArrayLike, NDArray

from meanforge.chains import ChainReport, Expectation, InequalityChain, verify_chain
from meanforge.convexity import GridSpec
from meanforge.expressions import M
from meanforge.generating import DifferenceKind, generating_function
from meanforge.means import DEFAULT_TOLERANCE, DomainError, PreconditionError, ToleranceConfig
from meanforge.sampling import DEFAULT_SAMPLING, SamplingSpec

__all__ = [
    "Pattern",
    "RatioPair",
    "RatioProfile",
    "DerivedInequality",
    "PublishedConstant",
    "PUBLISHED_PAIRS",
    "RATIO_GRID",
    "ratio_value",
    "golden_section",
    "profile",
    "derive_inequality",
    "inequality_from_profile",
    "verify_derived",
    "render_constant",
]

PATTERN_SAMPLES = 512
PATTERN_TOL = 1e-10
GOLDEN_WIDTH = 1e-12
REFINE_MIN_GAIN = 1e-13
RATIO_GRID = GridSpec(1e-6, 1e6, 10001)

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Pattern(str, Enum):
    PEAK = "peak_at_1"
    VALLEY = "valley_at_1"
    OTHER = "other"


@dataclass(frozen=True)
class RatioPair:
    numerator: DifferenceKind
    denominator: DifferenceKind

    def __post_init__(self) -> None:
        for side in ("numerator", "denominator"):
            kind = getattr(self, side)
            if not isinstance(kind, DifferenceKind):
                kind = DifferenceKind.parse(kind)
                object.__setattr__(self, side, kind)
            if not kind.has_closed_forms:
                raise PreconditionError(
                    f"{kind.value} has no closed-form second derivative; "
                    "only the eleven convex differences can form a ratio"
                )

    @property
    def label(self) -> str:
        return f"{self.numerator.value}/{self.denominator.value}"


def ratio_value(pair: RatioPair, x: ArrayLike) -> NDArray[np.float64] | float:
    """``f1''(x) / f2''(x)`` from the closed forms."""
    f2n = generating_function(pair.numerator).f2
    f2d = generating_function(pair.denominator).f2
    xa = np.asarray(x, dtype=np.float64)
    out = f2n(xa) / f2d(xa)
    return float(out) if np.ndim(out) == 0 else out


def golden_section(f, lo: float, hi: float, width: float = GOLDEN_WIDTH, maximize: bool = False):
    """Golden-section search for a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x, f(x))`` at the best point seen once the bracket is narrower
    than ``width``.
    """
    sign = -1.0 if maximize else 1.0
    a, b = min(lo, hi), max(lo, hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = sign * f(c), sign * f(d)
    while b - a > width:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = sign * f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = sign * f(d)
    x, fx = (c, fc) if fc < fd else (d, fd)
    return x, sign * fx


@dataclass(frozen=True)
class RatioProfile:
    pair: RatioPair
    value_at_1: float
    sup: float
    inf: float
    pattern: Pattern
    sup_location: float
    inf_location: float
    grid: GridSpec


def _refine(pair: RatioPair, u: NDArray, g: NDArray, i: int, maximize: bool):
    """Golden-section refinement (in log x) of the grid extremum at index ``i``."""
    if i == 0 or i == len(u) - 1:
        return float(math.exp(u[i])), float(g[i])
    gfun = lambda t: ratio_value(pair, math.exp(t))  # noqa: E731
    t, val = golden_section(gfun, float(u[i - 1]), float(u[i + 1]), maximize=maximize)
    # near a flat extremum the search only chases rounding noise
    gain = (val - g[i]) if maximize else (g[i] - val)
    if gain > REFINE_MIN_GAIN * max(1.0, abs(float(g[i]))):
        return math.exp(t), float(val)
    return float(math.exp(u[i])), float(g[i])


def _monotone(values: NDArray, increasing: bool, tol: float) -> bool:
    d = np.diff(values)
    return bool(np.all(d >= -tol)) if increasing else bool(np.all(d <= tol))


def _classify(pair: RatioPair, grid: GridSpec) -> Pattern:
    left = ratio_value(pair, np.logspace(math.log10(grid.x_min), 0.0, PATTERN_SAMPLES))
    right = ratio_value(pair, np.logspace(0.0, math.log10(grid.x_max), PATTERN_SAMPLES))
    if _monotone(left, True, PATTERN_TOL) and _monotone(right, False, PATTERN_TOL):
        return Pattern.PEAK
    if _monotone(left, False, PATTERN_TOL) and _monotone(right, True, PATTERN_TOL):
        return Pattern.VALLEY
    return Pattern.OTHER


def profile(pair: RatioPair, grid: GridSpec = RATIO_GRID) -> RatioProfile:
    """Sup, inf and shape of ``g`` over ``grid``, with ``x = 1`` always included."""
    if not grid.straddles_one:
        raise DomainError(f"ratio grid [{grid.x_min}, {grid.x_max}] must straddle x = 1")
    x = np.union1d(grid.abscissae(), [1.0])
    g = ratio_value(pair, x)
    if not np.all(np.isfinite(g)):
        raise DomainError(f"g = {pair.label} is not finite on the grid")
    u = np.log(x)
    sup_at, sup = _refine(pair, u, g, int(np.argmax(g)), maximize=True)
    inf_at, inf = _refine(pair, u, g, int(np.argmin(g)), maximize=False)
    return RatioProfile(
        pair=pair,
        value_at_1=ratio_value(pair, 1.0),
        sup=sup,
        inf=inf,
        pattern=_classify(pair, grid),
        sup_location=sup_at,
        inf_location=inf_at,
        grid=grid,
    )


def render_constant(c: float, max_den: int = 100) -> str:
    """``1/3`` for values within 1e-9 of a small rational, else 9 significant digits."""
    fr = Fraction(c).limit_denominator(max_den)
    if abs(float(fr) - c) <= 1e-9:
        return str(fr)
    return f"{c:.9g}"


def _coefficient(c: float) -> str:
    text = render_constant(c)
    if text == "1":
        return ""
    return f"({text}) " if "/" in text else f"{text} "


@dataclass(frozen=True)
class DerivedInequality:
    """``alpha M2 <= M1 <= beta M2`` on ``(0, inf)^2``.

    ``sharp`` names the side fixed by the extremum at ``x = 1`` ("upper" for
    a peak, "lower" for a valley); the other side comes from the grid tails
    and is only as good as the grid range.
    """

    pair: RatioPair
    alpha: float
    beta: float
    sharp: str

    def __post_init__(self) -> None:
        if not (0.0 <= self.alpha <= self.beta):
            raise DomainError(f"need 0 <= alpha <= beta, got {self.alpha}, {self.beta}")

    @property
    def m1(self) -> str:
        return f"M_{self.pair.numerator.value}"

    @property
    def m2(self) -> str:
        return f"M_{self.pair.denominator.value}"

    def statement(self) -> str:
        if self.sharp == "lower":
            return f"{_coefficient(self.alpha)}{self.m2} ≤ {self.m1}"
        return f"{self.m1} ≤ {_coefficient(self.beta)}{self.m2}"

    def as_chain(self) -> InequalityChain:
        num, den = M(self.pair.numerator), M(self.pair.denominator)
        lo = (Fraction(self.alpha) * den).named(f"{_coefficient(self.alpha)}{self.m2}")
        hi = (Fraction(self.beta) * den).named(f"{_coefficient(self.beta)}{self.m2}")
        return InequalityChain(
            id=f"derived-{self.pair.numerator.value}-{self.pair.denominator.value}",
            members=(lo, num, hi),
            source=f"second-derivative ratio {self.pair.label}",
            expectation=Expectation.HOLDS,
        )


def derive_inequality(pair: RatioPair, grid: GridSpec = RATIO_GRID) -> DerivedInequality:
    prof = profile(pair, grid)
    return inequality_from_profile(prof)


def inequality_from_profile(prof: RatioProfile) -> DerivedInequality:
    """``alpha = max(inf, 0)`` and ``beta = sup`` of an existing profile."""
    sharp = "lower" if prof.pattern is Pattern.VALLEY else "upper"
    return DerivedInequality(prof.pair, max(prof.inf, 0.0), prof.sup, sharp)


def verify_derived(
    ineq: DerivedInequality,
    samples: SamplingSpec = DEFAULT_SAMPLING,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
    threads: int | None = None,
) -> ChainReport:
    """Check both sides of ``alpha M2 <= M1 <= beta M2`` on every sample."""
    return verify_chain(ineq.as_chain(), samples, tol, threads=threads)


@dataclass(frozen=True)
class PublishedConstant:
    """A ratio pair with its published optimal constant and known issues."""

    pair: RatioPair
    constant: Fraction
    pattern: Pattern
    note: str = ""


def _pc(num: str, den: str, c: Fraction, pattern: Pattern = Pattern.PEAK, note: str = ""):
    return PublishedConstant(RatioPair(DifferenceKind(num), DifferenceKind(den)), c, pattern, note)


PUBLISHED_PAIRS: tuple[PublishedConstant, ...] = (
    _pc("SA", "SH", Fraction(1, 3)),
    _pc("SH", "AH", Fraction(3, 2), note="the value is published under the subscript SG_AH"),
    _pc("SG", "AH", Fraction(1), Pattern.VALLEY),
    _pc("SG", "AG", Fraction(2)),
    _pc("AH", "N2N1", Fraction(8)),
    _pc("N2N1", "N2G", Fraction(1, 3)),
    _pc("N2G", "AG", Fraction(3, 4)),
    _pc("AG", "AN2", Fraction(4)),
    _pc("SA", "SN2", Fraction(4, 5)),
    _pc("SN2", "AN2", Fraction(4, 5),
        note="published sup is 4/5, but the stated bound (1/5) M_SN2 <= M_AN2 needs 5, "
             "and the closed forms give g(1) = 5"),
    _pc("SH", "SN1", Fraction(2)),
    _pc("SN1", "SG", Fraction(3, 4)),
    _pc("SA", "SN3", Fraction(3, 4)),
    _pc("SN3", "SN1", Fraction(8, 9),
        note="published sup reads 3/4 next to the bound M_SN3 <= (8/9) M_SN1; g(1) = 8/9"),
)
