"""Numerical evidence for convexity of the difference measures.

A certificate records the smallest closed-form ``f''`` on a log-uniform grid
and the worst disagreement between that closed form and a five-point
finite-difference second derivative of ``f``.  The finite difference is
evaluated in double-double arithmetic: with step ``h = 1e-5 x`` the second
difference at ``x = 1e-6`` is ~1e-22 of ``f`` and would be pure rounding
noise in float64.  The result is numerical evidence, not a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from meanforge.ddouble import DD
from meanforge.generating import (
    CONVEX_KINDS,
    DifferenceKind,
    GeneratingFunction,
    generating_function,
)
from meanforge.means import (
    DEFAULT_TOLERANCE,
    DomainError,
    PositivePair,
    PreconditionError,
    ToleranceConfig,
)

__all__ = [
    "GridSpec",
    "DEFAULT_GRID",
    "FD_STEP",
    "FD_MISMATCH_TOLERANCE",
    "ConvexityCertificate",
    "certify_convexity",
    "certify_all",
    "fd_second_derivative",
    "PhiBound",
    "check_phi_bound",
    "phi_bound_values",
    "JointProbe",
    "joint_convexity_probe",
    "joint_convexity_values",
]

FD_STEP = 1e-5
FD_MISMATCH_TOLERANCE = 1e-6


@dataclass(frozen=True)
class GridSpec:
    """``points`` log-uniform abscissae on ``[x_min, x_max]``."""

    x_min: float = 1e-6
    x_max: float = 1e6
    points: int = 10001

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise DomainError("grid bounds must be finite")
        if not (0 < self.x_min < self.x_max):
            raise DomainError(f"grid needs 0 < x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if int(self.points) != self.points or self.points < 2:
            raise DomainError(f"grid needs at least 2 points, got {self.points}")

    def abscissae(self) -> NDArray[np.float64]:
        x = np.logspace(math.log10(self.x_min), math.log10(self.x_max), int(self.points))
        # pin the endpoints exactly; logspace may round them
        x[0], x[-1] = self.x_min, self.x_max
        return x

    @property
    def straddles_one(self) -> bool:
        return self.x_min < 1.0 < self.x_max


DEFAULT_GRID = GridSpec()


@dataclass(frozen=True)
class ConvexityCertificate:
    kind: DifferenceKind
    grid: GridSpec
    min_f2: float
    min_f2_at: float
    max_fd_mismatch: float
    max_fd_mismatch_at: float
    fd_tolerance: float
    passed: bool

    evidence = "numerical evidence"

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{self.kind.value:5s} {verdict}  min f'' = {self.min_f2:.6e} at x={self.min_f2_at:.6g}; "
            f"max |f''-FD|/(1+|f''|) = {self.max_fd_mismatch:.3e} at x={self.max_fd_mismatch_at:.6g} "
            f"({self.evidence})"
        )


def _require_closed_forms(kind: DifferenceKind) -> GeneratingFunction:
    gf = generating_function(kind)
    if not gf.has_closed_forms:
        raise PreconditionError(f"{gf.kind.value} has no closed-form derivatives")
    return gf


def fd_second_derivative(f, x: NDArray[np.float64], step: float = FD_STEP) -> NDArray[np.float64]:
    """Five-point central second difference of ``f`` at ``x`` with ``h = step * x``.

    ``f`` must accept :class:`DD` arguments.  Stencil points ``x + k h`` are
    represented exactly, so the only error is truncation, O(h^4).
    """
    x = np.asarray(x, dtype=np.float64)
    h = step * x
    at = lambda k: f(DD.exact_sum(x, k * h))  # noqa: E731
    num = 16 * (at(1) + at(-1)) - (at(2) + at(-2)) - 30 * f(DD(x))
    hh = DD(h) * DD(h)
    return (num / (12 * hh)).to_float()


def certify_convexity(
    kind: DifferenceKind | str,
    grid: GridSpec = DEFAULT_GRID,
    fd_tolerance: float = FD_MISMATCH_TOLERANCE,
) -> ConvexityCertificate:
    gf = _require_closed_forms(kind)
    x = grid.abscissae()
    f2 = np.asarray(gf.f2(x), dtype=np.float64)
    fd = fd_second_derivative(gf.f, x)
    mismatch = np.abs(f2 - fd) / (1.0 + np.abs(f2))
    i_min = int(np.argmin(f2))
    i_bad = int(np.argmax(mismatch))
    min_f2 = float(f2[i_min])
    max_mm = float(mismatch[i_bad])
    passed = bool(np.all(np.isfinite(f2)) and min_f2 > 0 and max_mm <= fd_tolerance)
    return ConvexityCertificate(
        kind=gf.kind,
        grid=grid,
        min_f2=min_f2,
        min_f2_at=float(x[i_min]),
        max_fd_mismatch=max_mm,
        max_fd_mismatch_at=float(x[i_bad]),
        fd_tolerance=fd_tolerance,
        passed=passed,
    )


def certify_all(grid: GridSpec = DEFAULT_GRID) -> list[ConvexityCertificate]:
    return [certify_convexity(k, grid) for k in CONVEX_KINDS]


class PhiBound(NamedTuple):
    phi_value: float
    upper_bound: float
    holds: bool


def phi_bound_values(kind: DifferenceKind, a, b) -> tuple[NDArray, NDArray, NDArray]:
    """Vectorized ``(a f(b/a), (b - a) f'(b/a), scale)``.

    ``scale = max(a, b)`` bounds the magnitude of every mean combined in
    ``f``, hence the rounding error of both sides.
    """
    gf = _require_closed_forms(kind)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    x = b / a
    return a * gf.f(x), (b - a) * gf.f1(x), np.maximum(a, b)


def check_phi_bound(
    kind: DifferenceKind | str, p: PositivePair, tol: ToleranceConfig = DEFAULT_TOLERANCE
) -> PhiBound:
    """``0 <= a f(b/a) <= (b - a) f'(b/a)``."""
    value, bound, scale = (float(v) for v in phi_bound_values(kind, p.a, p.b))
    holds = tol.le(0.0, value, scale) and tol.le(value, bound, scale)
    return PhiBound(value, bound, holds)


class JointProbe(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def _phi_values(gf: GeneratingFunction, a, b, swapped: bool):
    return b * gf.f(a / b) if swapped else a * gf.f(b / a)


def joint_convexity_values(kind: DifferenceKind | str, a1, b1, a2, b2, lam, swapped: bool = False):
    """Vectorized ``(phi(lam p1 + (1-lam) p2), lam phi(p1) + (1-lam) phi(p2), scale)``.

    ``scale`` is the largest of ``|rhs|`` and the coordinates; every mean
    entering either side is bounded by the coordinates.
    """
    gf = generating_function(kind)
    a1, b1, a2, b2, lam = (np.asarray(v, dtype=np.float64) for v in (a1, b1, a2, b2, lam))
    if np.any(~((lam > 0.0) & (lam < 1.0))):
        raise DomainError("lambda must lie in (0, 1)")
    mu = 1.0 - lam
    lhs = _phi_values(gf, lam * a1 + mu * a2, lam * b1 + mu * b2, swapped)
    rhs = lam * _phi_values(gf, a1, b1, swapped) + mu * _phi_values(gf, a2, b2, swapped)
    scale = np.maximum.reduce([np.abs(rhs), a1, b1, a2, b2])
    return lhs, rhs, scale


def joint_convexity_probe(
    kind: DifferenceKind | str,
    p1: PositivePair,
    p2: PositivePair,
    lam: float,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
    swapped: bool = False,
) -> JointProbe:
    """Compare ``phi(lam p1 + (1-lam) p2)`` with ``lam phi(p1) + (1-lam) phi(p2)``.

    ``phi(a, b) = a f(b/a)``; with ``swapped=True`` the perspective is taken
    the other way round, ``b f(a/b)``.
    """
    lam = float(lam)
    if not (0.0 < lam < 1.0):
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    lhs, rhs, scale = (float(v) for v in joint_convexity_values(kind, p1.a, p1.b, p2.a, p2.b, lam, swapped))
    return JointProbe(lhs, rhs, tol.le(lhs, rhs, scale))
