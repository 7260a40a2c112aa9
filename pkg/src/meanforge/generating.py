"""Difference measures ``M_XY = X - Y`` and their generating functions.

A degree-1 homogeneous measure satisfies ``M(a, b) = a * f(b / a)``; ``f`` is
its generating function.  For the eleven convex measures the closed forms of
``f``, ``f'`` and ``f''`` are kept exactly as published, with two typesetting
slips repaired (see ``_f_n2g`` and ``_f1_an2``).  Closed forms use only
``+ - * / **`` so they evaluate equally on floats, ndarrays and
:class:`~meanforge.ddouble.DD`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from meanforge.means import DomainError, MeanKind, PositivePair, mean_values

__all__ = [
    "DifferenceKind",
    "CONVEX_KINDS",
    "GeneratingFunction",
    "generating_function",
    "phi",
    "difference",
    "difference_values",
    "IDENTITY_LABELS",
    "identity_residuals",
    "identity_residual_values",
]

SQRT2 = 2**0.5


class DifferenceKind(str, Enum):
    """``XY`` names ``M_XY = X - Y`` with X above Y in H<=G<=N1<=N3<=N2<=A<=S."""

    SA = "SA"
    SN2 = "SN2"
    SN3 = "SN3"
    SN1 = "SN1"
    SG = "SG"
    SH = "SH"
    AN2 = "AN2"
    AN3 = "AN3"
    AN1 = "AN1"
    AG = "AG"
    AH = "AH"
    N2N3 = "N2N3"
    N2N1 = "N2N1"
    N2G = "N2G"
    N2H = "N2H"
    N3N1 = "N3N1"
    N3G = "N3G"
    N3H = "N3H"
    N1G = "N1G"
    N1H = "N1H"

    @property
    def upper(self) -> MeanKind:
        return _split_tag(self.value)[0]

    @property
    def lower(self) -> MeanKind:
        return _split_tag(self.value)[1]

    @property
    def has_closed_forms(self) -> bool:
        return self in CONVEX_KINDS

    @classmethod
    def parse(cls, tag: str) -> DifferenceKind:
        try:
            return cls(tag.strip().upper())
        except ValueError:
            raise DomainError(
                f"unknown difference {tag!r}; expected one of {', '.join(k.value for k in cls)}"
            ) from None


def _split_tag(tag: str) -> tuple[MeanKind, MeanKind]:
    head = 1 if tag[0] in "SAGH" else 2
    return MeanKind(tag[:head]), MeanKind(tag[head:])


# --- closed forms ---------------------------------------------------------


def _f_sa(x):
    return ((x**2 + 1) / 2) ** 0.5 - (x + 1) / 2


def _f1_sa(x):
    return x / (SQRT2 * (x**2 + 1) ** 0.5) - 0.5


def _f2_sa(x):
    return 2 / (2 * x**2 + 2) ** 1.5


def _f_sn3(x):
    return ((x**2 + 1) / 2) ** 0.5 - (x + x**0.5 + 1) / 3


def _f1_sn3(x):
    return (6 * x**1.5 - (2 * x**0.5 + 1) * (2 * (x**2 + 1)) ** 0.5) / (
        6 * (2 * x * (x**2 + 1)) ** 0.5
    )


def _f2_sn3(x):
    return (24 * x**1.5 + (2 * x**2 + 2) ** 1.5) / (12 * x**1.5 * (2 * x**2 + 2) ** 1.5)


def _f_sn2(x):
    return (2 * (x**2 + 1) ** 0.5 - (x**0.5 + 1) * (x + 1) ** 0.5) / (2 * SQRT2)


def _f1_sn2(x):
    return (4 * x**1.5 * (x + 1) ** 0.5 - (2 * x + x**0.5 + 1) * (x**2 + 1) ** 0.5) / (
        4 * (2 * x * (x + 1) * (x**2 + 1)) ** 0.5
    )


def _f2_sn2(x):
    return ((x**1.5 + 1) * (x**2 + 1) ** 1.5 + 8 * x**1.5 * (x + 1) ** 1.5) / (
        8 * SQRT2 * (x * (x + 1) * (x**2 + 1)) ** 1.5
    )


def _f_sn1(x):
    return (2 * (2 * (x**2 + 1)) ** 0.5 - (x**0.5 + 1) ** 2) / 4


def _f1_sn1(x):
    return (4 * x**1.5 - (x**0.5 + 1) * (2 * (x**2 + 1)) ** 0.5) / (4 * (2 * x * (x**2 + 1)) ** 0.5)


def _f2_sn1(x):
    return (16 * x**2.5 + x * (2 * x**2 + 2) ** 1.5) / (8 * x**2.5 * (2 * x**2 + 2) ** 1.5)


def _f_sg(x):
    return ((x**2 + 1) / 2) ** 0.5 - x**0.5


def _f1_sg(x):
    return (SQRT2 * x**1.5 - (x**2 + 1) ** 0.5) / (2 * (x * (x**2 + 1)) ** 0.5)


def _f2_sg(x):
    return 1 / (SQRT2 * (x**2 + 1) ** 1.5) + 1 / (4 * x**1.5)


def _f_sh(x):
    return ((x**2 + 1) / 2) ** 0.5 - 2 * x / (x + 1)


def _f1_sh(x):
    return (x * (x + 1) ** 2 - 2 * (2 * (x**2 + 1)) ** 0.5) / ((x + 1) ** 2 * (2 * (x**2 + 1)) ** 0.5)


def _f2_sh(x):
    return 2 * ((x + 1) ** 3 + 2 * (2 * x**2 + 2) ** 1.5) / ((x + 1) ** 3 * (2 * x**2 + 2) ** 1.5)


def _f_an2(x):
    return (2 * (x + 1) - (x**0.5 + 1) * (2 * (x + 1)) ** 0.5) / 4


def _f1_an2(x):
    # published denominator reads 4*sqrt(2(x+1)); the derivative of _f_an2
    # requires 4*sqrt(2x(x+1))
    return (2 * (2 * x * (x + 1)) ** 0.5 - (2 * x + x**0.5 + 1)) / (4 * (2 * x * (x + 1)) ** 0.5)


def _f2_an2(x):
    return (x**1.5 + 1) / (4 * x**1.5 * (2 * x + 2) ** 1.5)


def _f_ag(x):
    return (x**0.5 - 1) ** 2 / 2


def _f1_ag(x):
    return (x**0.5 - 1) / (2 * x**0.5)


def _f2_ag(x):
    return 1 / (4 * x**1.5)


def _f_ah(x):
    return (x - 1) ** 2 / (2 * (x + 1))


def _f1_ah(x):
    return (x - 1) * (x + 3) / (2 * (x + 1) ** 2)


def _f2_ah(x):
    return 4 / (x + 1) ** 3


def _f_n2n1(x):
    return ((x**0.5 + 1) * (2 * (x + 1)) ** 0.5 - (x**0.5 + 1) ** 2) / 4


def _f1_n2n1(x):
    return (2 * x + x**0.5 + 1 - (x**0.5 + 1) * (2 * (x + 1)) ** 0.5) / (4 * (2 * x * (x + 1)) ** 0.5)


def _f2_n2n1(x):
    return ((2 * x + 2) ** 1.5 - 2 * (x**1.5 + 1)) / (8 * x**1.5 * (2 * x + 2) ** 1.5)


def _f_n2g(x):
    # published numerator ends in "- 4x"; N2 - G requires "- 4 sqrt(x)"
    return ((x**0.5 + 1) * (2 * (x + 1)) ** 0.5 - 4 * x**0.5) / 4


def _f1_n2g(x):
    return (2 * x + 1 + x**0.5 - 2 * (2 * (x + 1)) ** 0.5) / (4 * (2 * x * (x + 1)) ** 0.5)


def _f2_n2g(x):
    return ((2 * x + 2) ** 1.5 - (x**1.5 + 1)) / (4 * x**1.5 * (2 * x + 2) ** 1.5)


_CLOSED_FORMS = {
    DifferenceKind.SA: (_f_sa, _f1_sa, _f2_sa),
    DifferenceKind.SN2: (_f_sn2, _f1_sn2, _f2_sn2),
    DifferenceKind.SN3: (_f_sn3, _f1_sn3, _f2_sn3),
    DifferenceKind.SN1: (_f_sn1, _f1_sn1, _f2_sn1),
    DifferenceKind.SG: (_f_sg, _f1_sg, _f2_sg),
    DifferenceKind.SH: (_f_sh, _f1_sh, _f2_sh),
    DifferenceKind.AN2: (_f_an2, _f1_an2, _f2_an2),
    DifferenceKind.AG: (_f_ag, _f1_ag, _f2_ag),
    DifferenceKind.AH: (_f_ah, _f1_ah, _f2_ah),
    DifferenceKind.N2N1: (_f_n2n1, _f1_n2n1, _f2_n2n1),
    DifferenceKind.N2G: (_f_n2g, _f1_n2g, _f2_n2g),
}

CONVEX_KINDS: tuple[DifferenceKind, ...] = tuple(_CLOSED_FORMS)

Fn = Callable[[ArrayLike], NDArray[np.float64]]


@dataclass(frozen=True)
class GeneratingFunction:
    """``f`` with ``M(a, b) = a f(b/a)``; ``f1``/``f2`` only for convex kinds."""

    kind: DifferenceKind
    f: Fn
    f1: Fn | None
    f2: Fn | None

    @property
    def has_closed_forms(self) -> bool:
        return self.f2 is not None


def _mean_difference_profile(kind: DifferenceKind) -> Fn:
    upper, lower = kind.upper, kind.lower

    def f(x):
        return mean_values(upper, 1.0, x) - mean_values(lower, 1.0, x)

    f.__name__ = f"f_{kind.value}"
    return f


_REGISTRY = {
    kind: (
        GeneratingFunction(kind, *_CLOSED_FORMS[kind])
        if kind in _CLOSED_FORMS
        else GeneratingFunction(kind, _mean_difference_profile(kind), None, None)
    )
    for kind in DifferenceKind
}


def generating_function(kind: DifferenceKind | str) -> GeneratingFunction:
    if isinstance(kind, str) and not isinstance(kind, DifferenceKind):
        kind = DifferenceKind.parse(kind)
    return _REGISTRY[kind]


def phi(gf: GeneratingFunction, p: PositivePair) -> float:
    """``a * f(b / a)``."""
    return p.a * float(gf.f(p.b / p.a))


def difference_values(kind: DifferenceKind, a: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    return mean_values(kind.upper, a, b) - mean_values(kind.lower, a, b)


def difference(kind: DifferenceKind, p: PositivePair) -> float:
    """``M_XY(a, b) = X(a, b) - Y(a, b)``."""
    return float(difference_values(DifferenceKind(kind), p.a, p.b))


IDENTITY_LABELS = (
    "M_AG - 2 M_N1G",
    "M_AG - 2 M_AN1",
    "M_AG - 3 M_AN3",
    "M_AG - 3/2 M_N3G",
    "M_AG - 6 M_N3N1",
)


def identity_residual_values(a: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    """Vectorized absolute residuals, shape ``(5, n)``, in :data:`IDENTITY_LABELS` order."""
    d = lambda k: difference_values(k, a, b)  # noqa: E731
    ag = d(DifferenceKind.AG)
    return np.abs(np.stack([
        ag - 2 * d(DifferenceKind.N1G),
        ag - 2 * d(DifferenceKind.AN1),
        ag - 3 * d(DifferenceKind.AN3),
        ag - 1.5 * d(DifferenceKind.N3G),
        ag - 6 * d(DifferenceKind.N3N1),
    ]))


def identity_residuals(p: PositivePair) -> list[float]:
    """Absolute residuals of the five ways to write ``M_AG`` via N1 and N3."""
    return [float(r) for r in identity_residual_values(p.a, p.b)]
