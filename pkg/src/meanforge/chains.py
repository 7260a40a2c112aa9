"""Registry of inequality chains among means and a sampling verifier.

A chain ``m0 <= m1 <= ... <= mk`` is checked pair by adjacent pair over a
reproducible sample of ratios.  The margin of ``lhs <= rhs`` at a sample is
``(rhs - lhs) / scale``, where ``scale`` bounds the magnitude of the means
combined on either side; a sample violates the pair when
``rhs - lhs < -max(rel * scale, abs_floor)``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Sequence

import numpy as np
from numpy.typing import NDArray

from meanforge.expressions import (
    MAX,
    MIN,
    A,
    Expr,
    G,
    H,
    LeafCache,
    M,
    N1,
    N2,
    N3,
    Nested,
    S,
    evaluate,
)
from meanforge.means import (
    DEFAULT_TOLERANCE,
    DomainError,
    MeanKind,
    PositivePair,
    ToleranceConfig,
)
from meanforge.sampling import (
    CHUNK_SIZE,
    DEFAULT_SAMPLING,
    SamplingSpec,
    sample_ratios,
    worker_count,
)

__all__ = [
    "Expectation",
    "AuxCheck",
    "InequalityChain",
    "PairReport",
    "ChainReport",
    "builtin_chains",
    "get_chain",
    "select_chains",
    "evaluate_chain",
    "verify_chain",
    "verify_chains",
    "export_registry",
    "k_auxiliary",
    "k_auxiliary_printed",
    "simple_ratios",
]


class Expectation(str, Enum):
    HOLDS = "expected_holds"
    FAILS = "expected_fails"


AuxFn = Callable[[LeafCache], tuple[NDArray[np.float64], NDArray[np.float64]]]


@dataclass(frozen=True)
class AuxCheck:
    """A side condition ``value >= 0`` evaluated alongside a chain."""

    name: str
    fn: AuxFn


@dataclass(frozen=True)
class InequalityChain:
    id: str
    members: tuple[Expr, ...]
    source: str
    expectation: Expectation = Expectation.HOLDS
    group: str | None = None
    note: str = ""
    aux: tuple[AuxCheck, ...] = ()

    def __post_init__(self) -> None:
        if len(self.members) < 2:
            raise DomainError(f"chain {self.id} needs at least two members")

    @property
    def labels(self) -> list[str]:
        return [m.infix() for m in self.members]

    def __str__(self) -> str:
        return " <= ".join(self.labels)


# --- auxiliary k ----------------------------------------------------------


def _k_from_leaves(leaves: LeafCache):
    s, g, a, h = leaves[MeanKind.S], leaves[MeanKind.G], leaves[MeanKind.A], leaves[MeanKind.H]
    upper = ((s + g) / 2) ** 2
    lower = (a * a + h * h) / 2
    return upper - lower, upper + lower


def k_auxiliary(x) -> NDArray[np.float64]:
    """``((S+G)/2)^2 - (A^2+H^2)/2`` at ``(1, x)``; vanishes only at ``x = 1``."""
    x = np.asarray(x, dtype=np.float64)
    return _k_from_leaves(LeafCache(np.ones_like(x), x))[0]


def k_auxiliary_printed(x) -> NDArray[np.float64]:
    """The simplification with a sign slip, ``(8x^2 + (x+1)^2 sqrt(2x(x^2+1))) / (4(x+1)^2)``.

    It does not equal :func:`k_auxiliary` (it is 1 at ``x = 1``); the
    algebraically correct form has ``-8x^2`` in the numerator.
    """
    x = np.asarray(x, dtype=np.float64)
    return (8 * x**2 + (x + 1) ** 2 * np.sqrt(2 * x * (x**2 + 1))) / (4 * (x + 1) ** 2)


def k_auxiliary_closed(x) -> NDArray[np.float64]:
    """``((x+1)^2 sqrt(2x(x^2+1)) - 8x^2) / (4(x+1)^2)``, equal to :func:`k_auxiliary`."""
    x = np.asarray(x, dtype=np.float64)
    return ((x + 1) ** 2 * np.sqrt(2 * x * (x**2 + 1)) - 8 * x**2) / (4 * (x + 1) ** 2)


# --- registry -------------------------------------------------------------

F = Fraction


def _build_registry() -> tuple[InequalityChain, ...]:
    c = InequalityChain
    eq51_tail = (
        (2 * H + S) / 3,
        (A + H) / 2,
        (S + G) / 2,
        (H + 2 * S) / 3,
        A,
        S + H - G,
        S,
        3 * (A - G) + H,
    )
    eq95_prefix = (G, (S + 3 * G) / 4, N1, (S + 8 * N1) / 9, N3, N2, (A + N1) / 2, (S + 2 * N1) / 3)
    chains = [
        c("eq2", (H, G, N1, A, S), "power means of order -1, 0, 1/2, 1, 2 increase with the order"),
        c("eq5", (N1, N3, N2), "Dragomir-Pearce bounds at r = 1/2, rearranged"),
        c("eq6", (N2, A), "N2 = sqrt(N1 A) with N1 <= A"),
        c("eq7", (H, G, N1, N3, N2, A, S), "ordering of the seven means (eq2, eq5, eq6)"),
        c("eq26", tuple(M(k) for k in ("SA", "SN2", "SN3", "SN1", "SG", "SH")),
          "differences from S, ordered by eq7"),
        c("eq27", tuple(M(k) for k in ("AN2", "AN3", "AN1", "AG", "AH")),
          "differences from A, ordered by eq7"),
        c("eq28", tuple(M(k) for k in ("N2N3", "N2N1", "N2G", "N2H")),
          "differences from N2, ordered by eq7"),
        c("eq29", tuple(M(k) for k in ("N3N1", "N3G", "N3H")), "differences from N3, ordered by eq7"),
        c("eq30", (M("N1G"), M("N1H")), "differences from N1, ordered by eq7"),
        c("eq31", (A + H, N1 + N3, N1 + N2), "eq7 combined with the M_AG identities"),
        c("eq38", (M("SA"), F(1, 3) * M("SH"), F(1, 2) * M("AH"), F(1, 2) * M("SG"), M("AG")),
          "optimal ratio constants SA/SH = 1/3, SH/AH = 3/2, SG/AH = 1, SG/AG = 2"),
        c("eq51", (H, G) + eq51_tail, "eq38 rewritten as bounds on the means"),
        c("eq52", (MIN, H, G, A, S, MAX), "classical ordering between min and max"),
        c("eq53", (H, Nested(MeanKind.H, A, H), G, (2 * H + S) / 3, (A + H) / 2,
                   Nested(MeanKind.S, A, H), (S + G) / 2, (H + 2 * S) / 3, A, S + H - G, S,
                   3 * (A - G) + H),
          "eq51 merged with eq54 and eq58"),
        c("eq54", (H, Nested(MeanKind.H, A, H), G, (A + H) / 2, Nested(MeanKind.S, A, H), A, S),
          "eq52 applied to the pair (A, H); note G(A, H) = G"),
        c("eq58", (Nested(MeanKind.S, A, H), (S + G) / 2),
          "k(x) = ((S+G)/2)^2 - (A^2+H^2)/2 >= 0",
          aux=(AuxCheck("k(x) >= 0", _k_from_leaves),)),
        c("eq59", (F(1, 8) * M("AH"), M("N2N1"), F(1, 3) * M("N2G"), F(1, 4) * M("AG"), M("AN2")),
          "optimal ratio constants AH/N2N1 = 8, N2N1/N2G = 1/3, N2G/AG = 3/4, AG/AN2 = 4"),
        c("eq72", (H, G, (G + H + 3 * N2) / 5, (G + 2 * N2) / 3, N1, (2 * A + 7 * N1) / 9, N2,
                   (A + N1) / 2, (7 * A + H) / 8, A),
          "eq59 rewritten as bounds on the means"),
        c("eq73", (H, G, N1, N2, A), "baseline chain refined by eq72"),
        c("eq74", (M("SA"), F(4, 5) * M("SN2"), 4 * M("AN2")),
          "optimal ratio constants SA/SN2 = 4/5 and M_SN2 <= 5 M_AN2"),
        c("eq75", (M("SH"), 2 * M("SN1"), F(3, 2) * M("SG")),
          "optimal ratio constants SH/SN1 = 2, SN1/SG = 3/4"),
        c("eq76", (M("SA"), F(3, 4) * M("SN3"), F(2, 3) * M("SN1")),
          "optimal ratio constants SA/SN3 = 3/4, SN3/SN1 = 8/9"),
        c("eq95a", eq95_prefix + ((S + 4 * N2) / 5, A),
          "eq74-eq76 rewritten as bounds on the means, (S+4N2)/5 branch", group="eq95"),
        c("eq95b", eq95_prefix + ((S + 3 * N3) / 4, A),
          "eq74-eq76 rewritten as bounds on the means, (S+3N3)/4 branch", group="eq95"),
        c("eq96-as-printed", (G, (S + 2 * H) / 2, N1, (S + H) / 2, N2),
          "alternative chain among G, N1, N2 exactly as printed",
          expectation=Expectation.FAILS, group="eq96",
          note="(S+2H)/2 equals 3a/2 at a = b, above every mean"),
        c("eq96-corrected", (G, (S + 2 * H) / 3, N1, (S + H) / 2, N2),
          "derived, not printed: (S+2H)/3 follows from M_SH <= 3/2 M_SG, (S+H)/2 from M_SH <= 2 M_SN1",
          group="eq96"),
    ]
    ids = [ch.id for ch in chains]
    assert len(set(ids)) == len(ids), "duplicate chain id"
    return tuple(chains)


_REGISTRY = _build_registry()


def builtin_chains() -> list[InequalityChain]:
    return list(_REGISTRY)


def get_chain(chain_id: str) -> InequalityChain:
    for ch in _REGISTRY:
        if ch.id == chain_id:
            return ch
    raise KeyError(chain_id)


def select_chains(selector: str) -> list[InequalityChain]:
    """``"all"``, a chain id, or a group id such as ``"eq95"``; comma-separated."""
    out: list[InequalityChain] = []
    for sel in (s.strip() for s in selector.split(",")):
        if sel == "all":
            hits = list(_REGISTRY)
        else:
            hits = [ch for ch in _REGISTRY if sel in (ch.id, ch.group)]
        if not hits:
            raise KeyError(sel)
        out.extend(h for h in hits if h not in out)
    return out


def evaluate_chain(chain: InequalityChain, p: PositivePair) -> list[float]:
    leaves = LeafCache(np.array([p.a]), np.array([p.b]))
    return [float(evaluate(m, leaves)[0][0]) for m in chain.members]


def export_registry(chains: Iterable[InequalityChain] | None = None) -> str:
    """One JSON record per line: id, source, prefix-notation members, expectation."""
    chains = _REGISTRY if chains is None else chains
    lines = []
    for ch in chains:
        rec = {
            "id": ch.id,
            "source": ch.source,
            "members": [m.prefix() for m in ch.members],
            "expectation": ch.expectation.value,
        }
        lines.append(json.dumps(rec, ensure_ascii=False))
    return "\n".join(lines) + "\n"


# --- verification ---------------------------------------------------------


@dataclass(frozen=True)
class PairReport:
    """Outcome for one adjacent pair ``lhs <= rhs`` (or a side condition)."""

    lhs: str
    rhs: str
    worst_margin: float
    worst_witness: PositivePair
    violations: int
    simplest_witness: PositivePair | None = None

    @property
    def holds(self) -> bool:
        return self.violations == 0


@dataclass(frozen=True)
class ChainReport:
    chain_id: str
    source: str
    expectation: Expectation
    samples: int
    per_pair: tuple[PairReport, ...]
    aux: tuple[PairReport, ...] = ()

    @property
    def violations(self) -> int:
        return sum(p.violations for p in self.per_pair) + sum(p.violations for p in self.aux)

    @property
    def holds(self) -> bool:
        return self.violations == 0

    @property
    def meets_expectation(self) -> bool:
        return self.holds == (self.expectation is Expectation.HOLDS)

    @property
    def worst_margin(self) -> float:
        return min(p.worst_margin for p in self.per_pair + self.aux)

    @property
    def witness(self) -> PositivePair | None:
        """Simplest counterexample of the first failing pair, if any."""
        for p in self.per_pair + self.aux:
            if p.violations:
                return p.simplest_witness or p.worst_witness
        return None


@dataclass
class _Stat:
    margin: float = np.inf
    index: int = -1
    a: float = 1.0
    b: float = 1.0
    violations: int = 0

    def update(self, margins, viol, a, b, offset) -> None:
        i = int(np.argmin(margins))
        m = float(margins[i])
        if m < self.margin:  # strict: earlier blocks win ties
            self.margin, self.index = m, offset + i
            self.a, self.b = float(a[i]), float(b[i])
        self.violations += int(np.count_nonzero(viol))


def _pair_margins(lhs, rhs, tol: ToleranceConfig):
    (lv, ls), (rv, rs) = lhs, rhs
    diff = rv - lv
    scale = np.maximum(ls, rs)
    viol = diff < -tol.slack(scale)
    margin = diff / np.maximum(scale, np.finfo(np.float64).tiny)
    return margin, viol


def _check_block(chains: Sequence[InequalityChain], a, b, tol: ToleranceConfig, offset: int):
    leaves = LeafCache(a, b)
    out = []
    for ch in chains:
        vals = [evaluate(m, leaves) for m in ch.members]
        pair_stats = []
        for lhs, rhs in zip(vals, vals[1:]):
            st = _Stat()
            st.update(*_pair_margins(lhs, rhs, tol), a, b, offset)
            pair_stats.append(st)
        aux_stats = []
        for chk in ch.aux:
            value, scale = chk.fn(leaves)
            st = _Stat()
            st.update(*_pair_margins((np.zeros_like(value), scale), (value, scale), tol), a, b, offset)
            aux_stats.append(st)
        out.append((pair_stats, aux_stats))
    return out


def _merge(into: list[_Stat], new: list[_Stat]) -> None:
    for acc, st in zip(into, new):
        if st.margin < acc.margin:
            acc.margin, acc.index, acc.a, acc.b = st.margin, st.index, st.a, st.b
        acc.violations += st.violations


def simple_ratios(limit: int = 12) -> list[Fraction]:
    """Off-diagonal ratios ``p/q`` ordered by simplicity: 2, 1/2, 3, 1/3, 3/2, 2/3, 4, ..."""
    out = []
    for p in range(1, limit + 1):
        for q in range(1, limit + 1):
            if p != q and gcd(p, q) == 1:
                out.append(Fraction(p, q))
    out.sort(key=lambda r: (max(r.numerator, r.denominator), min(r.numerator, r.denominator),
                            r.numerator < r.denominator))
    return out


def _simplest_witness(lhs: Expr, rhs: Expr, spec: SamplingSpec, scale: float,
                      tol: ToleranceConfig) -> PositivePair | None:
    cands = [r for r in simple_ratios() if spec.ratio_min <= r <= spec.ratio_max]
    if not cands:
        return None
    a = np.array([scale * r.denominator for r in cands], dtype=np.float64)
    b = np.array([scale * r.numerator for r in cands], dtype=np.float64)
    leaves = LeafCache(a, b)
    _, viol = _pair_margins(evaluate(lhs, leaves), evaluate(rhs, leaves), tol)
    hits = np.flatnonzero(viol)
    if hits.size == 0:
        return None
    i = int(hits[0])
    return PositivePair(float(a[i]), float(b[i]))


def verify_chains(
    chains: Sequence[InequalityChain],
    spec: SamplingSpec = DEFAULT_SAMPLING,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
    scale: float = 1.0,
    threads: int | None = None,
) -> list[ChainReport]:
    """Verify every chain over the pairs ``(scale, scale * x)`` of ``spec``.

    The work is split into fixed blocks of the sample stream and reduced in
    stream order, so the reports do not depend on the number of threads.
    """
    chains = list(chains)
    scale = float(scale)
    if not (np.isfinite(scale) and scale > 0):
        raise DomainError(f"scale must be finite and > 0, got {scale}")
    starts = range(0, spec.total, CHUNK_SIZE)

    def work(start: int):
        x = sample_ratios(spec, start, start + CHUNK_SIZE)
        a = np.full_like(x, scale)
        return _check_block(chains, a, scale * x, tol, start)

    n_workers = min(worker_count(threads), len(starts))
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            blocks = list(pool.map(work, starts))
    else:
        blocks = [work(s) for s in starts]

    acc = blocks[0]
    for blk in blocks[1:]:
        for (pa, xa), (pb, xb) in zip(acc, blk):
            _merge(pa, pb)
            _merge(xa, xb)

    reports = []
    for ch, (pair_stats, aux_stats) in zip(chains, acc):
        labels = ch.labels
        per_pair = []
        for i, st in enumerate(pair_stats):
            simplest = None
            if st.violations:
                simplest = _simplest_witness(ch.members[i], ch.members[i + 1], spec, scale, tol)
            per_pair.append(PairReport(labels[i], labels[i + 1], st.margin,
                                       PositivePair(st.a, st.b), st.violations, simplest))
        aux = tuple(
            PairReport("0", chk.name.split(" >=")[0], st.margin, PositivePair(st.a, st.b), st.violations)
            for chk, st in zip(ch.aux, aux_stats)
        )
        reports.append(ChainReport(ch.id, ch.source, ch.expectation, spec.total, tuple(per_pair), aux))
    return reports


def verify_chain(
    chain: InequalityChain,
    spec: SamplingSpec = DEFAULT_SAMPLING,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
    scale: float = 1.0,
    threads: int | None = None,
) -> ChainReport:
    return verify_chains([chain], spec, tol, scale, threads)[0]
