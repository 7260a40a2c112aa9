"""Reproducible log-uniform sampling of ratios ``x = b/a``.

Sample ``i`` depends only on ``(seed, i)``: random samples are produced in
fixed-size chunks, chunk ``c`` drawing from ``default_rng([seed, c])``.  The
optional edge cases come first in the stream.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numpy.typing import NDArray

from meanforge.means import DomainError, PositivePair

__all__ = [
    "CHUNK_SIZE",
    "SamplingSpec",
    "DEFAULT_SAMPLING",
    "edge_ratios",
    "sample_ratios",
    "sample_pairs",
    "worker_count",
]

CHUNK_SIZE = 1 << 16
_SEED_LIMIT = 1 << 64


@dataclass(frozen=True)
class SamplingSpec:
    count: int = 1_000_000
    seed: int = 1
    ratio_min: float = 1e-8
    ratio_max: float = 1e8
    include_edge_cases: bool = True

    def __post_init__(self) -> None:
        if int(self.count) != self.count or self.count < 1:
            raise DomainError(f"sample count must be a positive integer, got {self.count}")
        if int(self.seed) != self.seed or not (0 <= self.seed < _SEED_LIMIT):
            raise DomainError(f"seed must be an integer in [0, 2**64), got {self.seed}")
        if not (math.isfinite(self.ratio_min) and math.isfinite(self.ratio_max)):
            raise DomainError("ratio bounds must be finite")
        if not (0 < self.ratio_min < self.ratio_max):
            raise DomainError(
                f"need 0 < ratio_min < ratio_max, got [{self.ratio_min}, {self.ratio_max}]"
            )

    @property
    def n_edge(self) -> int:
        return len(edge_ratios(self)) if self.include_edge_cases else 0

    @property
    def total(self) -> int:
        return self.count + self.n_edge


DEFAULT_SAMPLING = SamplingSpec()


def edge_ratios(spec: SamplingSpec) -> NDArray[np.float64]:
    """The diagonal, its 1e-9 neighbours and both range ends, clipped to range."""
    cand = [1.0, 1.0 - 1e-9, 1.0 + 1e-9, spec.ratio_min, spec.ratio_max]
    out: list[float] = []
    for x in cand:
        if spec.ratio_min <= x <= spec.ratio_max and x not in out:
            out.append(x)
    return np.array(out, dtype=np.float64)


def _random_chunk(spec: SamplingSpec, chunk: int) -> NDArray[np.float64]:
    rng = np.random.default_rng([int(spec.seed), chunk])
    u = rng.random(CHUNK_SIZE)
    lo, hi = math.log(spec.ratio_min), math.log(spec.ratio_max)
    x = np.exp(lo + u * (hi - lo))
    # exp rounding may step just outside the closed range
    return np.clip(x, spec.ratio_min, spec.ratio_max)


def sample_ratios(spec: SamplingSpec, start: int = 0, stop: int | None = None) -> NDArray[np.float64]:
    """Ratios for stream indices ``start <= i < stop``."""
    stop = spec.total if stop is None else min(stop, spec.total)
    if start >= stop:
        return np.empty(0)
    parts = []
    n_edge = spec.n_edge
    if start < n_edge:
        parts.append(edge_ratios(spec)[start:min(stop, n_edge)])
    r0, r1 = max(start, n_edge) - n_edge, stop - n_edge
    c = r0 // CHUNK_SIZE
    while r0 < r1:
        block = _random_chunk(spec, c)
        lo = r0 - c * CHUNK_SIZE
        hi = min(r1 - c * CHUNK_SIZE, CHUNK_SIZE)
        parts.append(block[lo:hi])
        r0 = (c + 1) * CHUNK_SIZE
        c += 1
    return np.concatenate(parts) if parts else np.empty(0)


def sample_pairs(spec: SamplingSpec, scale: float = 1.0) -> Iterator[PositivePair]:
    """Stream of pairs ``(scale, scale * x)``."""
    for begin in range(0, spec.total, CHUNK_SIZE):
        for x in sample_ratios(spec, begin, begin + CHUNK_SIZE):
            yield PositivePair(scale, scale * float(x))


def worker_count(requested: int | None = None) -> int:
    """Worker threads: explicit request, else ``MEANFORGE_THREADS``, else CPU count."""
    if requested is None:
        env = os.environ.get("MEANFORGE_THREADS", "").strip()
        if env:
            try:
                requested = int(env)
            except ValueError:
                raise DomainError(f"MEANFORGE_THREADS must be an integer, got {env!r}") from None
    if requested is None:
        requested = min(os.cpu_count() or 1, 8)
    return max(1, int(requested))
