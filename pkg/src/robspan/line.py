"""One-dimensional robust 1-spanners and their randomized casualty sets.

Everything here works on ranks: vertex ``idx`` of a sorted 1-D point set is
``x_{idx+1}`` in 1-based notation.  Coordinates only matter for lengths.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable

from .geometry import GeomGraph, InputError, PointSet, check_vertex_set
from .iterated import IteratedFunction, next_pow2
from .metrics import DELETION, RobustnessCertificate, certify


class RetriesExhausted(RuntimeError):
    """No random shift succeeded; ``best`` is the smallest verified casualty set seen."""

    def __init__(self, message: str, best: RobustnessCertificate | None, attempts: int):
        super().__init__(message)
        self.best = best
        self.attempts = attempts


def _require_line(V: PointSet) -> None:
    if V.dim != 1:
        raise InputError("1-D construction needs a 1-D point set")


def span_edges(n: int, spans: Iterable[int]) -> list[tuple[int, int]]:
    return [(i, i + s) for s in sorted(set(spans)) for i in range(n - s)]


def g2x_spans(n: int) -> list[int]:
    return [2**j for j in range(max(n, 1).bit_length())]


def build_g2x(V: PointSet) -> GeomGraph:
    """Edges between ranks that differ by a power of two."""
    _require_line(V)
    return GeomGraph(V, tuple(span_edges(len(V), g2x_spans(len(V)))))


def g2x_edge_count(n: int) -> int:
    return sum(max(0, n - s) for s in g2x_spans(n))


def build_gf(V: PointSet, F: IteratedFunction) -> GeomGraph:
    """Consecutive edges plus edges of span ``next_pow2(f^j(k0))``, ``j <= f*(n)``."""
    _require_line(V)
    return GeomGraph(V, tuple(span_edges(len(V), F.span_ladder(len(V)))))


def gf_edge_count(n: int, F: IteratedFunction) -> int:
    return sum(max(0, n - s) for s in F.span_ladder(n))


@dataclass(frozen=True)
class KillResult:
    killed: frozenset[int]  # 0-based vertex indices
    costs: tuple[int, ...]  # one per failed vertex, in the order of S
    expensive: bool
    cheap_total: int


def _window(lo: int, hi: int, n: int) -> range:
    # 1-based inclusive [lo, hi] clipped to [1, n], returned as 0-based indices
    return range(max(lo, 1) - 1, min(hi, n))


def kill_g2x(n: int, S: Iterable[int], r: int) -> KillResult:
    """Apply the power-of-two kill rule for shift ``r``."""
    S = list(S)
    k = len(S)
    top = max(n - 1, 1).bit_length()  # 2**top >= n
    killed: set[int] = set()
    costs = []
    for idx in S:
        i = idx + 1
        d = i - r
        j = top if d == 0 else min((d & -d).bit_length() - 1, top)
        killed.update(_window(i - 2**j + 1, i + 2**j - 1, n))
        costs.append(2 ** (j + 1) - 1)
    cheap = [c for c in costs if c < 4 * k]
    return KillResult(frozenset(killed), tuple(costs), len(cheap) < k, sum(cheap))


def g2x_bound(k: int) -> float:
    """Casualty bound on a successful draw: the k failures plus ``4k log k + 12k``."""
    return k + 4 * k * math.log2(k) + 12 * k if k else 0


def _levels(n: int, F: IteratedFunction) -> list[int]:
    top = F.f_star(n) + 1 if n >= F.k0 else 0
    return [next_pow2(F.iterate(j)) for j in range(top + 1)]


def kill_gf(n: int, F: IteratedFunction, S: Iterable[int], r: int) -> KillResult:
    """Kill rule for ``G_f``: each failure kills the open aligned block around it.

    For ``x_i`` pick the smallest level ``j`` whose span ``L`` does not divide
    ``i - r``; ``x_i`` then lies strictly inside the block between the aligned
    ranks ``i - p`` and ``i + q`` with ``p = (i - r) mod L`` and ``q = L - p``,
    and the span-``L`` edge joining them jumps over the killed vertices.
    """
    S = list(S)
    k = len(S)
    levels = _levels(n, F)
    killed: set[int] = set()
    costs = []
    for idx in S:
        i = idx + 1
        d = i - r
        L = next((L for L in levels if d % L), None)
        if L is None:
            killed.update(range(n))
            costs.append(max(levels[-1] - 1, n))
            continue
        p = d % L
        q = L - p
        killed.update(_window(i - p + 1, i + q - 1, n))
        costs.append(L - 1)
    limit = F(4 * k) if k else 0
    cheap = [c for c in costs if c <= limit]
    return KillResult(frozenset(killed), tuple(costs), len(cheap) < k, sum(cheap))


def gf_budget(k: int, F: IteratedFunction) -> float:
    """``f(4k) * (f*(4k) + 1)``: the cheap-cost threshold for a successful draw."""
    if k == 0:
        return 0
    fs = F.f_star(4 * k) if 4 * k >= F.k0 else 0
    return F(4 * k) * (fs + 1)


def gf_bound(k: int, F: IteratedFunction) -> float:
    return k + gf_budget(k, F)


def _run_trials(G, S, draw, kill, budget, bound, seed, max_retries, label):
    S = check_vertex_set(S, len(G.points))
    if len(G.vertices) != len(G.points):
        raise InputError("casualty builders expect the full graph, not a subgraph")
    if not S:
        cert = certify(G, (), (), 1.0, DELETION)
        cert.attempts = 0
        return cert
    rng = random.Random(seed)
    best = None
    for attempt in range(1, max_retries + 1):
        r = draw(rng)
        res = kill(S, r)
        cert = certify(G, S, res.killed, 1.0, DELETION)
        cert.attempts = attempt
        if cert.verified and (best is None or cert.size < best.size):
            best = cert
        if cert.verified and not res.expensive and res.cheap_total <= budget:
            if cert.size > bound:
                raise AssertionError(f"{label}: |S+|={cert.size} exceeds bound {bound}")
            return cert
    raise RetriesExhausted(f"{label}: no successful shift in {max_retries} draws", best, max_retries)


def splus_g2x(G: GeomGraph, S: Iterable[int], seed: int = 0, max_retries: int = 64) -> RobustnessCertificate:
    """Casualty set for ``G_2x`` via a random shift; retries on a failed draw."""
    n = len(G.points)
    S = check_vertex_set(S, n)
    k = len(S)
    R = next_pow2(n) if n else 1
    budget = 4 * k * math.log2(k) + 12 * k if k else 0
    return _run_trials(
        G, S,
        lambda rng: rng.randrange(R),
        lambda S, r: kill_g2x(n, S, r),
        budget, g2x_bound(k), seed, max_retries, "splus_g2x",
    )


def splus_gf(
    G: GeomGraph, F: IteratedFunction, S: Iterable[int], seed: int = 0, max_retries: int = 64
) -> RobustnessCertificate:
    """Casualty set for ``G_f``; the shift is drawn below ``next_pow2(f^{f*(n)+1}(k0))``."""
    n = len(G.points)
    S = check_vertex_set(S, n)
    k = len(S)
    R = _levels(n, F)[-1]
    return _run_trials(
        G, S,
        lambda rng: rng.randrange(R),
        lambda S, r: kill_gf(n, F, S, r),
        gf_budget(k, F), gf_bound(k, F), seed, max_retries, "splus_gf",
    )
