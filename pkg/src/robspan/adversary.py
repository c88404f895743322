"""Attacks from the lower-bound arguments, random baselines, and the prober."""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .geometry import GeomGraph, InputError, PointSet, remove_vertices
from .iterated import IteratedFunction
from .line import RetriesExhausted
from .metrics import DEFAULT_EXACT_CAP, DELETION, RobustnessCertificate, minimal_splus

KINDS = ("interval_endpoints", "random", "interval")


@dataclass(frozen=True)
class AttackSpec:
    kind: str
    k: int
    i: int | None = None  # 1-based centre rank for the interval kinds
    t: float = 1.0
    c: float = 1.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InputError(f"unknown attack kind {self.kind!r}")
        if self.k < 1:
            raise InputError("attack budget k must be at least 1")
        if self.kind == "interval_endpoints" and self.k % 4:
            raise InputError("interval_endpoints needs k divisible by 4")
        if self.kind != "random" and self.i is None:
            raise InputError(f"{self.kind} attack needs a centre i")


def _ranks(G: GeomGraph) -> None:
    if G.points.dim != 1:
        raise InputError("the interval attacks are defined for 1-D graphs")


def good_edges(G: GeomGraph, i: int, k: int, c: float = 1.0, t: float = 1.0) -> list[tuple[int, int]]:
    """Edges ``xy`` (1-based ranks) with ``x < i - k/4 < i + k/4 < y`` and ``y - x <= 2ctk``.

    Returned as 0-based vertex pairs.
    """
    _ranks(G)
    n = len(G.points)
    if not (c * k + 1 <= i <= n - c * k - 1):
        raise InputError(f"i={i} outside [{c * k + 1}, {n - c * k - 1}]")
    lo, hi, span = i - k / 4, i + k / 4, 2 * c * t * k
    out = []
    for u, v in G.edges:
        x, y = u + 1, v + 1
        if x < lo and hi < y and y - x <= span:
            out.append((u, v))
    return out


@dataclass
class AttackOutcome:
    S: tuple[int, ...]
    refused: bool = False
    good: list[tuple[int, int]] = field(default_factory=list)
    reason: str = ""


def attack_interval_endpoints(G: GeomGraph, i: int, k: int, c: float = 1.0, t: float = 1.0) -> AttackOutcome:
    """Remove the window ``i +- k/4`` and the left endpoint of every good edge.

    If that needs more than ``k`` vertices the attack is refused: the graph has
    many short edges bridging the window, which is what a robust graph must have.
    """
    if k < 4 or k % 4:
        raise InputError("k must be a positive multiple of 4")
    good = good_edges(G, i, k, c, t)
    window = {r - 1 for r in range(i - k // 4, i + k // 4 + 1)}
    S = window | {u for u, _ in good}
    if len(S) > k:
        return AttackOutcome(
            (), True, good, f"{len(good)} good edges: the attack needs {len(S)} > k={k} vertices"
        )
    return AttackOutcome(tuple(sorted(S)), False, good)


def crossing_short_edges(G: GeomGraph, S: Iterable[int], i: int, limit: float) -> list[tuple[int, int]]:
    """Edges of ``G - S`` crossing rank ``i`` with rank span ``<= limit``."""
    H = remove_vertices(G, S)
    return [(u, v) for u, v in H.edges if u + 1 < i < v + 1 and (v - u) <= limit]


def attack_interval(G: GeomGraph, i: int, k: int) -> tuple[int, ...]:
    """The ``k`` consecutive ranks centred at ``i`` (clipped to the graph)."""
    n = len(G.points)
    start = max(1, min(i - (k - 1) // 2, n - k + 1))
    return tuple(r - 1 for r in range(start, start + k))


def attack_random(V: PointSet | int, k: int, rng_seed: int = 0) -> tuple[int, ...]:
    n = V if isinstance(V, int) else len(V)
    if not 0 <= k <= n:
        raise InputError("need 0 <= k <= n")
    return tuple(sorted(random.Random(rng_seed).sample(range(n), k)))


def run_attack(G: GeomGraph, spec: AttackSpec) -> AttackOutcome:
    if spec.kind == "random":
        return AttackOutcome(attack_random(len(G.points), spec.k, spec.rng_seed))
    if spec.kind == "interval":
        _ranks(G)
        return AttackOutcome(attack_interval(G, spec.i, spec.k))
    return attack_interval_endpoints(G, spec.i, spec.k, spec.c, spec.t)


# --- census ------------------------------------------------------------------


def iterate_classes(F: IteratedFunction, t: float, count: int) -> list[tuple[float, float]]:
    """Length classes ``(f^i(k0)/2, 2t f^i(k0)]`` for ``i < count``."""
    return [(F.iterate(i) / 2, 2 * t * F.iterate(i)) for i in range(count)]


def class_counts(G: GeomGraph, classes: Sequence[tuple[float, float]]) -> list[int]:
    lengths = G.edge_lengths()
    return [int(((lengths > lo) & (lengths <= hi)).sum()) for lo, hi in classes]


def disjoint_from(F: IteratedFunction, t: float, limit: int = 64) -> int | None:
    """Smallest ``i0`` with ``f^{i0+1}(k0) / 2 > 2t f^{i0}(k0)``.

    Since ``f(x)/x`` is non-decreasing the inequality then holds for every
    later index, so classes ``i0, i0+1, ...`` are pairwise disjoint.
    """
    try:
        for i in range(limit):
            if F.iterate(i + 1) / 2 > 2 * t * F.iterate(i):
                return i
    except OverflowError:
        pass
    return None


@dataclass
class CensusRow:
    index: int
    lo: float
    hi: float
    count: int
    flagged: bool


def census(G: GeomGraph, F: IteratedFunction, t: float, threshold: float = 0.25) -> list[CensusRow]:
    """Per-class edge counts, flagging classes with fewer than ``threshold * n`` edges.

    The classes run over ``i <= f*(n/t) - 1`` (at least one class).
    """
    n = len(G.points)
    top = F.f_star(n / t) if n / t >= F.k0 else 0
    classes = iterate_classes(F, t, max(top, 1))
    counts = class_counts(G, classes)
    return [
        CensusRow(i, lo, hi, cnt, cnt < threshold * n)
        for i, ((lo, hi), cnt) in enumerate(zip(classes, counts))
    ]


def census_csv(rows: Iterable[CensusRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["class", "lo", "hi", "edges", "flagged"])
    for r in rows:
        w.writerow([r.index, f"{r.lo:.12g}", f"{r.hi:.12g}", r.count, int(r.flagged)])
    return buf.getvalue()


# --- probe -------------------------------------------------------------------

SplusBuilder = Callable[[GeomGraph, Sequence[int], int], RobustnessCertificate]


@dataclass
class ProbeRow:
    kind: str
    k: int
    seed: int
    size_S: int
    splus_constructive: int | None
    splus_oracle: int | None
    oracle_exact: bool
    verified: bool
    note: str = ""


@dataclass
class ProbeReport:
    rows: list[ProbeRow]
    census: list[CensusRow]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(
            ["kind", "k", "seed", "size_S", "splus_constructive", "splus_oracle", "oracle_exact", "verified", "note"]
        )
        for r in self.rows:
            w.writerow([
                r.kind, r.k, r.seed, r.size_S,
                "" if r.splus_constructive is None else r.splus_constructive,
                "" if r.splus_oracle is None else r.splus_oracle,
                int(r.oracle_exact), int(r.verified), r.note,
            ])
        return buf.getvalue() + census_csv(self.census)


def probe(
    G: GeomGraph,
    t: float,
    attacks: Sequence[AttackSpec],
    builder: SplusBuilder | None = None,
    exact_cap: int = DEFAULT_EXACT_CAP,
    F: IteratedFunction | None = None,
    census_t: float | None = None,
    oracle: bool = True,
) -> ProbeReport:
    """Run each attack; compare the constructive casualty set with the oracle's."""
    rows = []
    for spec in attacks:
        try:
            outcome = run_attack(G, spec)
        except InputError as exc:
            rows.append(ProbeRow(spec.kind, spec.k, spec.rng_seed, 0, None, None, False, False, f"error: {exc}"))
            continue
        if outcome.refused:
            rows.append(ProbeRow(spec.kind, spec.k, spec.rng_seed, 0, None, None, False, False, "refused: " + outcome.reason))
            continue
        S = outcome.S
        cons = orc = None
        verified = True
        exact = False
        note = ""
        if builder is not None:
            try:
                cert = builder(G, S, spec.rng_seed)
                cons = cert.size
                verified = verified and cert.verified
            except RetriesExhausted as exc:
                note = str(exc)
                verified = False
                if exc.best is not None:
                    cons = exc.best.size
        if oracle:
            oc = minimal_splus(G, S, t, DELETION, exact_cap)
            orc, exact = oc.size, oc.minimal
            verified = verified and oc.verified
        rows.append(ProbeRow(spec.kind, spec.k, spec.rng_seed, len(S), cons, orc, exact, verified, note))
    rows_census = census(G, F, census_t if census_t is not None else t) if F is not None else []
    return ProbeReport(rows, rows_census)
