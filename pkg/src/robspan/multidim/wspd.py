"""Well-separated pair decomposition and the fault-tolerant spanner built on it."""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from ..geometry import GeomGraph, InputError, PointSet


@dataclass(frozen=True)
class WsPair:
    A: tuple[int, ...]
    B: tuple[int, ...]
    separation: float


class _Node:
    __slots__ = ("idx", "center", "radius", "left", "right")

    def __init__(self, idx: np.ndarray, P: np.ndarray):
        self.idx = idx
        lo, hi = P[idx].min(axis=0), P[idx].max(axis=0)
        self.center = (lo + hi) / 2
        self.radius = float(np.linalg.norm(hi - lo)) / 2
        self.left = self.right = None


def _split_tree(P: np.ndarray, idx: np.ndarray) -> _Node:
    node = _Node(idx, P)
    if len(idx) > 1:
        pts = P[idx]
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        axis = int(np.argmax(hi - lo))
        mid = (lo[axis] + hi[axis]) / 2
        mask = pts[:, axis] <= mid
        node.left = _split_tree(P, idx[mask])
        node.right = _split_tree(P, idx[~mask])
    return node


def well_separated(a_center, a_radius, b_center, b_radius, s: float) -> bool:
    """Balls of the common radius ``max(ra, rb)`` are at least ``s * r`` apart."""
    r = max(a_radius, b_radius)
    return float(np.linalg.norm(a_center - b_center)) - 2 * r >= s * r


def wspd(V: PointSet, s: float) -> list[WsPair]:
    """Fair-split-tree WSPD: every unordered pair lands in exactly one ``WsPair``."""
    if s <= 0:
        raise InputError("separation must be positive")
    n = len(V)
    if n < 2:
        return []
    P = V.coords
    pairs: list[WsPair] = []

    def find(a: _Node, b: _Node) -> None:
        if well_separated(a.center, a.radius, b.center, b.radius, s):
            pairs.append(WsPair(tuple(sorted(a.idx.tolist())), tuple(sorted(b.idx.tolist())), s))
        elif a.radius >= b.radius:
            find(a.left, b)
            find(a.right, b)
        else:
            find(a, b.left)
            find(a, b.right)

    def walk(u: _Node) -> None:
        if u.left is None:
            return
        find(u.left, u.right)
        walk(u.left)
        walk(u.right)

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * n + 1000))
    try:
        walk(_split_tree(P, np.arange(n)))
    finally:
        sys.setrecursionlimit(old)
    return pairs


def separation_for(t_prime: float) -> float:
    return 4 * (t_prime + 1) / (t_prime - 1)


def ft_edges(pairs: list[WsPair], k_prime: int) -> set[tuple[int, int]]:
    """Edges for a ``k_prime``-fault-tolerant spanner from a WSPD.

    Each side contributes its first ``k_prime + 1`` indices as representatives.
    When both sides are larger than that, representatives are matched
    one-to-one; otherwise every representative of one side is joined to every
    representative of the other.
    """
    m = k_prime + 1
    edges: set[tuple[int, int]] = set()
    for p in pairs:
        ra, rb = p.A[:m], p.B[:m]
        if len(p.A) > m and len(p.B) > m:
            cand = zip(ra, rb)
        else:
            cand = ((a, b) for a in ra for b in rb)
        for a, b in cand:
            edges.add((a, b) if a < b else (b, a))
    return edges


def ft_spanner(X: PointSet, k_prime: int, t_prime: float) -> GeomGraph:
    """A ``k_prime``-fault-tolerant ``t_prime``-spanner on ``X``."""
    if not t_prime > 1:
        raise InputError("t_prime must exceed 1")
    if k_prime < 0:
        raise InputError("k_prime must be non-negative")
    pairs = wspd(X, separation_for(t_prime))
    edges = ft_edges(pairs, k_prime)
    if len(edges) > (k_prime + 1) ** 2 * len(pairs):
        raise AssertionError("fault-tolerant spanner exceeds its edge budget")
    return GeomGraph(X, tuple(edges))
