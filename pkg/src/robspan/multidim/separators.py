"""Centroid separator decomposition of trees."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..geometry import InputError

SEPARATOR_CONSTANT = 2  # |X| <= 2 * nodes / k_prime


@dataclass
class Separation:
    separators: frozenset[int]
    component: list[int]  # node -> component id, -1 for separator nodes
    k_prime: int
    sizes: list[int]  # component id -> size (in labels)

    def members(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.sizes]
        for u, c in enumerate(self.component):
            if c >= 0:
                out[c].append(u)
        return out


def _component(adj: Sequence[Sequence[int]], start: int, removed: set[int]) -> list[int]:
    seen = {start}
    order = [start]
    for u in order:
        for w in adj[u]:
            if w not in seen and w not in removed:
                seen.add(w)
                order.append(w)
    return order


def _centroid(adj: Sequence[Sequence[int]], comp: list[int], removed: set[int]) -> int:
    root = comp[0]
    parent = {root: -1}
    order = [root]
    for u in order:
        for w in adj[u]:
            if w not in removed and w not in parent:
                parent[w] = u
                order.append(w)
    size = {u: 1 for u in order}
    for u in reversed(order[1:]):
        size[parent[u]] += size[u]
    m = len(order)
    for u in order:
        biggest = m - size[u]
        for w in adj[u]:
            if w not in removed and parent.get(w) == u:
                biggest = max(biggest, size[w])
        if 2 * biggest <= m:
            return u
    raise AssertionError("a tree always has a centroid")


def centroid_decompose(
    adj: Sequence[Sequence[int]], k_prime: int, labels: Sequence[int] | None = None
) -> Separation:
    """Remove centroids until every component has at most ``k_prime`` members.

    ``adj`` is the tree's adjacency list.  With ``labels``, a component's size
    is its number of distinct labels (points represented) instead of nodes.
    """
    if k_prime < 1:
        raise InputError("k_prime must be at least 1")
    N = len(adj)

    def size(comp: list[int]) -> int:
        return len(comp) if labels is None else len({labels[u] for u in comp})

    removed: set[int] = set()
    stack = [0] if N else []
    while stack:
        start = stack.pop()
        comp = _component(adj, start, removed)
        if size(comp) <= k_prime:
            continue
        c = _centroid(adj, comp, removed)
        removed.add(c)
        stack.extend(w for w in adj[c] if w not in removed)

    component = [-1] * N
    sizes: list[int] = []
    for u in range(N):
        if u in removed or component[u] >= 0:
            continue
        comp = _component(adj, u, removed)
        for w in comp:
            component[w] = len(sizes)
        sizes.append(size(comp))
    return Separation(frozenset(removed), component, k_prime, sizes)
