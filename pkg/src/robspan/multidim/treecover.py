"""Shifted compressed quadtrees as a binary tree cover.

Each tree has one leaf per point (leaf node id == point index) and ``n - 1``
internal nodes.  A quadtree cell with ``m`` occupied children becomes a
left-leaning comb of ``m - 1`` binary nodes, children ordered by their
smallest point index.  An internal node is represented by the smallest point
index of its right subtree, which gives every internal node a distinct point.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field

import numpy as np

from ..geometry import InputError, PointSet

MAX_TAU_PAIRS = 100_000


@dataclass
class Tree:
    parent: list[int]
    children: list[tuple[int, ...]]
    point: list[int]  # node -> point index (the node's representative)
    root: int
    n_leaves: int

    def __len__(self) -> int:
        return len(self.parent)

    def neighbors(self, u: int) -> list[int]:
        out = list(self.children[u])
        if self.parent[u] >= 0:
            out.append(self.parent[u])
        return out

    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(u) for u in range(len(self))]

    def nodes_of(self, x: int) -> list[int]:
        """Nodes represented by point ``x``: its leaf and at most one internal node."""
        return self._occurrences.get(x, [])

    @property
    def _occurrences(self) -> dict[int, list[int]]:
        occ = self.__dict__.get("_occ")
        if occ is None:
            occ = {}
            for u, p in enumerate(self.point):
                occ.setdefault(p, []).append(u)
            self.__dict__["_occ"] = occ
        return occ

    def edges(self) -> set[tuple[int, int]]:
        """Point pairs ``r(u) r(parent(u))``, skipping nodes sharing a point."""
        out = set()
        for u, p in enumerate(self.parent):
            if p >= 0:
                a, b = self.point[u], self.point[p]
                if a != b:
                    out.add((min(a, b), max(a, b)))
        return out

    def check(self) -> None:
        n = self.n_leaves
        if len(self) != max(2 * n - 1, 1):
            raise AssertionError("tree must have 2n-1 nodes")
        for u in range(n):
            if self.children[u] or self.point[u] != u:
                raise AssertionError(f"node {u} must be the leaf of point {u}")
        internal = [self.point[u] for u in range(n, len(self))]
        if len(set(internal)) != len(internal):
            raise AssertionError("a point represents two internal nodes")
        for u in range(n, len(self)):
            if len(self.children[u]) != 2:
                raise AssertionError("internal nodes must be binary")


@dataclass
class TreeCover:
    points: PointSet
    trees: list[Tree]
    tau: float = 1.0
    pairs_checked: int = 0
    shifts: list[np.ndarray] = field(default_factory=list, repr=False)

    def __iter__(self):
        return iter(self.trees)

    def __len__(self) -> int:
        return len(self.trees)

    def edges(self) -> set[tuple[int, int]]:
        out: set[tuple[int, int]] = set()
        for T in self.trees:
            out |= T.edges()
        return out

    def check(self) -> None:
        for T in self.trees:
            T.check()


def _build_tree(P: np.ndarray, lo: np.ndarray, side: float) -> Tree:
    n, d = P.shape
    parent = [-1] * n
    children: list[tuple[int, ...]] = [()] * n
    point = list(range(n))

    def new_node(left: int, right: int, rep: int) -> int:
        parent.append(-1)
        children.append((left, right))
        point.append(rep)
        u = len(parent) - 1
        parent[left] = parent[right] = u
        return u

    weights = 2 ** np.arange(d)

    def build(idx: np.ndarray, lo: np.ndarray, side: float) -> tuple[int, int]:
        # returns (node, smallest point index below it)
        if len(idx) == 1:
            return int(idx[0]), int(idx[0])
        while True:
            half = side / 2
            if half <= 0 or not np.all(lo + half > lo):
                raise InputError("points too close to separate in floating point")
            bits = np.clip(np.floor((P[idx] - lo) / half), 0, 1).astype(int)
            codes = bits @ weights
            if np.all(codes == codes[0]):
                lo = lo + bits[0] * half
                side = half
                continue
            break
        subs = []
        for code in np.unique(codes):
            sel = idx[codes == code]
            child_lo = lo + ((code // weights) % 2) * half
            subs.append(build(sel, child_lo, half))
        subs.sort(key=lambda s: s[1])
        node, low = subs[0]
        for child, child_low in subs[1:]:
            node = new_node(node, child, child_low)
        return node, low

    if n == 1:
        return Tree([-1], [()], [0], 0, 1)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * n + 1000))
    try:
        root, _ = build(np.arange(n), lo, side)
    finally:
        sys.setrecursionlimit(old)
    return Tree(parent, children, point, root, n)


class _PathLengths:
    """Vectorized tree-path lengths between leaves via binary lifting."""

    def __init__(self, T: Tree, P: np.ndarray):
        N = len(T)
        order = [T.root]
        for u in order:
            order.extend(T.children[u])
        depth = np.zeros(N, dtype=np.int64)
        dist = np.zeros(N)
        par = np.array([p if p >= 0 else u for u, p in enumerate(T.parent)])
        for u in order[1:]:
            p = T.parent[u]
            depth[u] = depth[p] + 1
            dist[u] = dist[p] + float(np.linalg.norm(P[T.point[u]] - P[T.point[p]]))
        levels = max(1, int(depth.max()).bit_length())
        up = [par]
        for _ in range(levels - 1):
            up.append(up[-1][up[-1]])
        self.depth, self.dist, self.up = depth, dist, up

    def lca(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a, b = a.copy(), b.copy()
        swap = self.depth[a] < self.depth[b]
        a[swap], b[swap] = b[swap], a[swap].copy()
        diff = self.depth[a] - self.depth[b]
        for j, upj in enumerate(self.up):
            m = (diff >> j) & 1 == 1
            a[m] = upj[a[m]]
        for upj in reversed(self.up):
            m = upj[a] != upj[b]
            a[m] = upj[a[m]]
            b[m] = upj[b[m]]
        same = a == b
        return np.where(same, a, self.up[0][a])

    def __call__(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        c = self.lca(a, b)
        return self.dist[a] + self.dist[b] - 2 * self.dist[c]


def tau_pairs(n: int, rng: np.random.Generator, max_pairs: int = MAX_TAU_PAIRS) -> tuple[np.ndarray, np.ndarray]:
    if n * (n - 1) // 2 <= max_pairs:
        a, b = np.triu_indices(n, k=1)
        return a.astype(np.int64), b.astype(np.int64)
    a = rng.integers(0, n, size=max_pairs)
    b = rng.integers(0, n - 1, size=max_pairs)
    b = np.where(b >= a, b + 1, b)
    return a, b


def tree_stretch(cover: TreeCover, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per pair, the best tree-path stretch over all trees of the cover."""
    P = cover.points.coords
    eu = np.linalg.norm(P[a] - P[b], axis=1)
    best = np.full(len(a), math.inf)
    for T in cover.trees:
        best = np.minimum(best, _PathLengths(T, P)(a, b) / eu)
    return best


def default_shifts(dim: int) -> int:
    return 2 * dim + 2


def shifted_quadtree_cover(V: PointSet, num_shifts: int | None = None, rng_seed: int = 0) -> TreeCover:
    """Compressed quadtrees over randomly shifted copies of the bounding box."""
    n = len(V)
    if n == 0:
        raise InputError("empty point set")
    d = V.dim
    num_shifts = default_shifts(d) if num_shifts is None else num_shifts
    if num_shifts < 1:
        raise InputError("need at least one shift")
    P = V.coords
    rng = np.random.default_rng(rng_seed)
    pmin = P.min(axis=0)
    extent = float((P.max(axis=0) - pmin).max())
    D = extent if extent > 0 else 1.0
    trees, shifts = [], []
    for _ in range(num_shifts):
        shift = rng.uniform(0.0, D, size=d)
        shifts.append(shift)
        trees.append(_build_tree(P, pmin - shift, 2 * D))
    cover = TreeCover(V, trees, shifts=shifts)
    cover.check()
    if n >= 2:
        a, b = tau_pairs(n, rng)
        cover.tau = float(tree_stretch(cover, a, b).max())
        cover.pairs_checked = len(a)
    return cover
