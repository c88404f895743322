"""Multi-level robust spanner assembly and the hardy composition.

For every level ``k'`` the trees of a tree cover are cut by centroid
separators into components of at most ``k'`` points; the separator points
``X`` get a ``k'``-fault-tolerant spanner.  The output is the union of all
tree edges and all levels' fault-tolerant spanners.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from ..geometry import GeomGraph, InputError, PointSet, check_vertex_set
from ..iterated import IteratedFunction
from ..metrics import DELETION, RobustnessCertificate, certify, distance_rows, euclid_rows
from .separators import Separation, centroid_decompose
from .treecover import TreeCover, shifted_quadtree_cover
from .wspd import ft_spanner


class NoSuitableLevel(InputError):
    pass


@dataclass
class Level:
    index: int
    k_prime: int
    X: tuple[int, ...]
    edges_added: int
    separations: list[Separation] = field(repr=False)

    @property
    def x_size(self) -> int:
        return len(self.X)


@dataclass
class BuildReport:
    n: int
    d: int
    t: float
    t_prime: float
    cover: TreeCover | None = field(repr=False)
    levels: list[Level] = field(default_factory=list)
    tree_edges: int = 0
    edges: int = 0
    measured_stretch: float = 1.0
    f_star: int = 0

    @property
    def tau(self) -> float:
        return self.cover.tau if self.cover is not None else 1.0

    @property
    def stretch_bound(self) -> float:
        """Tree stretch times fault-tolerant stretch (at least 1)."""
        return max(1.0, self.tau * self.t_prime)

    @property
    def edge_constant(self) -> float:
        """``edges / (n * (f*(n) + 1))``."""
        return self.edges / (self.n * (self.f_star + 1)) if self.n else 0.0

    @property
    def num_trees(self) -> int:
        return len(self.cover) if self.cover is not None else 0

    def level_for(self, k: int) -> Level:
        for lv in self.levels:
            if lv.k_prime >= k:
                return lv
        top = self.levels[-1].k_prime if self.levels else 0
        raise NoSuitableLevel(
            f"no level with k' >= {k} (largest is {top}); robustness is vacuous at this size"
        )

    def splus_budget(self, k: int, k_prime: int) -> int:
        """Each failure kills at most ``4 k'`` points per tree, plus itself."""
        return k * (1 + 4 * self.num_trees * k_prime)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "d", "tau_measured", "stretch_bound"])
        w.writerow([self.n, self.d, f"{self.tau:.12g}", f"{self.stretch_bound:.12g}"])
        w.writerow(["level", "k_prime", "x_size", "edges_added"])
        for lv in self.levels:
            w.writerow([lv.index, lv.k_prime, lv.x_size, lv.edges_added])
        return buf.getvalue()


def _separate(cover: TreeCover, k_prime: int) -> tuple[list[Separation], tuple[int, ...]]:
    seps = []
    X: set[int] = set()
    for T in cover:
        sep = centroid_decompose(T.adjacency(), k_prime, labels=T.point)
        seps.append(sep)
        X.update(T.point[u] for u in sep.separators)
    return seps, tuple(sorted(X))


def measure_stretch(G: GeomGraph, seed: int = 0, max_pairs: int = 100_000) -> float:
    """Largest stretch over all pairs, or over a seeded sample of source rows."""
    n = len(G.points)
    if n < 2:
        return 1.0
    verts = list(G.vertices)
    if len(verts) * (len(verts) - 1) // 2 > max_pairs:
        rng = np.random.default_rng(seed)
        verts_src = sorted(rng.choice(verts, size=max(1, max_pairs // len(verts)), replace=False).tolist())
    else:
        verts_src = verts
    worst = 1.0
    targets = np.asarray(verts)
    for start in range(0, len(verts_src), 256):
        chunk = verts_src[start : start + 256]
        gd = distance_rows(G, chunk)[:, targets]
        ed = euclid_rows(G, chunk, targets)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(ed > 0, gd / np.where(ed > 0, ed, 1.0), 1.0)
        worst = max(worst, float(ratio.max()))
    return worst


def build_robust_dd(
    V: PointSet,
    F: IteratedFunction,
    t: float = 4.0,
    rng_seed: int = 0,
    num_shifts: int | None = None,
    audit: bool = True,
) -> tuple[GeomGraph, BuildReport]:
    """Union of tree-cover edges and one fault-tolerant spanner per level ``k'``.

    The fault-tolerant spanners use stretch ``sqrt(t)``.  With quadtree trees
    the certified stretch is ``tau * sqrt(t)`` (see ``BuildReport.stretch_bound``).
    """
    if not t > 1:
        raise InputError("t must exceed 1")
    n = len(V)
    t_prime = math.sqrt(t)
    if n <= 1:
        return GeomGraph(V, ()), BuildReport(n, V.dim, t, t_prime, None)
    cover = shifted_quadtree_cover(V, num_shifts, rng_seed)
    edges = cover.edges()
    fs = F.f_star(n) if n >= F.k0 else -1
    report = BuildReport(n, V.dim, t, t_prime, cover, tree_edges=len(edges), f_star=max(fs, 0))
    seen_k: set[int] = set()
    for i in range(fs + 1):
        k_prime = max(1, math.floor(F.iterate(i)))
        if k_prime in seen_k:
            continue
        seen_k.add(k_prime)
        seps, X = _separate(cover, k_prime)
        added = 0
        if len(X) >= 2:
            ft = ft_spanner(V.subset(X), k_prime, t_prime)
            mapped = {(X[a], X[b]) for a, b in ft.edges}
            added = len(mapped - edges)
            edges |= mapped
        report.levels.append(Level(i, k_prime, X, added, seps))
    G = GeomGraph(V, tuple(edges))
    report.edges = G.m
    if audit:
        report.measured_stretch = measure_stretch(G, rng_seed)
    return G, report


def kill_dd(report: BuildReport, level: Level, S: Iterable[int]) -> set[int]:
    """Points killed by ``S`` in every tree at the given level."""
    killed: set[int] = set()
    for T, sep in zip(report.cover, level.separations):
        comp_points: dict[int, set[int]] = {}
        for u, c in enumerate(sep.component):
            if c >= 0:
                comp_points.setdefault(c, set()).add(T.point[u])
        for x in S:
            for w in T.nodes_of(x):
                if w in sep.separators:
                    for nb in T.neighbors(w):
                        c = sep.component[nb]
                        if c >= 0:
                            killed |= comp_points[c]
                else:
                    killed |= comp_points[sep.component[w]]
    return killed


def splus_dd(G: GeomGraph, report: BuildReport, S: Iterable[int], k: int | None = None) -> RobustnessCertificate:
    """Casualty set from the tree-component kill rule at the smallest level ``k' >= |S|``."""
    S = check_vertex_set(S, len(G.points))
    if k is not None and k != len(S):
        raise InputError("k must equal |S|")
    k = len(S)
    if k == 0 or report.cover is None:
        return certify(G, S, S, report.stretch_bound, DELETION)
    level = report.level_for(k)
    S_plus = set(S) | kill_dd(report, level, S)
    budget = report.splus_budget(k, level.k_prime)
    if len(S_plus) > budget:
        raise AssertionError(f"|S+|={len(S_plus)} exceeds budget {budget}")
    return certify(G, S, S_plus, report.stretch_bound, DELETION)


@dataclass
class HardyReport:
    n: int
    s: int
    X: tuple[int, ...]
    tree_edges: int
    inner_edges: int
    edges: int
    cover: TreeCover | None = field(repr=False, default=None)

    @property
    def edges_per_point(self) -> float:
        return self.edges / self.n if self.n else 0.0


def build_hardy(
    V: PointSet,
    s_fn: Callable[[int], int],
    inner: Callable[[PointSet], GeomGraph],
    t: float | None = None,
    rng_seed: int = 0,
    num_shifts: int | None = None,
) -> tuple[GeomGraph, HardyReport]:
    """Tree cover plus an inner spanner on the separator points at bound ``s(n)``.

    ``t`` is informational; the inner builder fixes the stretch on ``X``.
    """
    n = len(V)
    if n <= 1:
        return GeomGraph(V, ()), HardyReport(n, 1, (), 0, 0, 0)
    s = int(s_fn(n))
    if s < 1:
        raise InputError("s(n) must be at least 1")
    cover = shifted_quadtree_cover(V, num_shifts, rng_seed)
    edges = cover.edges()
    tree_edges = len(edges)
    _, X = _separate(cover, s)
    inner_edges = 0
    if len(X) >= 2:
        H = inner(V.subset(X))
        mapped = {(X[a], X[b]) for a, b in H.edges}
        inner_edges = len(mapped)
        edges |= mapped
    G = GeomGraph(V, tuple(edges))
    return G, HardyReport(n, s, X, tree_edges, inner_edges, G.m, cover)
