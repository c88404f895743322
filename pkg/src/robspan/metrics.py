"""Shortest paths, stretch, and the robustness predicate.

The robustness definition asks for a superset ``S_plus`` of the failed set
``S`` such that every pair of vertices outside ``S_plus`` still has a
``t``-spanning path in ``G - S``.  Pairs that violate the bound in ``G - S``
form a *conflict graph*; ``V - S_plus`` must be independent in it, so the
smallest valid ``S_plus`` is ``S`` plus a minimum vertex cover of the
conflict graph.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .geometry import GeomGraph, InputError, check_vertex_set, format_coord, remove_vertices

INF = math.inf
STRETCH_TOL = 1e-9
DELETION = "deletion"
INDUCED = "induced"
MODES = (DELETION, INDUCED)

DEFAULT_EXACT_CAP = 32
DEFAULT_VERIFY_CAP = 2048
DEFAULT_SAMPLE_PAIRS = 100_000


def shortest_path_lengths(G: GeomGraph, source: int) -> dict[int, float]:
    """Single-source Dijkstra; unreachable vertices map to ``inf``."""
    if source not in set(G.vertices):
        raise InputError(f"source {source} is not a vertex of the graph")
    adj = G.adjacency()
    dist = {v: INF for v in G.vertices}
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for w in adj[u]:
            nd = d + G.length(u, w)
            if nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


def _csr(G: GeomGraph) -> csr_matrix:
    n = len(G.points)
    if not G.edges:
        return csr_matrix((n, n))
    e = np.asarray(G.edges)
    w = G.edge_lengths()
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    return csr_matrix((np.concatenate([w, w]), (rows, cols)), shape=(n, n))


def distance_rows(G: GeomGraph, sources: Sequence[int]) -> np.ndarray:
    """Graph distances from each source to every point index (inf if unreachable)."""
    if len(sources) == 0:
        return np.zeros((0, len(G.points)))
    return np.atleast_2d(dijkstra(_csr(G), directed=False, indices=list(sources)))


def euclid_rows(G: GeomGraph, sources: Sequence[int], targets: Sequence[int]) -> np.ndarray:
    c = G.points.coords
    diff = c[list(sources)][:, None, :] - c[list(targets)][None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def stretch(G: GeomGraph, x: int, y: int) -> float:
    if x == y:
        raise InputError("stretch is undefined for x == y")
    d = G.points.dist(x, y)
    return shortest_path_lengths(G, x)[y] / d


def violates(graph_dist: float, euclid: float, t: float) -> bool:
    return graph_dist / euclid > t + STRETCH_TOL


@dataclass(frozen=True)
class Violation:
    u: int
    v: int
    stretch: float


@dataclass(frozen=True)
class Verification:
    ok: bool
    violation: Violation | None = None
    sampled: bool = False


def _restrict(G: GeomGraph, W: Sequence[int], mode: str) -> GeomGraph:
    if mode not in MODES:
        raise InputError(f"unknown mode {mode!r}")
    if mode == INDUCED:
        keep = set(W)
        return remove_vertices(G, [v for v in G.vertices if v not in keep])
    return G


def _monotone_1d(G: GeomGraph, W: Sequence[int]) -> bool:
    """Exact t=1 check for 1-D graphs.

    Consecutive members of ``W`` must be joined by an increasing path; a path
    of length exactly ``|xy|`` on the line is necessarily monotone, and
    concatenating monotone paths gives stretch 1 for every pair.
    """
    fwd: dict[int, list[int]] = {v: [] for v in G.vertices}
    for u, v in G.edges:  # indices are ranks, so u < v means left-to-right
        fwd[u].append(v)
    W = sorted(W)
    reach: set[int] = set()
    for a, b in zip(W, W[1:]):
        reach.clear()
        reach.add(a)
        for v in range(a, b):
            if v in reach and v in fwd:
                for w in fwd[v]:
                    if w <= b:
                        reach.add(w)
        if b not in reach:
            return False
    return True


def verify(
    G: GeomGraph,
    W: Iterable[int],
    t: float,
    mode: str = DELETION,
    *,
    max_exact: int = DEFAULT_VERIFY_CAP,
    sample_pairs: int = DEFAULT_SAMPLE_PAIRS,
    seed: int = 0,
) -> Verification:
    """Check that ``G`` is a ``t``-spanner of ``W``.

    ``W`` must be a subset of ``G``'s vertices.  Up to ``max_exact`` vertices
    every pair is checked; beyond that only the pairs rooted at a seeded
    sample of sources (about ``sample_pairs`` pairs) are checked and the
    result is marked ``sampled``.
    """
    W = check_vertex_set(W, len(G.points))
    missing = set(W) - set(G.vertices)
    if missing:
        raise InputError(f"W contains vertices not in G: {sorted(missing)[:5]}")
    if t < 1:
        raise InputError("t must be at least 1")
    if len(W) < 2:
        return Verification(True)
    H = _restrict(G, W, mode)
    if H.points.dim == 1 and t <= 1 + STRETCH_TOL and _monotone_1d(H, W):
        return Verification(True)
    sampled = len(W) > max_exact
    if sampled:
        rng = np.random.default_rng(seed)
        count = max(1, math.ceil(sample_pairs / len(W)))
        sources = sorted(rng.choice(W, size=min(count, len(W)), replace=False).tolist())
    else:
        sources = list(W)
    targets = np.asarray(W)
    for start in range(0, len(sources), 256):
        chunk = sources[start : start + 256]
        gd = distance_rows(H, chunk)[:, targets]
        ed = euclid_rows(H, chunk, targets)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(ed > 0, gd / np.where(ed > 0, ed, 1.0), 1.0)
        bad = np.argwhere(ratio > t + STRETCH_TOL)
        if len(bad):
            i, j = bad[0]
            return Verification(False, Violation(chunk[i], int(targets[j]), float(ratio[i, j])), sampled)
    return Verification(True, None, sampled)


def is_t_spanner_of(G: GeomGraph, W: Iterable[int], t: float, mode: str = DELETION) -> bool:
    return verify(G, W, t, mode).ok


# --- conflict graph and vertex cover ----------------------------------------


@dataclass(frozen=True)
class ConflictGraph:
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]

    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj


def conflict_graph(G: GeomGraph, S: Iterable[int], t: float) -> ConflictGraph:
    """Pairs of survivors of ``G - S`` whose stretch in ``G - S`` exceeds ``t``."""
    H = remove_vertices(G, S)
    return _conflicts(H, H.vertices, t)


def _conflicts(H: GeomGraph, W: Sequence[int], t: float) -> ConflictGraph:
    W = list(W)
    edges: list[tuple[int, int]] = []
    if len(W) >= 2:
        targets = np.asarray(W)
        for start in range(0, len(W), 256):
            chunk = W[start : start + 256]
            gd = distance_rows(H, chunk)[:, targets]
            ed = euclid_rows(H, chunk, targets)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = gd / np.where(ed > 0, ed, 1.0)
            for i, j in np.argwhere(ratio > t + STRETCH_TOL):
                u, v = chunk[i], W[j]
                if u < v:
                    edges.append((u, v))
    return ConflictGraph(tuple(W), tuple(sorted(edges)))


def _greedy_matching_cover(adj: dict[int, set[int]]) -> set[int]:
    cover: set[int] = set()
    for u in sorted(adj):
        if u in cover:
            continue
        for v in sorted(adj[u]):
            if v not in cover:
                cover.update((u, v))
                break
    return cover


def _matching_lower_bound(adj: dict[int, set[int]]) -> int:
    return len(_greedy_matching_cover(adj)) // 2


def _branch_and_bound(adj: dict[int, set[int]]) -> set[int]:
    best = [_greedy_matching_cover(adj)]

    def drop(g: dict[int, set[int]], vs: Iterable[int]) -> dict[int, set[int]]:
        vs = set(vs)
        return {u: nb - vs for u, nb in g.items() if u not in vs}

    def solve(g: dict[int, set[int]], chosen: set[int]) -> None:
        g = {u: nb for u, nb in g.items() if nb}
        # pendant vertices: taking the neighbour is always safe
        while True:
            pendant = next((u for u in sorted(g) if len(g[u]) == 1), None)
            if pendant is None:
                break
            (w,) = g[pendant]
            chosen = chosen | {w}
            g = {u: nb for u, nb in drop(g, [w]).items() if nb}
        if not g:
            if len(chosen) < len(best[0]):
                best[0] = set(chosen)
            return
        if len(chosen) + _matching_lower_bound(g) >= len(best[0]):
            return
        v = max(sorted(g), key=lambda u: len(g[u]))
        solve(drop(g, [v]), chosen | {v})
        solve(drop(g, g[v] | {v}), chosen | g[v])

    solve(adj, set())
    return best[0]


def _components(adj: dict[int, set[int]]) -> list[dict[int, set[int]]]:
    seen: set[int] = set()
    out = []
    for s in sorted(adj):
        if s in seen or not adj[s]:
            continue
        comp = {s}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        out.append({u: adj[u] for u in comp})
    return out


def _koenig_cover(comp: dict[int, set[int]]) -> set[int] | None:
    g = nx.Graph()
    g.add_edges_from((u, v) for u, nb in comp.items() for v in nb)
    if not nx.is_bipartite(g):
        return None
    top = {u for u, side in nx.bipartite.color(g).items() if side == 0}
    matching = nx.bipartite.hopcroft_karp_matching(g, top_nodes=top)
    return set(nx.bipartite.to_vertex_cover(g, matching, top_nodes=top))


def min_vertex_cover(H: ConflictGraph, exact_cap: int = DEFAULT_EXACT_CAP) -> tuple[tuple[int, ...], bool]:
    """Minimum vertex cover of a conflict graph.

    Each connected component is solved exactly by branch and bound when it has
    at most ``exact_cap`` vertices, exactly via König's theorem when it is
    bipartite, and otherwise by the maximal-matching 2-approximation.  The
    flag is true only if every component was solved exactly.
    """
    exact = True
    cover: set[int] = set()
    for comp in _components(H.adjacency()):
        if len(comp) <= exact_cap:
            cover |= _branch_and_bound(comp)
            continue
        part = _koenig_cover(comp)
        if part is None:
            exact = False
            part = _greedy_matching_cover(comp)
        cover |= part
    return tuple(sorted(cover)), exact


# --- certificates ------------------------------------------------------------


@dataclass
class RobustnessCertificate:
    t: float
    S: tuple[int, ...]
    S_plus: tuple[int, ...]
    mode: str = DELETION
    verified: bool = False
    minimal: bool = False
    sampled: bool = False
    violation: Violation | None = field(default=None, compare=False)
    attempts: int = field(default=1, compare=False)

    def __post_init__(self) -> None:
        self.S = tuple(sorted(set(self.S)))
        self.S_plus = tuple(sorted(set(self.S_plus)))
        if not set(self.S) <= set(self.S_plus):
            raise InputError("S must be a subset of S_plus")
        if self.mode not in MODES:
            raise InputError(f"unknown mode {self.mode!r}")

    @property
    def k(self) -> int:
        return len(self.S)

    @property
    def size(self) -> int:
        return len(self.S_plus)

    def to_text(self) -> str:
        def b(x: bool) -> str:
            return "true" if x else "false"

        head = (
            f"t={format_coord(self.t)} mode={self.mode} |S|={len(self.S)} |S+|={len(self.S_plus)} "
            f"verified={b(self.verified)} minimal={b(self.minimal)} sampled={b(self.sampled)}"
        )
        return "\n".join([head, " ".join(map(str, self.S)), " ".join(map(str, self.S_plus))]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> RobustnessCertificate:
        lines = text.split("\n")
        fields = dict(tok.split("=", 1) for tok in lines[0].split())
        S = tuple(int(x) for x in lines[1].split())
        S_plus = tuple(int(x) for x in lines[2].split())
        if len(S) != int(fields["|S|"]) or len(S_plus) != int(fields["|S+|"]):
            raise InputError("certificate index lists disagree with header counts")
        return cls(
            t=float(fields["t"]),
            S=S,
            S_plus=S_plus,
            mode=fields["mode"],
            verified=fields["verified"] == "true",
            minimal=fields["minimal"] == "true",
            sampled=fields.get("sampled", "false") == "true",
        )


def certify(
    G: GeomGraph,
    S: Iterable[int],
    S_plus: Iterable[int],
    t: float,
    mode: str = DELETION,
    *,
    minimal: bool = False,
    max_exact: int = DEFAULT_VERIFY_CAP,
    seed: int = 0,
) -> RobustnessCertificate:
    """Build a certificate for ``(S, S_plus)`` and verify it."""
    S = check_vertex_set(S, len(G.points))
    S_plus = check_vertex_set(set(S_plus) | set(S), len(G.points))
    survivors = [v for v in G.vertices if v not in set(S_plus)]
    if mode == DELETION:
        res = verify(remove_vertices(G, S), survivors, t, DELETION, max_exact=max_exact, seed=seed)
    else:
        res = verify(remove_vertices(G, S_plus), survivors, t, DELETION, max_exact=max_exact, seed=seed)
    return RobustnessCertificate(t, S, S_plus, mode, res.ok, minimal and res.ok, res.sampled, res.violation)


def minimal_splus(
    G: GeomGraph,
    S: Iterable[int],
    t: float,
    mode: str = DELETION,
    exact_cap: int = DEFAULT_EXACT_CAP,
) -> RobustnessCertificate:
    """Smallest casualty set via a vertex cover of the conflict graph.

    In induced mode, removing cover vertices can break paths between the
    remaining survivors, so conflicts are recomputed on the induced survivor
    graph until none remain.  The result is flagged minimal only when every
    cover was exact and no second round was needed.
    """
    if mode not in MODES:
        raise InputError(f"unknown mode {mode!r}")
    S = check_vertex_set(S, len(G.points))
    cover, exact = min_vertex_cover(conflict_graph(G, S, t), exact_cap)
    S_plus = set(S) | set(cover)
    rounds = 1
    if mode == INDUCED:
        while True:
            H = remove_vertices(G, S_plus)
            extra, ex = min_vertex_cover(_conflicts(H, H.vertices, t), exact_cap)
            if not extra:
                break
            rounds += 1
            exact = exact and ex
            S_plus |= set(extra)
    return certify(G, S, S_plus, t, mode, minimal=exact and rounds == 1, max_exact=len(G.points))


# --- magnification and census --------------------------------------------------

MAGNIFICATION_MAX_N = 24


def magnification_bruteforce(G: GeomGraph, s_max: int) -> dict[int, int]:
    """Exact ``min |N(S)|`` over all ``S`` of each size ``1..s_max``."""
    verts = list(G.vertices)
    n = len(verts)
    if n > MAGNIFICATION_MAX_N:
        raise InputError(f"magnification enumeration limited to {MAGNIFICATION_MAX_N} vertices")
    if s_max > n // 2 or s_max < 0:
        raise InputError("s_max must lie in [0, n/2]")
    pos = {v: i for i, v in enumerate(verts)}
    nbr = [0] * n
    for u, v in G.edges:
        nbr[pos[u]] |= 1 << pos[v]
        nbr[pos[v]] |= 1 << pos[u]
    out = {}
    for s in range(1, s_max + 1):
        best = n
        for combo in itertools.combinations(range(n), s):
            mask = 0
            reach = 0
            for i in combo:
                mask |= 1 << i
                reach |= nbr[i]
            best = min(best, bin(reach & ~mask).count("1"))
            if best == 0:
                break
        out[s] = best
    return out


def edge_length_census(G: GeomGraph, boundaries: Sequence[float]) -> list[int]:
    """Edge counts per half-open class ``[b[j], b[j+1])``."""
    b = list(boundaries)
    if any(x > y for x, y in zip(b, b[1:])):
        raise InputError("boundaries must be sorted ascending")
    lengths = G.edge_lengths()
    counts = []
    for lo, hi in zip(b, b[1:]):
        counts.append(int(np.count_nonzero((lengths >= lo) & (lengths < hi))))
    return counts
