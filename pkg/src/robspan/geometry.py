"""Point sets, geometric graphs and the plain-text graph format.

Vertices are always addressed by their index into the owning :class:`PointSet`.
Removing vertices never renumbers anything, so vertex sets computed on
different subgraphs of the same graph can be combined directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class InputError(ValueError):
    """Raised for invalid arguments (bad dimensions, indices out of range, ...)."""


class ParseError(ValueError):
    """Raised when a graph or vertex-set file is malformed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def distance(p: Sequence[float], q: Sequence[float]) -> float:
    if len(p) != len(q):
        raise InputError(f"dimension mismatch: {len(p)} vs {len(q)}")
    if len(p) == 1:
        return abs(float(p[0]) - float(q[0]))
    return math.dist(p, q)


@dataclass(frozen=True, eq=False)
class PointSet:
    """An immutable set of distinct points in R^d.

    One-dimensional point sets are stored in ascending order; use
    :meth:`from_coords` to sort unsorted input.
    """

    coords: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.coords, dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.ndim != 2 or arr.shape[1] < 1:
            raise InputError("coordinates must form an (n, d) array with d >= 1")
        if not np.all(np.isfinite(arr)):
            raise InputError("coordinates must be finite")
        n, d = arr.shape
        if d == 1:
            if n > 1 and not np.all(np.diff(arr[:, 0]) > 0):
                raise InputError("1-D points must be strictly increasing")
        elif n > 1 and len(np.unique(arr, axis=0)) != n:
            raise InputError("duplicate points")
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @classmethod
    def from_coords(cls, coords: Iterable) -> PointSet:
        arr = np.array(list(coords), dtype=float)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
        if arr.size and arr.shape[1] == 1:
            arr = np.sort(arr, axis=0)
            if len(arr) > 1 and np.any(np.diff(arr[:, 0]) == 0):
                raise InputError("duplicate points")
        if arr.size == 0:
            arr = arr.reshape(0, 1)
        return cls(arr)

    @classmethod
    def line(cls, n: int) -> PointSet:
        """The integer points 1, ..., n on the real line."""
        return cls(np.arange(1, n + 1, dtype=float).reshape(-1, 1))

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def __len__(self) -> int:
        return self.coords.shape[0]

    def __getitem__(self, i: int) -> tuple[float, ...]:
        return tuple(self.coords[i])

    def dist(self, u: int, v: int) -> float:
        return distance(self.coords[u], self.coords[v])

    def subset(self, indices: Sequence[int]) -> PointSet:
        return PointSet(self.coords[list(indices)])


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True, eq=False)
class GeomGraph:
    """An undirected geometric graph on a subset of a point set.

    ``vertices`` is the sorted tuple of live vertex indices; ``edges`` is the
    sorted tuple of pairs ``(u, v)`` with ``u < v``, both live.
    """

    points: PointSet
    edges: tuple[tuple[int, int], ...]
    vertices: tuple[int, ...] = None  # type: ignore[assignment]
    _lengths: dict = field(default=None, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        n = len(self.points)
        verts = tuple(range(n)) if self.vertices is None else tuple(sorted(set(self.vertices)))
        if verts and (verts[0] < 0 or verts[-1] >= n):
            raise InputError("vertex index out of range")
        alive = set(verts)
        edges = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise InputError(f"self-loop at {u}")
            if u not in alive or v not in alive:
                raise InputError(f"edge ({u}, {v}) uses a vertex outside the graph")
            edges.add(_norm_edge(u, v))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(sorted(edges)))
        object.__setattr__(self, "_lengths", {})

    @classmethod
    def from_edges(cls, points: PointSet, edges: Iterable[tuple[int, int]]) -> GeomGraph:
        return cls(points, tuple(edges))

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    def length(self, u: int, v: int) -> float:
        key = _norm_edge(u, v)
        cached = self._lengths.get(key)
        if cached is None:
            cached = self._lengths[key] = self.points.dist(u, v)
        return cached

    def edge_lengths(self) -> np.ndarray:
        if not self.edges:
            return np.zeros(0)
        e = np.asarray(self.edges)
        diff = self.points.coords[e[:, 0]] - self.points.coords[e[:, 1]]
        return np.sqrt(np.einsum("ij,ij->i", diff, diff))

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def degrees(self) -> dict[int, int]:
        return {v: len(nb) for v, nb in self.adjacency().items()}

    def max_degree(self) -> int:
        return max(self.degrees().values(), default=0)

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def union(self, other_edges: Iterable[tuple[int, int]]) -> GeomGraph:
        return GeomGraph(self.points, self.edges + tuple(other_edges), self.vertices)


def check_vertex_set(indices: Iterable[int], n: int) -> tuple[int, ...]:
    """Normalize a vertex set to a sorted tuple, validating the range."""
    out = tuple(sorted({int(i) for i in indices}))
    if out and (out[0] < 0 or out[-1] >= n):
        raise InputError(f"vertex index out of range [0, {n})")
    return out


def remove_vertices(G: GeomGraph, S: Iterable[int]) -> GeomGraph:
    """Return the subgraph of ``G`` induced by its vertices outside ``S``."""
    S = set(check_vertex_set(S, len(G.points)))
    if not S:
        return G
    verts = tuple(v for v in G.vertices if v not in S)
    edges = tuple(e for e in G.edges if e[0] not in S and e[1] not in S)
    return GeomGraph(G.points, edges, verts)


def induced_on(G: GeomGraph, W: Iterable[int]) -> GeomGraph:
    keep = set(W)
    return remove_vertices(G, [v for v in G.vertices if v not in keep])


# --- text format -------------------------------------------------------------


def format_coord(x: float) -> str:
    if float(x).is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(float(x))


def dumps_graph(points: PointSet, G: GeomGraph) -> str:
    lines = [f"dim {points.dim} n {len(points)} m {G.m}"]
    lines += [" ".join(format_coord(c) for c in row) for row in points.coords]
    lines += [f"{u} {v}" for u, v in G.edges]
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> tuple[PointSet, GeomGraph]:
    rows = text.splitlines()
    if not rows:
        raise ParseError("empty file", 1)
    head = rows[0].split()
    if len(head) != 6 or head[0] != "dim" or head[2] != "n" or head[4] != "m":
        raise ParseError("expected header 'dim <d> n <n> m <m>'", 1)
    try:
        d, n, m = int(head[1]), int(head[3]), int(head[5])
    except ValueError:
        raise ParseError("non-integer header field", 1) from None
    if d < 1 or n < 0 or m < 0:
        raise ParseError("invalid header values", 1)
    body = rows[1:]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != n + m:
        raise ParseError(f"expected {n + m} data lines, found {len(body)}", len(rows))
    coords = []
    for ln, row in enumerate(body[:n], start=2):
        parts = row.split()
        if len(parts) != d:
            raise ParseError(f"expected {d} coordinates", ln)
        try:
            coords.append([float(x) for x in parts])
        except ValueError:
            raise ParseError("bad coordinate", ln) from None
    try:
        points = PointSet(np.array(coords, dtype=float).reshape(n, d))
    except InputError as exc:
        raise ParseError(str(exc), 2) from None
    seen = set()
    edges = []
    for ln, row in enumerate(body[n:], start=2 + n):
        parts = row.split()
        if len(parts) != 2:
            raise ParseError("expected 'u v'", ln)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError("non-integer vertex index", ln) from None
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"vertex index out of range [0, {n})", ln)
        if u == v:
            raise ParseError("self-loop", ln)
        key = _norm_edge(u, v)
        if key in seen:
            raise ParseError(f"duplicate edge {key}", ln)
        seen.add(key)
        edges.append(key)
    return points, GeomGraph(points, tuple(edges))


def write_graph(path: str | Path, points: PointSet, G: GeomGraph) -> None:
    Path(path).write_text(dumps_graph(points, G))


def read_graph(path: str | Path) -> tuple[PointSet, GeomGraph]:
    return loads_graph(Path(path).read_text())


def write_vertex_set(path: str | Path, S: Iterable[int]) -> None:
    Path(path).write_text("".join(f"{v}\n" for v in sorted(set(S))))


def read_vertex_set(path: str | Path, n: int | None = None) -> tuple[int, ...]:
    out = []
    for ln, row in enumerate(Path(path).read_text().splitlines(), start=1):
        row = row.strip()
        if not row:
            continue
        try:
            v = int(row)
        except ValueError:
            raise ParseError("non-integer vertex index", ln) from None
        if v < 0 or (n is not None and v >= n):
            raise ParseError("vertex index out of range", ln)
        out.append(v)
    return tuple(sorted(set(out)))
