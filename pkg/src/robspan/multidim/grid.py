"""The square grid graph and its shifted-quadtree casualty sets."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..geometry import GeomGraph, InputError, PointSet, check_vertex_set
from ..iterated import next_pow2
from ..line import RetriesExhausted
from ..metrics import INDUCED, RobustnessCertificate, certify

GRID_T = 3.0
DEFAULT_C = 64


def build_grid(side: int) -> tuple[PointSet, GeomGraph]:
    """Integer points ``(i, j)``, ``0 <= i, j < side``; vertex id ``i * side + j``."""
    if side < 1:
        raise InputError("side must be at least 1")
    ii, jj = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    V = PointSet(np.column_stack([ii.ravel(), jj.ravel()]).astype(float))
    edges = []
    for i in range(side):
        for j in range(side):
            v = i * side + j
            if i + 1 < side:
                edges.append((v, v + side))
            if j + 1 < side:
                edges.append((v, v + 1))
    return V, GeomGraph(V, tuple(edges))


@dataclass(frozen=True)
class Cell:
    """Quadtree cell of ``size`` at aligned position ``(a, b)`` under a shift."""

    size: int
    a: int
    b: int

    def ranges(self, shift: tuple[int, int]) -> tuple[int, int, int, int]:
        """Closed integer ranges ``x0..x1, y0..y1`` covered by the cell."""
        sx, sy = shift
        return (
            self.a * self.size - sx,
            (self.a + 1) * self.size - sx - 1,
            self.b * self.size - sy,
            (self.b + 1) * self.size - sy - 1,
        )

    def parent(self) -> Cell:
        return Cell(self.size * 2, self.a // 2, self.b // 2)

    def contains_cell(self, other: Cell) -> bool:
        if other.size > self.size:
            return False
        f = self.size // other.size
        return other.a // f == self.a and other.b // f == self.b


def _clip(r: tuple[int, int, int, int], side: int) -> tuple[int, int, int, int]:
    x0, x1, y0, y1 = r
    return max(x0, 0), min(x1, side - 1), max(y0, 0), min(y1, side - 1)


def _overlap(r1, r2) -> bool:
    return r1[0] <= r2[1] and r2[0] <= r1[1] and r1[2] <= r2[3] and r2[2] <= r1[3]


def grid_cells(side: int, S: Iterable[int], shift: tuple[int, int]) -> list[Cell]:
    """Choose disjoint quadtree cells covering ``S`` whose 1-rings are hole free.

    Starts from each failure's unit cell and promotes a cell to its parent
    while its ring (the cell grown by one in every direction) meets another
    chosen cell or a failure outside it.  Cells never grow past the root.
    """
    sx, sy = shift
    root = 2 * next_pow2(side)
    pts = [(v // side, v % side) for v in S]
    cells = {Cell(1, x + sx, y + sy) for x, y in pts}
    changed = True
    while changed:
        changed = False
        cells = {c for c in cells if not any(o != c and o.contains_cell(c) for o in cells)}
        for c in sorted(cells, key=lambda c: (c.size, c.a, c.b)):
            if c.size >= root:
                continue
            x0, x1, y0, y1 = c.ranges(shift)
            ring = _clip((x0 - 1, x1 + 1, y0 - 1, y1 + 1), side)
            clash = any(
                o != c and _overlap(ring, _clip(o.ranges(shift), side)) for o in cells
            ) or any(
                ring[0] <= x <= ring[1] and ring[2] <= y <= ring[3] and not (x0 <= x <= x1 and y0 <= y <= y1)
                for x, y in pts
            )
            if clash:
                cells.discard(c)
                cells.add(c.parent())
                changed = True
                break
    return sorted(cells, key=lambda c: (c.size, c.a, c.b))


def cells_to_vertices(cells: Iterable[Cell], side: int, shift: tuple[int, int]) -> set[int]:
    out = set()
    for c in cells:
        x0, x1, y0, y1 = _clip(c.ranges(shift), side)
        for x in range(x0, x1 + 1):
            for y in range(y0, y1 + 1):
                out.add(x * side + y)
    return out


def splus_grid(
    G: GeomGraph,
    S: Iterable[int],
    rng_seed: int = 0,
    max_retries: int = 16,
    C: float = DEFAULT_C,
) -> RobustnessCertificate:
    """Casualty set for the grid from a randomly shifted quadtree.

    The certificate uses the induced definition: ``G - S_plus`` itself must be a
    3-spanner of the survivors.  A shift is rejected if verification fails or
    ``|S_plus| > C k^2``.
    """
    n = len(G.points)
    side = int(round(n**0.5))
    if side * side != n:
        raise InputError("graph is not a square grid")
    S = check_vertex_set(S, n)
    k = len(S)
    if not S:
        cert = certify(G, (), (), GRID_T, INDUCED)
        cert.attempts = 0
        return cert
    rng = random.Random(rng_seed)
    M = next_pow2(side)
    best = None
    for attempt in range(1, max_retries + 1):
        shift = (rng.randrange(M), rng.randrange(M))
        S_plus = set(S) | cells_to_vertices(grid_cells(side, S, shift), side, shift)
        cert = certify(G, S, S_plus, GRID_T, INDUCED, max_exact=n)
        cert.attempts = attempt
        if cert.verified and (best is None or cert.size < best.size):
            best = cert
        if cert.verified and cert.size <= C * k * k:
            return cert
    raise RetriesExhausted(f"splus_grid: no acceptable shift in {max_retries} draws", best, max_retries)
