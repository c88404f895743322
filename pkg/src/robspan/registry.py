"""Named constructions with a uniform build / casualty-set interface."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .geometry import GeomGraph, InputError, PointSet
from .iterated import IteratedFunction, preset
from .line import build_g2x, build_gf, g2x_bound, gf_bound, splus_g2x, splus_gf
from .metrics import DELETION, RobustnessCertificate, certify
from .multidim.grid import DEFAULT_C, build_grid, splus_grid
from .multidim.robust import BuildReport, build_hardy, build_robust_dd, measure_stretch, splus_dd
from .multidim.wspd import ft_spanner

CONSTRUCTIONS = ("g2x", "gf", "grid", "robust-dd", "hardy", "ft")


@dataclass(frozen=True)
class BuildParams:
    preset: str = "kpow"
    epsilon: float = 1.0
    k0: float | None = None
    t: float = 4.0
    dim: int = 2
    k_prime: int = 1
    retries: int = 64

    def function(self) -> IteratedFunction:
        return preset(self.preset, self.epsilon, self.k0)


def random_points(n: int, dim: int, seed: int) -> PointSet:
    """``n`` uniform points in the unit cube (sorted when ``dim == 1``)."""
    if n < 1 or dim < 1:
        raise InputError("need n >= 1 and dim >= 1")
    return PointSet.from_coords(np.random.default_rng(seed).random((n, dim)))


def log_separator_bound(n: int) -> int:
    return max(1, math.ceil(math.log2(max(n, 2))))


@dataclass
class Built:
    name: str
    points: PointSet
    graph: GeomGraph
    params: BuildParams
    seed: int
    report: Any = None
    info: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.points)

    def splus(self, S: Sequence[int], seed: int) -> RobustnessCertificate | None:
        """Constructive casualty set, or ``None`` when the construction has none."""
        p = self.params
        if self.name == "g2x":
            return splus_g2x(self.graph, S, seed, p.retries)
        if self.name == "gf":
            return splus_gf(self.graph, p.function(), S, seed, p.retries)
        if self.name == "grid":
            return splus_grid(self.graph, S, seed, min(p.retries, 16))
        if self.name == "robust-dd":
            return splus_dd(self.graph, self.report, S)
        if self.name == "ft":
            if len(S) > p.k_prime:
                return None
            return certify(self.graph, S, S, math.sqrt(p.t), DELETION)
        return None

    def bound(self, k: int) -> float | None:
        p = self.params
        if self.name == "g2x":
            return g2x_bound(k)
        if self.name == "gf":
            return gf_bound(k, p.function())
        if self.name == "grid":
            return DEFAULT_C * k * k
        if self.name == "robust-dd":
            rep: BuildReport = self.report
            if k == 0:
                return 0
            return rep.splus_budget(k, rep.level_for(k).k_prime)
        if self.name == "ft":
            return k if k <= p.k_prime else None
        return None

    def stretch_target(self) -> float:
        """Stretch at which casualty sets of this construction are certified."""
        if self.name in ("g2x", "gf"):
            return 1.0
        if self.name == "grid":
            return 3.0
        if self.name == "robust-dd":
            return self.report.stretch_bound
        return math.sqrt(self.params.t)


def build(name: str, n: int | None, params: BuildParams, seed: int = 0, side: int | None = None,
          audit: bool = False) -> Built:
    """Build a named construction; ``side`` is used by ``grid`` only."""
    if name not in CONSTRUCTIONS:
        raise InputError(f"unknown construction {name!r}; choose from {', '.join(CONSTRUCTIONS)}")
    report = None
    info: dict = {}
    if name == "grid":
        if side is None:
            if n is None or math.isqrt(n) ** 2 != n:
                raise InputError("grid needs --side or a square --n")
            side = math.isqrt(n)
        V, G = build_grid(side)
        info["side"] = side
    else:
        if n is None or n < 1:
            raise InputError(f"{name} needs --n >= 1")
        if name == "g2x":
            V = PointSet.line(n)
            G = build_g2x(V)
        elif name == "gf":
            V = PointSet.line(n)
            G = build_gf(V, params.function())
        elif name == "robust-dd":
            V = random_points(n, params.dim, seed)
            G, report = build_robust_dd(V, params.function(), params.t, seed, audit=audit)
            info.update(
                tau=report.tau,
                stretch_bound=report.stretch_bound,
                f_star=report.f_star,
                edge_constant=report.edge_constant,
                levels=[[lv.k_prime, lv.x_size, lv.edges_added] for lv in report.levels],
            )
        elif name == "hardy":
            V = random_points(n, params.dim, seed)
            G, report = build_hardy(V, log_separator_bound, _hardy_inner(params), params.t, seed)
            info.update(s=report.s, x_size=len(report.X), tree_edges=report.tree_edges,
                        inner_edges=report.inner_edges)
        else:
            V = random_points(n, params.dim, seed)
            G = ft_spanner(V, params.k_prime, math.sqrt(params.t))
            info["k_prime"] = params.k_prime
    built = Built(name, V, G, params, seed, report, info)
    if audit:
        built.info["measured_stretch"] = (
            report.measured_stretch if name == "robust-dd" else measure_stretch(G, seed)
        )
    return built


def _hardy_inner(params: BuildParams) -> Callable[[PointSet], GeomGraph]:
    def inner(X: PointSet) -> GeomGraph:
        if X.dim == 1:
            return build_gf(X, params.function())
        return ft_spanner(X, 0, math.sqrt(params.t))

    return inner
