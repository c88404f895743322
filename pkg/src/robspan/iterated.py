"""Iterated functions ``f^i(k0)``, their iterated inverse, and the presets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from .geometry import InputError


def next_pow2(x: float) -> int:
    """Smallest power of two that is >= ``x``."""
    if not x >= 1:
        raise InputError(f"next_pow2 needs x >= 1, got {x}")
    p = 1
    while p < x:
        p *= 2
    return p


def log2(x: float) -> float:
    return math.log2(x)


@dataclass(eq=False)
class IteratedFunction:
    """A convex increasing ``f`` together with a starting value ``k0``.

    The iterate table ``f^0(k0) = k0, f^1(k0), ...`` is extended on demand.
    """

    f: Callable[[float], float]
    k0: float
    name: str = "f"
    _table: list[float] = field(default_factory=list, repr=False)

    def __post_init__(self) -> None:
        if self.k0 < 1:
            raise InputError("k0 must be at least 1")
        if not self.f(self.k0 + 1) - self.f(self.k0) > 1:
            raise InputError(f"{self.name}: need f(k0+1) - f(k0) > 1")
        self._table = [float(self.k0)]
        self.check(32)

    def __call__(self, x: float) -> float:
        return self.f(x)

    def iterate(self, i: int) -> float:
        """``f^i(k0)``."""
        while len(self._table) <= i:
            nxt = float(self.f(self._table[-1]))
            if not nxt > self._table[-1]:
                raise InputError(f"{self.name}: iterates stop increasing at {self._table[-1]}")
            self._table.append(nxt)
        return self._table[i]

    def iterates_upto(self, n: float) -> list[float]:
        """All iterates ``<= n`` (the ones indexed ``0..f_star(n)``)."""
        return [self.iterate(i) for i in range(self.f_star(n) + 1)]

    def f_star(self, n: float) -> int:
        """``max{i : f^i(k0) <= n}``."""
        if n < self.k0:
            raise InputError(f"f_star needs n >= k0 = {self.k0}, got {n}")
        i = 0
        while self.iterate(i + 1) <= n:
            i += 1
        return i

    def check(self, count: int = 16) -> None:
        """Spot-check monotonicity, convexity and growth on the iterate table."""
        xs = []
        for i in range(count):
            x = self.iterate(i)
            if x > 1e12:  # x + delta is no longer resolvable beyond this
                break
            xs.append(x)
        for x in xs:
            for delta in (0.5, 1.0):
                if self.f(x + delta) / (x + delta) < self.f(x) / x - 1e-12:
                    raise InputError(f"{self.name}: f(x)/x decreases near x={x}")
                if self.f(x + delta) <= self.f(x):
                    raise InputError(f"{self.name}: f is not increasing near x={x}")
            mid = self.f(x + 0.5)
            if mid > (self.f(x) + self.f(x + 1)) / 2 + 1e-9 * abs(mid):
                raise InputError(f"{self.name}: f is not convex near x={x}")

    def span_ladder(self, n: int) -> list[int]:
        """Distinct edge spans of ``G_f`` on ``n`` points: 1 and ``next_pow2(f^j(k0))``."""
        spans = {1}
        if n >= self.k0:
            spans.update(next_pow2(x) for x in self.iterates_upto(n))
        return sorted(spans)


def _smallest_k0(f: Callable[[float], float], name: str, start: int = 1) -> IteratedFunction:
    for k0 in range(start, 1000):
        try:
            return IteratedFunction(f, k0, name)
        except InputError:
            continue
    raise InputError(f"no valid k0 for preset {name}")


def preset(name: str, epsilon: float = 1.0, k0: float | None = None) -> IteratedFunction:
    """Named growth functions; ``k0`` defaults to the smallest valid integer."""
    if name == "klogk":
        def f(k: float) -> float:
            return k * max(1.0, math.log2(k))
    elif name == "ksqrtexp":
        if epsilon <= 0:
            raise InputError("epsilon must be positive")

        def f(k: float) -> float:
            return k * (1 + epsilon) ** math.sqrt(max(0.0, math.log2(k)))
    elif name == "kpow":
        if epsilon <= 0:
            raise InputError("epsilon must be positive")

        def f(k: float) -> float:
            return k ** (1 + epsilon)
    elif name == "double":
        def f(k: float) -> float:
            return 2 * k

        if k0 is None:
            k0 = 1
    else:
        raise InputError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    label = name if name in ("klogk", "double") else f"{name}(eps={epsilon:g})"
    if k0 is not None:
        return IteratedFunction(f, k0, label)
    return _smallest_k0(f, label)


PRESETS = ("klogk", "ksqrtexp", "kpow", "double")


def corollary_presets(epsilon: float = 1.0) -> list[IteratedFunction]:
    return [preset(name, epsilon) for name in ("klogk", "ksqrtexp", "kpow")]
