"""Parameter sweeps over (n, k, trial) cells, written as CSV."""

from __future__ import annotations

import csv
import hashlib
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .adversary import attack_random
from .geometry import InputError
from .line import RetriesExhausted
from .metrics import DEFAULT_EXACT_CAP, DELETION, INDUCED, minimal_splus
from .multidim.robust import NoSuitableLevel
from .registry import CONSTRUCTIONS, BuildParams, Built, build

HEADER = (
    "row_type", "construction", "n", "k", "trial", "seed", "edges",
    "splus_constructive", "bound", "ratio", "mean_ratio",
    "splus_oracle", "oracle_exact", "verified", "attempts", "note",
)
DEFAULT_ORACLE_CAP = 64


def cell_seed(seed: int, n: int, k: int, trial: int) -> int:
    """Seed for one cell, independent of scheduling."""
    digest = hashlib.sha256(f"{seed}:{n}:{k}:{trial}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def threads_from_env(default: int = 1) -> int:
    raw = os.environ.get("ROBSPAN_THREADS", "")
    try:
        return max(1, int(raw)) if raw else default
    except ValueError:
        raise InputError(f"ROBSPAN_THREADS must be an integer, got {raw!r}") from None


@dataclass
class SweepConfig:
    construction: str
    ns: list[int]
    ks: list[int]
    trials: int = 1
    seed: int = 0
    params: BuildParams = field(default_factory=BuildParams)
    oracle_cap: int = DEFAULT_ORACLE_CAP
    exact_cap: int = DEFAULT_EXACT_CAP
    out: str | None = None

    def __post_init__(self) -> None:
        if self.construction not in CONSTRUCTIONS:
            raise InputError(f"unknown construction {self.construction!r}")
        if not self.ns or not self.ks:
            raise InputError("n and k lists must be nonempty")
        if self.trials < 1:
            raise InputError("trials must be at least 1")
        if any(k < 0 for k in self.ks) or any(n < 1 for n in self.ns):
            raise InputError("need n >= 1 and k >= 0")


@dataclass
class TrialRow:
    n: int
    k: int
    trial: int
    seed: int
    edges: int
    splus: int | None = None
    bound: float | None = None
    oracle: int | None = None
    oracle_exact: bool = False
    verified: bool = False
    attempts: int = 0
    note: str = ""

    @property
    def ratio(self) -> float | None:
        if self.splus is None or not self.bound:
            return None
        return self.splus / self.bound


def _run_cell(built: Built, cfg: SweepConfig, k: int, trial: int) -> TrialRow:
    n = built.n
    seed = cell_seed(cfg.seed, n, k, trial)
    row = TrialRow(n, k, trial, seed, built.graph.m)
    if k > n:
        row.note = "k > n"
        return row
    S = attack_random(n, k, seed)
    verified = True
    try:
        cert = built.splus(S, seed)
        row.bound = built.bound(k)
        if cert is None:
            row.note = "no constructive casualty set"
        else:
            row.splus, row.attempts = cert.size, cert.attempts
            verified = cert.verified
    except RetriesExhausted as exc:
        verified = False
        row.note = "retries exhausted"
        row.attempts = exc.attempts
        if exc.best is not None:
            row.splus = exc.best.size
    except NoSuitableLevel:
        row.note = "no level for this k"
    if n <= cfg.oracle_cap:
        mode = INDUCED if built.name == "grid" else DELETION
        oc = minimal_splus(built.graph, S, built.stretch_target(), mode, cfg.exact_cap)
        row.oracle, row.oracle_exact = oc.size, oc.minimal
        verified = verified and oc.verified
    row.verified = verified and not row.note.startswith(("retries", "no level"))
    return row


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def run_sweep(cfg: SweepConfig, threads: int | None = None) -> list[TrialRow]:
    threads = threads_from_env() if threads is None else threads
    rows: list[TrialRow] = []
    for n in cfg.ns:
        built = build(cfg.construction, n, cfg.params, cfg.seed)
        jobs = [(k, trial) for k in cfg.ks for trial in range(cfg.trials)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows.extend(pool.map(lambda job: _run_cell(built, cfg, *job), jobs))
    return rows


def sweep_csv(cfg: SweepConfig, rows: list[TrialRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow([
            "trial", cfg.construction, r.n, r.k, r.trial, r.seed, r.edges, _fmt(r.splus),
            _fmt(r.bound), _fmt(r.ratio), "", _fmt(r.oracle), _fmt(r.oracle_exact),
            _fmt(r.verified), r.attempts, r.note,
        ])
    groups: dict[tuple[int, int], list[TrialRow]] = {}
    for r in rows:
        groups.setdefault((r.n, r.k), []).append(r)
    for (n, k), grp in groups.items():
        ratios = [r.ratio for r in grp if r.ratio is not None]
        sizes = [r.splus for r in grp if r.splus is not None]
        oracles = [r.oracle for r in grp if r.oracle is not None]
        w.writerow([
            "aggregate", cfg.construction, n, k, "", "", grp[0].edges,
            _fmt(max(sizes) if sizes else None), _fmt(grp[0].bound),
            _fmt(max(ratios) if ratios else None),
            _fmt(sum(ratios) / len(ratios) if ratios else None),
            _fmt(max(oracles) if oracles else None), "",
            _fmt(all(r.verified for r in grp)), max(r.attempts for r in grp), "",
        ])
    return buf.getvalue()
