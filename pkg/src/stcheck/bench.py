"""Instance generation and cost measurement for the subtyping algorithms.

Two instance families ship by default:

* ``random`` -- seeded random closed contractive types, for agreement and
  invariant checking.
* ``exp``    -- an adversarial pair family on which the judgement-search
  algorithm blows up exponentially while the pair-graph algorithms stay
  quadratic: two towers of recursion-bound inputs of depths k and k+1,
  where level i carries two payloads pointing back at distinct binders
  (the previous level and the root).  The depth mismatch desynchronises
  the two sides, so the reachable pair graph is a full k*(k+1) torus;
  the payload double-back gives every pair two extra distinct moves, so
  the number of context-distinct judgement paths doubles with every level.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from random import Random
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from . import subtyping
from .subtyping import ALGORITHMS, COUNTER_KEYS, DeadlineExceeded, SubtypeReport
from .syntax import TypeExpr, bvar, end, inp, mu, out, rec, select, branch, size, var

__all__ = [
    "GenConfig", "BenchRecord", "gen_random", "gen_blowup_family",
    "random_pair", "run_bench", "write_csv", "read_csv", "fit_quadratic",
    "DEFAULT_TIMEOUT", "DEFAULT_KMAX_INDUCTIVE", "FAMILIES",
]

DEFAULT_TIMEOUT = 10.0  # seconds per run
DEFAULT_KMAX_INDUCTIVE = 12

_CONSTRUCTORS = ("end", "var", "rec", "input", "output", "select", "branch")

_DEFAULT_WEIGHTS: Mapping[str, float] = {
    "end": 1.0, "var": 1.5, "rec": 2.0,
    "input": 3.0, "output": 3.0, "select": 2.0, "branch": 2.0,
}

_LABELS = ("a", "b", "c", "d", "e", "f", "g", "h")


@dataclass(frozen=True)
class GenConfig:
    seed: int
    max_size: int = 40
    weights: Mapping[str, float] = field(default_factory=lambda: _DEFAULT_WEIGHTS)
    max_labels: int = 3
    max_payloads: int = 2

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be >= 1")
        if not any(self.weights.get(c, 0.0) > 0 for c in _CONSTRUCTORS):
            raise ValueError("at least one constructor weight must be positive")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("weights must be nonnegative")
        if self.max_labels < 1 or self.max_payloads < 1:
            raise ValueError("max_labels and max_payloads must be >= 1")


def gen_random(config: GenConfig) -> TypeExpr:
    """Seed-deterministic closed contractive type of size <= max_size.

    Contractivity is enforced structurally: a binder variable only becomes
    eligible once a communication constructor has been emitted below its
    binder, so no rejection sampling is needed.
    """
    rng = Random(config.seed)
    budget = rng.randint(1, config.max_size)
    return _gen(rng, config, budget, guarded=())


def _gen(rng: Random, config: GenConfig, budget: int,
         guarded: Tuple[bool, ...]) -> TypeExpr:
    # guarded[i] is True when binder at de Bruijn index i may be referenced
    usable = [i for i, g in enumerate(guarded) if g]
    choices = ["end"]
    weights = [config.weights.get("end", 0.0)]
    if usable and config.weights.get("var", 0.0) > 0:
        choices.append("var")
        weights.append(config.weights["var"])
    if budget >= 2 and config.weights.get("rec", 0.0) > 0:
        choices.append("rec")
        weights.append(config.weights["rec"])
    if budget >= 3:
        for c in ("input", "output"):
            if config.weights.get(c, 0.0) > 0:
                choices.append(c)
                weights.append(config.weights[c])
    if budget >= 2:
        for c in ("select", "branch"):
            if config.weights.get(c, 0.0) > 0:
                choices.append(c)
                weights.append(config.weights[c])
    if sum(weights) <= 0:
        weights = [1.0] + [0.0] * (len(weights) - 1)
    kind = rng.choices(choices, weights)[0]

    if kind == "end":
        return end()
    if kind == "var":
        return bvar(rng.choice(usable))
    if kind == "rec":
        shifted = (False,) + guarded  # new binder starts unguarded
        return rec(_gen(rng, config, budget - 1, shifted))
    if kind in ("input", "output"):
        n = rng.randint(1, min(config.max_payloads, budget - 2))
        parts = _partition(rng, budget - 1, n + 1)
        now_guarded = tuple(True for _ in guarded)
        payloads = [_gen(rng, config, b, now_guarded) for b in parts[:-1]]
        cont = _gen(rng, config, parts[-1], now_guarded)
        return (inp if kind == "input" else out)(payloads, cont)
    n = rng.randint(1, min(config.max_labels, budget - 1, len(_LABELS)))
    parts = _partition(rng, budget - 1, n)
    now_guarded = tuple(True for _ in guarded)
    labels = rng.sample(_LABELS[:max(n, config.max_labels)], n)
    items = [(l, _gen(rng, config, b, now_guarded))
             for l, b in zip(sorted(labels), parts)]
    return (select if kind == "select" else branch)(items)


def _partition(rng: Random, total: int, parts: int) -> List[int]:
    """Split *total* into *parts* integers, each >= 1."""
    cuts = sorted(rng.sample(range(1, total), parts - 1)) if parts > 1 else []
    bounds = [0] + cuts + [total]
    return [b - a for a, b in zip(bounds, bounds[1:])]


def random_pair(seed: int, max_size: int = 40) -> Tuple[TypeExpr, TypeExpr]:
    """Two independently generated closed contractive types."""
    left = gen_random(GenConfig(seed=seed * 2 + 1, max_size=max_size))
    right = gen_random(GenConfig(seed=seed * 2 + 2, max_size=max_size))
    return left, right


def _blowup_tower(depth: int, prefix: str) -> TypeExpr:
    def build(i: int) -> TypeExpr:
        nxt = build(i + 1) if i < depth else var(f"{prefix}1")
        back = var(f"{prefix}{max(1, i - 1)}")
        root = var(f"{prefix}1")
        return mu(f"{prefix}{i}", inp([back, root], nxt))
    return build(1)


def gen_blowup_family(k: int) -> Tuple[TypeExpr, TypeExpr]:
    """Adversarial pair (F_k, G_k) of sizes 4k+1 and 4k+5; the subtyping
    verdict is true for every k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return _blowup_tower(k, "X"), _blowup_tower(k + 1, "Y")


FAMILIES = {
    "exp": gen_blowup_family,
    "random": lambda k: random_pair(seed=k, max_size=4 * k),
}


@dataclass
class BenchRecord:
    family: str
    k: int
    size_left: int
    size_right: int
    algorithm: str
    verdict: bool
    counters: Dict[str, int]
    elapsed_ns: int
    timed_out: bool


CSV_COLUMNS = ("family", "k", "size_left", "size_right", "algorithm",
               "verdict", "judgements_visited", "memo_entries",
               "product_nodes", "product_edges", "elapsed_ns", "timed_out")


def run_bench(families: Sequence[str],
              k_range: Iterable[int],
              algorithms: Sequence[str],
              timeout: float = DEFAULT_TIMEOUT) -> List[BenchRecord]:
    """One record per (family, k, algorithm); timeouts are recorded in the
    row, never raised."""
    if not families or not algorithms:
        raise ValueError("families and algorithms must be nonempty")
    ks = list(k_range)
    if not ks:
        raise ValueError("k range must be nonempty")
    for name in families:
        if name not in FAMILIES:
            raise ValueError(f"unknown family: {name!r}")
    for algo in algorithms:
        if algo not in ALGORITHMS:
            raise ValueError(f"unknown algorithm: {algo!r}")
    records = []
    for family in families:
        gen = FAMILIES[family]
        for k in ks:
            left, right = gen(k)
            for algo in algorithms:
                start = time.perf_counter()
                try:
                    report = subtyping.check(
                        left, right, algo, deadline=start + timeout)
                    verdict = report.verdict
                    counters = report.counters
                    timed_out = False
                except DeadlineExceeded:
                    verdict = False
                    counters = {key: 0 for key in COUNTER_KEYS}
                    timed_out = True
                elapsed_ns = int((time.perf_counter() - start) * 1e9)
                records.append(BenchRecord(
                    family=family, k=k,
                    size_left=size(left), size_right=size(right),
                    algorithm=algo, verdict=verdict, counters=counters,
                    elapsed_ns=elapsed_ns, timed_out=timed_out))
    return records


def write_csv(records: Iterable[BenchRecord], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([
            r.family, r.k, r.size_left, r.size_right, r.algorithm,
            int(r.verdict),
            r.counters.get("judgements_visited", 0),
            r.counters.get("memo_entries", 0),
            r.counters.get("product_nodes", 0),
            r.counters.get("product_edges", 0),
            r.elapsed_ns, int(r.timed_out),
        ])


def read_csv(stream) -> List[BenchRecord]:
    reader = csv.reader(stream)
    header = next(reader)
    if tuple(header) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header: {header}")
    records = []
    for row in reader:
        (family, k, sl, sr, algo, verdict, jv, me, pn, pe, ns, to) = row
        records.append(BenchRecord(
            family=family, k=int(k), size_left=int(sl), size_right=int(sr),
            algorithm=algo, verdict=bool(int(verdict)),
            counters={"judgements_visited": int(jv), "memo_entries": int(me),
                      "product_nodes": int(pn), "product_edges": int(pe),
                      "max_context_depth": 0},
            elapsed_ns=int(ns), timed_out=bool(int(to))))
    return records


def fit_quadratic(ks: Sequence[int], ys: Sequence[int]) -> Tuple[float, float]:
    """Least-squares fit y = c*k^2; returns (c, max relative residual)."""
    if len(ks) != len(ys) or not ks:
        raise ValueError("ks and ys must be nonempty and the same length")
    num = sum(y * k * k for k, y in zip(ks, ys))
    den = sum(k ** 4 for k in ks)
    c = num / den
    worst = max(abs(y - c * k * k) / y for k, y in zip(ks, ys) if y > 0)
    return c, worst
