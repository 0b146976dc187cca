"""Monte Carlo check of stationary distributions.

The simulator runs the uniformized chain: every step draws one transition
from *all* transitions with probability ``r / sum(r)`` and applies it; a
transition that cannot fire leaves the state where it is.  This is the chain
whose matrix :func:`stpx.steady.assemble` builds, so long-run visit
frequencies estimate the same stationary vector.  (Drawing only among the
enabled transitions would give the jump chain, whose stationary law differs
by holding-time weights.)

States are advanced with each transition's direct map, never with matrices.
"""
from __future__ import annotations

import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .states import State, dec, delta_index
from .steady import Distribution, ModelSpec, allowable_states, normalize_rates

GENERATOR = "numpy.random.PCG64"
_CHUNK = 65536


@dataclass(frozen=True)
class SimConfig:
    steps: int
    burn_in: int = 0
    seed: int = 0
    chains: int = 1

    def __post_init__(self):
        for name in ("steps", "burn_in", "seed", "chains"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ValueError(f"{name} must be an integer, got {v!r}")
        if self.steps < 1:
            raise ValueError("steps must be positive")
        if self.chains < 1:
            raise ValueError("chains must be positive")
        if not 0 <= self.burn_in < self.steps:
            raise ValueError(f"burn_in must satisfy 0 <= burn_in < steps, got {self.burn_in} and {self.steps}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def samples_per_chain(self) -> int:
        return self.steps - self.burn_in


@dataclass
class EmpiricalDistribution:
    """Visit counts keyed by the decimal value of each state."""

    model: ModelSpec
    counts: dict[int, int] = field(default_factory=dict)
    seed: int | None = None
    generator: str = GENERATOR

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def merge(self, other: "EmpiricalDistribution") -> "EmpiricalDistribution":
        merged = Counter(self.counts)
        merged.update(other.counts)
        return EmpiricalDistribution(self.model, dict(merged), self.seed, self.generator)

    def to_distribution(self, index_map: np.ndarray | None = None) -> Distribution:
        """Normalised frequencies laid out like a solver distribution (delta order)."""
        lattice = self.model.lattice
        full = np.zeros(lattice.size)
        for d, c in self.counts.items():
            full[lattice.size - d - 1] = c
        full /= self.total
        if index_map is None:
            return Distribution(full, lattice)
        index_map = np.asarray(index_map, dtype=np.int64)
        probs = full[index_map - 1]
        if probs.sum() < 1 - 1e-12:
            raise ValueError("simulation visited states outside the given index map")
        return Distribution(probs / probs.sum(), lattice, index_map)


def _run_chain(model: ModelSpec, seed_seq: np.random.SeedSequence, steps: int, burn_in: int,
               start: State) -> Counter:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    probs = normalize_rates(model)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    maps = [t.step for t in model.transitions]
    memo: list[dict] = [{} for _ in maps]
    m = model.lattice.m
    counts: Counter = Counter()
    state = start
    done = 0
    while done < steps:
        n = min(_CHUNK, steps - done)
        picks = np.searchsorted(cdf, rng.random(n), side="right").tolist()
        for k in picks:
            cache = memo[k]
            nxt = cache.get(state)
            if nxt is None:
                nxt = cache[state] = maps[k](state)
            state = nxt
            done += 1
            if done > burn_in:
                counts[state] += 1
    return Counter({dec(s, m): c for s, c in counts.items()})


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("STPX_THREADS", "1")))
    except ValueError:
        return 1


def simulate(model: ModelSpec, cfg: SimConfig, start: State | None = None) -> EmpiricalDistribution:
    """Visit counts of the uniformized chain after burn-in.

    Chain ``c`` uses the ``c``-th child of ``SeedSequence(cfg.seed)``, so the
    result depends only on the model, the config and the start state.
    """
    lattice = model.lattice
    start = lattice.validate(start) if start is not None else lattice.empty()
    if model.restriction is not None:
        allowed = allowable_states(model)
        if delta_index(start, lattice.m) not in set(allowed.tolist()):
            raise ValueError(f"start state {start} is outside the allowable set")
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.chains)
    jobs = [(model, child, cfg.steps, cfg.burn_in, start) for child in children]
    workers = min(_threads(), cfg.chains)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda a: _run_chain(*a), jobs))
    else:
        results = [_run_chain(*a) for a in jobs]
    total: Counter = Counter()
    for r in results:
        total.update(r)
    return EmpiricalDistribution(model, dict(sorted(total.items())), cfg.seed)


def one_step_counts(model: ModelSpec, state: State, samples: int, seed: int = 0) -> Counter:
    """Successor counts of ``samples`` independent single steps from ``state``."""
    rng = np.random.Generator(np.random.PCG64(seed))
    picks = rng.choice(len(model.transitions), size=samples, p=normalize_rates(model))
    state = model.lattice.validate(state)
    succ = [t.step(state) for t in model.transitions]
    return Counter(succ[k] for k in picks.tolist())


def total_variation(a: Distribution, b: Distribution) -> float:
    """Half the 1-norm distance between two distributions on the same ordering."""
    if a.lattice != b.lattice or not np.array_equal(a.full_indices(), b.full_indices()):
        raise ValueError("distributions use different state orderings")
    return float(0.5 * np.abs(a.probs - b.probs).sum())
