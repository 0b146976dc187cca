"""Transitions as tuples of per-site logical functions, and the standard catalogue."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .direct import direct_map
from .logic import (
    ConditionSet,
    MValuedFunction,
    build_clear_function,
    build_mv_function,
    build_set_function,
    build_switch_functions,
    generic_hop_functions,
    identity_function,
)
from .states import LatticeSpec, State

BOOLEAN_KINDS = (
    "left-entry", "right-entry", "left-exit", "right-exit", "attach", "detach",
    "hop-right", "hop-left", "long-range-hop", "periodic-wrap-hop",
    "footprint-entry", "footprint-exit", "footprint-hop",
)
SPECIES_KINDS = (
    "species-entry", "species-exit", "species-attach", "species-detach",
    "species-hop", "switch", "generic-hop",
)
# valid for every m: leaves the state alone (an explicit self-loop weight)
NEUTRAL_KINDS = ("identity",)
KINDS = BOOLEAN_KINDS + SPECIES_KINDS + NEUTRAL_KINDS


@dataclass(frozen=True, eq=False)
class TransitionSpec:
    """One transition: a rate and the function giving each site's next value.

    ``direct`` is an optional state-to-state map describing the same move
    without the logical functions; the standard catalogue always sets it.
    """

    name: str
    rate: float
    functions: tuple[MValuedFunction, ...]
    lattice: LatticeSpec
    kind: str | None = None
    params: dict = field(default_factory=dict)
    direct: Callable[[State], State] | None = None

    def __post_init__(self):
        rate = float(self.rate)
        if not math.isfinite(rate) or rate < 0:
            raise ValueError(f"transition {self.name!r}: rate must be a finite nonnegative number, got {self.rate!r}")
        object.__setattr__(self, "rate", rate)
        object.__setattr__(self, "functions", tuple(self.functions))
        if len(self.functions) != self.lattice.n:
            raise ValueError(f"transition {self.name!r}: needs {self.lattice.n} site functions, got {len(self.functions)}")
        for i, f in enumerate(self.functions, 1):
            if (f.n, f.m) != (self.lattice.n, self.lattice.m):
                raise ValueError(f"transition {self.name!r}: site {i} function has (N, m) = ({f.n}, {f.m}), "
                                 f"expected ({self.lattice.n}, {self.lattice.m})")

    def apply(self, s: Sequence[int]) -> State:
        """Successor of ``s``, evaluated through the site functions."""
        x = np.asarray(self.lattice.validate(s), dtype=np.int64)
        return tuple(f(x) for f in self.functions)

    def step(self, s: State) -> State:
        """Successor of ``s`` via the direct map when available."""
        return self.direct(s) if self.direct is not None else self.apply(s)

    def with_rate(self, rate: float) -> "TransitionSpec":
        return TransitionSpec(self.name, rate, self.functions, self.lattice, self.kind, dict(self.params), self.direct)


def custom_transition(name: str, rate: float, lattice: LatticeSpec, changes: dict) -> TransitionSpec:
    """Transition from site functions for the changing sites; others are identities."""
    functions = [changes.get(i) or identity_function(lattice, i) for i in range(1, lattice.n + 1)]
    return TransitionSpec(name, rate, tuple(functions), lattice)


def transition_name(kind: str, site=None, species=None, jump=None, footprint=None, head=None, direction="right") -> str:
    if kind in ("left-entry", "right-entry", "left-exit", "right-exit", "identity"):
        return kind
    if kind == "periodic-wrap-hop":
        return f"{kind}({direction})"
    if kind in ("attach", "detach", "hop-right", "hop-left", "generic-hop"):
        args = [site]
    elif kind == "long-range-hop":
        args = [site, jump]
    elif kind in ("species-entry", "species-exit"):
        args = [species]
    elif kind in ("species-attach", "species-detach", "species-hop"):
        args = [species, site]
    elif kind == "switch":
        args = [*species, site]
    elif kind in ("footprint-entry", "footprint-exit"):
        args = [footprint]
    elif kind == "footprint-hop":
        args = [footprint, head]
    else:
        raise ValueError(f"unknown transition kind {kind!r}")
    return f"{kind}({','.join(str(a) for a in args)})"


def _need(value, what: str, kind: str):
    if value is None:
        raise ValueError(f"transition {kind!r} requires {what}")
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValueError(f"transition {kind!r}: {what} must be an integer, got {value!r}")
    return int(value)


def _species(lattice: LatticeSpec, k, kind: str) -> int:
    k = _need(k, "species", kind)
    if not 1 <= k <= lattice.m - 1:
        raise ValueError(f"transition {kind!r}: species {k} outside 1..{lattice.m - 1}")
    return k


def standard_transition(kind: str, lattice: LatticeSpec, rate: float = 1.0, *, site=None, species=None,
                        jump=None, footprint=None, head=None, direction: str = "right",
                        name: str | None = None) -> TransitionSpec:
    """Build one of the standard transitions on ``lattice``.

    Sites not touched by the move get identity functions; a move that cannot
    happen in a given state leaves that state unchanged.
    """
    N, m = lattice.n, lattice.m
    if kind not in KINDS:
        raise ValueError(f"unknown transition kind {kind!r}; expected one of {', '.join(KINDS)}")
    if kind in BOOLEAN_KINDS and m != 2:
        raise ValueError(f"transition {kind!r} is single-species (m=2); use the species-* kinds for m={m}")
    if kind in SPECIES_KINDS and m < 3:
        raise ValueError(f"transition {kind!r} is multi-species and needs m >= 3")

    changes: dict[int, MValuedFunction] = {}
    if kind == "identity":
        pass
    elif kind in ("left-entry", "right-entry", "attach"):
        j = {"left-entry": 1, "right-entry": N}.get(kind) or lattice.check_site(_need(site, "a site", kind))
        site = j if kind == "attach" else None
        changes[j] = build_set_function(lattice, j, {j})
    elif kind in ("left-exit", "right-exit", "detach"):
        j = {"left-exit": 1, "right-exit": N}.get(kind) or lattice.check_site(_need(site, "a site", kind))
        site = j if kind == "detach" else None
        changes[j] = build_clear_function(lattice, j, ones={j})
    elif kind in ("hop-right", "hop-left", "long-range-hop", "periodic-wrap-hop"):
        if kind == "periodic-wrap-hop":
            if direction not in ("right", "left"):
                raise ValueError(f"periodic-wrap-hop direction must be 'right' or 'left', got {direction!r}")
            if N < 2:
                raise ValueError("periodic-wrap-hop needs at least 2 sites")
            src, dst = (N, 1) if direction == "right" else (1, N)
        else:
            src = lattice.check_site(_need(site, "a site", kind))
            if kind == "long-range-hop":
                jump = _need(jump, "a jump length", kind)
                if jump == 0:
                    raise ValueError("long-range-hop jump length must be nonzero")
            step = {"hop-right": 1, "hop-left": -1}.get(kind, jump)
            dst = src + step
            if not 1 <= dst <= N:
                raise ValueError(f"transition {kind!r} from site {src} lands on site {dst}, outside 1..{N}")
            site = src
        changes[src] = build_clear_function(lattice, src, zeros={dst}, ones={src})
        changes[dst] = build_set_function(lattice, dst, zeros={dst}, ones={src})
    elif kind in ("species-entry", "species-exit", "species-attach", "species-detach"):
        species = _species(lattice, species, kind)
        if kind in ("species-entry", "species-exit"):
            j = 1 if kind == "species-entry" else N
        else:
            j = site = lattice.check_site(_need(site, "a site", kind))
        a, b = (0, species) if kind in ("species-entry", "species-attach") else (species, 0)
        changes[j] = build_mv_function(lattice, j, a, b, {j: a})
    elif kind == "species-hop":
        species = _species(lattice, species, kind)
        site = lattice.check_site(_need(site, "a site", kind))
        if site + 1 > N:
            raise ValueError(f"species-hop from site {site} leaves the lattice of {N}")
        conds = ConditionSet.of({site: species, site + 1: 0})
        changes[site] = build_mv_function(lattice, site, species, 0, conds)
        changes[site + 1] = build_mv_function(lattice, site + 1, 0, species, conds)
    elif kind == "switch":
        if species is None or len(species) != 2:
            raise ValueError("switch requires species = (m1, m2)")
        m1, m2 = (_species(lattice, k, kind) for k in species)
        if m1 == m2:
            raise ValueError("switch needs two different species")
        species = (m1, m2)
        site = lattice.check_site(_need(site, "a site", kind))
        changes[site], changes[site + 1] = build_switch_functions(lattice, site, m1, m2)
    elif kind == "generic-hop":
        site = lattice.check_site(_need(site, "a site", kind))
        changes[site], changes[site + 1] = generic_hop_functions(lattice, site)
    else:  # footprint kinds
        r = _need(footprint, "a footprint", kind)
        if not 1 <= r <= N:
            raise ValueError(f"footprint {r} outside 1..{N}")
        footprint = r
        if kind == "footprint-entry":
            block = set(range(1, r + 1))
            for j in block:
                changes[j] = build_set_function(lattice, j, block)
        elif kind == "footprint-exit":
            block = set(range(N - r + 1, N + 1))
            for j in block:
                changes[j] = build_clear_function(lattice, j, ones=block)
        else:
            head = _need(head, "a head site", kind)
            if not r <= head <= N - 1:
                raise ValueError(f"footprint-hop head {head} outside {r}..{N - 1}")
            body = set(range(head - r + 1, head + 1))
            changes[head - r + 1] = build_clear_function(lattice, head - r + 1, zeros={head + 1}, ones=body)
            changes[head + 1] = build_set_function(lattice, head + 1, zeros={head + 1}, ones=body)

    params = {"site": site, "species": species, "jump": jump, "footprint": footprint, "head": head}
    if kind == "periodic-wrap-hop":
        params["direction"] = direction
    params = {k: v for k, v in params.items() if v is not None}
    functions = tuple(changes.get(i) or identity_function(lattice, i) for i in range(1, N + 1))
    return TransitionSpec(
        name or transition_name(kind, **params),
        rate,
        functions,
        lattice,
        kind,
        params,
        direct_map(kind, N, m, **params),
    )


def tasep(lattice: LatticeSpec, alpha: float, beta: float, p: float) -> list[TransitionSpec]:
    """Left entry, right exit and rightward hops at every bond."""
    out = [standard_transition("left-entry", lattice, alpha), standard_transition("right-exit", lattice, beta)]
    out += [standard_transition("hop-right", lattice, p, site=i) for i in range(1, lattice.n)]
    return out
