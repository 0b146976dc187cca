"""Direct state-to-state maps for the standard transition kinds.

These are written straight from the physical description of each move and do
not go through the logical-function builders.  They serve as the reference
the builders are checked against, and they drive the Monte Carlo simulator.
A transition that cannot fire leaves the state unchanged.
"""
from __future__ import annotations

from typing import Callable

State = tuple[int, ...]
DirectMap = Callable[[State], State]


def _move(s: State, src: int, dst: int) -> State:
    """Move whatever sits on ``src`` to empty ``dst`` (1-based sites)."""
    if s[src - 1] == 0 or s[dst - 1] != 0:
        return s
    out = list(s)
    out[dst - 1], out[src - 1] = s[src - 1], 0
    return tuple(out)


def _put(s: State, site: int, old: int, new: int) -> State:
    if s[site - 1] != old:
        return s
    out = list(s)
    out[site - 1] = new
    return tuple(out)


def direct_map(kind: str, n: int, m: int, site=None, species=None, jump=None,
               footprint=None, head=None, direction="right") -> DirectMap:
    """Return the state map for one transition kind; arguments are pre-validated."""
    if kind == "identity":
        return lambda s: s
    if kind in ("left-entry", "right-entry", "attach"):
        where = {"left-entry": 1, "right-entry": n}.get(kind, site)
        return lambda s: _put(s, where, 0, 1)
    if kind in ("left-exit", "right-exit", "detach"):
        where = {"left-exit": 1, "right-exit": n}.get(kind, site)
        return lambda s: _put(s, where, 1, 0)
    if kind == "hop-right":
        return lambda s: _move(s, site, site + 1)
    if kind == "hop-left":
        return lambda s: _move(s, site, site - 1)
    if kind == "long-range-hop":
        return lambda s: _move(s, site, site + jump)
    if kind == "periodic-wrap-hop":
        src, dst = (n, 1) if direction == "right" else (1, n)
        return lambda s: _move(s, src, dst)
    if kind == "species-entry":
        return lambda s: _put(s, 1, 0, species)
    if kind == "species-exit":
        return lambda s: _put(s, n, species, 0)
    if kind == "species-attach":
        return lambda s: _put(s, site, 0, species)
    if kind == "species-detach":
        return lambda s: _put(s, site, species, 0)
    if kind == "species-hop":
        return lambda s: _move(s, site, site + 1) if s[site - 1] == species else s
    if kind == "generic-hop":
        return lambda s: _move(s, site, site + 1)
    if kind == "switch":
        m1, m2 = species

        def switch(s):
            if s[site - 1] != m1 or s[site] != m2:
                return s
            out = list(s)
            out[site - 1], out[site] = m2, m1
            return tuple(out)

        return switch
    if kind == "footprint-entry":
        r = footprint

        def enter(s):
            if any(s[:r]):
                return s
            return (1,) * r + s[r:]

        return enter
    if kind == "footprint-exit":
        r = footprint

        def leave(s):
            if not all(s[n - r:]):
                return s
            return s[:n - r] + (0,) * r

        return leave
    if kind == "footprint-hop":
        r = footprint
        tail = head - r + 1

        def hop(s):
            if not all(s[tail - 1:head]) or s[head] != 0:
                return s
            out = list(s)
            out[tail - 1], out[head] = 0, 1
            return tuple(out)

        return hop
    raise ValueError(f"no direct map for transition kind {kind!r}")
