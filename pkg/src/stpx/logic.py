"""Per-site logical functions and their systematic builders.

Every function here is an ``N``-ary ``m``-valued map.  Evaluators are
vectorised: they accept an integer array whose last axis holds the ``N`` site
values and return one value per leading index, so the same code evaluates a
single state or a whole truth table.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np

from .states import LatticeSpec, digits_table

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ConditionSet:
    """Statements ``x_site == value`` that must all hold for a transition to fire."""

    pairs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        pairs = frozenset((int(i), int(c)) for i, c in self.pairs)
        sites = [i for i, _ in pairs]
        if len(sites) != len(set(sites)):
            raise ValueError(f"condition set constrains a site twice: {sorted(pairs)}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def of(cls, conds: "ConditionSet | Mapping[int, int] | Iterable[tuple[int, int]]") -> "ConditionSet":
        if isinstance(conds, ConditionSet):
            return conds
        if isinstance(conds, Mapping):
            conds = conds.items()
        return cls(frozenset(conds))

    def check(self, lattice: LatticeSpec) -> "ConditionSet":
        for i, c in self.pairs:
            lattice.check_site(i, "condition site")
            if not 0 <= c < lattice.m:
                raise ValueError(f"condition value {c} outside 0..{lattice.m - 1}")
        return self

    def holds(self, x: np.ndarray) -> np.ndarray:
        """Boolean array: do all statements hold, for each state in ``x``."""
        x = np.asarray(x)
        ok = np.ones(x.shape[:-1], dtype=bool)
        for i, c in self.pairs:
            ok &= x[..., i - 1] == c
        return ok

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __len__(self):
        return len(self.pairs)


def sigma_gate(a: int, b: int, conds, s) -> int | np.ndarray:
    """``a`` if every statement in ``conds`` holds in ``s``, otherwise ``b``."""
    conds = ConditionSet.of(conds)
    x = np.asarray(s)
    out = np.where(conds.holds(x), a, b)
    return int(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class MValuedFunction:
    """A map from ``N`` site values to one value in ``{0, ..., m-1}``.

    ``identity_site`` marks the projection ``f(x) = x_i``; such functions never
    need a truth table.
    """

    n: int
    m: int
    evaluator: Evaluator
    label: str = ""
    identity_site: int | None = None

    def __call__(self, s) -> int:
        x = np.asarray(s, dtype=np.int64)
        if x.shape != (self.n,):
            raise ValueError(f"{self.label or 'function'} expects a state of length {self.n}, got shape {x.shape}")
        v = int(self.evaluator(x))
        if not 0 <= v < self.m:
            raise ValueError(f"{self.label or 'function'} returned {v}, outside 0..{self.m - 1}")
        return v

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.evaluator(np.asarray(x, dtype=np.int64)), dtype=np.int64)

    def table(self) -> np.ndarray:
        """Values on every state, in delta order (entry ``k`` is delta index ``k+1``)."""
        lattice = LatticeSpec(self.n, self.m)
        values = np.broadcast_to(self.evaluate(digits_table(lattice)), (lattice.size,)).copy()
        if values.size and (values.min() < 0 or values.max() >= self.m):
            raise ValueError(f"{self.label or 'function'} produced values outside 0..{self.m - 1}")
        return values

    @classmethod
    def from_scalar(cls, fn: Callable[..., int], n: int, m: int = 2, label: str = "") -> "MValuedFunction":
        """Wrap a plain function of ``n`` site values, ``fn(x1, ..., xn)``."""

        def evaluator(x):
            x = np.asarray(x)
            if x.ndim == 1:
                return np.int64(fn(*(int(v) for v in x)))
            flat = x.reshape(-1, n)
            out = np.fromiter((fn(*(int(v) for v in row)) for row in flat), dtype=np.int64, count=len(flat))
            return out.reshape(x.shape[:-1])

        return cls(n, m, evaluator, label or getattr(fn, "__name__", ""))

    @classmethod
    def from_table(cls, values, n: int, m: int = 2, label: str = "") -> "MValuedFunction":
        """Function given by its values in delta order."""
        values = np.asarray(values, dtype=np.int64)
        size = m**n
        if values.shape != (size,):
            raise ValueError(f"truth table needs {size} entries, got {values.shape}")
        if values.min() < 0 or values.max() >= m:
            raise ValueError(f"truth table values must lie in 0..{m - 1}")
        powers = m ** np.arange(n - 1, -1, -1, dtype=np.int64)

        def evaluator(x):
            return values[size - 1 - (np.asarray(x) @ powers)]

        return cls(n, m, evaluator, label)


def identity_function(lattice: LatticeSpec, i: int) -> MValuedFunction:
    i = lattice.check_site(i)
    return MValuedFunction(lattice.n, lattice.m, lambda x: np.asarray(x)[..., i - 1], f"x{i}", identity_site=i)


def _site_set(lattice: LatticeSpec, sites, what: str) -> frozenset:
    return frozenset(lattice.check_site(i, what) for i in sites)


def build_set_function(lattice: LatticeSpec, j: int, zeros, ones=()) -> MValuedFunction:
    """Boolean function for site ``j`` turning from 0 to 1.

    ``zeros`` are the sites that must be empty and ``ones`` those that must be
    occupied.  The result is ``x_j or (not any(zeros) and all(ones))``.
    """
    if lattice.m != 2:
        raise ValueError("build_set_function is Boolean only; use build_mv_function for m > 2")
    j = lattice.check_site(j)
    zeros, ones = _site_set(lattice, zeros, "I0 site"), _site_set(lattice, ones, "I1 site")
    if j not in zeros:
        raise ValueError(f"site {j} must be required empty (in I0) for a 0->1 change")
    if zeros & ones:
        raise ValueError(f"sites {sorted(zeros & ones)} required both empty and occupied")
    zi, oi = [i - 1 for i in sorted(zeros)], [i - 1 for i in sorted(ones)]

    def evaluator(x):
        x = np.asarray(x).astype(bool)
        none_of_zeros = ~np.any(x[..., zi], axis=-1)
        all_of_ones = np.all(x[..., oi], axis=-1)
        return (x[..., j - 1] | (none_of_zeros & all_of_ones)).astype(np.int64)

    return MValuedFunction(lattice.n, 2, evaluator, f"set{j}")


def build_clear_function(lattice: LatticeSpec, j: int, zeros=(), ones=()) -> MValuedFunction:
    """Boolean function for site ``j`` turning from 1 to 0.

    The result is ``x_j and (any(zeros) or not all(ones))``: zero exactly when
    every condition holds.
    """
    if lattice.m != 2:
        raise ValueError("build_clear_function is Boolean only; use build_mv_function for m > 2")
    j = lattice.check_site(j)
    zeros, ones = _site_set(lattice, zeros, "I0 site"), _site_set(lattice, ones, "I1 site")
    if j not in ones:
        raise ValueError(f"site {j} must be required occupied (in I1) for a 1->0 change")
    if zeros & ones:
        raise ValueError(f"sites {sorted(zeros & ones)} required both empty and occupied")
    zi, oi = [i - 1 for i in sorted(zeros)], [i - 1 for i in sorted(ones)]

    def evaluator(x):
        x = np.asarray(x).astype(bool)
        some_zero_filled = np.any(x[..., zi], axis=-1)
        not_all_ones = ~np.all(x[..., oi], axis=-1)
        return (x[..., j - 1] & (some_zero_filled | not_all_ones)).astype(np.int64)

    return MValuedFunction(lattice.n, 2, evaluator, f"clear{j}")


def build_mv_function(lattice: LatticeSpec, j: int, a: int, b: int, conds) -> MValuedFunction:
    """``m``-valued function for site ``j`` changing from ``a`` to ``b``.

    Uses min/max as conjunction/disjunction: ``min(x_j, sigma(b, m-1))`` for a
    decrease and ``max(x_j, sigma(b, 0))`` for an increase, so the site becomes
    ``b`` when all of ``conds`` hold and is left alone otherwise.
    """
    j = lattice.check_site(j)
    m = lattice.m
    if not (0 <= a < m and 0 <= b < m):
        raise ValueError(f"values a={a}, b={b} must lie in 0..{m - 1}")
    if a == b:
        raise ValueError("a transition must change the site value (a == b)")
    conds = ConditionSet.of(conds).check(lattice)
    if (j, a) not in conds.pairs:
        raise ValueError(f"condition set must contain ({j}, {a}): the site has to hold {a} before changing")

    if a > b:
        def evaluator(x):
            x = np.asarray(x)
            return np.minimum(x[..., j - 1], np.where(conds.holds(x), b, m - 1))
    else:
        def evaluator(x):
            x = np.asarray(x)
            return np.maximum(x[..., j - 1], np.where(conds.holds(x), b, 0))

    return MValuedFunction(lattice.n, m, evaluator, f"x{j}:{a}->{b}")


def build_switch_functions(lattice: LatticeSpec, j: int, m1: int, m2: int) -> tuple[MValuedFunction, MValuedFunction]:
    """Functions for sites ``j`` and ``j+1`` exchanging species ``m1`` and ``m2``."""
    if j + 1 > lattice.n:
        raise ValueError(f"switch needs sites {j} and {j + 1} on a lattice of {lattice.n}")
    conds = ConditionSet.of({j: m1, j + 1: m2})
    return (build_mv_function(lattice, j, m1, m2, conds), build_mv_function(lattice, j + 1, m2, m1, conds))


def generic_hop_functions(lattice: LatticeSpec, i: int) -> tuple[MValuedFunction, MValuedFunction]:
    """Any particle at ``i`` moves to an empty site ``i+1``, whatever its species.

    The target value depends on the moving species, which a fixed ``(a, b)``
    builder cannot express, so these are written directly.
    """
    i = lattice.check_site(i)
    if i + 1 > lattice.n:
        raise ValueError(f"hop from site {i} leaves the lattice of {lattice.n}")

    def source(x):
        x = np.asarray(x)
        return np.where(x[..., i] == 0, 0, x[..., i - 1])

    def target(x):
        x = np.asarray(x)
        return np.where(x[..., i] == 0, x[..., i - 1], x[..., i])

    return (MValuedFunction(lattice.n, lattice.m, source, f"hop-src{i}"),
            MValuedFunction(lattice.n, lattice.m, target, f"hop-dst{i + 1}"))
