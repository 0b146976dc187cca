"""Lattice states and the index conventions that tie them to matrices.

A state is a tuple of ``N`` site values in ``{0, ..., m-1}``, site 1 first.
Three integer labels are used for a state ``s``:

* ``dec(s)``: the base-``m`` value of the digit string (site 1 most significant),
* ``ord(s) = dec(s) + 1``: lexicographic position, used for all text output,
* ``delta_index(s) = m**N - dec(s)``: row/column of ``s`` in every matrix.

All matrices in this package are stored in delta order, so index 1 is the
all-``(m-1)`` state and index ``m**N`` is the empty lattice.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

State = tuple[int, ...]

# Largest state count we agree to index with int64 arrays.
MAX_STATES = 2**40


class InvalidStateError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeSpec:
    """Lattice of ``n`` sites, each holding a value below ``m``."""

    n: int
    m: int = 2

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"lattice length must be a positive integer, got {self.n!r}")
        if not isinstance(self.m, (int, np.integer)) or self.m < 2:
            raise ValueError(f"logic arity m must be an integer >= 2, got {self.m!r}")
        if self.m**self.n > MAX_STATES:
            raise OverflowError(f"m**N = {self.m}**{self.n} states exceeds the supported maximum {MAX_STATES}")

    @property
    def size(self) -> int:
        """Number of states, ``m**N``."""
        return self.m**self.n

    @property
    def species(self) -> int:
        return self.m - 1

    def validate(self, s: Sequence[int]) -> State:
        s = tuple(int(v) for v in s)
        if len(s) != self.n:
            raise InvalidStateError(f"state {s} has length {len(s)}, expected {self.n}")
        for v in s:
            if not 0 <= v < self.m:
                raise InvalidStateError(f"state {s} has digit {v} outside 0..{self.m - 1}")
        return s

    def check_site(self, i: int, what: str = "site") -> int:
        if not isinstance(i, (int, np.integer)) or not 1 <= i <= self.n:
            raise ValueError(f"{what} {i!r} outside 1..{self.n}")
        return int(i)

    def empty(self) -> State:
        return (0,) * self.n


def dec(s: Sequence[int], m: int = 2) -> int:
    """Base-``m`` value of ``s`` with site 1 as the most significant digit."""
    value = 0
    for x in s:
        value = value * m + int(x)
    return value


def ord_(s: Sequence[int], m: int = 2) -> int:
    return dec(s, m) + 1


def from_digits(n: int, lattice: LatticeSpec) -> State:
    """Inverse of :func:`dec`: the ``N``-digit base-``m`` expansion of ``n``."""
    if not 0 <= n < lattice.size:
        raise ValueError(f"{n} outside 0..{lattice.size - 1} for N={lattice.n}, m={lattice.m}")
    digits = []
    for _ in range(lattice.n):
        n, r = divmod(n, lattice.m)
        digits.append(r)
    return tuple(reversed(digits))


def delta_index(s: Sequence[int], m: int = 2) -> int:
    return m ** len(s) - dec(s, m)


def state_at(j: int, lattice: LatticeSpec) -> State:
    """State whose delta index is ``j`` (1-based)."""
    if not 1 <= j <= lattice.size:
        raise ValueError(f"delta index {j} outside 1..{lattice.size}")
    return from_digits(lattice.size - j, lattice)


def digits_table(lattice: LatticeSpec) -> np.ndarray:
    """All states as an ``(m**N, N)`` array, row ``k`` being delta index ``k + 1``."""
    decs = np.arange(lattice.size - 1, -1, -1, dtype=np.int64)
    powers = lattice.m ** np.arange(lattice.n - 1, -1, -1, dtype=np.int64)
    return ((decs[:, None] // powers[None, :]) % lattice.m).astype(np.int64)


def format_state(s: Sequence[int]) -> str:
    """Digit string used in CSV output; states with ``m > 10`` are dot-separated."""
    if any(v > 9 for v in s):
        return ".".join(str(v) for v in s)
    return "".join(str(v) for v in s)


def parse_state(text: str, lattice: LatticeSpec) -> State:
    text = text.strip()
    parts = text.split(".") if "." in text else list(text)
    try:
        return lattice.validate(int(p) for p in parts)
    except ValueError as exc:
        raise InvalidStateError(f"cannot parse state {text!r}: {exc}") from None


def booleanize(s: Sequence[int], m: int) -> State:
    """Flatten the ``(m-1) x N`` occupation array of a multi-valued state.

    Row ``n-1`` of the array marks the sites holding species ``n``; the result is
    the row-major flattening, i.e. a Boolean state on ``(m-1)*N`` sites.
    """
    s = tuple(int(v) for v in s)
    return tuple(int(x == k) for k in range(1, m) for x in s)


def booleanize_array(s: Sequence[int], m: int) -> np.ndarray:
    return np.array(booleanize(s, m), dtype=np.int64).reshape(m - 1, len(s))


def debooleanize(b: Sequence[int], m: int) -> State:
    """Recover a multi-valued state from its Boolean occupation array.

    Raises :class:`InvalidStateError` if a site is claimed by two species.
    """
    arr = np.asarray(b, dtype=np.int64)
    if arr.ndim == 1:
        if arr.size % (m - 1):
            raise InvalidStateError(f"length {arr.size} is not a multiple of m-1={m - 1}")
        arr = arr.reshape(m - 1, -1)
    if arr.shape[0] != m - 1:
        raise InvalidStateError(f"expected {m - 1} species rows, got {arr.shape[0]}")
    if not np.isin(arr, (0, 1)).all():
        raise InvalidStateError("occupation array must be 0/1")
    occupied = arr.sum(axis=0)
    bad = np.flatnonzero(occupied > 1)
    if bad.size:
        raise InvalidStateError(f"site(s) {(bad + 1).tolist()} hold more than one species")
    species = np.arange(1, m)[:, None]
    return tuple(int(v) for v in (arr * species).sum(axis=0))
