"""Kronecker, semi-tensor and Khatri-Rao products, and structure matrices.

Logical matrices (one 1 per column) are kept in index form: column ``c`` is
the basis vector ``delta_rows^{col_index[c]}``.  Products of logical operands
stay in index form; anything else falls back to dense numpy arithmetic.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Union

import numpy as np

from .logic import MValuedFunction
from .states import MAX_STATES, LatticeSpec, digits_table
from .transitions import TransitionSpec


@dataclass(frozen=True, eq=False)
class LogicalMatrix:
    """``rows x len(col_index)`` zero/one matrix, ``delta_rows[col_index]`` with 1-based indices."""

    rows: int
    col_index: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.col_index, dtype=np.int64)
        if idx.ndim != 1 or idx.size == 0:
            raise ValueError("a logical matrix needs a nonempty 1-D column index")
        if self.rows < 1:
            raise ValueError(f"row count must be positive, got {self.rows}")
        if idx.min() < 1 or idx.max() > self.rows:
            raise ValueError(f"column indices must lie in 1..{self.rows}")
        idx.setflags(write=False)
        object.__setattr__(self, "col_index", idx)

    @property
    def cols(self) -> int:
        return self.col_index.size

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @classmethod
    def _trusted(cls, rows: int, idx: np.ndarray) -> "LogicalMatrix":
        # kernel outputs are valid by construction; skip the range scan
        out = object.__new__(cls)
        object.__setattr__(out, "rows", rows)
        object.__setattr__(out, "col_index", idx)
        return out

    @classmethod
    def delta(cls, rows: int, indices) -> "LogicalMatrix":
        return cls(rows, np.asarray(indices, dtype=np.int64))

    @classmethod
    def identity(cls, k: int) -> "LogicalMatrix":
        return _identity(k)

    @classmethod
    def from_dense(cls, a) -> "LogicalMatrix":
        a = np.asarray(a)
        if a.ndim == 1:
            a = a[:, None]
        if not (np.isin(a, (0, 1)).all() and (a.sum(axis=0) == 1).all()):
            raise ValueError("matrix is not logical: need exactly one 1 per column and zeros elsewhere")
        return cls(a.shape[0], a.argmax(axis=0) + 1)

    def to_dense(self, dtype=np.int64) -> np.ndarray:
        out = np.zeros(self.shape, dtype=dtype)
        out[self.col_index - 1, np.arange(self.cols)] = 1
        return out

    def __eq__(self, other):
        if not isinstance(other, LogicalMatrix):
            return NotImplemented
        return self.rows == other.rows and np.array_equal(self.col_index, other.col_index)

    def __hash__(self):
        return hash((self.rows, self.col_index.tobytes()))

    def __repr__(self):
        return f"LogicalMatrix({dump_logical(self)})"


@lru_cache(maxsize=64)
def _identity(k: int) -> LogicalMatrix:
    return LogicalMatrix(k, np.arange(1, k + 1, dtype=np.int64))


Matrix = Union[LogicalMatrix, np.ndarray]


def _dense(x: Matrix) -> np.ndarray:
    if isinstance(x, LogicalMatrix):
        return x.to_dense(dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or 0 in x.shape:
        raise ValueError(f"expected a nonempty 2-D matrix, got shape {x.shape}")
    return x


def _check_size(*dims: int) -> None:
    if math.prod(dims) > MAX_STATES:
        raise OverflowError(f"product dimension {' x '.join(map(str, dims))} is too large")


def kronecker(x: Matrix, y: Matrix) -> Matrix:
    """Kronecker product; stays logical when both operands are."""
    if isinstance(x, LogicalMatrix) and isinstance(y, LogicalMatrix):
        _check_size(x.rows, y.rows)
        _check_size(x.cols, y.cols)
        idx = ((x.col_index[:, None] - 1) * y.rows + y.col_index[None, :]).ravel()
        return LogicalMatrix._trusted(x.rows * y.rows, idx)
    a, b = _dense(x), _dense(y)
    _check_size(a.shape[0], b.shape[0], a.shape[1], b.shape[1])
    return np.kron(a, b)


def matmul(x: Matrix, y: Matrix) -> Matrix:
    """Ordinary product; logical times logical is a column lookup."""
    if isinstance(x, LogicalMatrix) and isinstance(y, LogicalMatrix):
        if x.cols != y.rows:
            raise ValueError(f"cannot multiply {x.shape} by {y.shape}")
        return LogicalMatrix._trusted(x.rows, x.col_index[y.col_index - 1])
    a, b = _dense(x), _dense(y)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def stp(x: Matrix, y: Matrix) -> Matrix:
    """Left semi-tensor product ``(X kron I_{t/c1}) (Y kron I_{t/r2})`` with ``t = lcm(c1, r2)``.

    Reduces to the ordinary product when ``c1 == r2``.
    """
    c1 = x.cols if isinstance(x, LogicalMatrix) else _dense(x).shape[1]
    r2 = y.rows if isinstance(y, LogicalMatrix) else _dense(y).shape[0]
    t = math.lcm(c1, r2)
    if isinstance(x, LogicalMatrix) and isinstance(y, LogicalMatrix):
        left = x if t == c1 else kronecker(x, LogicalMatrix.identity(t // c1))
        right = y if t == r2 else kronecker(y, LogicalMatrix.identity(t // r2))
        return matmul(left, right)
    a, b = _dense(x), _dense(y)
    _check_size(a.shape[0], t // c1, t)
    return np.kron(a, np.eye(t // c1)) @ np.kron(b, np.eye(t // r2))


def stp_chain(*factors: Matrix) -> Matrix:
    return reduce(stp, factors)


def khatri_rao(x: Matrix, y: Matrix) -> Matrix:
    """Column-wise Kronecker product of two matrices with equal column counts."""
    if isinstance(x, LogicalMatrix) and isinstance(y, LogicalMatrix):
        if x.cols != y.cols:
            raise ValueError(f"Khatri-Rao product needs equal column counts, got {x.cols} and {y.cols}")
        _check_size(x.rows, y.rows)
        return LogicalMatrix._trusted(x.rows * y.rows, (x.col_index - 1) * y.rows + y.col_index)
    a, b = _dense(x), _dense(y)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"Khatri-Rao product needs equal column counts, got {a.shape[1]} and {b.shape[1]}")
    return np.einsum("ik,jk->ijk", a, b).reshape(a.shape[0] * b.shape[0], a.shape[1])


def delta_vector(m: int, value: int) -> LogicalMatrix:
    """Encoding of a site value: ``delta_m^{m - value}``."""
    return LogicalMatrix._trusted(m, np.array([m - value], dtype=np.int64))


def encode_state(s, m: int = 2) -> Matrix:
    """Semi-tensor product of the site encodings of ``s``."""
    return stp_chain(*(delta_vector(m, int(v)) for v in s))


def structure_matrix(f: MValuedFunction) -> LogicalMatrix:
    """Structure matrix of ``f``: column ``j`` is ``delta_m^{m - f(state with delta index j)}``."""
    if f.identity_site is not None:
        values = digits_table(LatticeSpec(f.n, f.m))[:, f.identity_site - 1]
    else:
        values = f.table()
    return LogicalMatrix(f.m, f.m - values)


def transition_structure_matrix(t: TransitionSpec) -> LogicalMatrix:
    """Khatri-Rao fold of the per-site structure matrices of ``t``."""
    n, m = t.lattice.n, t.lattice.m
    for f in t.functions:
        if (f.n, f.m) != (n, m):
            raise ValueError(f"site function {f.label!r} has (N, m) = ({f.n}, {f.m}), expected ({n}, {m})")
    return reduce(khatri_rao, (structure_matrix(f) for f in t.functions))


TABLE1_KINDS = ("attach", "left-entry", "right-entry", "detach", "left-exit", "right-exit", "hop-right", "hop-left")


def _block(pattern: tuple[int, ...], size: int) -> LogicalMatrix:
    """Block-logical matrix: column block ``c`` is an identity placed in row block ``pattern[c]``."""
    local = np.arange(1, size + 1, dtype=np.int64)
    return LogicalMatrix(len(pattern) * size, np.concatenate([(p - 1) * size + local for p in pattern]))


def attach_block(n: int, i: int) -> LogicalMatrix:
    return _block((1, 1), 2 ** (n - i))


def detach_block(n: int, i: int) -> LogicalMatrix:
    return _block((2, 2), 2 ** (n - i))


def right_hop_block(n: int, i: int) -> LogicalMatrix:
    return _block((1, 3, 3, 4), 2 ** (n - i - 1))


def left_hop_block(n: int, i: int) -> LogicalMatrix:
    return _block((1, 2, 2, 4), 2 ** (n - i - 1))


def table1_matrix(kind: str, lattice: LatticeSpec, i: int | None = None) -> LogicalMatrix:
    """Closed-form transition structure matrix for the classical single-species moves.

    ``hop-left`` with site ``i`` moves a particle from ``i`` to ``i-1``; its
    block acts on sites ``i-1, i`` and is therefore preceded by an identity on
    the first ``i-2`` sites.
    """
    if lattice.m != 2:
        raise ValueError("closed-form structure matrices exist for m = 2 only")
    n = lattice.n
    if kind == "left-entry":
        kind, i = "attach", 1
    elif kind == "right-entry":
        kind, i = "attach", n
    elif kind == "left-exit":
        kind, i = "detach", 1
    elif kind == "right-exit":
        kind, i = "detach", n
    elif kind not in TABLE1_KINDS:
        raise ValueError(f"no closed form for transition kind {kind!r}")
    if i is None:
        raise ValueError(f"{kind!r} needs a site")
    valid = {"attach": (1, n), "detach": (1, n), "hop-right": (1, n - 1), "hop-left": (2, n)}[kind]
    if not valid[0] <= i <= valid[1]:
        raise ValueError(f"site {i} outside {valid[0]}..{valid[1]} for {kind!r} on N={n}")
    if kind == "attach":
        lead, block = i - 1, attach_block(n, i)
    elif kind == "detach":
        lead, block = i - 1, detach_block(n, i)
    elif kind == "hop-right":
        lead, block = i - 1, right_hop_block(n, i)
    else:
        lead, block = i - 2, left_hop_block(n, i - 1)
    return kronecker(LogicalMatrix.identity(2**lead), block)


def dump_logical(a: LogicalMatrix) -> str:
    """``delta <rows> [c1 c2 ... ck]``."""
    return f"delta {a.rows} [{' '.join(str(int(c)) for c in a.col_index)}]"


_DUMP = re.compile(r"^\s*delta\s+(\d+)\s+\[([\d\s]*)\]\s*$")


def parse_logical(text: str) -> LogicalMatrix:
    match = _DUMP.match(text)
    if not match:
        raise ValueError(f"not a logical matrix dump: {text!r}")
    return LogicalMatrix(int(match.group(1)), np.array([int(c) for c in match.group(2).split()], dtype=np.int64))


def dump_dense(a: np.ndarray) -> str:
    """Headerless CSV, one matrix row per line."""
    return "".join(",".join(format(float(v), ".12g") for v in row) + "\n" for row in np.atleast_2d(a))
