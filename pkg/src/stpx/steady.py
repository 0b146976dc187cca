"""Transition matrix assembly and stationary distributions.

All matrices and distributions are indexed in delta order.  A restricted
matrix or distribution carries ``index_map``: the full delta index of each of
its entries, in increasing order.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .algebra import LogicalMatrix, transition_structure_matrix
from .states import LatticeSpec, State, delta_index, digits_table, state_at
from .transitions import TransitionSpec

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 10**6
DENSE_LIMIT = 4096


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float = math.nan, iterations: int = 0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class ClosureError(ValueError):
    pass


@dataclass(frozen=True)
class Restriction:
    """Which states the chain is confined to.

    ``kind`` is ``"footprint"`` (states reachable from the empty lattice; ``r``
    records the particle width) or ``"explicit"`` (a given list of states).
    """

    kind: str
    footprint: int | None = None
    states: tuple[State, ...] = ()

    def __post_init__(self):
        if self.kind not in ("footprint", "explicit"):
            raise ValueError(f"unknown restriction kind {self.kind!r}")
        if self.kind == "footprint" and (self.footprint is None or self.footprint < 1):
            raise ValueError("footprint restriction needs a positive footprint")
        if self.kind == "explicit" and not self.states:
            raise ValueError("explicit restriction needs at least one state")


@dataclass(frozen=True, eq=False)
class ModelSpec:
    lattice: LatticeSpec
    transitions: tuple[TransitionSpec, ...]
    restriction: Restriction | None = None

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(self.transitions))
        if not self.transitions:
            raise ValueError("a model needs at least one transition")
        names = [t.name for t in self.transitions]
        dupes = sorted({n for n in names if names.count(n) > 1})
        if dupes:
            raise ValueError(f"duplicate transition names: {', '.join(dupes)}")
        for t in self.transitions:
            if t.lattice != self.lattice:
                raise ValueError(f"transition {t.name!r} is defined on {t.lattice}, model uses {self.lattice}")
        if not any(t.rate > 0 for t in self.transitions):
            raise ValueError("at least one transition must have a positive rate")

    @property
    def total_rate(self) -> float:
        return math.fsum(t.rate for t in self.transitions)

    @cached_property
    def structure_matrices(self) -> tuple[LogicalMatrix, ...]:
        return tuple(transition_structure_matrix(t) for t in self.transitions)

    def transition(self, name: str) -> TransitionSpec:
        for t in self.transitions:
            if t.name == name:
                return t
        raise KeyError(f"no transition named {name!r}; have {', '.join(t.name for t in self.transitions)}")


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Column-stochastic transition matrix in CSC form."""

    matrix: sp.csc_array
    lattice: LatticeSpec
    index_map: np.ndarray | None = None
    model: ModelSpec | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def full_indices(self) -> np.ndarray:
        if self.index_map is None:
            return np.arange(1, self.dim + 1, dtype=np.int64)
        return self.index_map


@dataclass(frozen=True)
class SolveReport:
    method: str
    iterations: int
    residual: float
    unique: bool


@dataclass(frozen=True, eq=False)
class Distribution:
    """Probability vector in delta order, optionally restricted via ``index_map``."""

    probs: np.ndarray
    lattice: LatticeSpec
    index_map: np.ndarray | None = None
    report: SolveReport | None = None

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        expected = self.lattice.size if self.index_map is None else len(self.index_map)
        if p.shape != (expected,):
            raise ValueError(f"distribution has shape {p.shape}, expected ({expected},)")
        if (p < 0).any() or abs(p.sum() - 1.0) > 1e-10:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        object.__setattr__(self, "probs", p)

    def full_indices(self) -> np.ndarray:
        if self.index_map is None:
            return np.arange(1, self.lattice.size + 1, dtype=np.int64)
        return np.asarray(self.index_map)

    def states(self) -> list[State]:
        return [state_at(int(j), self.lattice) for j in self.full_indices()]

    def embed(self) -> np.ndarray:
        """Full-length delta-ordered vector, zero outside the support set."""
        out = np.zeros(self.lattice.size)
        out[self.full_indices() - 1] = self.probs
        return out

    def lexicographic(self) -> list[tuple[State, float]]:
        """``(state, probability)`` pairs in lexicographic (increasing ord) order."""
        pairs = zip(self.full_indices()[::-1], self.probs[::-1])
        return [(state_at(int(j), self.lattice), float(p)) for j, p in pairs]

    def prob(self, s: Sequence[int]) -> float:
        j = delta_index(self.lattice.validate(s), self.lattice.m)
        hits = np.flatnonzero(self.full_indices() == j)
        return float(self.probs[hits[0]]) if hits.size else 0.0


def normalize_rates(model: ModelSpec) -> np.ndarray:
    """Per-transition step probabilities ``r / sum(r)``."""
    sigma = model.total_rate
    if not sigma > 0:
        raise ValueError("total transition rate must be positive")
    return np.array([t.rate / sigma for t in model.transitions])


def assemble(model: ModelSpec) -> StochasticMatrix:
    """``M = sum_tau p(tau) M^tau`` over the full state space."""
    d = model.lattice.size
    probs = normalize_rates(model)
    rows, cols, vals = [], [], []
    cols_range = np.arange(d, dtype=np.int64)
    for p, mt in zip(probs, model.structure_matrices):
        if p == 0:
            continue
        rows.append(mt.col_index - 1)
        cols.append(cols_range)
        vals.append(np.full(d, p))
    matrix = sp.csc_array((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(d, d))
    matrix.sum_duplicates()
    matrix.sort_indices()
    return StochasticMatrix(matrix, model.lattice, None, model)


def _reachable(model: ModelSpec) -> np.ndarray:
    start = model.lattice.size  # empty lattice
    succ = [mt.col_index for t, mt in zip(model.transitions, model.structure_matrices) if t.rate > 0]
    seen = {start}
    queue = deque([start])
    while queue:
        j = queue.popleft()
        for idx in succ:
            k = int(idx[j - 1])
            if k not in seen:
                seen.add(k)
                queue.append(k)
    return np.array(sorted(seen), dtype=np.int64)


def allowable_states(model: ModelSpec) -> np.ndarray:
    """Sorted delta indices of the states the chain is confined to."""
    rule = model.restriction
    if rule is None:
        return np.arange(1, model.lattice.size + 1, dtype=np.int64)
    if rule.kind == "footprint":
        states = _reachable(model)
    else:
        states = np.array(sorted({delta_index(model.lattice.validate(s), model.lattice.m) for s in rule.states}),
                          dtype=np.int64)
    if states.size == 0:
        raise ValueError("allowable state set is empty")
    return states


def restrict(M: StochasticMatrix, states) -> StochasticMatrix:
    """Submatrix on ``states`` (full delta indices); the set must be closed."""
    states = np.unique(np.asarray(states, dtype=np.int64))
    if M.index_map is not None:
        raise ValueError("matrix is already restricted")
    if states.size == 0 or states[0] < 1 or states[-1] > M.dim:
        raise ValueError(f"restriction indices must lie in 1..{M.dim}")
    if states.size == M.dim:
        return M
    cols = M.matrix[:, states - 1]
    inside = np.zeros(M.dim, dtype=bool)
    inside[states - 1] = True
    escaped = cols.copy()
    escaped.data = escaped.data * ~inside[escaped.indices]
    escaped.eliminate_zeros()
    leaks = np.flatnonzero(np.diff(escaped.indptr))
    if leaks.size:
        j = int(states[leaks[0]])
        src = state_at(j, M.lattice)
        culprit = "an unknown transition"
        dst = None
        if M.model is not None:
            for t, mt in zip(M.model.transitions, M.model.structure_matrices):
                k = int(mt.col_index[j - 1])
                if t.rate > 0 and not inside[k - 1]:
                    culprit, dst = repr(t.name), state_at(k, M.lattice)
                    break
        where = f" to {dst}" if dst is not None else ""
        raise ClosureError(f"state set is not closed: {culprit} moves {src}{where}, outside the set")
    sub = cols[states - 1, :].tocsc()
    sub.sort_indices()
    return StochasticMatrix(sp.csc_array(sub), M.lattice, states, M.model)


def closed_classes(M: StochasticMatrix) -> int:
    """Number of closed communicating classes; the stationary vector is unique iff this is 1."""
    graph = M.matrix.T.tocsr()  # edge c -> r for M[r, c] > 0
    n_comp, labels = connected_components(graph, directed=True, connection="strong")
    coo = M.matrix.tocoo()
    leaving = labels[coo.row] != labels[coo.col]
    open_ = np.zeros(n_comp, dtype=bool)
    open_[labels[coo.col[leaving]]] = True
    return int(n_comp - open_.sum())


def _power(A: sp.csc_array, tol: float, max_iter: int, window: int = 10) -> tuple[np.ndarray, int, float]:
    # A step of size r only bounds the error by r * rho / (1 - rho), where rho is
    # the contraction rate, so keep going until that estimate is below tol too.
    d = A.shape[0]
    x = np.full(d, 1.0 / d)
    residual = math.inf
    recent: list[float] = []
    for k in range(max_iter + 1):
        y = A @ x
        residual = float(np.abs(y - x).sum())
        if residual <= tol:
            if residual == 0.0:
                return x, k, residual
            ratios = [b / a for a, b in zip(recent, recent[1:]) if a > 0]
            rho = max(ratios) if len(ratios) >= window - 1 else 1.0
            if rho < 1 and residual * rho / (1 - rho) <= tol:
                return x, k, residual
        recent = (recent + [residual])[-window:]
        x = y / y.sum()
    if residual <= tol:
        return x, max_iter, residual
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations "
                           f"(last residual {residual:.3e})", residual, max_iter)


def _direct(A: sp.csc_array, limit: int) -> np.ndarray:
    d = A.shape[0]
    if d > limit:
        raise ValueError(f"direct solve limited to {limit} states, matrix has {d}; use the power method")
    lhs = A.toarray() - np.eye(d)
    lhs[-1, :] = 1.0
    rhs = np.zeros(d)
    rhs[-1] = 1.0
    try:
        x = np.linalg.solve(lhs, rhs)
        if not np.isfinite(x).all():
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        aug = np.vstack([A.toarray() - np.eye(d), np.ones((1, d))])
        x = np.linalg.lstsq(aug, np.r_[np.zeros(d), 1.0], rcond=None)[0]
    x = np.where(x < 0, 0.0, x)
    return x / x.sum()


def steady_state(M: StochasticMatrix, method: str = "power", tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER, dense_limit: int = DENSE_LIMIT) -> Distribution:
    """Stationary vector of ``M`` with ``||M pi - pi||_1 <= tol``.

    ``power`` iterates from the uniform vector until a step changes the
    iterate by at most ``tol`` in 1-norm and the geometric tail estimate of
    the remaining error is below ``tol`` as well; ``direct`` solves
    ``(M - I) pi = 0, sum(pi) = 1`` densely.  Reducible chains are solved too,
    with ``report.unique`` set to False.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    A = M.matrix
    if method == "power":
        pi, iterations, _ = _power(A, tol, max_iter)
    elif method == "direct":
        pi, iterations = _direct(A, dense_limit), 0
    else:
        raise ValueError(f"unknown method {method!r}; expected 'power' or 'direct'")
    pi = pi / pi.sum()
    residual = float(np.abs(A @ pi - pi).sum())
    if residual > tol:
        raise ConvergenceError(f"{method} solve left residual {residual:.3e} > tol {tol:.1e}", residual, iterations)
    report = SolveReport(method, iterations, residual, closed_classes(M) == 1)
    return Distribution(pi, M.lattice, M.index_map, report)


def density_profile(pi: Distribution, lattice: LatticeSpec | None = None) -> np.ndarray:
    """``rho[i-1, j-1]``: probability that site ``j`` holds species ``i``."""
    lattice = lattice or pi.lattice
    if lattice != pi.lattice:
        raise ValueError("distribution belongs to a different lattice")
    digits = digits_table(lattice)[pi.full_indices() - 1]
    rho = np.zeros((lattice.m - 1, lattice.n))
    for species in range(1, lattice.m):
        rho[species - 1] = pi.probs @ (digits == species)
    return rho


def site_current(pi: Distribution, model: ModelSpec) -> dict[str, float]:
    """Stationary probability flux of each transition: ``p(tau) * P(tau changes the state)``."""
    probs = normalize_rates(model)
    idx = pi.full_indices()
    out = {}
    for t, p, mt in zip(model.transitions, probs, model.structure_matrices):
        moved = mt.col_index[idx - 1] != idx
        out[t.name] = float(p * pi.probs[moved].sum())
    return out


def solve_model(model: ModelSpec, method: str = "power", tol: float = DEFAULT_TOL,
                max_iter: int = DEFAULT_MAX_ITER) -> tuple[StochasticMatrix, Distribution]:
    """Assemble, restrict if the model says so, and solve."""
    M = assemble(model)
    if model.restriction is not None:
        M = restrict(M, allowable_states(model))
    return M, steady_state(M, method, tol, max_iter)
