import sys
from pathlib import Path

import pytest

from stpx.states import LatticeSpec
from stpx.steady import ModelSpec
from stpx.transitions import standard_transition, tasep

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def kind_instances(lattice: LatticeSpec):
    """Every valid (kind, kwargs) pair of the standard catalogue on ``lattice``."""
    N, m = lattice.n, lattice.m
    out = [("identity", {})]
    if m == 2:
        out += [("left-entry", {}), ("right-entry", {}), ("left-exit", {}), ("right-exit", {})]
        for i in range(1, N + 1):
            out += [("attach", {"site": i}), ("detach", {"site": i})]
            if i < N:
                out.append(("hop-right", {"site": i}))
            if i > 1:
                out.append(("hop-left", {"site": i}))
            for l in range(1 - i, N - i + 1):
                if l:
                    out.append(("long-range-hop", {"site": i, "jump": l}))
        if N >= 2:
            out += [("periodic-wrap-hop", {"direction": "right"}), ("periodic-wrap-hop", {"direction": "left"})]
        for r in range(1, N + 1):
            out += [("footprint-entry", {"footprint": r}), ("footprint-exit", {"footprint": r})]
            for head in range(r, N):
                out.append(("footprint-hop", {"footprint": r, "head": head}))
    else:
        for k in range(1, m):
            out += [("species-entry", {"species": k}), ("species-exit", {"species": k})]
            for i in range(1, N + 1):
                out += [("species-attach", {"species": k, "site": i}), ("species-detach", {"species": k, "site": i})]
                if i < N:
                    out.append(("species-hop", {"species": k, "site": i}))
                    for k2 in range(1, m):
                        if k2 != k:
                            out.append(("switch", {"species": (k, k2), "site": i}))
        out += [("generic-hop", {"site": i}) for i in range(1, N)]
    return out


def five_species_model(hop_split: bool = False, scale: float = 1.0) -> ModelSpec:
    L = LatticeSpec(5, 6)
    ts = [standard_transition("species-entry", L, scale * 50 * i / 3, species=i) for i in range(1, 6)]
    ts += [standard_transition("species-exit", L, scale * 50 * i / 3, species=i) for i in range(1, 6)]
    if hop_split:
        ts += [standard_transition("species-hop", L, scale, species=k, site=j) for j in range(1, 5) for k in range(1, 6)]
    else:
        ts += [standard_transition("generic-hop", L, scale, site=j) for j in range(1, 5)]
    return ModelSpec(L, ts)


@pytest.fixture
def tasep2() -> ModelSpec:
    L = LatticeSpec(2, 2)
    return ModelSpec(L, tasep(L, 0.2, 0.3, 0.5))


@pytest.fixture
def tasep3() -> ModelSpec:
    L = LatticeSpec(3, 2)
    return ModelSpec(L, tasep(L, 1.0, 1.0, 1.0))


@pytest.fixture(scope="session")
def five_species():
    return five_species_model()


def pytest_terminal_summary(terminalreporter):
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
