"""JSON run configuration: parsing, validation and the resolved form stored in meta files.

Example::

    {
      "model": {
        "N": 2, "m": 2,
        "transitions": [
          {"kind": "left-entry", "rate": 0.2},
          {"kind": "right-exit", "rate": 0.3},
          {"kind": "hop-right", "site": 1, "rate": 0.5}
        ],
        "restriction": null
      },
      "solver": {"method": "power", "tol": 1e-10, "max_iter": 1000000},
      "simulate": {"steps": 1000000, "burn_in": 1000, "seed": 7, "chains": 1},
      "output": {"directory": "out", "tables": ["steady_state", "densities", "currents"]}
    }

``restriction`` is ``null``, ``{"footprint": r}`` or ``{"states": ["01100", ...]}``.
"""
from __future__ import annotations

import json
import json.decoder
import json.scanner
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .montecarlo import SimConfig
from .states import LatticeSpec, format_state, parse_state
from .steady import DEFAULT_MAX_ITER, DEFAULT_TOL, ModelSpec, Restriction
from .transitions import KINDS, standard_transition

TABLES = ("steady_state", "densities", "currents")
_TRANSITION_KEYS = {"kind", "rate", "name", "site", "species", "jump", "footprint", "head", "direction"}


class ConfigError(ValueError):
    def __init__(self, message: str, path: str = "", line: int | None = None, source: str = ""):
        where = source or "config"
        if line is not None:
            where += f":{line}"
        if path:
            where += f" ({path})"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


def _load_with_lines(text: str) -> tuple[Any, dict[int, int]]:
    """``json.loads`` that also records the starting line of every object."""
    lines: dict[int, int] = {}
    decoder = json.JSONDecoder()
    plain = json.decoder.JSONObject

    def parse_object(s_and_end, *args):
        s, end = s_and_end
        obj, new_end = plain(s_and_end, *args)
        lines[id(obj)] = s.count("\n", 0, end) + 1
        return obj, new_end

    decoder.parse_object = parse_object
    decoder.scan_once = json.scanner.py_make_scanner(decoder)
    return decoder.decode(text), lines


@dataclass(frozen=True)
class SolverConfig:
    method: str = "power"
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    tables: tuple[str, ...] = TABLES


@dataclass(frozen=True, eq=False)
class RunConfig:
    model: ModelSpec
    model_section: dict
    solver: SolverConfig
    simulate: SimConfig | None
    output: OutputConfig

    def resolved(self) -> dict:
        """Fully explicit config; loading it again gives the same run."""
        out = {
            "model": self.model_section,
            "solver": {"method": self.solver.method, "tol": self.solver.tol, "max_iter": self.solver.max_iter},
            "output": {"directory": self.output.directory, "tables": list(self.output.tables)},
        }
        if self.simulate is not None:
            s = self.simulate
            out["simulate"] = {"steps": s.steps, "burn_in": s.burn_in, "seed": s.seed, "chains": s.chains}
        return out


class _Reader:
    def __init__(self, lines: dict[int, int], source: str):
        self.lines = lines
        self.source = source

    def error(self, message: str, path: str, node=None) -> ConfigError:
        return ConfigError(message, path, self.lines.get(id(node)), self.source)

    def section(self, node, path: str, allowed: set[str], required: set[str] = frozenset()) -> dict:
        if not isinstance(node, dict):
            raise self.error("expected an object", path)
        unknown = sorted(set(node) - allowed)
        if unknown:
            raise self.error(f"unknown key(s) {', '.join(map(repr, unknown))}; allowed: {', '.join(sorted(allowed))}",
                             path, node)
        missing = sorted(required - set(node))
        if missing:
            raise self.error(f"missing required key(s) {', '.join(map(repr, missing))}", path, node)
        return node

    def integer(self, node, key, path, parent, minimum=None):
        v = node[key]
        if isinstance(v, bool) or not isinstance(v, int):
            raise self.error(f"{key!r} must be an integer, got {v!r}", f"{path}.{key}", parent)
        if minimum is not None and v < minimum:
            raise self.error(f"{key!r} must be >= {minimum}, got {v}", f"{path}.{key}", parent)
        return v

    def number(self, node, key, path, parent):
        v = node[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise self.error(f"{key!r} must be a finite number, got {v!r}", f"{path}.{key}", parent)
        return float(v)


def _model(r: _Reader, node) -> tuple[ModelSpec, dict]:
    node = r.section(node, "model", {"N", "m", "transitions", "restriction"}, {"N", "transitions"})
    n = r.integer(node, "N", "model", node, 1)
    m = r.integer(node, "m", "model", node, 2) if "m" in node else 2
    try:
        lattice = LatticeSpec(n, m)
    except (ValueError, OverflowError) as exc:
        raise r.error(str(exc), "model", node) from None
    records = node["transitions"]
    if not isinstance(records, list) or not records:
        raise r.error("'transitions' must be a nonempty list", "model.transitions", node)
    transitions, resolved = [], []
    for k, rec in enumerate(records):
        path = f"model.transitions[{k}]"
        rec = r.section(rec, path, _TRANSITION_KEYS, {"kind", "rate"})
        if rec["kind"] not in KINDS:
            raise r.error(f"unknown kind {rec['kind']!r}", f"{path}.kind", rec)
        rate = r.number(rec, "rate", path, rec)
        kwargs = {key: rec[key] for key in ("site", "species", "jump", "footprint", "head", "direction", "name")
                  if key in rec}
        if isinstance(kwargs.get("species"), list):
            kwargs["species"] = tuple(kwargs["species"])
        try:
            t = standard_transition(rec["kind"], lattice, rate, **kwargs)
        except (ValueError, TypeError) as exc:
            raise r.error(str(exc), path, rec) from None
        transitions.append(t)
        entry = {"kind": t.kind, "name": t.name, "rate": rate}
        for key, value in t.params.items():
            entry[key] = list(value) if isinstance(value, tuple) else value
        resolved.append(entry)

    restriction, resolved_restriction = None, None
    rule = node.get("restriction")
    if rule is not None:
        rule = r.section(rule, "model.restriction", {"footprint", "states"})
        if len(rule) != 1:
            raise r.error("restriction takes exactly one of 'footprint' or 'states'", "model.restriction", rule)
        try:
            if "footprint" in rule:
                fp = r.integer(rule, "footprint", "model.restriction", rule, 1)
                restriction = Restriction("footprint", footprint=fp)
                resolved_restriction = {"footprint": fp}
            else:
                states = rule["states"]
                if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
                    raise ValueError("'states' must be a list of digit strings")
                parsed = tuple(parse_state(s, lattice) for s in states)
                restriction = Restriction("explicit", states=parsed)
                resolved_restriction = {"states": [format_state(s) for s in parsed]}
        except ValueError as exc:
            raise r.error(str(exc), "model.restriction", rule) from None
    try:
        model = ModelSpec(lattice, tuple(transitions), restriction)
    except ValueError as exc:
        raise r.error(str(exc), "model", node) from None
    return model, {"N": n, "m": m, "transitions": resolved, "restriction": resolved_restriction}


def parse_config(data, lines: dict[int, int] | None = None, source: str = "config") -> RunConfig:
    r = _Reader(lines or {}, source)
    top = r.section(data, "", {"model", "solver", "simulate", "output"}, {"model"})
    model, model_section = _model(r, top["model"])

    solver = SolverConfig()
    if top.get("solver") is not None:
        node = r.section(top["solver"], "solver", {"method", "tol", "max_iter"})
        method = node.get("method", solver.method)
        if method not in ("power", "direct"):
            raise r.error(f"method must be 'power' or 'direct', got {method!r}", "solver.method", node)
        tol = r.number(node, "tol", "solver", node) if "tol" in node else solver.tol
        if tol <= 0:
            raise r.error("tol must be positive", "solver.tol", node)
        max_iter = r.integer(node, "max_iter", "solver", node, 1) if "max_iter" in node else solver.max_iter
        solver = SolverConfig(method, tol, max_iter)

    simulate = None
    if top.get("simulate") is not None:
        node = r.section(top["simulate"], "simulate", {"steps", "burn_in", "seed", "chains"}, {"steps"})
        fields = {k: r.integer(node, k, "simulate", node) for k in ("steps", "burn_in", "seed", "chains") if k in node}
        try:
            simulate = SimConfig(**fields)
        except ValueError as exc:
            raise r.error(str(exc), "simulate", node) from None

    output = OutputConfig()
    if top.get("output") is not None:
        node = r.section(top["output"], "output", {"directory", "tables"})
        directory = node.get("directory", output.directory)
        if not isinstance(directory, str) or not directory:
            raise r.error("'directory' must be a nonempty string", "output.directory", node)
        tables = node.get("tables", list(TABLES))
        if not isinstance(tables, list) or not set(tables) <= set(TABLES):
            raise r.error(f"'tables' must be a list drawn from {', '.join(TABLES)}", "output.tables", node)
        output = OutputConfig(directory, tuple(t for t in TABLES if t in tables))

    return RunConfig(model, model_section, solver, simulate, output)


def loads_config(text: str, source: str = "config") -> RunConfig:
    try:
        data, lines = _load_with_lines(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (column {exc.colno})", line=exc.lineno, source=source) from None
    return parse_config(data, lines, source)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", source=str(path)) from None
    return loads_config(text, str(path))
