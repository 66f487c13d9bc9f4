"""Reading configs and writing CSV/JSON outputs.

Complex numbers travel through JSON as ``[re, im]`` pairs; plain numbers are
accepted on input.  CSV floats use ``repr`` so identical inputs give
byte-identical files.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .disorder import DisorderConfig
from .errors import ConfigError
from .fdm import FdmConfig
from .interface import InterfaceSpec
from .resonators import ResonatorChain
from .symbol import UnitCell


def parse_complex(value: Any, name: str = "value") -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in value):
        return complex(value[0], value[1])
    raise ConfigError(f"{name} must be a number or an [re, im] pair, got {value!r}")


def parse_complex_list(values: Any, name: str) -> np.ndarray:
    if not isinstance(values, list) or not values:
        raise ConfigError(f"{name} must be a non-empty list")
    return np.array([parse_complex(v, f"{name}[{i}]") for i, v in enumerate(values)])


def complex_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _require(data: Mapping, key: str) -> Any:
    if key not in data:
        raise ConfigError(f"missing required field {key!r}")
    return data[key]


def unit_cell_from_json(data: Mapping) -> UnitCell:
    a = parse_complex_list(_require(data, "a"), "a")
    b = parse_complex_list(_require(data, "b"), "b")
    c = parse_complex_list(data["c"], "c") if "c" in data else b
    if "k" in data and data["k"] != a.size:
        raise ConfigError(f"k = {data['k']} does not match len(a) = {a.size}")
    try:
        return UnitCell(a, b, c)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def unit_cell_to_json(cell: UnitCell) -> dict:
    return {"k": cell.k, "a": [complex_pair(x) for x in cell.a],
            "b": [complex_pair(x) for x in cell.b], "c": [complex_pair(x) for x in cell.c]}


def interface_spec_from_json(data: Mapping) -> InterfaceSpec:
    cell = unit_cell_from_json(data)
    kind = _require(data, "kind")
    q = parse_complex(_require(data, "q"), "q")
    if kind == "shared_site":
        eta = parse_complex(_require(data, "eta"), "eta")
        s = parse_complex(data.get("s", data["q"]), "s")
    else:
        eta, s = 0j, q
    return InterfaceSpec(cell, kind, eta, q, s)


def interface_spec_to_json(spec: InterfaceSpec) -> dict:
    out = unit_cell_to_json(spec.cell)
    out.update(kind=spec.kind, eta=complex_pair(spec.eta), q=complex_pair(spec.q),
               s=complex_pair(spec.s))
    return out


def chain_from_json(data: Mapping) -> ResonatorChain:
    try:
        v = complex(float(data.get("v_re", 1.0)), float(data.get("v_im", 0.0)))
        return ResonatorChain(int(_require(data, "m")), float(_require(data, "s1")),
                              float(_require(data, "s2")), v, float(data.get("delta", 1e-3)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad resonator chain config: {exc}") from exc


def chain_to_json(chain: ResonatorChain) -> dict:
    return {"m": chain.m, "s1": chain.s1, "s2": chain.s2, "v_re": chain.v_b.real,
            "v_im": chain.v_b.imag, "delta": chain.delta}


def disorder_from_json(data: Mapping, seed: int | None = None) -> DisorderConfig:
    a = parse_complex_list(_require(data, "base_a"), "base_a")
    b = parse_complex_list(_require(data, "base_b"), "base_b")
    d = float(_require(data, "d"))
    use_seed = int(data.get("seed", 0)) if seed is None else int(seed)
    trials = int(data.get("trials", 1))
    if "n" in data:
        return DisorderConfig.from_size(a, b, d, int(data["n"]), use_seed, trials)
    return DisorderConfig(a, b, d, int(_require(data, "m")), use_seed, trials)


def fdm_from_json(data: Mapping) -> FdmConfig:
    try:
        return FdmConfig(int(_require(data, "k")), float(data.get("eps_inside", 10.0)),
                         float(data.get("eps_outside", 1.0)), float(data.get("mu0", 1.0)),
                         tuple(tuple(iv) for iv in data.get("intervals",
                                                            [[0.2, 0.45], [0.55, 0.8]])))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad FDM config: {exc}") from exc


def load_json(path: str | Path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return data


def _fmt(x: Any) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return str(x)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
    return path


def read_csv(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_json(path: str | Path, data: Any) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
    return path
