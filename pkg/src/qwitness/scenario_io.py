"""JSON encoding of witness scenarios.

Top-level object::

    {
      "dim": 3,
      "initial": {"state_vector": [[re, im], ...]}
                 or {"density": [[[re, im], ...], ...]},
      "blind":   [{"basis_indices": [0, 1]} or {"matrix": ...}, ...],
      "channel": {"type": "identity"}
                 | {"type": "unitary", "matrix": ...}
                 | {"type": "hamiltonian", "matrix": ..., "time": t}
                 | {"type": "kraus", "matrices": [...]},
      "final":   {"basis_indices": [0]} or {"matrix": ...}
    }

Matrices are dim x dim nested lists of [re, im] pairs; every number is an
IEEE double serialized as a JSON number (NaN and Infinity are rejected).
Structural problems raise SchemaError carrying the JSON pointer of the
offending node; physically invalid but well-formed content raises
InvariantViolation from the witness types instead.
"""

from __future__ import annotations

import json

import numpy as np

from .witness import (
    Channel,
    DensityMatrix,
    MeasurementSet,
    WitnessScenario,
    basis_projector,
)


class SchemaError(ValueError):
    """Malformed scenario JSON; ``pointer`` locates the offending node."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{message} (at {pointer or '/'})")
        self.pointer = pointer


def _want_object(node, ptr):
    if not isinstance(node, dict):
        raise SchemaError(ptr, f"expected a JSON object, got {type(node).__name__}")
    return node


def _want_list(node, ptr, length=None):
    if not isinstance(node, list):
        raise SchemaError(ptr, f"expected a JSON array, got {type(node).__name__}")
    if length is not None and len(node) != length:
        raise SchemaError(ptr, f"expected {length} elements, got {len(node)}")
    return node


def _want_number(node, ptr) -> float:
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise SchemaError(ptr, f"expected a number, got {type(node).__name__}")
    return float(node)


def _want_int(node, ptr) -> int:
    if isinstance(node, bool) or not isinstance(node, int):
        raise SchemaError(ptr, f"expected an integer, got {type(node).__name__}")
    return node


def _complex_entry(node, ptr) -> complex:
    pair = _want_list(node, ptr, length=2)
    return complex(_want_number(pair[0], f"{ptr}/0"), _want_number(pair[1], f"{ptr}/1"))


def _vector(node, ptr, dim) -> np.ndarray:
    rows = _want_list(node, ptr, length=dim)
    return np.array([_complex_entry(r, f"{ptr}/{i}") for i, r in enumerate(rows)])


def _matrix(node, ptr, dim) -> np.ndarray:
    rows = _want_list(node, ptr, length=dim)
    return np.array(
        [_vector(row, f"{ptr}/{i}", dim) for i, row in enumerate(rows)]
    )


def _projector(node, ptr, dim) -> np.ndarray:
    node = _want_object(node, ptr)
    has_idx = "basis_indices" in node
    has_mat = "matrix" in node
    if has_idx == has_mat:
        raise SchemaError(
            ptr, "projector needs exactly one of 'basis_indices' or 'matrix'"
        )
    if has_idx:
        raw = _want_list(node["basis_indices"], f"{ptr}/basis_indices")
        idx = [
            _want_int(v, f"{ptr}/basis_indices/{i}") for i, v in enumerate(raw)
        ]
        for i, v in enumerate(idx):
            if not 0 <= v < dim:
                raise SchemaError(
                    f"{ptr}/basis_indices/{i}", f"index {v} outside [0, {dim})"
                )
        return basis_projector(dim, idx)
    return _matrix(node["matrix"], f"{ptr}/matrix", dim)


def scenario_from_json(obj) -> WitnessScenario:
    """Build a validated WitnessScenario from a decoded JSON object."""
    obj = _want_object(obj, "")
    for key in ("dim", "initial", "blind", "channel", "final"):
        if key not in obj:
            raise SchemaError(f"/{key}", f"missing required field '{key}'")
    dim = _want_int(obj["dim"], "/dim")
    if dim < 2:
        raise SchemaError("/dim", f"dimension must be at least 2, got {dim}")

    initial_node = _want_object(obj["initial"], "/initial")
    if ("state_vector" in initial_node) == ("density" in initial_node):
        raise SchemaError(
            "/initial", "initial needs exactly one of 'state_vector' or 'density'"
        )
    if "state_vector" in initial_node:
        vec = _vector(initial_node["state_vector"], "/initial/state_vector", dim)
        initial = DensityMatrix.from_state_vector(vec)
    else:
        initial = DensityMatrix(_matrix(initial_node["density"], "/initial/density", dim))

    blind_node = _want_list(obj["blind"], "/blind")
    projectors = [
        _projector(p, f"/blind/{i}", dim) for i, p in enumerate(blind_node)
    ]
    if len(projectors) < 2:
        raise SchemaError("/blind", "blind measurement needs at least 2 projectors")
    blind = MeasurementSet(tuple(projectors))

    channel_node = _want_object(obj["channel"], "/channel")
    ctype = channel_node.get("type")
    if ctype == "identity":
        channel = Channel.identity(dim)
    elif ctype == "unitary":
        if "matrix" not in channel_node:
            raise SchemaError("/channel/matrix", "unitary channel needs 'matrix'")
        channel = Channel.unitary(_matrix(channel_node["matrix"], "/channel/matrix", dim))
    elif ctype == "hamiltonian":
        if "matrix" not in channel_node:
            raise SchemaError("/channel/matrix", "hamiltonian channel needs 'matrix'")
        if "time" not in channel_node:
            raise SchemaError("/channel/time", "hamiltonian channel needs 'time'")
        channel = Channel.hamiltonian(
            _matrix(channel_node["matrix"], "/channel/matrix", dim),
            _want_number(channel_node["time"], "/channel/time"),
        )
    elif ctype == "kraus":
        if "matrices" not in channel_node:
            raise SchemaError("/channel/matrices", "kraus channel needs 'matrices'")
        mats_node = _want_list(channel_node["matrices"], "/channel/matrices")
        if not mats_node:
            raise SchemaError("/channel/matrices", "kraus channel needs at least one matrix")
        mats = [
            _matrix(mnode, f"/channel/matrices/{i}", dim)
            for i, mnode in enumerate(mats_node)
        ]
        channel = Channel.kraus(mats)
    else:
        raise SchemaError(
            "/channel/type",
            f"channel type must be identity|unitary|hamiltonian|kraus, got {ctype!r}",
        )

    final = _projector(obj["final"], "/final", dim)
    return WitnessScenario(
        initial=initial, blind=blind, channel=channel, final_projector=final
    )


def _reject_constant(name):
    raise SchemaError("", f"non-finite number {name} is not allowed")


def read_scenario(path) -> WitnessScenario:
    """Load and validate a scenario JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise SchemaError("", f"invalid JSON: {exc}") from exc
    return scenario_from_json(obj)


def _matrix_to_json(mat: np.ndarray):
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat)]


def scenario_to_json(s: WitnessScenario) -> dict:
    """Serialize a scenario back into the JSON schema (matrix encodings)."""
    channel: dict = {"type": s.channel.kind}
    if s.channel.kind == "unitary":
        channel["matrix"] = _matrix_to_json(s.channel.operators[0])
    elif s.channel.kind == "hamiltonian":
        channel["matrix"] = _matrix_to_json(s.channel.generator)
        channel["time"] = s.channel.time
    elif s.channel.kind == "kraus":
        channel = {
            "type": "kraus",
            "matrices": [_matrix_to_json(k) for k in s.channel.operators],
        }
    return {
        "dim": s.dim,
        "initial": {"density": _matrix_to_json(s.initial.matrix)},
        "blind": [{"matrix": _matrix_to_json(p)} for p in s.blind.projectors],
        "channel": channel,
        "final": {"matrix": _matrix_to_json(s.final_projector)},
    }
