"""Scenario files: schema, loading, and descriptor builders.

A scenario is a JSON object tying a space descriptor, optional action
descriptors, one task name, task parameters, a seed, and tolerance
overrides.  ``schema_version`` is mandatory; loading validates against a
JSON schema and reports the offending field on failure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping

import jsonschema

from ..actions import IsometryRep
from ..spaces import builtin_space_names, builtin_descriptor, make_space
from ..spaces.base import Isometry, ModelSpace
from ..spaces.euclidean import EuclideanSpace, rotation_about
from ..spaces.product import ProductSpace
from ..spaces.tree import TreeSpace

SCHEMA_VERSION = 1

TASK_NAMES = (
    "axioms", "circumcenter", "barycenter", "evanescence",
    "induce", "average", "split", "sqint",
)


class ScenarioError(Exception):
    """Scenario file rejected: parse failure or schema violation."""


_ISOMETRY_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["identity", "payload", "affine", "rotation",
                          "tree_automorphism", "factorwise"]},
        "data": {},
        "matrix": {"type": "array"},
        "offset": {"type": "array"},
        "angle": {"type": "number"},
        "center": {"type": "array"},
        "vertex_map": {"type": "object"},
        "parts": {"type": "array"},
    },
    "required": ["kind"],
}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "task": {"enum": list(TASK_NAMES)},
        "space": {
            "type": "object",
            "properties": {
                "builtin": {"enum": builtin_space_names()},
                "kind": {"type": "string"},
            },
        },
        "actions": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "generators": {
                        "type": "object",
                        "minProperties": 1,
                        "additionalProperties": _ISOMETRY_SCHEMA,
                    },
                    "word_cap": {"type": "integer", "minimum": 1},
                },
                "required": ["generators"],
            },
        },
        "params": {"type": "object"},
        "seed": {"type": "integer", "minimum": 0},
        "tolerances": {
            "type": "object",
            "additionalProperties": {"type": "number"},
        },
    },
    "required": ["schema_version", "task", "space", "seed"],
    "additionalProperties": False,
}


@dataclass
class Scenario:
    """Validated scenario: everything a task runner needs."""

    task: str
    space: ModelSpace
    space_descriptor: dict
    actions: list
    params: dict
    seed: int
    tolerances: dict
    name: str = ""
    raw: dict = field(default_factory=dict)

    def tol(self, key: str, default: float) -> float:
        return float(self.tolerances.get(key, default))


def build_space(descriptor: Mapping[str, Any]) -> ModelSpace:
    if "builtin" in descriptor:
        return make_space(builtin_descriptor(descriptor["builtin"]))
    return make_space(dict(descriptor))


def build_isometry(space: ModelSpace, desc: Mapping[str, Any]) -> Isometry:
    """Isometry from a JSON descriptor; the payload route covers any space."""
    kind = desc["kind"]
    if kind == "identity":
        return space.identity_isometry()
    if kind == "payload":
        return space.make_isometry(space._payload_from_jsonable(desc["data"]))
    if kind == "affine":
        if not isinstance(space, EuclideanSpace):
            raise ScenarioError("affine isometries need a euclidean space")
        return space.make_isometry(space._payload_from_jsonable(
            {"matrix": desc["matrix"], "offset": desc["offset"]}))
    if kind == "rotation":
        if not isinstance(space, EuclideanSpace):
            raise ScenarioError("rotations need a euclidean space")
        return rotation_about(space, float(desc["angle"]),
                              [float(v) for v in desc.get("center", [0.0, 0.0])])
    if kind == "tree_automorphism":
        if not isinstance(space, TreeSpace):
            raise ScenarioError("vertex maps need a tree space")
        return space.make_isometry(dict(desc["vertex_map"]))
    if kind == "factorwise":
        if not isinstance(space, ProductSpace):
            raise ScenarioError("factorwise isometries need a product space")
        parts = [build_isometry(f, d)
                 for f, d in zip(space.factors, desc["parts"], strict=True)]
        return space.factorwise_isometry(parts)
    raise ScenarioError(f"unknown isometry kind {kind!r}")


def build_rep(space: ModelSpace, action_desc: Mapping[str, Any]) -> IsometryRep:
    gens = {name: build_isometry(space, d)
            for name, d in action_desc["generators"].items()}
    return IsometryRep(space, gens, word_cap=int(action_desc.get("word_cap", 8)))


def parse_scenario(data: Mapping[str, Any]) -> Scenario:
    """Validate an already-parsed JSON object and build the live pieces."""
    if not isinstance(data, dict) or "schema_version" not in data:
        raise ScenarioError("schema violation at $.schema_version: field is mandatory")
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ScenarioError(f"schema violation at {e.json_path}: {e.message}")
    try:
        space = build_space(data["space"])
        actions = [build_rep(space, a) for a in data.get("actions", [])]
    except ScenarioError:
        raise
    except Exception as exc:
        raise ScenarioError(f"descriptor rejected: {exc}") from exc
    return Scenario(
        task=data["task"],
        space=space,
        space_descriptor=dict(data["space"]),
        actions=actions,
        params=dict(data.get("params", {})),
        seed=int(data["seed"]),
        tolerances=dict(data.get("tolerances", {})),
        name=str(data.get("name", "")),
        raw=dict(data),
    )


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(
            f"malformed JSON in {path} at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc
    return parse_scenario(data)
