"""Model space construction, registry, and serialisation.

``make_space`` builds a space from a descriptor dict and immediately runs a
short curvature self-test (one hundred random comparison checks) so that a
mis-entered tree or a bad metric surfaces at construction, not deep inside
an experiment.  The registry names the curated desk-scale spaces the fuzz
campaigns run on.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import ConstructionError, DomainError
from ..metric_core import DEFECT_TOL, check_cn
from .base import Isometry, ModelSpace, apply_isometry
from .euclidean import EuclideanSpace, rotation_about
from .hyperbolic import HyperbolicSpace
from .product import ProductSpace, product_space_project
from .spd import SPDSpace
from .tree import TreeSpace

__all__ = [
    "EuclideanSpace",
    "HyperbolicSpace",
    "Isometry",
    "ModelSpace",
    "ProductSpace",
    "SPDSpace",
    "TreeSpace",
    "apply_isometry",
    "builtin_space",
    "builtin_space_names",
    "make_space",
    "product_space_project",
    "rotation_about",
    "space_from_descriptor",
]

_SELFTEST_TRIALS = 100
_SELFTEST_SEED = 8128


def space_from_descriptor(descriptor: dict) -> ModelSpace:
    """Build a space from its descriptor without the curvature self-test."""
    if not isinstance(descriptor, dict) or "kind" not in descriptor:
        raise DomainError(f"not a space descriptor: {descriptor!r}")
    kind = descriptor["kind"]
    if kind == "euclidean":
        return EuclideanSpace(int(descriptor["dim"]))
    if kind == "hyperbolic":
        return HyperbolicSpace(int(descriptor["dim"]))
    if kind == "tree":
        return TreeSpace([tuple(e) for e in descriptor["edges"]])
    if kind == "spd":
        return SPDSpace(int(descriptor["size"]))
    if kind == "product":
        factors = [space_from_descriptor(d) for d in descriptor["factors"]]
        return ProductSpace(factors, descriptor.get("weights"))
    raise DomainError(f"unknown space kind {kind!r}")


def make_space(descriptor: dict) -> ModelSpace:
    """Build a space and self-test it with random comparison checks."""
    space = space_from_descriptor(descriptor)
    rng = np.random.default_rng(_SELFTEST_SEED)
    for _ in range(_SELFTEST_TRIALS):
        x = space.random_point(rng, 1.0)
        c = space.random_point(rng, 1.0)
        cp = space.random_point(rng, 1.0)
        report = check_cn(space, x, c, cp)
        if not report.passed(DEFECT_TOL):
            raise ConstructionError(
                f"space {space.space_id} failed its curvature self-test "
                f"(defect {report.defect:.3e})"
            )
    return space


_TRIPOD = {"kind": "tree", "edges": [["o", "a", 1.0], ["o", "b", 1.0], ["o", "c", 1.0]]}

_BUILTIN = {
    "euclidean-2": {"kind": "euclidean", "dim": 2},
    "euclidean-3": {"kind": "euclidean", "dim": 3},
    "hyperbolic-2": {"kind": "hyperbolic", "dim": 2},
    # three curated trees: a tripod, an uneven path, and a caterpillar
    "tree-tripod": _TRIPOD,
    "tree-path": {
        "kind": "tree",
        "edges": [["a", "b", 0.5], ["b", "c", 1.5], ["c", "d", 1.0], ["d", "e", 2.0]],
    },
    "tree-caterpillar": {
        "kind": "tree",
        "edges": [
            ["s0", "s1", 1.0],
            ["s1", "s2", 1.0],
            ["s2", "s3", 1.0],
            ["s1", "l1", 0.75],
            ["s2", "l2", 1.25],
        ],
    },
    "spd-2": {"kind": "spd", "size": 2},
    "product-plane": {
        "kind": "product",
        "factors": [{"kind": "euclidean", "dim": 1}, {"kind": "euclidean", "dim": 1}],
    },
    "product-tripod-line": {
        "kind": "product",
        "factors": [_TRIPOD, {"kind": "euclidean", "dim": 1}],
    },
}


def builtin_space_names() -> list[str]:
    return sorted(_BUILTIN)


def builtin_space(name: str) -> ModelSpace:
    if name not in _BUILTIN:
        raise DomainError(f"unknown builtin space {name!r}; known: {builtin_space_names()}")
    return make_space(_BUILTIN[name])


def builtin_descriptor(name: str) -> dict:
    if name not in _BUILTIN:
        raise DomainError(f"unknown builtin space {name!r}; known: {builtin_space_names()}")
    return dict(_BUILTIN[name])
