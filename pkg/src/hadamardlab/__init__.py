"""Computational experiments in nonpositively curved geometry.

The package builds concrete model spaces (flat, hyperbolic, trees, SPD
matrices, and their products), checks the comparison inequalities that
characterise nonpositive curvature, and runs the constructions that those
inequalities make possible: circumcentres, barycentres, nearest-point
projections, fixed points of non-expanding maps, evanescence probes for
group actions, finite L2 spaces with induced lattice actions, and the
product-splitting experiment pipeline.  A JSON scenario harness drives the
whole zoo reproducibly from the command line.
"""

__version__ = "0.1.0"

from .metric_core import (
    DEFECT_TOL,
    DefectReport,
    GeodesicSegment,
    Point,
    check_cn,
    check_reshetnyak,
    distance,
    geodesic_point,
    segment,
)
from .spaces import (
    EuclideanSpace,
    HyperbolicSpace,
    Isometry,
    ModelSpace,
    ProductSpace,
    SPDSpace,
    TreeSpace,
    apply_isometry,
    builtin_space,
    builtin_space_names,
    make_space,
    product_space_project,
    rotation_about,
    space_from_descriptor,
)

__all__ = [
    "DEFECT_TOL",
    "DefectReport",
    "EuclideanSpace",
    "GeodesicSegment",
    "HyperbolicSpace",
    "Isometry",
    "ModelSpace",
    "Point",
    "ProductSpace",
    "SPDSpace",
    "TreeSpace",
    "__version__",
    "apply_isometry",
    "builtin_space",
    "builtin_space_names",
    "check_cn",
    "check_reshetnyak",
    "distance",
    "geodesic_point",
    "make_space",
    "product_space_project",
    "rotation_about",
    "segment",
    "space_from_descriptor",
]
