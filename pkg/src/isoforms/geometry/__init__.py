from .groups import FiniteMobiusGroup, GroupTypeTag, canonical_group, closure
from .mobius import AntiMobiusMap, MobiusMap
from .polyhedra import MobiusPolyhedron, canonical_polyhedron, embed
from .sphere import INFINITY, PointMultiset, SpherePoint

__all__ = [
    "INFINITY",
    "AntiMobiusMap",
    "FiniteMobiusGroup",
    "GroupTypeTag",
    "MobiusMap",
    "MobiusPolyhedron",
    "PointMultiset",
    "SpherePoint",
    "canonical_group",
    "canonical_polyhedron",
    "closure",
    "embed",
]
