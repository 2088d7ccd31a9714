"""cubeporos: exact dyadic-lattice analytics for porous sets.

Finite-truncation, exact-arithmetic measurement of porosity constants,
Carleson packing constants, disjoint free-cube witnesses, weighted-measure
enclosures, Aikawa-Assouad codimension estimates, corner-set inversion and
gamma-neighborhood families.
"""

__version__ = "0.1.0"

from .enclosure import RatInterval, pow2_enclosure, pow_enclosure
from .errors import (AlphaOutOfRange, CubeporosError, DimensionMismatch,
                     EmptyFamilyError, EmptySetError, NotParentClosed,
                     PorosityFailure, RootHasNoParent, RootIsFree,
                     UnresolvedMeasure)
from .families import (CubeFamily, FreeDecomposition, enumerate_DE,
                       enumerate_Dgamma, enumerate_FE)
from .lattice import (Box, DyadicCube, Relation, children, dilate, linf_dist,
                      parent, relate)
from .sets import (EmptyModel, IFSModel, PointsModel, SetModel, Status,
                   UnionModel, cantor_middle_thirds, corner_set)

__all__ = [
    "AlphaOutOfRange", "Box", "CubeFamily", "CubeporosError", "DimensionMismatch",
    "DyadicCube", "EmptyFamilyError", "EmptyModel", "EmptySetError",
    "FreeDecomposition", "IFSModel", "NotParentClosed", "PointsModel",
    "PorosityFailure", "RatInterval", "Relation", "RootHasNoParent", "RootIsFree",
    "SetModel", "Status", "UnionModel", "UnresolvedMeasure",
    "cantor_middle_thirds", "children", "corner_set", "dilate", "enumerate_DE",
    "enumerate_Dgamma", "enumerate_FE", "linf_dist", "parent", "pow2_enclosure",
    "pow_enclosure", "relate",
]
