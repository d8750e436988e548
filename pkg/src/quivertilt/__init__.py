"""quivertilt: exact computation with bound quiver algebras and their modules.

Builds finite-dimensional algebras kQ/I over a prime field, computes modules,
Hom spaces, projective presentations and approximation towers, works with
bounded complexes of projectives in the homotopy category, and decides the
tilting/silting-type predicates those structures support.
"""

from .linalg import KERNEL_NAME, Matrix
from .algebra import Algebra, Quiver, build_algebra
from .modules import Module, ModuleMap

# the census and classify entry points live in the submodules of the same
# name; re-exporting the functions here would shadow those modules
from .census import Census
from .classify import ClassReport

__all__ = [
    "KERNEL_NAME",
    "Matrix",
    "Quiver",
    "Algebra",
    "build_algebra",
    "Module",
    "ModuleMap",
    "Census",
    "ClassReport",
]
