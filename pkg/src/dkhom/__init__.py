"""Exact integer homology of abelian presheaves on shape categories.

Shape categories (simplices, cubes, globes, wreath products), abelian
presheaves with free values, orientations and integrators, homology of
presheaves and small categories over Z, and the strict Dold-Kan
correspondences with their cross-checks.
"""

from .intlinalg import FgAbGroup, IntMatrix, homology_group, smith_normal_form
from .chains import (
    ChainComplex,
    ChainHomotopy,
    ChainMap,
    DoubleComplex,
    chain_map_group,
    make_complex,
    tensor,
    total_complex,
    verify_chain_map,
    verify_homotopy,
)
from .shapecat import Morphism, ShapeCategory, SetPresheaf, make_category, nerve
from .presheaf import (
    AbPresheaf,
    FormalMatrix,
    FormalSum,
    addinf_eval,
    constant_z,
    free_abelianization,
    representable,
    restrict,
)
from .integrators import (
    Integrator,
    Orientation,
    bousfield_kan,
    free_integrator,
    normalized_integrator,
    product_integrator,
    slice_integrator,
    theta_integrator,
    verify_asphericity,
    verify_orientation,
    xi_contraction,
)
from .homology import (
    category_homology,
    cohomology,
    compare_integrators,
    hyperhomology,
    nerve_homology,
    presheaf_complex,
    right_adjoint_presheaf,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
