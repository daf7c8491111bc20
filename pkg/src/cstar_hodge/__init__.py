"""Hodge theory for cochain complexes of Hilbert modules over finite-dimensional C*-algebras."""

from .algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    AlgebraShape,
    ShapeMismatch,
    Tolerance,
    alg_is_positive,
    alg_mul,
    alg_norm,
    alg_star,
)
from .builders import (
    InconsistentPlant,
    PlantedComplex,
    SimplicialComplex,
    coboundary_complex,
    group_algebra_shape,
    planted_random_complex,
)
from .hilbert import (
    ModuleElement,
    ModuleSpace,
    QuotientModule,
    Submodule,
    mod_action,
    mod_norm,
    mod_product,
    quotient_norm_check,
    quotient_product,
)
from .hodge import (
    CochainComplex,
    HodgeResult,
    InvalidComplex,
    build_laplacians,
    cohomology,
    decompose_element,
    hodge_decompose,
    kernel_splittings,
)
from .operators import (
    Morphism,
    Parametrix,
    image_projector,
    kernel_projector,
    morph_add,
    morph_adjoint,
    morph_apply,
    morph_compose,
    morph_op_norm,
    morph_scale,
    morph_sub,
    orthogonal_complement,
    spectral_parts,
)

__version__ = "0.1.0"
