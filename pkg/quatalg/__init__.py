from .ahmod import (
    AHModule,
    AHMorphism,
    fingerprint,
    is_semistable,
    is_stable,
    make_ah_module,
    quaternions_module,
    random_stable,
    u_linear,
    x_q,
    y_module,
)
from .exactq import Quaternion, Subspace, annihilator, image, intersect, kernel, rref, span, subspace_sum
from .fueter import delta_split, fueter_kernel, invariant_grades
from .halg import (
    FilteredQuotient,
    GradedAlgebra,
    associated_graded,
    axiom_a_check,
    free_algebra,
    ideal_from_generators,
    quotient_algebra,
)
from .poisson import HLAlgebra, LieAlgebra, hl_from_lie, poisson_on_free, so3, solvable2
from .qtensor import alt_power, check_sequence, elem_tensor, qtensor, qtensor_k, sym_power, tensor_morphism
from .variety import eh_family, emit_equations, jacobian_rank, membership

__all__ = [
    "AHModule", "AHMorphism", "fingerprint", "is_semistable", "is_stable", "make_ah_module",
    "quaternions_module", "random_stable", "u_linear", "x_q", "y_module",
    "Quaternion", "Subspace", "annihilator", "image", "intersect", "kernel", "rref", "span", "subspace_sum",
    "delta_split", "fueter_kernel", "invariant_grades",
    "FilteredQuotient", "GradedAlgebra", "associated_graded", "axiom_a_check", "free_algebra",
    "ideal_from_generators", "quotient_algebra",
    "HLAlgebra", "LieAlgebra", "hl_from_lie", "poisson_on_free", "so3", "solvable2",
    "alt_power", "check_sequence", "elem_tensor", "qtensor", "qtensor_k", "sym_power", "tensor_morphism",
    "eh_family", "emit_equations", "jacobian_rank", "membership",
]
