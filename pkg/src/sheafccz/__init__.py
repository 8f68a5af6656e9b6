"""CSS sheaf codes on cell complexes, cup products, and CCZ certification."""

from .ccz import (
    CCZCode,
    CczLeg,
    TrilinearForm,
    build_logical_tensor,
    certify_ccz,
    cube_form,
    cup_form,
    exhaustive_subrank,
    square_form,
    subrank_lower_bound,
    triorthogonal_report,
)
from .chain import ChainComplex, CSSCode, css_from_complex, distance_bounds, sheaf_cochain_complex
from .complexes import (
    CellComplex,
    CubicalSpec,
    build_cubical,
    build_simplicial,
    cyclic_spec,
    left_right_cayley_s3,
    projective_space_3,
    simplex_boundary,
    torus_triangulation,
)
from .cup import Cochain, leibniz_check, product_complex, simplicial_cup, sum_over_tops
from .duality import verify_exactness, verify_poincare, verify_section_duality
from .gf import FieldSpec, SpMat, entrywise_product, quotient_reps
from .localcode import (
    LinCode,
    dual,
    full_code,
    named_code,
    product_condition,
    reed_solomon,
    repetition_code,
    schur_span,
    tensor_code,
    zero_code,
)
from .sheaf import (
    LocalCodeAssignment,
    Sheaf,
    constant_sheaf,
    cubical_tensor_sheaf,
    directional_assignment,
    dual_sheaf,
    is_locally_acyclic,
    product_sheaf,
    sheaf_from_local_codes,
    uniform_assignment,
    verify_axioms,
)

__version__ = "0.1.0"
