"""finorbit: orbit enumeration on representation varieties of free and
surface groups, with exact homology decompositions and machine-checked
image-finiteness certificates."""

from .autos import (
    Automorphism,
    Endo,
    braid_generators,
    compose,
    get_catalog,
    induced_h1,
    inner_automorphism,
    nielsen_generators,
    surface_mcg_generators,
)
from .certify import (
    Certificate,
    braid_invariant_check,
    central_extension_data,
    certify,
    check_certificate,
    exponent_sum_hom,
    induced_central_map,
    isotypic_kernel_step,
    stabilizer_coinvariants_step,
)
from .linalg import (
    AbelianInvariants,
    IntMatrix,
    SNFResult,
    averaging_projector,
    coinvariants,
    fixed_subspace,
    is_symplectic,
    snf,
)
from .orbits import (
    Homomorphism,
    OrbitResult,
    StabilizerData,
    apply_to_hom,
    enumerate_homs,
    export_orbit_dot,
    fixed_points,
    orbit,
    orbit_partition,
    stabilizer_generators,
)
from .subgroups import (
    CosetTable,
    FiniteQuotient,
    SubgroupHomology,
    characteristic_core,
    coset_table,
    cw_character,
    cw_verify,
    finite_quotient,
    rewrite,
    subgroup_homology,
    transfer_map,
)
from .targets import (
    FiniteAbelianGroup,
    FreeAbelianGroup,
    HeisenbergGroup,
    MatrixGroup,
    SubgroupClosure,
    SymmetricGroup,
    TargetGroup,
    center,
    closure,
    element_order,
    parse_target,
    quotient_map_to_finite,
)
from .words import (
    EMPTY,
    FreeWord,
    Presentation,
    conjugate_in_free,
    cyclic_reduce,
    evaluate,
    free_presentation,
    reduce,
    surface_presentation,
    surface_relator,
    word,
)

__version__ = "0.1.0"
