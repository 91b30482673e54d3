"""Numerical and combinatorial workbench for one-form slit domains, moduli
tree strata, composition sign identities, finite multilinear algebra, chord
spectra, and Lagrangian path grading."""

from .ainfty import (
    AInftyCategory,
    AInftyFunctor,
    AInftyHomotopy,
    build_morse_bott_complex,
    compose_functors,
    functor_relation_terms,
    homotopy_relation_terms,
    verify_ainfty,
    verify_functor,
    verify_homotopy,
)
from .errors import (
    DegenerateCrossing,
    FloerbenchError,
    InvalidArity,
    InvalidInput,
    NumericFailure,
    OrderDegenerate,
    SingularPoint,
    UnbalancedWeights,
    WeightMismatch,
)
from .grading import (
    LagrangianFrame,
    SymplecticPath,
    chord_index,
    robbin_salamon_index,
)
from .signs import revalidate_counterexample, verify_identity
from .slit import (
    build_slit_map,
    glue_slit_maps,
    gluing_residual,
    invert_slit_params,
    verify_beta_conditions,
)
from .spectra import (
    action_gap,
    cylindrical_adjust,
    enumerate_chords_T2,
    enumerate_chords_T3,
    hamiltonian_vector_field,
    lipschitz_constant,
    max_fiber_norm,
    quadratic_rescale_check,
)
from .trees import (
    boundary_facets_L,
    boundary_facets_N,
    enumerate_strata_L,
    enumerate_strata_N,
    enumerate_trees,
)

__version__ = "0.1.0"
