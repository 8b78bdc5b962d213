"""Temperley-Lieb diagram calculus, quasitensor functors into Hilbert
spaces, and the dense spectral *-algebras of ergodic quantum SU(2)
actions."""

from .numerics import Tolerance, DEFAULT_TOL
from .tlcat import (
    LoopParameter,
    TLDiagram,
    TLMorphism,
    DualityDatum,
    q_number,
    tl_basis,
    compose,
    tensor,
    jones_wenzl,
    evaluate,
)
from .repcat import (
    ObjectWord,
    IrrepLabel,
    ConjugateSolution,
    RepCategory,
    rep_category,
    standardize_conjugate,
)
from .qfunctor import (
    QuasitensorFunctor,
    EmbeddingFunctor,
    ProjectionFamilyFunctor,
    WeightZeroFunctor,
    FiberFunctor,
    make_embedding,
    make_weight_zero,
    make_fiber,
    check_axioms,
    push_conjugate,
    dimension_bounds,
    equality_case_probe,
    save_functor,
    load_functor,
)
from .spectral import (
    BasisLabel,
    AlgebraElement,
    SpectralAlgebra,
    build_algebra,
    haar_inner_product,
    multiplicity_map,
    intertwining_residual,
    linear_independence_check,
    induce_isomorphism,
    commutativity_probe,
    save_structure,
    load_structure,
)
from .subgroup import (
    SubspaceFamily,
    full_family,
    weight_zero_family,
    FamilyReport,
    check_family,
    BracketSpace,
    bracket_space,
    CharacterTransformation,
    character_from_values,
    character_to_transformation,
)

__version__ = "0.1.0"
