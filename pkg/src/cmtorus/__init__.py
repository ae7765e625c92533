"""Norm tori of abelian CM fields: local (R)/(R-circ) deciders, global
(A)/(A-circ) deciders, certified counterexample families and the Shimura
transitivity verdict."""

from .errors import (
    AmbientMismatch,
    BoundExceeded,
    CmToriError,
    EvenVariables,
    IndexNotTwo,
    InvalidDescriptor,
    NotCyclic,
    NotDescending,
    NotQuadratic,
    NotUnits,
    PreconditionUnmet,
    SearchExhausted,
    UnsupportedInertiaShape,
)
from .families import FamilyMember, FamilySpec, certify, generate_family
from .fields import (
    CyclotomicFieldDescriptor,
    artin_local,
    compositum,
    decomposition_group,
    inertia_group,
    is_global_norm,
    is_local_norm,
    make_field,
    parse_field,
    quadratic_field,
    ramified_primes,
    s_set,
)
from .arith import RationalNonzero, hilbert_symbol, legendre
from .globaldec import NormCriterionReport, check_ngax, completion_descriptor, decide_A, decide_A_circ
from .groups import FiniteAbelianGroup, GroupHom, Subgroup, enumerate_subgroups, quotient
from .intmat import IntegerMatrix, smith_normal_form
from .lattice import (
    GaloisLattice,
    build_torus_modules,
    coflasque_resolution,
    coinvariants,
    h1,
    invariants,
    is_coflasque,
    orbp_presentation_check,
)
from .local import (
    LocalExtensionDescriptor,
    classify_R,
    classify_R_circ,
    decide_R_circ,
    decide_R_oracle,
    kottwitz_cokernel,
    kottwitz_cokernel_via_resolution,
    kottwitz_equal_K,
    make_descriptor,
    nu_point_image,
)
from .shimura import LevelType, ShimuraLevelDescriptor, TransitivityVerdict, decide_T, reduce_level
from .verdict import Question, QuestionVerdict, Status

__version__ = "0.1.0"
