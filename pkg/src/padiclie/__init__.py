"""Z_p-Lie lattices, local-field orders, and exhaustive verification
certificates at truncated p-adic precision."""

from .certificates import Certificate, canonical_report, emit_report
from .cyclic_algebra import (
    CyclicOrder,
    SL1Basis,
    build_order,
    build_sl1_lattice,
    commutator_lattice_sl1,
    derived_lattice,
)
from .errors import (
    CapExceededError,
    DegenerateError,
    HypothesisViolatedError,
    NonCanonicalInputError,
    NotInvertibleError,
    NotSubmoduleError,
    PrecisionError,
    StructureMismatchError,
)
from .finite_cyclic import (
    FiniteField,
    FiniteFieldExt,
    TraceZeroSpace,
    bracket_span_check,
    build_ext,
    hilbert90_additive_check,
    nonfixed_witness,
    skew_image_check,
    special_residue_basis,
    trace_zero_space,
)
from .lattices import (
    Lattice,
    MaxSubmoduleParam,
    enumerate_maximal_submodules,
    lattice_from_generators,
    lattice_index,
    lattice_membership,
    param_equivalent,
    relative_invariant_exponents,
    submodule_from_param,
)
from .lie_lattices import (
    LieLattice,
    StandardBasis,
    VirtualEndomorphism,
    build_model_lattice,
    commutator_sublattice,
    invariant_ideal_chain,
    index_stability_spotcheck,
    killing_form_valuation,
    s_invariants,
    standard_basis_n2,
    virtual_endomorphism,
)
from .local_fields import (
    LocalField,
    TauBasis,
    UnramifiedExt,
    build_local_field,
    build_unramified_ext,
    trace_and_zero_module,
)
from .padic import PadicInt, PadicMatrix, hermite_normal_form, smith_normal_form

__version__ = "0.1.0"
