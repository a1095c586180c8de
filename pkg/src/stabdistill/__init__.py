"""Two-copy stabilizer entanglement distillation for qudits of prime dimension."""

from .encoding import (
    ActionOperator,
    EncodingMatrix,
    StructureViolation,
    canonic_encoding,
    compose_encoding,
    conjugate_error,
    coset_action,
    error_action,
    random_composed_encoding,
)
from .field_phase import FieldScalar, NoInverse, NotPrime, PhaseExponent, field_inverse, phase_value
from .protocol import (
    DegenerateInput,
    DistillationRun,
    FimaxChoice,
    ImpossiblePostselection,
    IterationRecord,
    coset_fidelity,
    distill,
    fimax_select,
    fimax_step,
    generic_step,
    standard_form_oracle,
    two_copy_dense,
)
from .stabilizer import CosetId, ErrorDistribution, Stabilizer, cosets_in, enumerate_stabilizers, syndrome_partition
from .states import (
    BdsState,
    DenseState,
    InvalidMixture,
    InvalidState,
    fidelity,
    isotropic,
    load_state,
    offline,
    random_pure,
    save_state,
    two_copy_distribution,
    weyl_twirl,
)
from .weyl import ErrorElement, PhasedWeyl, adjoint, bell_vector, multiply, symplectic_product

__version__ = "0.1.0"
