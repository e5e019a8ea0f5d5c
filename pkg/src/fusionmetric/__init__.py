"""Quantum metric diagnostics on fusion rings of compact quantum groups.

Fusion rings and their builders, length functions, the truncated GNS
representation with its Dirac operator, central states with
Monge–Kantorovich distances, and a dense finite-group model.
"""

from .exceptions import (
    ConvergenceError,
    FusionAxiomError,
    FusionMetricError,
    MaterializationError,
    ModelValidationError,
    NotGeneratedError,
    RingMismatchError,
    UnknownLabelError,
)
from .fusion_ring import (
    FusionElement,
    FusionRing,
    explicit_ring,
    inner_product,
    involute,
    load_ring,
    multiply,
    save_ring,
    trace,
    verify_axioms,
    verify_truncated,
)
from .gns import LipBounds, TruncatedRep, commutator, haagerup_check, lip_norm_bounds, pi_matrix
from .length import LengthFunction, verify_length_axioms, word_length
from .linalg import SparseOp, op_norm
from .metric import (
    MKProblem,
    MKResult,
    berezin_defect_check,
    diameter_estimate,
    mk_distance,
    mk_distance_states,
)
from .reports import Report
from .rings import build_ring, cyclic_group_ring, free_abelian_ring, free_group_ring, rep_ring, so3, su2
from .states import (
    CentralState,
    berezin_apply,
    counit_state,
    foelner_multiplier,
    foelner_weights,
    haar_state,
    positivity_check,
)

__version__ = "0.1.0"
