"""Finite classical groups: the dense model of C(G) on L2(G)."""

from .groups import FiniteGroup, Irrep, cyclic_group, load_group
from .model import (
    FiniteGroupModel,
    build_model,
    bundled_model,
    centrality_check,
    commutation_check,
    contraction_check,
    cross_validate_central,
    fundamental_unitaries,
    identity_report,
    left_invariance_check,
)

__all__ = [
    "FiniteGroup", "Irrep", "cyclic_group", "load_group", "FiniteGroupModel", "build_model",
    "bundled_model", "centrality_check", "commutation_check", "contraction_check",
    "cross_validate_central", "fundamental_unitaries", "identity_report", "left_invariance_check",
]
