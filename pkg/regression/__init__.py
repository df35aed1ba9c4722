"""Penalized least squares: penalties and their factory."""
from .base import PENALTY_FAMILIES, PenaltyBase, PenaltySpec
from .lasso import LassoPenalty, soft_threshold
from .scad import SCADPenalty, scad_update


def get_penalty(spec: PenaltySpec) -> PenaltyBase:
    """Factory function to get the penalty implementation for a spec."""
    family = spec.family.lower()
    if family == "lasso":
        return LassoPenalty(spec.lam)
    elif family == "scad":
        return SCADPenalty(spec.lam, spec.scad_a)
    else:
        raise ValueError(f"Unsupported penalty family: {spec.family}")


__all__ = [
    "PENALTY_FAMILIES",
    "PenaltyBase",
    "PenaltySpec",
    "LassoPenalty",
    "SCADPenalty",
    "get_penalty",
    "scad_update",
    "soft_threshold",
]
