"""Norms of the example spaces, with brute-force oracles."""

from .brute import brute_force_norm
from .evaluators import norm
from .property_p import property_p_witness
from .spaces import (
    QP,
    FrakX,
    MixedW,
    SchreierHash,
    SpaceDesc,
    SpaceVec,
    Tsirelson,
    XiPlegmaL1,
    XiPlegmaL2L1,
    basis_vector,
    space_from_json,
    vector_from_json,
)
from .values import NormResult, Surd

__all__ = [
    "QP",
    "FrakX",
    "MixedW",
    "NormResult",
    "SchreierHash",
    "SpaceDesc",
    "SpaceVec",
    "Surd",
    "Tsirelson",
    "XiPlegmaL1",
    "XiPlegmaL2L1",
    "basis_vector",
    "brute_force_norm",
    "norm",
    "property_p_witness",
    "space_from_json",
    "vector_from_json",
]
