"""Ranking models over a shared corpus: LMD, LBDM and LDI."""

from .base import ScoreVector, Scorer  # noqa: F401
from .lbdm import LbdmModel, LbdmScorer, lbdm_build, lbdm_score  # noqa: F401
from .ldi import LdiIndex, LdiScorer, TopicQuery, ldi_build, ldi_query, ldi_score  # noqa: F401
from .lmd import LmdScorer, lmd_build_matrix, lmd_score  # noqa: F401

__all__ = [
    "ScoreVector",
    "Scorer",
    "LbdmModel",
    "LbdmScorer",
    "lbdm_build",
    "lbdm_score",
    "LdiIndex",
    "LdiScorer",
    "TopicQuery",
    "ldi_build",
    "ldi_query",
    "ldi_score",
    "LmdScorer",
    "lmd_build_matrix",
    "lmd_score",
]
