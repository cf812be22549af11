"""Exact computation and reasoning with weight of evidence."""

from .errors import *  # noqa: F401,F403
from .evidence import (
    Distribution,
    EvidenceSpace,
    dempster_combine,
    posterior,
    sequence_weight,
    weight_of_evidence,
)
from .characterization import WeightTable, check_wf1, check_wf2, reconstruct, weight_table

__version__ = "0.1.0"
