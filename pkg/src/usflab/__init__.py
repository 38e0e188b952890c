"""Simulation laboratory for uniform spanning forests on nonunimodular transitive graphs."""

from .graphs import FiniteGraph, GraphHandle, InvalidFamily, VertexRef, make_family
from .levels import LevelIndexer, tilted_volume, tmtp_check
from .estimators import EstimateReport
from .forest import OrientedForest, explore_component, sample_ust_finite, sample_vwusf_component, sample_wusf_region
from .walk import WalkPath, loop_erase

__version__ = "0.1.0"
