"""Invariant-bearing hopping patterns for device-to-device discovery."""

from .grid import GridShape, InvariantValue, Resource, gcd, mod_inverse, mod_reduce
from .patterns import (Family, FrameDependentError, NoInvariantError, Pattern, PatternError,
                       PatternSpec, make_pattern, pattern)
from .sim import ChannelModel, Filtering, Scenario, SimResult, UEConfig, decode_cost, run
from .verifier import PropertyReport, feature_table, verify_all

__version__ = "0.1.0"
