"""
Exact multi-soliton solutions of the abelian Toda equations associated with
the untwisted loop groups of GL_n, built by Hirota's method and by rational
dressing, with independent numerical oracles cross-checking both.
"""

from . import dressing, errors, hirota, model, numkit, verify
from .dressing import DressingData, SolitonSelection, specialize_solitons
from .errors import TodaError
from .hirota import SolitonParams
from .model import ModelParams
from .verify import GridSpec, ResidualReport

__all__ = ["dressing", "errors", "hirota", "model", "numkit", "verify", "DressingData",
           "SolitonSelection", "specialize_solitons", "SolitonParams",
           "ModelParams", "GridSpec", "ResidualReport", "TodaError"]
__version__ = "0.1.0"
