"""Maxslice – Maximal Slicing of Vacuum Initial Data for Python"""

VERSION = '1.0.0'
"""Version of Maxslice."""

from .fields import Grid3, ScalarField, VectorField3, VectorField4, SymTensorField3, SymTensorField4
from .fields import SpacetimeSlab, SphereRule
from .field_file import FieldFile
from .sobolev import WeightParams, Norm, h_norm, c_norm
from .physics import InitialData, InvariantReport, invariants
from .dataset import Dataset, DatasetSpec
from .evolution import CauchyData, build_cauchy_data, evolve, energy_diagnostics
from .maximal import SolverConfig, LinearOperator, assemble_L0, solve_L0, ift_solve, induced_data
from .config import PipelineConfig
from .exceptions import *
