"""Comparison-geometry bounds for hypersurfaces with model-space and Euclidean oracles."""

from .errors import (ArityError, BandError, BracketError, DegenerateParams, DomainError,
                     GeometryError, InsufficientSamples, NoConvergence, NotFound,
                     NumericalError, ShapeError, UnreachableConfig)
from .kernel import INF, ExtReal, NumericTolerances, comp_radius, ext_min, is_inf

__version__ = "0.1.0"
