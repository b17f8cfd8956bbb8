"""Limit cycles of the Josephson equation: census, curves and zero expansion."""

from ._core import (
    ConfigError,
    DomainError,
    Params,
    ResolutionError,
    StiffnessError,
    census,
    census_json,
    displacement,
    from_physical,
    locate_curve,
    zero_coefficients,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "Params",
    "ResolutionError",
    "StiffnessError",
    "census",
    "census_json",
    "displacement",
    "from_physical",
    "locate_curve",
    "zero_coefficients",
]
