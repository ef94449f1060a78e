"""Closed-form and generic-engine geometry of the jet conformal Minkowski metric."""

from .errors import (DomainError, DomainExit, InvalidConstant, JetGeomError, MalformedField,
                     NonInvertibleMetric, ParseError, SignatureMismatch, SingularMatrix)
from .inputs import ScalarField, TemporalMetric, eval_h, eval_sigma, parse_field_config
from .jcm import (JetPoint, cartan_L, curvature_frak, fundamental_metric, geometry_bundle,
                  jcm_F, minkowski_transform, nonlinear_connection, quad_form, ricci,
                  scalar_curvature, torsion)
from .tolerances import DEFAULT, Tolerances
from .validation import cross_validate

__version__ = "0.1.0"

__all__ = [
    "DEFAULT", "DomainError", "DomainExit", "InvalidConstant", "JetGeomError", "JetPoint",
    "MalformedField", "NonInvertibleMetric", "ParseError", "ScalarField", "SignatureMismatch",
    "SingularMatrix", "TemporalMetric", "Tolerances", "cartan_L", "cross_validate",
    "curvature_frak", "eval_h", "eval_sigma", "fundamental_metric", "geometry_bundle", "jcm_F",
    "minkowski_transform", "nonlinear_connection", "parse_field_config", "quad_form", "ricci",
    "scalar_curvature", "torsion",
]
