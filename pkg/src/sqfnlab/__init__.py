"""Numerical laboratory for conical square functions and dyadic martingales."""

from . import differences, experiments, funcspace, martingale, quadrature, sqfn
from .errors import (BadParameter, NoConvergence, OutOfDomain, PreconditionError, ScaleTooFine,
                     SqfnError)
from .funcspace import FunctionSource, OpenDomain, parse_function, shift, weierstrass_hardy
from .quadrature import DEFAULT_SPEC, QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "differences", "experiments", "funcspace", "martingale", "quadrature", "sqfn",
    "BadParameter", "NoConvergence", "OutOfDomain", "PreconditionError", "ScaleTooFine",
    "SqfnError", "FunctionSource", "OpenDomain", "parse_function", "shift",
    "weierstrass_hardy", "DEFAULT_SPEC", "QuadratureSpec", "__version__",
]
