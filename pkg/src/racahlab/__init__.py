"""Racah and Wilson polynomials realized on the generic superintegrable system on the 2-sphere."""

from .errors import DivergenceError, DomainError, ParameterError, PoleError, RacahlabError
from .report import CheckResult
from .sphere import Params3
from .wilson import WilsonParams, phi_n
from .wilsonfn import wilson_function

__version__ = "0.1.0"

__all__ = [
    "CheckResult",
    "DivergenceError",
    "DomainError",
    "ParameterError",
    "Params3",
    "PoleError",
    "RacahlabError",
    "WilsonParams",
    "phi_n",
    "wilson_function",
]
