"""Index parity, orbit censuses and degenerate symplectic homology ranks for Anosov Reeb flows."""

from .errors import (
    AnosovSHError,
    ConfigError,
    DegeneracyError,
    DimensionError,
    HyperbolicityError,
    InvarianceError,
    IsotropyError,
    RegularityError,
    ResourceError,
    SingularityError,
    ValidationError,
)
from .symplin import Parity

__version__ = "0.1.0"
