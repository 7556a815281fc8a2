"""camopt: co-design of an elliptic-cam knee spring and quadruped gait efficiency."""

__version__ = "0.1.0"

from .cam import CamDesign, CamGeometry, MechanismLayout  # noqa: F401
from .errors import (  # noqa: F401
    CamoptError,
    IllConditioned,
    InsufficientDistance,
    InvalidConfig,
    NoBalance,
    NoTangent,
    NumericalBlowup,
    UnknownTask,
)
