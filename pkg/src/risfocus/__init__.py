"""Inter-RIS focusing codebooks for cooperative distributed RIS deployments."""

__version__ = "0.1.0"

from .geometry import AngleDirection, ArrayGeometry, DirectionCosines, Wave
from .ris import PhaseVector, RayPair

__all__ = [
    "AngleDirection",
    "ArrayGeometry",
    "DirectionCosines",
    "PhaseVector",
    "RayPair",
    "Wave",
    "__version__",
]
