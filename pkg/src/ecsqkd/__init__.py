"""Key-rate engine for twin-field QKD with an entangled-coherent-state relay source."""

from .gains import Basis, DetectionPattern, EcsVariant, GainSet, gains_x, gains_z
from .model import SystemParams, binary_entropy, plob_bound, total_efficiency
from .optimizer import OptimizeSpec, optimize_finite, optimize_mu, sweep
from .security import RatePoint, rate_point

__all__ = [
    "Basis",
    "DetectionPattern",
    "EcsVariant",
    "GainSet",
    "OptimizeSpec",
    "RatePoint",
    "SystemParams",
    "binary_entropy",
    "gains_x",
    "gains_z",
    "optimize_finite",
    "optimize_mu",
    "plob_bound",
    "rate_point",
    "sweep",
    "total_efficiency",
]
