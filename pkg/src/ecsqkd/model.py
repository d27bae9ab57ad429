"""System parameters and elementary scalar functions.

Distances are in km, fibre loss in dB/km; every probability is dimensionless.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np


class ParameterError(ValueError):
    """Raised for physically invalid or degenerate inputs."""


def _check_unit(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ParameterError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Physical and protocol parameters of one link configuration.

    The defaults are the simulation settings used for the rate-vs-distance
    figures: dark counts 1e-7, detector efficiency 85%, ultralow-loss fibre at
    0.16 dB/km, EC inefficiency 1.1 and 3% Z-basis misalignment, with an
    ideal ECS source and ideal cat states.

    Two switches do not describe hardware:

    ``paper_literal``
        use the literal reference forms: plain convex mixing of error
        rates (with X-basis rates inside the mixed Z rate), the alternative
        Psi-variant X labels, and n_Z counted in pulses rather than detections.
    ``plob_with_detector``
        include ``eta_d`` in the transmittance fed to the PLOB bound.
    """

    mu: float = 0.01
    p_d: float = 1e-7
    eta_d: float = 0.85
    beta_db_per_km: float = 0.16
    L_km: float = 0.0
    f_ec: float = 1.1
    e_d: float = 0.03
    F2: float = 1.0
    epsilon: float = 0.0
    p_x: float = 0.1
    N_pulses: float = 1e14
    eps_sec: float = 1e-10
    eps_cor: float = 1e-15
    paper_literal: bool = False
    plob_with_detector: bool = False

    def __post_init__(self) -> None:
        for name in ("p_d", "eta_d", "e_d", "F2", "epsilon"):
            _check_unit(name, getattr(self, name))
        if not (self.mu > 0 and math.isfinite(self.mu)):
            raise ParameterError(f"mu must be positive and finite, got {self.mu!r}")
        if not (self.L_km >= 0 and math.isfinite(self.L_km)):
            raise ParameterError(f"L_km must be non-negative, got {self.L_km!r}")
        if self.beta_db_per_km < 0:
            raise ParameterError("beta_db_per_km must be non-negative")
        if not self.f_ec >= 1.0:
            raise ParameterError(f"f_ec must be >= 1, got {self.f_ec!r}")
        if not (0.0 <= self.p_x < 1.0):
            raise ParameterError(f"p_x must lie in [0, 1), got {self.p_x!r}")
        if not self.N_pulses >= 1:
            raise ParameterError("N_pulses must be >= 1")
        for name in ("eps_sec", "eps_cor"):
            value = getattr(self, name)
            if not (0.0 < value < 1.0):
                raise ParameterError(f"{name} must lie in (0, 1), got {value!r}")

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)


def channel_transmittance(beta: float, L: float) -> float:
    """Fibre transmittance ``10**(-beta*L/10)`` over ``L`` km."""
    if L < 0:
        raise ParameterError(f"distance must be non-negative, got {L!r}")
    return 10.0 ** (-beta * L / 10.0)


def total_efficiency(params: SystemParams) -> float:
    """Per-detector efficiency including one quarter of the Alice-Bob fibre.

    Every optical pulse crosses exactly one of the four L/4 segments before it
    reaches a relay, so this is ``eta_d * 10**(-beta*L/40)``.
    """
    return params.eta_d * channel_transmittance(params.beta_db_per_km, params.L_km / 4.0)


def plob_bound(eta_ch: float) -> float:
    """Repeaterless capacity ``-log2(1 - eta)`` in bits per pulse.

    Returns ``inf`` at ``eta_ch == 1``.
    """
    if not (0.0 <= eta_ch <= 1.0):
        raise ParameterError(f"transmittance must lie in [0, 1], got {eta_ch!r}")
    if eta_ch == 1.0:
        return math.inf
    return -math.log1p(-eta_ch) / math.log(2.0)


def plob_for(params: SystemParams) -> float:
    eta = channel_transmittance(params.beta_db_per_km, params.L_km)
    if params.plob_with_detector:
        eta *= params.eta_d
    return plob_bound(eta)


def binary_entropy(x):
    """Shannon entropy h(x) in bits, with h(0) = h(1) = 0.

    Accepts scalars or arrays; scalars come back as ``float``.
    """
    arr = np.asarray(x, dtype=float)
    if np.any((arr < 0) | (arr > 1)) or np.any(np.isnan(arr)):
        raise ParameterError(f"binary_entropy argument outside [0, 1]: {x!r}")
    inner = (arr > 0) & (arr < 1)
    safe = np.where(inner, arr, 0.5)
    out = np.where(inner, -safe * np.log2(safe) - (1 - safe) * np.log2(1 - safe), 0.0)
    if out.ndim == 0:
        return float(out)
    return out
