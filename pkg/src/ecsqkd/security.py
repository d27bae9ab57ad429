"""Secret-key rates: ideal asymptotic, imperfect source, and finite key."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import finite
from .gains import MixedObservables, source_observables
from .model import ParameterError, SystemParams, binary_entropy, plob_for, total_efficiency


@dataclass(frozen=True)
class RatePoint:
    L_km: float
    mu: float
    Q_Z: float
    E_Z: float
    E_X: float
    E_ph: float
    Delta: float
    R: float
    R_plob: float
    p_x: float | None = None
    notes: tuple[str, ...] = field(default=(), compare=False)

    def exceeds_plob(self) -> bool:
        return self.R > self.R_plob


class UndefinedCoinError(ArithmeticError):
    pass


def asymptotic_rate_ideal(q_z: float, e_z: float, e_x: float, f: float) -> float:
    """Q_Z [1 - f h(E_Z) - h(E_X)], clamped at zero."""
    value = q_z * (1.0 - f * binary_entropy(e_z) - binary_entropy(e_x))
    return max(0.0, value)


def quantum_coin_delta(epsilon: float, q_z: float) -> float:
    """Coin imbalance with per-party basis fidelity 1 - epsilon, clamped to [0, 1/2]."""
    if not (0.0 <= epsilon <= 1.0):
        raise ParameterError(f"epsilon must lie in [0, 1], got {epsilon!r}")
    if not q_z > 0:
        raise UndefinedCoinError(f"coin imbalance needs a positive Z gain, got {q_z!r}")
    infidelity = epsilon * (2.0 - epsilon)  # 1 - (1 - eps)^2 without cancellation
    return min(0.5, max(0.0, infidelity / (2.0 * q_z)))


def phase_error_bound(e_x: float, delta: float) -> float:
    """Largest phase error compatible with the coin inequality.

    Writing E = sin^2(theta), the constraint
    1 - 2 delta <= sqrt((1 - e_x)(1 - E)) + sqrt(e_x E) reads
    cos(theta_E - theta_x) >= 1 - 2 delta, i.e. theta_E <= theta_x + 2 asin(sqrt(delta)).
    The result is clamped to [e_x, 1/2]; 1/2 already forces a zero key rate.
    """
    if not (0.0 <= delta <= 0.5):
        raise ParameterError(f"delta must lie in [0, 1/2], got {delta!r}")
    if not (0.0 <= e_x <= 1.0):
        raise ParameterError(f"e_x must lie in [0, 1], got {e_x!r}")
    if e_x >= 0.5:
        return 0.5
    if delta == 0.0:
        return e_x
    angle = math.asin(math.sqrt(e_x)) + 2.0 * math.asin(math.sqrt(delta))
    if angle >= math.pi / 4:
        return 0.5
    return min(0.5, max(e_x, math.sin(angle) ** 2))


def _observables(params: SystemParams) -> MixedObservables:
    return source_observables(params, total_efficiency(params))


def asymptotic_rate_imperfect(
    params: SystemParams, mixed: MixedObservables | None = None
) -> RatePoint:
    """Rate with a mixed ECS source and imperfect cat states.

    ``Q_Z`` and both error rates come from the mixed source; the coin
    imbalance is taken over the mixed Z gain.
    """
    if mixed is None:
        mixed = _observables(params)
    delta = quantum_coin_delta(params.epsilon, mixed.q_z)
    e_ph = phase_error_bound(mixed.e_x, delta)
    rate = asymptotic_rate_ideal(mixed.q_z, mixed.e_z, e_ph, params.f_ec)
    return RatePoint(
        L_km=params.L_km,
        mu=params.mu,
        Q_Z=mixed.q_z,
        E_Z=mixed.e_z,
        E_X=mixed.e_x,
        E_ph=e_ph,
        Delta=delta,
        R=rate,
        R_plob=plob_for(params),
    )


def ideal_rate_point(params: SystemParams) -> RatePoint:
    """Rate of the intended |Phi-> source with perfect cat states."""
    return asymptotic_rate_imperfect(params.replace(F2=1.0, epsilon=0.0))


def finite_key_rate(params: SystemParams, mixed: MixedObservables | None = None) -> RatePoint:
    """Finite-key rate per sent pulse for ``params.N_pulses`` rounds.

    The key is drawn from Z rounds, the phase error is estimated from X rounds;
    both samples and the statistical bound are produced by ``finite.estimate``.
    """
    if mixed is None:
        mixed = _observables(params)
    notes: list[str] = []
    N = float(params.N_pulses)
    p_z = 1.0 - params.p_x
    if params.paper_literal:
        n_z = p_z**2 * N
    else:
        n_z = p_z**2 * N * mixed.q_z
    n_x = params.p_x**2 * N * mixed.q_x

    delta = quantum_coin_delta(params.epsilon, mixed.q_z)
    est = finite.estimate(n_z=n_z, n_x=n_x, e_x=mixed.e_x, eps_sec=params.eps_sec)
    if est is None:
        notes.append("no X-basis detections: phase error cannot be estimated")
        e_ph = 0.5
    else:
        e_ph = phase_error_bound(min(est, 0.5), delta)

    key_bits = (
        n_z * (1.0 - binary_entropy(e_ph))
        - params.f_ec * n_z * binary_entropy(mixed.e_z)
        - math.log2(8.0 / (params.eps_cor * params.eps_sec**2))
    )
    return RatePoint(
        L_km=params.L_km,
        mu=params.mu,
        Q_Z=mixed.q_z,
        E_Z=mixed.e_z,
        E_X=mixed.e_x,
        E_ph=e_ph,
        Delta=delta,
        R=max(0.0, key_bits / N),
        R_plob=plob_for(params),
        p_x=params.p_x,
        notes=tuple(notes),
    )


MODES = ("ideal", "imperfect", "finite")


def rate_point(params: SystemParams, mode: str = "imperfect") -> RatePoint:
    if mode == "ideal":
        return ideal_rate_point(params)
    if mode == "imperfect":
        return asymptotic_rate_imperfect(params)
    if mode == "finite":
        return finite_key_rate(params)
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")

