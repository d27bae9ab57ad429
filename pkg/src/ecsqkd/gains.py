"""Closed-form gains and bit error rates for the four ECS source variants.

Each relay (David on modes 1, 2 and Fred on modes 3, 4) ends in a pair of
threshold detectors. A round is kept only when exactly one detector of each
pair clicks; Bob then flips his bit according to the sifting table.

All formulas are written in terms of ``expm1`` so that the long-distance
regime (``mu*eta`` down to ~1e-8) keeps full relative precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

from .model import ParameterError, SystemParams

# Below this intensity the source is vacuum-dominated and every rate is zero;
# the normalisation 2(1 - exp(-4 mu)) would otherwise cancel catastrophically.
MU_MIN = 1e-6


class Basis(str, enum.Enum):
    Z = "Z"
    X = "X"


class EcsVariant(str, enum.Enum):
    """The four entangled coherent states Charlie may emit.

    ``PHI_MINUS`` is the intended source. ``sign`` is the relative sign of
    the two coherent branches; ``correlated`` says whether the branches are
    |a>|a> and |-a>|-a> (Phi) or |a>|-a> and |-a>|a> (Psi).
    """

    PHI_MINUS = "PhiMinus"
    PHI_PLUS = "PhiPlus"
    PSI_MINUS = "PsiMinus"
    PSI_PLUS = "PsiPlus"

    @property
    def sign(self) -> int:
        return -1 if self in (EcsVariant.PHI_MINUS, EcsVariant.PSI_MINUS) else 1

    @property
    def correlated(self) -> bool:
        return self in (EcsVariant.PHI_MINUS, EcsVariant.PHI_PLUS)


class SiftAction(enum.Enum):
    NO_FLIP = "NoFlip"
    FLIP = "Flip"
    DISCARD = "Discard"


class DetectionPattern(NamedTuple):
    """Click record (L_d, R_d, L_f, R_f); each entry is 0 or 1."""

    ld: int
    rd: int
    lf: int
    rf: int

    @classmethod
    def parse(cls, text: str) -> "DetectionPattern":
        if len(text) != 4 or set(text) - {"0", "1"}:
            raise ValueError(f"pattern must be four 0/1 characters, got {text!r}")
        return cls(*(int(c) for c in text))

    def __str__(self) -> str:
        return "".join(str(int(c)) for c in self)

    @property
    def successful(self) -> bool:
        return (self.ld + self.rd == 1) and (self.lf + self.rf == 1)


def all_patterns() -> Iterator[DetectionPattern]:
    for bits in range(16):
        yield DetectionPattern(*((bits >> s) & 1 for s in (3, 2, 1, 0)))


SUCCESSFUL_PATTERNS = tuple(p for p in all_patterns() if p.successful)


def sift_action(pattern: DetectionPattern, basis: Basis | str) -> SiftAction:
    basis = Basis(basis)
    if not pattern.successful:
        return SiftAction.DISCARD
    if basis is Basis.X:
        return SiftAction.FLIP
    # Z: same-side clicks at both relays keep the bit, crossed clicks flip it.
    return SiftAction.NO_FLIP if pattern.ld == pattern.lf else SiftAction.FLIP


@dataclass(frozen=True)
class GainSet:
    q_correct: float
    q_error: float
    basis: Basis
    variant: EcsVariant

    @property
    def total(self) -> float:
        return self.q_correct + self.q_error


def _validate(mu: float, eta: float, p_d: float) -> float:
    if not (mu > 0 and math.isfinite(mu)):
        raise ParameterError(f"mu must be positive, got {mu!r}")
    if not (0 < eta <= 1):
        raise ParameterError(f"eta must lie in (0, 1], got {eta!r}")
    if not (0 <= p_d < 1):
        raise ParameterError(f"p_d must lie in [0, 1), got {p_d!r}")
    return max(mu, MU_MIN)


def ecs_norm(mu: float, sign: int) -> float:
    """Squared ECS normalisation 2(1 + sign*exp(-4 mu))."""
    return 2.0 * (2.0 + math.expm1(-4 * mu)) if sign > 0 else -2.0 * math.expm1(-4 * mu)


def _z_terms(mu: float, eta: float, p_d: float, sign: int) -> tuple[float, float]:
    """(signal-like, dark-count-like) Z-basis sums for ECS parity ``sign``."""
    x = 2 * mu * eta
    e_x = math.exp(-x)
    click = -math.expm1(-x) + p_d * e_x  # 1 - (1 - p_d) e^{-2 mu eta}
    c = (1 - p_d) ** 2
    q = p_d**2 * c
    e4 = math.exp(-4 * mu)
    norm = ecs_norm(mu, sign)
    signal = 2.0 / norm * (c * click**2 + q * (math.exp(-2 * x) + 2 * sign * e4))
    dark = 4.0 / norm * (p_d * c * e_x * click + sign * q * e4)
    return signal, dark


def _x_terms(mu: float, eta: float, p_d: float, sign: int) -> tuple[float, float]:
    """(even, odd) X-basis sums: ``even`` carries the +C interference term."""
    x = 2 * mu * eta
    e_x = math.exp(-x)
    c = (1 - p_d) ** 2
    q = p_d**2 * c
    e4 = math.exp(-4 * mu)
    b = c * (-math.expm1(-x) + p_d * e_x) * (-math.expm1(-x) + 3 * p_d * e_x)
    # e^{-4mu} - (1 - k p_d) e^{-4mu + 2 mu eta} = e^{-4mu} [k p_d e^{x} - expm1(x)]
    e_up = math.exp(x)
    cross = c * e4**2 * (p_d * e_up - math.expm1(x)) * (3 * p_d * e_up - math.expm1(x))
    tail = math.exp(-8 * mu + 2 * x)
    d_plus = q * (math.exp(-2 * x) + tail)
    d_minus = q * (math.exp(-2 * x) - tail)
    k = 8 * q * e4
    norm = ecs_norm(mu, sign)
    even = (b + d_plus + cross + sign * k) / norm
    odd = (b + d_minus - cross) / norm
    return even, odd


def _finite_gainset(qc: float, qe: float, basis: Basis, variant: EcsVariant) -> GainSet:
    if not (math.isfinite(qc) and math.isfinite(qe)):
        raise ParameterError(f"non-finite gain for {variant.value}/{basis.value}")
    return GainSet(qc, qe, basis, variant)


def gains_z(variant: EcsVariant | str, mu: float, eta: float, p_d: float) -> GainSet:
    """Z-basis correct/error gains.

    A Psi source anti-correlates Charlie's branches, which is the same as
    flipping Bob's Z bit, so correct and error gains swap roles.
    """
    variant = EcsVariant(variant)
    mu = _validate(mu, eta, p_d)
    signal, dark = _z_terms(mu, eta, p_d, variant.sign)
    if variant.correlated:
        return _finite_gainset(signal, dark, Basis.Z, variant)
    return _finite_gainset(dark, signal, Basis.Z, variant)


def gains_x(
    variant: EcsVariant | str,
    mu: float,
    eta: float,
    p_d: float,
    paper_literal: bool = False,
) -> GainSet:
    """X-basis correct/error gains with cat-state inputs.

    Alice's and Bob's cat states are weighted by N_+/4 and N_-/4, the
    probabilities of the X outcomes on the purified Z-basis source. A Psi
    source differs from its Phi partner by a parity operator on one arm, which
    only multiplies a cat state by +-1, so X statistics depend on ``sign``
    alone. ``paper_literal`` restores the printed Psi assignment, where the
    correct and error gains are exchanged.
    """
    variant = EcsVariant(variant)
    mu = _validate(mu, eta, p_d)
    even, odd = _x_terms(mu, eta, p_d, variant.sign)
    qc, qe = (even, odd) if variant.sign < 0 else (odd, even)
    if paper_literal and not variant.correlated:
        qc, qe = qe, qc
    return _finite_gainset(qc, qe, Basis.X, variant)


def gains(basis: Basis | str, variant, mu, eta, p_d, paper_literal: bool = False) -> GainSet:
    if Basis(basis) is Basis.Z:
        return gains_z(variant, mu, eta, p_d)
    return gains_x(variant, mu, eta, p_d, paper_literal)


class UndefinedRateError(ArithmeticError):
    """An error rate was requested for a basis with zero total gain."""


def error_rates(gz: GainSet, gx: GainSet, e_d: float) -> tuple[float, float]:
    """Bit error rates (E_Z, E_X).

    Misalignment ``e_d`` acts as a classical flip of sifted Z outcomes; the X
    basis carries no misalignment because Bob always flips there.
    """
    if gz.total <= 0 or gx.total <= 0:
        raise UndefinedRateError(
            f"zero total gain ({gz.variant.value}: Z={gz.total!r}, X={gx.total!r})"
        )
    e_z = (e_d * gz.q_correct + (1 - e_d) * gz.q_error) / gz.total
    e_x = gx.q_error / gx.total
    return e_z, e_x


@dataclass(frozen=True)
class VariantObservables:
    gz: GainSet
    gx: GainSet
    e_z: float
    e_x: float


@dataclass(frozen=True)
class MixedObservables:
    """Observables of the realistic (mixed) source."""

    q_z: float
    e_z: float
    e_x: float
    q_x: float


def variant_weights(F2: float) -> dict[EcsVariant, float]:
    other = (1.0 - F2) / 3.0
    return {
        EcsVariant.PHI_MINUS: F2,
        EcsVariant.PHI_PLUS: other,
        EcsVariant.PSI_MINUS: other,
        EcsVariant.PSI_PLUS: other,
    }


def variant_observables(params: SystemParams, eta: float) -> dict[EcsVariant, VariantObservables]:
    out = {}
    for v in EcsVariant:
        gz = gains_z(v, params.mu, eta, params.p_d)
        gx = gains_x(v, params.mu, eta, params.p_d, params.paper_literal)
        e_z, e_x = error_rates(gz, gx, params.e_d)
        out[v] = VariantObservables(gz, gx, e_z, e_x)
    return out


def mixed_observables(
    params: SystemParams, per_variant: dict[EcsVariant, VariantObservables]
) -> MixedObservables:
    """Mix per-variant observables with weights F2 and (1 - F2)/3.

    The default is probability-consistent: gains mix linearly and each error
    rate is the gain-weighted average over variants. With
    ``params.paper_literal`` the error rates are a plain convex combination
    and the Z rate picks up the other variants' X-basis error rates, as in
    the literal reference form.
    """
    w = variant_weights(params.F2)
    q_z = sum(w[v] * o.gz.total for v, o in per_variant.items())
    q_x = sum(w[v] * o.gx.total for v, o in per_variant.items())
    ideal = per_variant[EcsVariant.PHI_MINUS]
    if params.F2 == 1.0:
        return MixedObservables(ideal.gz.total, ideal.e_z, ideal.e_x, ideal.gx.total)
    if params.paper_literal:
        others = [o for v, o in per_variant.items() if v is not EcsVariant.PHI_MINUS]
        coeff = (1.0 - params.F2) / 3.0
        e_x = params.F2 * ideal.e_x + coeff * sum(o.e_x for o in others)
        e_z = params.F2 * ideal.e_z + coeff * sum(o.e_x for o in others)
        return MixedObservables(q_z, e_z, e_x, q_x)
    err_z = sum(w[v] * o.gz.total * o.e_z for v, o in per_variant.items())
    err_x = sum(w[v] * o.gx.q_error for v, o in per_variant.items())
    return MixedObservables(q_z, err_z / q_z, err_x / q_x, q_x)


def source_observables(params: SystemParams, eta: float) -> MixedObservables:
    return mixed_observables(params, variant_observables(params, eta))

