"""Brute-force truncated Fock-space model of the full optical layout.

Alice (mode a), Charlie (modes c1, c2) and Bob (mode b) feed two 50:50 beam
splitters::

    David:  out1 = (a + c1)/sqrt2   -> L_d,   out2 = (a - c1)/sqrt2  -> R_d
    Fred:   out3 = (c2 + b)/sqrt2   -> L_f,   out4 = (c2 - b)/sqrt2  -> R_f

followed by four threshold detectors. Channel loss is folded into the
detector efficiency. Nothing here uses the closed-form gains; the only shared
ingredient is the sifting table.

Amplitudes are real throughout: alpha is real and the beam splitter has real
coefficients.
"""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .gains import (
    SUCCESSFUL_PATTERNS,
    Basis,
    DetectionPattern,
    EcsVariant,
    GainSet,
    SiftAction,
    gains,
    sift_action,
)

NORM_TOL = 1e-10
TAIL_TOL = 1e-12


class CutoffError(RuntimeError):
    """The photon-number cutoff is too small for the requested state."""


@dataclass(frozen=True)
class FockState:
    """Real amplitudes over photon numbers 0..n_max of each mode."""

    amplitudes: np.ndarray

    @property
    def n_max(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def modes(self) -> int:
        return self.amplitudes.ndim

    def norm2(self) -> float:
        return float(np.sum(self.amplitudes**2))

    def overlap(self, other: "FockState") -> float:
        return float(np.sum(self.amplitudes * other.amplitudes))

    def tensor(self, other: "FockState") -> "FockState":
        return FockState(np.multiply.outer(self.amplitudes, other.amplitudes))

    def photon_distribution(self) -> np.ndarray:
        return self.amplitudes**2


def default_cutoff(mu: float) -> int:
    """Cutoff with Poisson tail of intensity 2*mu below 1e-12."""
    return int(math.ceil(2 * mu + 10 * math.sqrt(2 * mu) + 20))


def coherent_fock(alpha: float, n_max: int) -> FockState:
    n = np.arange(n_max + 1)
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    mu = alpha * alpha
    if alpha == 0:
        amps = (n == 0).astype(float)
    else:
        mags = np.exp(-mu / 2 + n * math.log(abs(alpha)) - 0.5 * log_fact)
        amps = mags * np.sign(alpha) ** n
    tail = 1.0 - float(np.sum(amps**2))
    if tail > TAIL_TOL:
        raise CutoffError(f"n_max={n_max} leaves tail {tail:.2e} for |alpha|^2={mu}")
    return FockState(amps)


def _normalised(amps: np.ndarray) -> FockState:
    return FockState(amps / math.sqrt(float(np.sum(amps**2))))


def cat_fock(alpha: float, sign: int | str, n_max: int) -> FockState:
    """Even (+) or odd (-) cat state (|alpha> +- |-alpha>)/sqrt(N+-)."""
    s = _sign(sign)
    if s < 0 and alpha == 0:
        raise ValueError("the odd cat state is undefined at alpha = 0")
    plus, minus = coherent_fock(alpha, n_max), coherent_fock(-alpha, n_max)
    return _normalised(plus.amplitudes + s * minus.amplitudes)


def _sign(sign) -> int:
    if sign in (1, "+"):
        return 1
    if sign in (-1, "-"):
        return -1
    raise ValueError(f"sign must be '+' or '-', got {sign!r}")


def ecs_fock(alpha: float, variant: EcsVariant | str, n_max: int) -> FockState:
    variant = EcsVariant(variant)
    plus, minus = coherent_fock(alpha, n_max), coherent_fock(-alpha, n_max)
    if variant.correlated:
        first, second = plus.tensor(plus), minus.tensor(minus)
    else:
        first, second = plus.tensor(minus), minus.tensor(plus)
    return _normalised(first.amplitudes + variant.sign * second.amplitudes)


@functools.lru_cache(maxsize=None)
def bs_matrix(n_max: int) -> np.ndarray:
    """50:50 beam splitter on two modes, as a (d*d, d*d) matrix, d = n_max + 1.

    Maps |n, m> to (a1 + a2)^n (a1 - a2)^m |0,0> / sqrt(2^(n+m) n! m!) written
    with creation operators, which sends |x>|y> to |(x+y)/sqrt2>|(x-y)/sqrt2>.
    Inputs with n + m > n_max are dropped; they sit beyond the Poisson tail
    and ``apply_bs`` checks that they carry no weight.
    """
    d = n_max + 1
    u = np.zeros((d, d, d, d))
    for n in range(d):
        for m in range(d - n):
            total = n + m
            for k in range(total + 1):
                s = 0
                for j in range(max(0, k - m), min(n, k) + 1):
                    term = math.comb(n, j) * math.comb(m, k - j)
                    s += -term if (m - k + j) % 2 else term
                if s:
                    log_scale = 0.5 * (
                        math.lgamma(k + 1)
                        + math.lgamma(total - k + 1)
                        - math.lgamma(n + 1)
                        - math.lgamma(m + 1)
                        - total * math.log(2.0)
                    )
                    u[k, total - k, n, m] = s * math.exp(log_scale)
    return u.reshape(d * d, d * d)


def apply_bs(state: FockState, modes: tuple[int, int] = (0, 1)) -> FockState:
    """Apply the beam splitter to ``modes`` of a multi-mode state.

    The first listed mode is the ``+`` output port.
    """
    amps = state.amplitudes
    d = amps.shape[0]
    i, j = modes
    moved = np.moveaxis(amps, (i, j), (0, 1))
    rest = moved.shape[2:]
    flat = moved.reshape(d * d, -1)
    # Components with n + m > n_max have no column in the truncated unitary.
    n_idx = np.add.outer(np.arange(d), np.arange(d)).reshape(-1)
    lost = float(np.sum(flat[n_idx > d - 1] ** 2))
    if lost > NORM_TOL:
        raise CutoffError(f"beam splitter input exceeds n_max={d - 1} (lost {lost:.2e})")
    out = (bs_matrix(d - 1) @ flat).reshape((d, d) + rest)
    return FockState(np.moveaxis(out, (0, 1), (i, j)))


@dataclass(frozen=True)
class DetectorModel:
    """Threshold detector with dark-count probability and total efficiency."""

    p_d: float
    eta: float

    def no_click(self, n_max: int) -> np.ndarray:
        return (1 - self.p_d) * (1 - self.eta) ** np.arange(n_max + 1)

    def click(self, n_max: int) -> np.ndarray:
        return 1.0 - self.no_click(n_max)


def pattern_table(probs: np.ndarray, det: DetectorModel) -> np.ndarray:
    """All 16 pattern probabilities, indexed [L_d, R_d, L_f, R_f]."""
    n_max = probs.shape[0] - 1
    povm = np.stack([det.no_click(n_max), det.click(n_max)])
    out = probs
    for _ in range(4):
        # contract the leading photon-number axis; the outcome axis goes last
        out = np.tensordot(out, povm, axes=([0], [1]))
    return out


def pattern_probability(state: FockState, pattern: DetectionPattern, det: DetectorModel) -> float:
    if state.modes != 4:
        raise ValueError("pattern_probability needs a four-mode state")
    return float(pattern_table(state.photon_distribution(), det)[tuple(pattern)])


def relay_output(alice: FockState, ecs: FockState, bob: FockState) -> FockState:
    """Four-mode state (1, 2, 3, 4) after David's and Fred's beam splitters."""
    state = alice.tensor(ecs).tensor(bob)  # modes a, c1, c2, b
    state = apply_bs(state, (0, 1))
    return apply_bs(state, (2, 3))


def _inputs(basis: Basis, alpha: float, n_max: int) -> list[tuple[float, FockState]]:
    """(probability, state) for bit 0 and bit 1 of one sender."""
    if basis is Basis.Z:
        return [(0.5, coherent_fock(alpha, n_max)), (0.5, coherent_fock(-alpha, n_max))]
    # Cat outcomes of the purified coherent-state source occur with
    # probability N+-/4 = (1 +- e^{-2mu})/2.
    overlap = math.exp(-2 * alpha * alpha)
    return [
        ((1 + overlap) / 2, cat_fock(alpha, "+", n_max)),
        ((1 - overlap) / 2, cat_fock(alpha, "-", n_max)),
    ]


@functools.lru_cache(maxsize=256)
def _photon_distributions(basis: Basis, variant: EcsVariant, mu: float, n_max: int):
    alpha = math.sqrt(mu)
    ecs = ecs_fock(alpha, variant, n_max)
    senders = _inputs(basis, alpha, n_max)
    out = []
    for a_bit, (pa, alice) in enumerate(senders):
        for b_bit, (pb, bob) in enumerate(senders):
            state = relay_output(alice, ecs, bob)
            out.append((a_bit, b_bit, pa * pb, state.photon_distribution()))
    return tuple(out)


def oracle_gains(
    basis: Basis | str,
    variant: EcsVariant | str,
    mu: float,
    eta: float,
    p_d: float,
    n_max: int | None = None,
) -> GainSet:
    """Correct/error gains by enumerating every sender input and click pattern."""
    basis, variant = Basis(basis), EcsVariant(variant)
    if n_max is None:
        n_max = default_cutoff(mu)
    det = DetectorModel(p_d, eta)
    q_c = q_e = 0.0
    for a_bit, b_bit, weight, probs in _photon_distributions(basis, variant, float(mu), n_max):
        table = pattern_table(probs, det)
        for pattern in SUCCESSFUL_PATTERNS:
            action = sift_action(pattern, basis)
            bob_bit = b_bit ^ (action is SiftAction.FLIP)
            p = weight * float(table[tuple(pattern)])
            if bob_bit == a_bit:
                q_c += p
            else:
                q_e += p
    return GainSet(q_c, q_e, basis, variant)


VALIDATION_MU = (0.01, 0.05, 0.1, 0.3)
VALIDATION_ETA = (1e-4, 1e-2, 0.3, 0.8)
VALIDATION_PD = (0.0, 1e-7, 1e-3)

REPORT_HEADER = (
    "variant",
    "basis",
    "mu",
    "eta",
    "p_d",
    "analytic_QC",
    "analytic_QE",
    "oracle_QC",
    "oracle_QE",
    "max_abs_dev",
)


@dataclass(frozen=True)
class ValidationRow:
    variant: EcsVariant
    basis: Basis
    mu: float
    eta: float
    p_d: float
    analytic: GainSet
    oracle: GainSet

    @property
    def deviation(self) -> float:
        return max(
            abs(self.analytic.q_correct - self.oracle.q_correct),
            abs(self.analytic.q_error - self.oracle.q_error),
        )

    def as_row(self) -> list[str]:
        nums = (
            self.mu,
            self.eta,
            self.p_d,
            self.analytic.q_correct,
            self.analytic.q_error,
            self.oracle.q_correct,
            self.oracle.q_error,
            self.deviation,
        )
        return [self.variant.value, self.basis.value] + [f"{x:.10e}" for x in nums]


def validate_grid(
    mus: Sequence[float] = VALIDATION_MU,
    etas: Sequence[float] = VALIDATION_ETA,
    pds: Sequence[float] = VALIDATION_PD,
    variants: Iterable[EcsVariant] = tuple(EcsVariant),
    bases: Iterable[Basis] = tuple(Basis),
    analytic=gains,
) -> list[ValidationRow]:
    """Compare ``analytic(basis, variant, mu, eta, p_d)`` with the oracle."""
    rows = []
    for variant in variants:
        for basis in bases:
            for mu in mus:
                for eta in etas:
                    for p_d in pds:
                        rows.append(
                            ValidationRow(
                                variant,
                                basis,
                                mu,
                                eta,
                                p_d,
                                analytic(basis, variant, mu, eta, p_d),
                                oracle_gains(basis, variant, mu, eta, p_d),
                            )
                        )
    return rows


def write_report(rows: Iterable[ValidationRow], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for row in rows:
        writer.writerow(row.as_row())
