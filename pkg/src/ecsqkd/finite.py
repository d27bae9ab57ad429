"""Statistical estimation of the Z-basis phase error from a finite X sample.

This module is the single swap point for the finite-size bound. ``estimate``
dispatches on ``BOUND``; every bound takes the expected number of detected Z
and X rounds, the observed X bit error rate and the secrecy parameter, and
returns an upper bound on the phase error rate of the Z rounds (before the
quantum-coin correction).

``chernoff+sampling`` (default)
    1. Upper-bound the expected X error count from the observed count
       ``m = n_x * e_x`` with the inverse multiplicative Chernoff bound at
       failure eps_sec/4::

           m_up = m + b + sqrt(2 b m + b^2),   b = ln(4 / eps_sec)

    2. Transfer ``lam = m_up / n_x`` from the X sample to the Z population
       with the random-sampling-without-replacement deviation at failure
       eps_sec/4::

           gamma(n, k, lam, e) = sqrt((n + k) lam (1 - lam) / (n k)
                                      * ln((n + k) / (2 pi n k lam (1 - lam) e^2)))

       giving ``lam + gamma(n_z, n_x, lam, eps_sec/4)``.

``sampling``
    Step 2 alone, applied to the observed rate at failure eps_sec.
"""

from __future__ import annotations

import math

BOUND = "chernoff+sampling"


def chernoff_upper(observed: float, eps: float) -> float:
    """Upper confidence bound on a Poisson-like expectation given ``observed``."""
    b = math.log(1.0 / eps)
    return observed + b + math.sqrt(2.0 * b * observed + b * b)


def sampling_deviation(n: float, k: float, lam: float, eps: float) -> float:
    """Deviation of an error rate between a k-sample and the remaining n rounds."""
    if n <= 0 or k <= 0:
        raise ValueError("sample sizes must be positive")
    lam = min(max(lam, 1e-300), 0.5)
    var = lam * (1.0 - lam)
    arg = (n + k) / (2.0 * math.pi * n * k * var * eps * eps)
    if arg <= 1.0:
        return 0.0
    return math.sqrt((n + k) * var / (n * k) * math.log(arg))


def estimate(n_z: float, n_x: float, e_x: float, eps_sec: float, bound: str | None = None):
    """Upper bound on the Z phase error rate, capped at 1/2, or ``None`` without X detections."""
    bound = bound or BOUND
    if n_x <= 0 or n_z <= 0:
        return None
    if bound == "chernoff+sampling":
        eps = eps_sec / 4.0
        lam = min(1.0, chernoff_upper(n_x * e_x, eps) / n_x)
        if lam >= 0.5:
            return 0.5
        return min(0.5, lam + sampling_deviation(n_z, n_x, lam, eps))
    if bound == "sampling":
        if e_x >= 0.5:
            return 0.5
        return min(0.5, e_x + sampling_deviation(n_z, n_x, e_x, eps_sec))
    raise ValueError(f"unknown finite-size bound {bound!r}")
