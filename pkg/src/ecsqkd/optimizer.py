"""Per-distance maximisation of the key rate and distance sweeps.

Each free parameter is searched on a log scale: a fixed grid finds the best
seed, then a bounded Brent search (golden section with parabolic steps,
scipy) refines inside the two neighbouring grid cells. No randomness is
involved, so repeated calls return identical results.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .model import SystemParams
from .security import RatePoint, rate_point

OBJECTIVES = {
    "asymptotic_ideal": "ideal",
    "asymptotic_imperfect": "imperfect",
    "finite_key": "finite",
}


@dataclass(frozen=True)
class OptimizeSpec:
    mu_range: tuple[float, float] = (1e-4, 2.0)
    px_range: tuple[float, float] = (1e-3, 0.5)
    grid_points: int = 50
    refine_tol: float = 1e-4
    objective: str = "asymptotic_ideal"
    max_sweeps: int = 20

    def __post_init__(self) -> None:
        for name in ("mu_range", "px_range"):
            lo, hi = getattr(self, name)
            if not (0 < lo < hi):
                raise ValueError(f"{name} must be positive and increasing, got {(lo, hi)}")
        if self.px_range[1] >= 1:
            raise ValueError("px_range must stay below 1")
        if self.grid_points < 8:
            raise ValueError("grid_points must be >= 8")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {sorted(OBJECTIVES)}")

    @property
    def mode(self) -> str:
        return OBJECTIVES[self.objective]


def _maximise_log(
    f: Callable[[float], float], lo: float, hi: float, n: int, tol: float
) -> tuple[float, float]:
    """Grid-seeded bounded maximisation of ``f`` over [lo, hi] in log space.

    Returns (argmax, max); the value is never below the best grid point.
    """
    grid = np.logspace(math.log10(lo), math.log10(hi), n)
    values = [f(x) for x in grid]
    i = int(np.argmax(values))
    best_x, best_v = float(grid[i]), float(values[i])
    if best_v <= 0:
        return best_x, best_v
    a = math.log(grid[max(i - 1, 0)])
    b = math.log(grid[min(i + 1, n - 1)])
    res = minimize_scalar(
        lambda t: -f(math.exp(t)), bounds=(a, b), method="bounded", options={"xatol": tol}
    )
    if res.success and -res.fun > best_v:
        best_x, best_v = math.exp(res.x), float(-res.fun)
    return best_x, best_v


def _evaluate(params: SystemParams, mode: str) -> RatePoint:
    return rate_point(params, mode)


def _zero_point(params: SystemParams, mode: str) -> RatePoint:
    """Observables at ``params`` with the rate forced to zero and unset optimum markers."""
    point = _evaluate(params, mode)
    return dataclasses.replace(
        point,
        mu=math.nan,
        p_x=math.nan if mode == "finite" else None,
        R=0.0,
        notes=point.notes + ("no positive rate in the search range",),
    )


def optimize_mu(params: SystemParams, spec: OptimizeSpec = OptimizeSpec()) -> tuple[float, RatePoint]:
    """Best intensity at ``params.L_km``; ``mu`` is NaN when the rate is zero everywhere."""
    mode = spec.mode

    def rate(mu: float) -> float:
        return _evaluate(params.replace(mu=mu), mode).R

    mu, value = _maximise_log(rate, *spec.mu_range, spec.grid_points, spec.refine_tol)
    if value <= 0:
        return math.nan, _zero_point(params.replace(mu=mu), mode)
    return mu, _evaluate(params.replace(mu=mu), mode)


def optimize_finite(
    params: SystemParams, spec: OptimizeSpec | None = None
) -> tuple[float, float, RatePoint]:
    """Coordinate descent over (mu, p_x) for the finite-key rate."""
    if spec is None:
        spec = OptimizeSpec(objective="finite_key")
    elif spec.mode != "finite":
        spec = OptimizeSpec(
            spec.mu_range, spec.px_range, spec.grid_points, spec.refine_tol, "finite_key"
        )

    def rate(mu: float, px: float) -> float:
        return _evaluate(params.replace(mu=mu, p_x=px), "finite").R

    # Seed on a coarse 2-D grid so that a zero-rate starting row cannot stall the descent.
    mus = np.logspace(*np.log10(spec.mu_range), spec.grid_points)
    pxs = np.logspace(*np.log10(spec.px_range), max(8, spec.grid_points // 4))
    table = np.array([[rate(m, p) for p in pxs] for m in mus])
    i, j = np.unravel_index(int(np.argmax(table)), table.shape)
    mu, px, best = float(mus[i]), float(pxs[j]), float(table[i, j])
    if best <= 0:
        return math.nan, math.nan, _zero_point(params.replace(mu=mu, p_x=px), "finite")

    for _ in range(spec.max_sweeps):
        previous = best
        new_mu, v = _maximise_log(
            lambda m: rate(m, px), *spec.mu_range, spec.grid_points, spec.refine_tol
        )
        if v > best:
            mu, best = new_mu, v
        new_px, v = _maximise_log(
            lambda p: rate(mu, p), *spec.px_range, spec.grid_points, spec.refine_tol
        )
        if v > best:
            px, best = new_px, v
        if best <= previous * (1 + spec.refine_tol):
            break
    return mu, px, _evaluate(params.replace(mu=mu, p_x=px), "finite")


def optimize(params: SystemParams, spec: OptimizeSpec) -> RatePoint:
    if spec.mode == "finite":
        return optimize_finite(params, spec)[2]
    return optimize_mu(params, spec)[1]


def sweep(
    params: SystemParams, L_list: Sequence[float], spec: OptimizeSpec = OptimizeSpec()
) -> list[RatePoint]:
    """One optimised RatePoint per distance, in the order given (must be ascending)."""
    L_list = list(L_list)
    if not L_list:
        raise ValueError("distance list is empty")
    if any(b < a for a, b in zip(L_list, L_list[1:])):
        raise ValueError("distance list must be sorted ascending")
    return [optimize(params.replace(L_km=float(L)), spec) for L in L_list]
