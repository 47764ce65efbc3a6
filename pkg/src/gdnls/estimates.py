"""Verification harness for the multilinear estimates.

Measured constants are convention-dependent (the analysis only asserts
bounds up to constants), so every check is a ratio report: the left-hand
side divided by the right-hand side with the unknown constant stripped.
A report passes when its ratios stay below a configured bound; sweeps over
the frequency scale N belong to the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError
from .picard import TimeGrid, xi_generation, xi_level
from .spectrum import (
    FrequencyGrid,
    ParameterSet,
    SpectralFunction,
    default_grid,
    fl_norm,
    make_phi,
    sobolev_norm,
)

__all__ = [
    "BoxSpec",
    "EstimateReport",
    "f_s",
    "cardinal_bspline",
    "box_convolution",
    "verify_lemma25",
    "verify_lemma26",
    "verify_prop29",
    "verify_lemma210",
]

# Operational reading of "much greater / much less than".
DEFAULT_MARGIN = 16.0
# Largest t (in units of N^-2) for which the oscillatory factor keeps
# real part >= 1/2 on the data support.
TIME_WINDOW_FACTOR = 0.05


@dataclass(frozen=True)
class BoxSpec:
    """Frequency box [center - width/2, center + width/2)."""

    center: float
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise ConfigurationError("box width must be positive")


@dataclass
class EstimateReport:
    lemma: str
    params: dict
    ratios: dict
    passed: bool
    tolerance: float
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "lemma": self.lemma,
            "params": self.params,
            "ratios": self.ratios,
            "passed": self.passed,
            "tolerance": self.tolerance,
            "notes": self.notes,
        }


def f_s(s: float, A: float) -> float:
    """Regularity weight controlling H^s norms of width-A box spectra:
    1 below s = -1/2, (log A)^{1/2} at s = -1/2, A^{1/2+s} above."""
    if A < 1:
        raise ConfigurationError("f_s requires A >= 1")
    if abs(s + 0.5) <= 1e-12:
        return math.sqrt(math.log(A))
    if s < -0.5:
        return 1.0
    return A ** (0.5 + s)


def cardinal_bspline(n: int, x) -> np.ndarray:
    """Centered cardinal B-spline of order n: the n-fold convolution of the
    unit box 1_[-1/2, 1/2).  Exact piecewise-polynomial evaluation."""
    if n < 1:
        raise ConfigurationError("order must be >= 1")
    x = np.asarray(x, dtype=float)
    if n == 1:
        return ((x >= -0.5) & (x < 0.5)).astype(float)
    acc = np.zeros_like(x)
    for k in range(n + 1):
        acc += (-1) ** k * math.comb(n, k) * np.clip(x + n / 2 - k, 0.0, None) ** (n - 1)
    return acc / math.factorial(n - 1)


def box_convolution(boxes: Sequence[BoxSpec], xi) -> np.ndarray:
    """Exact value of the iterated convolution of box indicators at xi.

    For n equal-width boxes this is A^(n-1) B_n((xi - sum of centers)/A)
    with B_n the order-n cardinal B-spline; no discretization error.
    """
    boxes = list(boxes)
    if not 1 <= len(boxes) <= 8:
        raise ConfigurationError("between 1 and 8 boxes supported")
    width = boxes[0].width
    for b in boxes[1:]:
        if abs(b.width - width) > 1e-12 * width:
            raise ConfigurationError("boxes must share one width")
    n = len(boxes)
    center = sum(b.center for b in boxes)
    x = (np.asarray(xi, dtype=float) - center) / width
    return width ** (n - 1) * cardinal_bspline(n, x)


def _moments(params: ParameterSet) -> tuple[float, float, float]:
    return params.N, params.R, params.A


def _prepare_generation(
    params: ParameterSet,
    k: int,
    p: int,
    t_max: float,
    points_per_block: int,
    time_steps: int | None,
):
    grid = default_grid(params, generations=max(k + p, 1), points_per_block=points_per_block)
    if time_steps is None:
        tg = TimeGrid.for_extent(t_max, grid.xi_max)
    else:
        tg = TimeGrid(t_max=t_max, steps=time_steps)
    phi = make_phi(params, grid, min_points_per_block=points_per_block)
    return grid, tg, phi


def verify_lemma25(
    params: ParameterSet,
    k: int,
    p: int,
    t_samples: Sequence[float] | None = None,
    bound: float = 100.0,
    points_per_block: int = 16,
    time_steps: int | None = None,
) -> EstimateReport:
    """Ratios of the three Fourier-Lebesgue bounds for one generation (k, p):
    FL1 against t^(k+p) N^k (RA)^(2k+4p+1), FLinf and the derivative FLinf
    against their N^k / N^(k+1) counterparts."""
    if k + p > 2:
        raise ConfigurationError("generation cap for verification is k + p <= 2")
    N, R, A = _moments(params)
    t_max = params.T
    grid, tg, phi = _prepare_generation(params, k, p, t_max, points_per_block, time_steps)
    xi_kp = xi_generation(k, p, phi, tg, cap=max(k + p, 1))
    j = k + p
    times = tg.times if t_samples is None else np.asarray(t_samples)
    sup1 = supinf = supder = 0.0
    for t in times:
        if t <= 0 and j >= 1:
            continue
        idx = int(round(t / tg.dt))
        frame = xi_kp.at_index(idx)
        tj = t**j if j >= 1 else 1.0
        sup1 = max(sup1, fl_norm(frame, 1) / (tj * N**k * (R * A) ** (2 * k + 4 * p + 1)))
        supinf = max(supinf, fl_norm(frame, math.inf) / (tj * N**k * (R * A) ** (2 * k + 4 * p) * R))
        deriv = SpectralFunction(grid, 1j * grid.xis * frame.values)
        supder = max(
            supder,
            fl_norm(deriv, math.inf) / (tj * N ** (k + 1) * (R * A) ** (2 * k + 4 * p) * R),
        )
    ratios = {"fl1": sup1, "fl_inf": supinf, "fl_inf_derivative": supder}
    passed = all(np.isfinite(v) and v <= bound for v in ratios.values())
    return EstimateReport(
        lemma="2.5",
        params={"s": params.s, "N": N, "A": A, "R": R, "k": k, "p": p, "t_max": t_max},
        ratios=ratios,
        passed=passed,
        tolerance=bound,
    )


def verify_lemma26(
    params: ParameterSet,
    k: int,
    p: int,
    t_samples: Sequence[float] | None = None,
    bound: float = 100.0,
    points_per_block: int = 16,
    time_steps: int | None = None,
) -> EstimateReport:
    """H^s bound for one generation against f_s(A) t^(k+p) N^k (RA)^(2k+4p) R."""
    if k + p > 2:
        raise ConfigurationError("generation cap for verification is k + p <= 2")
    N, R, A = _moments(params)
    t_max = params.T
    grid, tg, phi = _prepare_generation(params, k, p, t_max, points_per_block, time_steps)
    xi_kp = xi_generation(k, p, phi, tg, cap=max(k + p, 1))
    j = k + p
    weight = f_s(params.s, A)
    times = tg.times if t_samples is None else np.asarray(t_samples)
    sup = 0.0
    for t in times:
        if t <= 0 and j >= 1:
            continue
        idx = int(round(t / tg.dt))
        frame = xi_kp.at_index(idx)
        tj = t**j if j >= 1 else 1.0
        sup = max(
            sup,
            sobolev_norm(frame, params.s)
            / (weight * tj * N**k * (R * A) ** (2 * k + 4 * p) * R),
        )
    passed = np.isfinite(sup) and sup <= bound
    return EstimateReport(
        lemma="2.6",
        params={"s": params.s, "N": N, "A": A, "R": R, "k": k, "p": p, "t_max": t_max},
        ratios={"h_s": sup},
        passed=passed,
        tolerance=bound,
    )


def verify_prop29(
    params: ParameterSet,
    t: float,
    c_min: float = 0.0,
    margin: float = DEFAULT_MARGIN,
    points_per_block: int = 32,
    time_steps: int | None = None,
) -> EstimateReport:
    """Measured constant in the first-iterate lower bound:
    c = ||Xi_1(phi)(t)||_{H^s} / (f_s(A) t R^5 A^4)."""
    N, R, A = _moments(params)
    if t <= 0:
        raise ConfigurationError("the lower bound needs t > 0")
    if t > TIME_WINDOW_FACTOR * N**-2:
        raise ConfigurationError(
            f"t = {t} outside the window (0, {TIME_WINDOW_FACTOR} N^-2]"
        )
    if R**2 * A**2 < margin * N:
        raise ConfigurationError(
            f"quintic dominance needs R^2 A^2 >= {margin} N (got {R ** 2 * A ** 2} vs {margin * N})"
        )
    grid = default_grid(params, generations=1, points_per_block=points_per_block)
    tg = TimeGrid.for_extent(t, grid.xi_max) if time_steps is None else TimeGrid(t, time_steps)
    phi = make_phi(params, grid, min_points_per_block=points_per_block)
    xi1 = xi_level(1, phi, tg, cap=1)
    measured = sobolev_norm(xi1.final, params.s) / (f_s(params.s, A) * t * R**5 * A**4)
    passed = measured > c_min
    return EstimateReport(
        lemma="2.9",
        params={"s": params.s, "N": N, "A": A, "R": R, "t": t},
        ratios={"c": measured},
        passed=passed,
        tolerance=c_min,
    )


def verify_lemma210(
    params: ParameterSet,
    psi_pert: SpectralFunction,
    j: int,
    t_samples: Sequence[float] | None = None,
    bound: float = 100.0,
    points_per_block: int = 16,
    time_steps: int | None = None,
) -> EstimateReport:
    """Perturbation stability: ||Xi_j(phi + psi) - Xi_j(phi)||_{L^2} against
    ||psi||_{L^2} (t R^4 A^4)^j."""
    if j < 1 or j > 2:
        raise ConfigurationError("perturbation check supports j in {1, 2}")
    N, R, A = _moments(params)
    support = np.abs(psi_pert.values) > 0
    if not support.any():
        raise ConfigurationError("perturbation is identically zero")
    radius = float(np.max(np.abs(psi_pert.grid.xis[support])))
    if N < 16 * radius:
        raise ConfigurationError(f"need N >= 16 * support radius ({radius})")
    if fl_norm(psi_pert, 1) > 8 * R * A:
        raise ConfigurationError("perturbation too large: FL1 above 8 R A")
    # perturbed data reach further in frequency than the two-block datum
    # (slots near 0 stop the alternating sum from cancelling), so take the
    # grid one generation wider than the level being checked
    grid, tg, phi = _prepare_generation(params, j + 1, 0, params.T, points_per_block, time_steps)
    psi_res = _resample(psi_pert, grid)
    perturbed = SpectralFunction(grid, phi.values + psi_res.values)
    base = xi_level(j, phi, tg, cap=j)
    shifted = xi_level(j, perturbed, tg, cap=j)
    psi_l2 = sobolev_norm(psi_res, 0.0)
    times = tg.times if t_samples is None else np.asarray(t_samples)
    sup = 0.0
    for t in times:
        if t <= 0:
            continue
        idx = int(round(t / tg.dt))
        diff = SpectralFunction(grid, shifted.frames[idx] - base.frames[idx])
        sup = max(sup, sobolev_norm(diff, 0.0) / (psi_l2 * (t * R**4 * A**4) ** j))
    passed = np.isfinite(sup) and sup <= bound
    return EstimateReport(
        lemma="2.10",
        params={"s": params.s, "N": N, "A": A, "R": R, "j": j, "t_max": params.T},
        ratios={"l2_difference": sup},
        passed=passed,
        tolerance=bound,
    )


def _resample(f: SpectralFunction, grid: FrequencyGrid) -> SpectralFunction:
    """Linear interpolation of a spectrum onto another grid (zero outside)."""
    if f.grid == grid:
        return f
    re = np.interp(grid.xis, f.grid.xis, f.values.real, left=0.0, right=0.0)
    im = np.interp(grid.xis, f.grid.xis, f.values.imag, left=0.0, right=0.0)
    return SpectralFunction(grid, re + 1j * im)
