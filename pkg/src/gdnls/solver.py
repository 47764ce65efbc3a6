"""Pseudospectral integrator for the gauged derivative NLS on a large
periodic box, plus the gauge transform linking it to the ungauged equation.

The equation integrated is

    i v_t + v_xx = -i v^2 d/dx conj(v) - (1/2) |v|^4 v,

rewritten as v_t = i v_xx + G(v) with G(v) = -v^2 d/dx conj(v) + (i/2)|v|^4 v.
The linear flow is applied exactly through the integrating factor; G is
evaluated pointwise on a zero-padded physical grid (padding factor >= 3 so
degree-5 products are alias-free for modes kept below M / dealias_factor).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import AccuracyError, ConfigurationError
from .spectrum import FrequencyGrid, SpectralFunction

__all__ = [
    "TorusConfig",
    "PhysicalState",
    "gauge",
    "ungauge",
    "step_gdnls",
    "solve_gdnls",
    "solve_dnls",
    "state_from_spectrum",
    "spectrum_from_state",
]

DEFAULT_C_STAB = 2.0
EDGE_FRACTION = 0.05
EDGE_MASS_TOL = 1e-6


@dataclass(frozen=True)
class TorusConfig:
    """Periodic box [0, L) sampled at M points; dt may be negative for
    backward integration."""

    length: float
    modes: int
    dt: float
    dealias_factor: int = 3

    def __post_init__(self):
        if self.length <= 0:
            raise ConfigurationError("length must be positive")
        if self.modes < 8 or self.modes & (self.modes - 1):
            raise ConfigurationError("modes must be a power of two >= 8")
        if self.dt == 0:
            raise ConfigurationError("dt must be nonzero")
        if self.dealias_factor < 3:
            raise ConfigurationError("quintic products need dealias_factor >= 3")

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        return 2 * np.pi / self.length * np.fft.fftfreq(self.modes, d=1.0 / self.modes)

    @property
    def band_limit(self) -> int:
        """Largest kept mode index; content above it is truncated."""
        return self.modes // self.dealias_factor

    @property
    def xi_max(self) -> float:
        return 2 * np.pi / self.length * self.band_limit

    @cached_property
    def band_mask(self) -> np.ndarray:
        idx = np.fft.fftfreq(self.modes, d=1.0 / self.modes).astype(int)
        return np.abs(idx) <= self.band_limit

    @property
    def dx(self) -> float:
        return self.length / self.modes

    @cached_property
    def xs(self) -> np.ndarray:
        return self.dx * np.arange(self.modes)


@dataclass
class PhysicalState:
    config: TorusConfig
    samples: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.shape != (self.config.modes,):
            raise ConfigurationError("samples length must equal the mode count")
        if not np.all(np.isfinite(self.samples)):
            raise ConfigurationError("samples must be finite")

    @property
    def mass(self) -> float:
        return float(self.config.dx * np.sum(np.abs(self.samples) ** 2))


def _left_anchored_phase(samples: np.ndarray, dx: float) -> np.ndarray:
    return cumulative_trapezoid(np.abs(samples) ** 2, dx=dx, initial=0.0)


def _check_left_decay(state: PhysicalState) -> None:
    m = state.config.modes
    edge = int(math.ceil(EDGE_FRACTION * m))
    total = np.sum(np.abs(state.samples) ** 2)
    if total == 0:
        return
    left = np.sum(np.abs(state.samples[:edge]) ** 2)
    if left > EDGE_MASS_TOL * total:
        raise ConfigurationError(
            f"left-edge mass fraction {left / total:.2e} exceeds {EDGE_MASS_TOL}; "
            "the left-anchored gauge integral is not a valid stand-in for -infinity"
        )


def gauge(u: PhysicalState) -> PhysicalState:
    """Multiply by exp(-i Phi(x)) with Phi the cumulative integral of |u|^2
    from the left edge of the box.  Preserves |u| pointwise."""
    _check_left_decay(u)
    phase = _left_anchored_phase(u.samples, u.config.dx)
    return PhysicalState(u.config, np.exp(-1j * phase) * u.samples, u.time)


def ungauge(v: PhysicalState) -> PhysicalState:
    """Inverse transform; uses |v| = |u|, so the phase integral is computed
    from the gauged field itself."""
    _check_left_decay(v)
    phase = _left_anchored_phase(v.samples, v.config.dx)
    return PhysicalState(v.config, np.exp(1j * phase) * v.samples, v.time)


def _nonlinear_hat(config: TorusConfig, v_hat: np.ndarray) -> np.ndarray:
    """Spectrum of G(v), dealiased by zero padding and band truncation."""
    m, factor = config.modes, config.dealias_factor
    pad = factor * m
    padded = np.zeros(pad, dtype=np.complex128)
    padded[: m // 2] = v_hat[: m // 2]
    padded[-(m // 2) :] = v_hat[-(m // 2) :]
    scale = pad / m
    v_phys = np.fft.ifft(padded) * scale
    k_pad = 2 * np.pi / config.length * np.fft.fftfreq(pad, d=1.0 / pad)
    vx_phys = np.fft.ifft(1j * k_pad * padded) * scale
    # overflow here just means the blow-up check in step_gdnls will fire
    with np.errstate(over="ignore", invalid="ignore"):
        g_phys = -(v_phys**2) * np.conj(vx_phys) + 0.5j * np.abs(v_phys) ** 4 * v_phys
    g_hat_pad = np.fft.fft(g_phys) / scale
    g_hat = np.zeros(m, dtype=np.complex128)
    g_hat[: m // 2] = g_hat_pad[: m // 2]
    g_hat[-(m // 2) :] = g_hat_pad[-(m // 2) :]
    g_hat[~config.band_mask] = 0.0
    return g_hat


def step_gdnls(state: PhysicalState, nonlinear: bool = True) -> PhysicalState:
    """One integrating-factor RK4 step."""
    cfg = state.config
    dt = cfg.dt
    k2 = cfg.wavenumbers**2
    e_half = np.exp(-1j * k2 * dt / 2)
    e_full = e_half**2
    v_hat = np.fft.fft(state.samples)

    if nonlinear:
        n1 = _nonlinear_hat(cfg, v_hat)
        n2 = _nonlinear_hat(cfg, e_half * (v_hat + dt / 2 * n1))
        n3 = _nonlinear_hat(cfg, e_half * v_hat + dt / 2 * n2)
        n4 = _nonlinear_hat(cfg, e_full * v_hat + dt * e_half * n3)
        v_hat = e_full * v_hat + dt / 6 * (e_full * n1 + 2 * e_half * (n2 + n3) + n4)
    else:
        v_hat = e_full * v_hat

    samples = np.fft.ifft(v_hat)
    if not np.all(np.isfinite(samples)):
        raise AccuracyError(f"solution blew up at t = {state.time + dt}")
    return PhysicalState(cfg, samples, state.time + dt)


def solve_gdnls(
    v0: PhysicalState,
    t_final: float,
    checkpoint_every: int | None = None,
    nonlinear: bool = True,
    c_stab: float = DEFAULT_C_STAB,
) -> list[PhysicalState]:
    """Integrate to t_final; returns [v0, checkpoints..., final]."""
    cfg = v0.config
    if abs(cfg.dt) > c_stab / cfg.xi_max**2:
        raise ConfigurationError(
            f"|dt| = {abs(cfg.dt)} exceeds the stability bound "
            f"{c_stab / cfg.xi_max ** 2:.3e} = c_stab / xi_max^2"
        )
    span = t_final - v0.time
    if span == 0:
        return [v0]
    n_steps = round(span / cfg.dt)
    if n_steps <= 0 or abs(n_steps * cfg.dt - span) > 1e-9 * abs(span):
        raise ConfigurationError("t_final - t0 must be a positive multiple of dt")
    out = [v0]
    state = v0
    for i in range(1, n_steps + 1):
        state = step_gdnls(state, nonlinear=nonlinear)
        if (checkpoint_every and i % checkpoint_every == 0) or i == n_steps:
            out.append(state)
    return out


def solve_dnls(u0: PhysicalState, t_final: float, **kwargs) -> list[PhysicalState]:
    """Derived integrator for the ungauged equation: gauge, evolve, ungauge."""
    gauged = solve_gdnls(gauge(u0), t_final, **kwargs)
    return [ungauge(s) for s in gauged]


def state_from_spectrum(f: SpectralFunction, config: TorusConfig, time: float = 0.0) -> PhysicalState:
    """Periodize a line spectrum: requires delta_xi = 2 pi / L so grid points
    coincide with torus modes.  u(x) = (delta_xi / 2 pi) sum f_hat(xi_k) e^{i xi_k x}."""
    dxi = 2 * np.pi / config.length
    if abs(f.grid.delta_xi - dxi) > 1e-9 * dxi:
        raise ConfigurationError(
            f"grid spacing {f.grid.delta_xi} must equal 2 pi / L = {dxi}"
        )
    m = config.modes
    c_hat = np.zeros(m, dtype=np.complex128)
    for j, xi in enumerate(f.grid.xis):
        if f.values[j] == 0:
            continue
        k = int(round(xi / dxi))
        if abs(k) > config.band_limit:
            raise ConfigurationError(
                f"spectral content at xi = {xi} above the torus band limit {config.xi_max}"
            )
        c_hat[k % m] = f.values[j] * dxi / (2 * np.pi)
    samples = np.fft.ifft(c_hat) * m
    return PhysicalState(config, samples, time)


def spectrum_from_state(state: PhysicalState, grid: FrequencyGrid) -> SpectralFunction:
    """Inverse of state_from_spectrum on the resolved band."""
    cfg = state.config
    dxi = 2 * np.pi / cfg.length
    if abs(grid.delta_xi - dxi) > 1e-9 * dxi:
        raise ConfigurationError("grid spacing must equal 2 pi / L")
    c_hat = np.fft.fft(state.samples) / cfg.modes
    values = np.zeros(grid.count, dtype=np.complex128)
    for j, xi in enumerate(grid.xis):
        k = int(round(xi / dxi))
        if abs(k) <= cfg.modes // 2 - 1:
            values[j] = c_hat[k % cfg.modes] * 2 * np.pi / dxi
    return SpectralFunction(grid, values)


def reversed_config(config: TorusConfig) -> TorusConfig:
    return replace(config, dt=-config.dt)
