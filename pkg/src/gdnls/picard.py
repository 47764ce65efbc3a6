"""Fourier-side evaluation of the Duhamel operators and tree-indexed
Picard terms.

Everything lives on one shared symmetric frequency grid and one shared
uniform time grid, so operators nest without re-integration: an inner
iterate is available at every quadrature node of the outer time integral.

Product structure on the Fourier side (with the package convention
f_hat = int f exp(-i x xi) dx):

    F[f g]           = (1/2pi) f_hat * g_hat          (* = continuous convolution)
    F[conj(f)](xi)   = conj(f_hat(-xi))
    F[d/dx conj(f)]  = i xi conj(f_hat(-xi))

Continuous convolutions are approximated by delta_xi-weighted discrete
convolutions, computed by FFT with full zero padding (no circular
wraparound) and re-windowed onto the shared grid.  Mass that falls within
two cells of the grid edge triggers an accuracy error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.signal import fftconvolve

from .errors import AccuracyError, ConfigurationError, ResourceError
from .spectrum import FrequencyGrid, SpectralFunction
from .trees import Tree, enumerate_trees, tree_stats

__all__ = [
    "TimeGrid",
    "SpaceTimeFunction",
    "SeriesResult",
    "duhamel_J",
    "duhamel_K",
    "psi",
    "first_iterate_quintic_exact",
    "xi_generation",
    "xi_level",
    "series_sum",
    "free_frames",
]

DEFAULT_GENERATION_CAP = 2
DEFAULT_CLIP_TOL = 1e-10
PHASE_OVERSAMPLE = 16.0


@dataclass(frozen=True)
class TimeGrid:
    """Uniform quadrature grid on [0, t_max] with an even number of steps."""

    t_max: float
    steps: int

    def __post_init__(self):
        if self.t_max <= 0:
            raise ConfigurationError("t_max must be positive")
        if self.steps < 4 or self.steps % 2:
            raise ConfigurationError("steps must be even and >= 4 (composite Simpson)")

    @property
    def dt(self) -> float:
        return self.t_max / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps + 1)

    @classmethod
    def for_extent(
        cls,
        t_max: float,
        xi_max: float,
        min_steps: int = 4,
        max_steps: int = 4096,
    ) -> "TimeGrid":
        """Steps chosen to resolve the oscillatory phase exp(i t' xi^2),
        whose magnitude is bounded by t * xi_max^2."""
        need = int(np.ceil(PHASE_OVERSAMPLE * t_max * xi_max**2))
        steps = min(max(min_steps, need), max_steps)
        if steps % 2:
            steps += 1
        return cls(t_max=t_max, steps=steps)


@dataclass
class SpaceTimeFunction:
    """One SpectralFunction per time node, stored as a (steps+1, count) array."""

    time_grid: TimeGrid
    grid: FrequencyGrid
    frames: np.ndarray

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.complex128)
        expected = (self.time_grid.steps + 1, self.grid.count)
        if self.frames.shape != expected:
            raise ConfigurationError(f"frames shape {self.frames.shape}, expected {expected}")

    def at_index(self, i: int) -> SpectralFunction:
        return SpectralFunction(self.grid, self.frames[i].copy())

    @property
    def final(self) -> SpectralFunction:
        return self.at_index(self.time_grid.steps)

    def __add__(self, other: "SpaceTimeFunction") -> "SpaceTimeFunction":
        _check_compatible(self, other)
        return SpaceTimeFunction(self.time_grid, self.grid, self.frames + other.frames)


def _check_compatible(*fns: SpaceTimeFunction) -> None:
    tg, grid = fns[0].time_grid, fns[0].grid
    for f in fns[1:]:
        if f.time_grid != tg or f.grid != grid:
            raise ConfigurationError("operands must share time and frequency grids")
    if not grid.is_symmetric:
        raise ConfigurationError("shared grid must be symmetric about 0")


def free_frames(phi: SpectralFunction, tg: TimeGrid) -> SpaceTimeFunction:
    """Free evolution S(t) phi sampled at every time node."""
    phase = np.exp(-1j * np.outer(tg.times, phi.grid.xis**2))
    return SpaceTimeFunction(tg, phi.grid, phase * phi.values[np.newaxis, :])


def _conv_window(a: np.ndarray, b: np.ndarray, grid: FrequencyGrid, clip_tol: float) -> np.ndarray:
    """delta_xi-weighted convolution of two frame stacks, re-windowed onto grid.

    The full linear convolution starts at 2*xi_min; for a symmetric grid the
    window back onto [xi_min, xi_max] is the central slice.
    """
    full = fftconvolve(a, b, mode="full", axes=-1) * (grid.delta_xi / (2 * np.pi))
    half = (grid.count - 1) // 2
    kept = full[..., half : half + grid.count]
    peak = np.max(np.abs(full))
    if peak > 0:
        edge = max(
            np.max(np.abs(full[..., : half + 2]), initial=0.0),
            np.max(np.abs(full[..., half + grid.count - 2 :]), initial=0.0),
        )
        if edge > clip_tol * peak:
            raise AccuracyError(
                f"convolution support clipped at the grid edge "
                f"(relative edge mass {edge / peak:.2e} > {clip_tol:.1e}); widen the grid"
            )
    return np.ascontiguousarray(kept)


def _conj_reflect(frames: np.ndarray) -> np.ndarray:
    """F[conj(v)] on a symmetric grid: conjugate and reverse the xi axis."""
    return np.conj(frames[..., ::-1])


def _duhamel_close(
    tg: TimeGrid, grid: FrequencyGrid, integrand: np.ndarray, prefactor: complex
) -> SpaceTimeFunction:
    """Apply exp(i t' xi^2) inside, cumulative Simpson in t', and the outer
    free propagator exp(-i t xi^2)."""
    phase = np.exp(1j * np.outer(tg.times, grid.xis**2))
    shifted = phase * integrand
    # cumulative_simpson only handles real data
    inner = cumulative_simpson(
        shifted.real, dx=tg.dt, axis=0, initial=0.0
    ) + 1j * cumulative_simpson(shifted.imag, dx=tg.dt, axis=0, initial=0.0)
    out = prefactor * np.conj(phase) * inner
    return SpaceTimeFunction(tg, grid, out)


def duhamel_J(
    v1: SpaceTimeFunction,
    v2: SpaceTimeFunction,
    v3: SpaceTimeFunction,
    clip_tol: float = DEFAULT_CLIP_TOL,
) -> SpaceTimeFunction:
    """Cubic Duhamel operator: -i int_0^t S(t-t') v1 v2 d/dx conj(v3) dt'.

    Output frequency support is S1 + S2 - S3 (Minkowski); the convolution is
    ordered (v1 * reflect(v3)) * v2 so intermediate supports stay within the
    grid whenever the final support does.
    """
    _check_compatible(v1, v2, v3)
    grid, tg = v1.grid, v1.time_grid
    d3 = 1j * grid.xis * _conj_reflect(v3.frames)
    prod = _conv_window(_conv_window(v1.frames, d3, grid, clip_tol), v2.frames, grid, clip_tol)
    return _duhamel_close(tg, grid, prod, -1j)


def duhamel_K(
    v1: SpaceTimeFunction,
    v2: SpaceTimeFunction,
    v3: SpaceTimeFunction,
    v4: SpaceTimeFunction,
    v5: SpaceTimeFunction,
    clip_tol: float = DEFAULT_CLIP_TOL,
) -> SpaceTimeFunction:
    """Quintic Duhamel operator:
    -(1/2) int_0^t S(t-t') v1 conj(v2) v3 conj(v4) v5 dt'.

    Convolution order ((1,2bar),(3,4bar)),5 keeps the alternating partial
    sums inside the grid.
    """
    _check_compatible(v1, v2, v3, v4, v5)
    grid, tg = v1.grid, v1.time_grid
    ab = _conv_window(v1.frames, _conj_reflect(v2.frames), grid, clip_tol)
    cd = _conv_window(v3.frames, _conj_reflect(v4.frames), grid, clip_tol)
    abcd = _conv_window(ab, cd, grid, clip_tol)
    prod = _conv_window(abcd, v5.frames, grid, clip_tol)
    return _duhamel_close(tg, grid, prod, -0.5)


def psi(
    tree: Tree,
    phi: SpectralFunction,
    tg: TimeGrid,
    cap: int = DEFAULT_GENERATION_CAP,
    clip_tol: float = DEFAULT_CLIP_TOL,
    _memo: dict | None = None,
) -> SpaceTimeFunction:
    """Multilinear Picard term of one tree: leaves become S(t) phi, 3-ary
    nodes the cubic operator, 5-ary nodes the quintic one.

    Structurally equal subtrees are evaluated once per call.
    """
    stats = tree_stats(tree)
    if stats.internal > cap:
        raise ResourceError(
            f"tree has {stats.internal} internal nodes, above the generation cap {cap}"
        )
    memo = {} if _memo is None else _memo
    return _psi_eval(tree, phi, tg, clip_tol, memo)


_MEMO_MAX_INTERNAL = 1


def _psi_eval(tree, phi, tg, clip_tol, memo):
    cached = memo.get(tree)
    if cached is not None:
        return cached
    if tree.is_leaf:
        out = free_frames(phi, tg)
    else:
        children = [_psi_eval(c, phi, tg, clip_tol, memo) for c in tree.children]
        op = duhamel_J if len(children) == 3 else duhamel_K
        out = op(*children, clip_tol=clip_tol)
    # cache only the small shared pieces; deep subtrees are rarely repeated
    # and each cached stack costs (steps + 1) * count complex values
    if tree_stats(tree).internal <= _MEMO_MAX_INTERNAL:
        memo[tree] = out
    return out


def xi_generation(
    k: int,
    p: int,
    phi: SpectralFunction,
    tg: TimeGrid,
    cap: int = DEFAULT_GENERATION_CAP,
    clip_tol: float = DEFAULT_CLIP_TOL,
) -> SpaceTimeFunction:
    """Sum of the Picard terms over every tree in generation (k, p)."""
    if k + p > cap:
        raise ResourceError(f"generation (k={k}, p={p}) above cap {cap}")
    total = None
    memo: dict = {}
    for tree in enumerate_trees(k, p, depth_cap=max(cap, k + p)):
        term = psi(tree, phi, tg, cap=cap, clip_tol=clip_tol, _memo=memo)
        total = term if total is None else total + term
    assert total is not None
    return total


def xi_level(
    j: int,
    phi: SpectralFunction,
    tg: TimeGrid,
    cap: int = DEFAULT_GENERATION_CAP,
    clip_tol: float = DEFAULT_CLIP_TOL,
) -> SpaceTimeFunction:
    """Sum of xi_generation(k, p) over all k + p = j."""
    if j > cap:
        raise ResourceError(f"level {j} above cap {cap}")
    total = None
    memo: dict = {}
    for k in range(j + 1):
        for tree in enumerate_trees(k, j - k, depth_cap=max(cap, j)):
            term = psi(tree, phi, tg, cap=cap, clip_tol=clip_tol, _memo=memo)
            total = term if total is None else total + term
    assert total is not None
    return total


@dataclass
class SeriesResult:
    """Partial Picard sum at the final time plus convergence diagnostics."""

    total: SpectralFunction
    level_l2: list[float]
    ratio: float
    tail_estimate: float
    converged: bool
    warnings: list[str] = field(default_factory=list)


def series_sum(
    phi: SpectralFunction,
    tg: TimeGrid,
    j_max: int = DEFAULT_GENERATION_CAP,
    cap: int | None = None,
    clip_tol: float = DEFAULT_CLIP_TOL,
) -> SeriesResult:
    """Partial sum of the tree series up to level j_max, evaluated at t_max.

    The tail is extrapolated geometrically from the last observed L^2 level
    ratio; an observed ratio >= 1 raises an accuracy (divergence) error.
    """
    cap = j_max if cap is None else cap
    levels: list[SpectralFunction] = []
    l2s: list[float] = []
    for j in range(j_max + 1):
        lvl = xi_level(j, phi, tg, cap=cap, clip_tol=clip_tol).final
        levels.append(lvl)
        l2s.append(float(np.sqrt(np.trapezoid(np.abs(lvl.values) ** 2, dx=phi.grid.delta_xi) / (2 * np.pi))))
    total = np.sum([lvl.values for lvl in levels], axis=0)

    ratio = 0.0
    for j in range(1, j_max + 1):
        if l2s[j - 1] > 0:
            ratio = l2s[j] / l2s[j - 1]
    warnings = []
    if j_max >= 1 and ratio >= 1.0:
        raise AccuracyError(f"Picard series diverging: observed level ratio {ratio:.3g} >= 1")
    if j_max >= 1 and ratio >= 0.5:
        warnings.append(f"level ratio {ratio:.3g} >= 1/2; tail extrapolation unreliable")
    tail = l2s[-1] * ratio / (1.0 - ratio) if ratio < 1.0 else float("inf")
    return SeriesResult(
        total=SpectralFunction(phi.grid, total),
        level_l2=l2s,
        ratio=ratio,
        tail_estimate=tail,
        converged=ratio < 0.5,
        warnings=warnings,
    )


MAX_ORACLE_LATTICE = 90  # guard: the direct oracle builds S^4 arrays


def first_iterate_quintic_exact(
    phi: SpectralFunction,
    t: float,
    grid: FrequencyGrid | None = None,
    xi_indices: np.ndarray | None = None,
) -> SpectralFunction:
    """Direct-sum oracle for the quintic first iterate K^5[S(t) phi].

    Quadrature over (xi_1..xi_4) on the support lattice of phi with
    xi_5 = xi - xi_1 + xi_2 - xi_3 + xi_4, using the closed-form time factor
    E(Phi, t) = (exp(i t Phi) - 1) / (i Phi) (4th-order Taylor fallback for
    |Phi| t < 1e-4).  Independent of the FFT-convolution / Simpson path.
    """
    grid = phi.grid if grid is None else grid
    if grid != phi.grid:
        raise ConfigurationError("oracle expects phi defined on the output grid")
    support = np.nonzero(np.abs(phi.values) > 0)[0]
    S = support.size
    if S == 0:
        return SpectralFunction(grid, np.zeros(grid.count, dtype=np.complex128))
    if S > MAX_ORACLE_LATTICE:
        raise ResourceError(
            f"oracle lattice size {S} exceeds {MAX_ORACLE_LATTICE}; use a coarser grid"
        )
    xs = grid.xis[support]
    amps = phi.values[support]

    x1 = xs[:, None, None, None]
    x2 = xs[None, :, None, None]
    x3 = xs[None, None, :, None]
    x4 = xs[None, None, None, :]
    shift = x1 - x2 + x3 - x4
    quad = -(x1**2) + x2**2 - x3**2 + x4**2
    prod4 = (
        amps[:, None, None, None]
        * np.conj(amps)[None, :, None, None]
        * amps[None, None, :, None]
        * np.conj(amps)[None, None, None, :]
    )

    lookup = phi.values
    dxi = grid.delta_xi
    out = np.zeros(grid.count, dtype=np.complex128)
    indices = np.arange(grid.count) if xi_indices is None else np.asarray(xi_indices)
    pref = -0.5 * (dxi / (2 * np.pi)) ** 4
    for j in indices:
        xi = grid.xis[j]
        xi5 = xi - shift
        i5 = np.rint((xi5 - grid.xi_min) / dxi).astype(np.intp)
        valid = (i5 >= 0) & (i5 < grid.count)
        a5 = np.where(valid, lookup[np.clip(i5, 0, grid.count - 1)], 0.0)
        if not np.any(a5):
            continue
        big_phi = xi**2 + quad - xi5**2
        z = t * big_phi
        small = np.abs(z) < 1e-4
        with np.errstate(divide="ignore", invalid="ignore"):
            e_factor = (np.exp(1j * z) - 1.0) / (1j * big_phi)
        zt = 1j * z[small]
        e_factor[small] = t * (1.0 + zt / 2.0 + zt**2 / 6.0 + zt**3 / 24.0)
        out[j] = pref * np.exp(-1j * t * xi**2) * np.sum(prod4 * a5 * e_factor)
    return SpectralFunction(grid, out)
