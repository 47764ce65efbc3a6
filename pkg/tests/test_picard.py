import numpy as np
import pytest

from gdnls.errors import AccuracyError, ConfigurationError, ResourceError
from gdnls.picard import (
    SpaceTimeFunction,
    TimeGrid,
    duhamel_J,
    duhamel_K,
    first_iterate_quintic_exact,
    free_frames,
    psi,
    series_sum,
    xi_generation,
    xi_level,
)
from gdnls.spectrum import FrequencyGrid, ParameterSet, SpectralFunction, default_grid, make_phi
from gdnls.trees import LEAF, Tree

# coarse configuration: small enough for the direct-sum oracles
P = ParameterSet(s=-1.0, N=16.0, A=4.0, R=1.0, T=1e-3)


def coarse_setup(points_per_block=8, steps=None, generations=1):
    grid = default_grid(P, generations=generations, points_per_block=points_per_block)
    phi = make_phi(P, grid, min_points_per_block=points_per_block)
    if steps is None:
        tg = TimeGrid.for_extent(P.T, grid.xi_max)
    else:
        tg = TimeGrid(t_max=P.T, steps=steps)
    return grid, phi, tg


def test_time_grid_validation():
    with pytest.raises(ConfigurationError):
        TimeGrid(t_max=0.0, steps=4)
    with pytest.raises(ConfigurationError):
        TimeGrid(t_max=1.0, steps=3)  # odd
    with pytest.raises(ConfigurationError):
        TimeGrid(t_max=1.0, steps=2)  # too few
    tg = TimeGrid.for_extent(1.0, 1000.0, max_steps=64)
    assert tg.steps == 64
    assert TimeGrid.for_extent(1e-9, 1.0).steps == 4


def test_free_frames_initial_and_modulus():
    grid, phi, tg = coarse_setup()
    frames = free_frames(phi, tg)
    assert np.array_equal(frames.at_index(0).values, phi.values)
    assert np.allclose(np.abs(frames.frames), np.abs(phi.values)[np.newaxis, :])


def test_duhamel_vanishes_at_time_zero():
    grid, phi, tg = coarse_setup()
    v = free_frames(phi, tg)
    for out in (duhamel_J(v, v, v), duhamel_K(v, v, v, v, v)):
        assert np.all(out.at_index(0).values == 0)


def test_duhamel_requires_shared_grids():
    grid, phi, tg = coarse_setup()
    v = free_frames(phi, tg)
    other_tg = TimeGrid(t_max=P.T, steps=tg.steps + 2)
    w = free_frames(phi, other_tg)
    with pytest.raises(ConfigurationError):
        duhamel_J(v, v, w)


def test_cubic_linearity_per_slot():
    grid, phi, tg = coarse_setup()
    v = free_frames(phi, tg)
    shifted = SpectralFunction(grid, np.roll(phi.values, 3))
    w = free_frames(shifted, tg)
    a, b = 0.7 - 0.2j, -1.1 + 0.4j

    vw = SpaceTimeFunction(tg, grid, a * v.frames + b * w.frames)
    # slot 1: linear
    lhs = duhamel_J(vw, v, v)
    rhs = SpaceTimeFunction(tg, grid, a * duhamel_J(v, v, v).frames + b * duhamel_J(w, v, v).frames)
    assert np.allclose(lhs.frames, rhs.frames, atol=1e-14)
    # slot 3: conjugate-linear
    lhs = duhamel_J(v, v, vw)
    rhs = SpaceTimeFunction(
        tg,
        grid,
        np.conj(a) * duhamel_J(v, v, v).frames + np.conj(b) * duhamel_J(v, v, w).frames,
    )
    assert np.allclose(lhs.frames, rhs.frames, atol=1e-14)


def test_quintic_conjugate_slots():
    grid, phi, tg = coarse_setup()
    v = free_frames(phi, tg)
    c = 0.3 + 0.9j
    cv = SpaceTimeFunction(tg, grid, c * v.frames)
    base = duhamel_K(v, v, v, v, v).frames
    assert np.allclose(duhamel_K(cv, v, v, v, v).frames, c * base, atol=1e-14)
    assert np.allclose(duhamel_K(v, cv, v, v, v).frames, np.conj(c) * base, atol=1e-14)
    assert np.allclose(duhamel_K(v, v, cv, v, v).frames, c * base, atol=1e-14)
    assert np.allclose(duhamel_K(v, v, v, cv, v).frames, np.conj(c) * base, atol=1e-14)
    assert np.allclose(duhamel_K(v, v, v, v, cv).frames, c * base, atol=1e-14)


def test_support_minkowski_arithmetic():
    """Output support of J is S + S - S, of K the alternating 5-fold sum."""
    grid, phi, tg = coarse_setup()
    N, A = P.N, P.A
    lo, hi = 2 * N - A / 2, 3 * N + A / 2

    j_out = duhamel_J(*([free_frames(phi, tg)] * 3)).final
    mask = (grid.xis < 2 * lo - hi - grid.delta_xi) | (grid.xis > 2 * hi - lo + grid.delta_xi)
    assert np.max(np.abs(j_out.values[mask]), initial=0.0) < 1e-13 * np.max(np.abs(j_out.values))

    k_out = duhamel_K(*([free_frames(phi, tg)] * 5)).final
    mask = (grid.xis < 3 * lo - 2 * hi - grid.delta_xi) | (grid.xis > 3 * hi - 2 * lo + grid.delta_xi)
    assert np.max(np.abs(k_out.values[mask]), initial=0.0) < 1e-13 * np.max(np.abs(k_out.values))


def test_edge_clipping_detected():
    params = ParameterSet(s=-1.0, N=16.0, A=4.0, R=1.0, T=1e-3)
    tight = FrequencyGrid.symmetric(3.5 * params.N, 0.5)  # covers phi but not products
    phi = make_phi(params, tight, min_points_per_block=8)
    tg = TimeGrid(t_max=params.T, steps=8)
    v = free_frames(phi, tg)
    with pytest.raises(AccuracyError):
        duhamel_K(v, v, v, v, v)


def cubic_oracle(phi, t):
    """Direct lattice sum for J[S phi, S phi, S phi](t): independent of the
    FFT-convolution and Simpson machinery.  Time integral in closed form."""
    grid = phi.grid
    support = np.nonzero(np.abs(phi.values) > 0)[0]
    xs = grid.xis[support]
    amps = phi.values[support]
    x1 = xs[:, None]
    x2 = xs[None, :]
    a12 = amps[:, None] * amps[None, :]
    out = np.zeros(grid.count, dtype=np.complex128)
    pref = -1j * (grid.delta_xi / (2 * np.pi)) ** 2
    for j in range(grid.count):
        xi = grid.xis[j]
        x3 = x1 + x2 - xi
        i3 = np.rint((x3 - grid.xi_min) / grid.delta_xi).astype(np.intp)
        valid = (i3 >= 0) & (i3 < grid.count)
        a3 = np.where(valid, np.conj(phi.values[np.clip(i3, 0, grid.count - 1)]), 0.0)
        if not np.any(a3):
            continue
        big_phi = xi**2 - x1**2 - x2**2 + x3**2
        z = t * big_phi
        small = np.abs(z) < 1e-4
        with np.errstate(divide="ignore", invalid="ignore"):
            e_factor = (np.exp(1j * z) - 1.0) / (1j * big_phi)
        zt = 1j * z[small]
        e_factor[small] = t * (1.0 + zt / 2.0 + zt**2 / 6.0 + zt**3 / 24.0)
        deriv = 1j * (-x3)  # i xi factor of d/dx conj(v), at frequency -xi_3
        out[j] = pref * np.exp(-1j * t * xi**2) * np.sum(a12 * a3 * deriv * e_factor)
    return SpectralFunction(grid, out)


def test_cubic_against_direct_oracle():
    grid, phi, tg = coarse_setup()
    got = xi_generation(1, 0, phi, tg, cap=1).final
    want = cubic_oracle(phi, P.T)
    err = np.linalg.norm(got.values - want.values) / np.linalg.norm(want.values)
    assert err < 1e-6


def test_quintic_against_direct_oracle():
    grid, phi, tg = coarse_setup()
    got = xi_generation(0, 1, phi, tg, cap=1).final
    want = first_iterate_quintic_exact(phi, P.T, grid=grid)
    err = np.linalg.norm(got.values - want.values) / np.linalg.norm(want.values)
    assert err < 1e-6


def test_oracle_lattice_guard():
    params = ParameterSet(s=-1.0, N=64.0, A=16.0, R=1.0, T=1e-3)
    grid = default_grid(params, generations=1, points_per_block=64)
    phi = make_phi(params, grid)
    with pytest.raises(ResourceError):
        first_iterate_quintic_exact(phi, params.T)


def test_simpson_time_convergence_order():
    """Quintic generation versus the closed-form oracle: composite Simpson
    on the oscillatory integrand should converge at order >= 3.5."""
    big_t = 2e-2  # strong phase so quadrature error dominates
    grid = default_grid(P, generations=1, points_per_block=8)
    phi = make_phi(P, grid, min_points_per_block=8)
    want = first_iterate_quintic_exact(phi, big_t, grid=grid)
    errs = []
    for steps in (16, 32, 64):
        tg = TimeGrid(t_max=big_t, steps=steps)
        got = xi_generation(0, 1, phi, tg, cap=1).final
        errs.append(np.linalg.norm(got.values - want.values))
    order1 = np.log2(errs[0] / errs[1])
    order2 = np.log2(errs[1] / errs[2])
    assert min(order1, order2) >= 3.5


def test_psi_matches_operators_directly():
    grid, phi, tg = coarse_setup()
    v = free_frames(phi, tg)
    tri = psi(Tree(children=(LEAF, LEAF, LEAF)), phi, tg)
    assert np.allclose(tri.frames, duhamel_J(v, v, v).frames)
    quint = psi(Tree(children=(LEAF,) * 5), phi, tg)
    assert np.allclose(quint.frames, duhamel_K(v, v, v, v, v).frames)


def test_generation_cap_enforced():
    grid, phi, tg = coarse_setup()
    deep = Tree(children=(LEAF, LEAF, Tree(children=(LEAF, LEAF, LEAF))))
    with pytest.raises(ResourceError):
        psi(deep, phi, tg, cap=1)
    with pytest.raises(ResourceError):
        xi_generation(1, 1, phi, tg, cap=1)
    with pytest.raises(ResourceError):
        xi_level(2, phi, tg, cap=1)


def test_level_sums_generations():
    grid, phi, tg = coarse_setup(generations=2)
    lvl = xi_level(1, phi, tg, cap=1)
    parts = xi_generation(1, 0, phi, tg, cap=1) + xi_generation(0, 1, phi, tg, cap=1)
    assert np.allclose(lvl.frames, parts.frames)


def test_series_sum_converges_at_small_amplitude():
    params = ParameterSet(s=-1.0, N=16.0, A=4.0, R=0.1, T=1e-3)
    grid = default_grid(params, generations=2, points_per_block=8)
    phi = make_phi(params, grid, min_points_per_block=8)
    tg = TimeGrid(t_max=params.T, steps=16)
    result = series_sum(phi, tg, j_max=2)
    assert result.converged
    assert result.ratio < 0.5
    assert result.tail_estimate < result.level_l2[0] * 1e-3
    assert len(result.level_l2) == 3
    assert result.level_l2[0] > result.level_l2[1] > result.level_l2[2]


def test_spacetime_addition_checks_grids():
    grid, phi, tg = coarse_setup()
    v = free_frames(phi, tg)
    other = FrequencyGrid.symmetric(grid.xi_max, grid.delta_xi / 2)
    w = free_frames(SpectralFunction(other, np.zeros(other.count)), tg)
    with pytest.raises(ConfigurationError):
        v + w
