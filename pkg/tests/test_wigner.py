import math
from dataclasses import replace

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from morsewig import _kernels, morse, states
from morsewig import wigner as W
from morsewig.errors import AccuracyError, ConsistencyError, CoverageError, DomainError

QUAD = W.WignerConfig(method="quadrature")
TIGHT = W.WignerConfig(bessel_rel_tol=1e-13)


def test_closed_matches_quadrature_at_reference_point(docs_quarter):
    a = W.wigner_point_closed(docs_quarter, 0.5, 0.3)
    b = W.wigner_point_quadrature(docs_quarter, 0.5, 0.3)
    assert abs(a - b) < 1e-6
    assert abs(a - b) < 1e-12


@settings(max_examples=25)
@given(
    st.lists(st.complex_numbers(max_magnitude=1.0, allow_nan=False, allow_infinity=False), min_size=6, max_size=6),
    st.floats(-4, 15),
    st.floats(-3, 3),
)
def test_closed_matches_quadrature_random_states(coeffs, x, p):
    s = morse.make_system(6)
    c = np.array(coeffs)
    if np.linalg.norm(c) < 1e-3:
        c[0] = 1.0
    state = states.BoundState(s, c / np.linalg.norm(c))
    a = W.wigner_point_closed(state, x, p)
    b = W.wigner_point_quadrature(state, x, p)
    assert abs(a - b) < 1e-9


def test_ground_state_closed_form(sys10):
    g = states.docs(sys10, 0)
    for x, p in [(1.0, 0.5), (-2.0, 0.0), (6.0, -1.3)]:
        a = W.wigner_point_closed(g, x, p, TIGHT)
        assert a == pytest.approx(W.ground_wigner(sys10, x, p).real, rel=1e-10)


def test_ground_state_against_mpmath(sys10):
    mpmath.mp.dps = 40
    x, p = 0.7, -0.9
    beta = mpmath.sqrt(mpmath.mpf(2) / 21)
    xi = 21 * mpmath.exp(-beta * x)
    ref = 2 / (mpmath.pi * mpmath.gamma(20)) * xi**20 * mpmath.besselk(mpmath.mpc(0, -2 * p / beta), xi)
    got = W.wigner_point_closed(states.eigenstate(sys10, 0), x, p, TIGHT)
    assert got == pytest.approx(float(mpmath.re(ref)), rel=1e-11)


@pytest.mark.parametrize("m", [0, 1, 2, 3])
def test_eigenstate_specialization(sys10, m):
    e = states.eigenstate(sys10, m)
    a = W.wigner_point_closed(e, 1.0, 0.5, TIGHT)
    b = W.eigen_wigner(sys10, m, 1.0, 0.5, 1e-13).real
    assert a == pytest.approx(b, rel=1e-10)


def test_pair_kernel_contraction(sys10, docs_quarter):
    c = docs_quarter.coeffs
    x, p = 0.5, 0.3
    total = sum(c[n] * np.conj(c[k]) * W.pair_kernel(sys10, n, k, x, p) for n in range(10) for k in range(10))
    assert abs(total.imag) < 1e-12
    assert total.real == pytest.approx(W.wigner_point_closed(docs_quarter, x, p), rel=1e-10)


def test_pair_kernel_hermitian(sys10):
    a = W.pair_kernel(sys10, 2, 5, 0.4, 0.7)
    b = W.pair_kernel(sys10, 5, 2, 0.4, 0.7)
    assert a == pytest.approx(np.conj(b), rel=1e-10)


def test_kernel_weights_eigenstate(sys10):
    u = W.kernel_weights(states.eigenstate(sys10, 0))
    assert u[0] == pytest.approx(morse.norm_const(sys10, 0))
    assert np.all(u[1:] == 0)


def test_scaling_modes_agree(docs_quarter):
    direct = replace(W.WignerConfig(), scaling="direct")
    for x, p in [(-3.0, 0.2), (0.5, 0.3), (9.0, -1.0)]:
        a = W.wigner_point(docs_quarter, x, p)
        b = W.wigner_point(docs_quarter, x, p, direct)
        assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("cfg", [W.WignerConfig(), QUAD], ids=["closed", "quad"])
def test_momentum_reflection(sys10, cfg):
    s = states.dpacs(sys10, 0.3, 2)
    for x, p in [(0.0, 0.4), (2.5, 1.1), (-1.0, 2.0)]:
        assert abs(W.wigner_point(s, x, p, cfg) - W.wigner_point(s, x, -p, cfg)) < 1e-10


def test_quadrature_node_doubling(docs_quarter):
    for x, p in [(0.5, 0.3), (3.0, -1.5), (-2.0, 0.8)]:
        a = W.wigner_values(docs_quarter, [x], [p], QUAD)[0, 0]
        b = W._quadrature_column(docs_quarter, x, np.array([p]), QUAD, resolution=2)[0].real
        assert abs(a - b) < 1e-9


def test_quadrature_window_too_small(docs_quarter):
    with pytest.raises(AccuracyError):
        W.wigner_point_quadrature(docs_quarter, 0.5, 0.3, replace(QUAD, quad_window=1.0))


def test_two_by_two_grid_equals_points(docs_quarter):
    spec = W.PhaseSpaceGrid(-1.0, 2.0, 2, -0.5, 0.75, 2)
    g = W.wigner_grid(docs_quarter, spec)
    for i, x in enumerate(g.xs):
        for k, p in enumerate(g.ps):
            assert g.values[i, k] == W.wigner_point(docs_quarter, x, p)


def test_permuted_evaluation_is_bitwise_identical(docs_quarter):
    xs = np.linspace(-3, 10, 9)
    ps = np.linspace(-2, 2, 7)
    ref = W.wigner_values(docs_quarter, xs, ps)
    rng = np.random.default_rng(3)
    ix, ip = rng.permutation(9), rng.permutation(7)
    got = W.wigner_values(docs_quarter, xs[ix], ps[ip])
    assert np.array_equal(got, ref[np.ix_(ix, ip)])


def test_ground_grid_peak_on_p_zero_row(sys10):
    g = W.wigner_grid(states.docs(sys10, 0), W.PhaseSpaceGrid(-4, 12, 33, -3, 3, 31))
    assert np.all(np.argmax(g.values, axis=1) == 15)
    assert g.values.max() > 0


def test_grid_metadata(docs_quarter):
    g = W.wigner_grid(docs_quarter, W.PhaseSpaceGrid(-1, 1, 3, -1, 1, 3))
    assert g.meta["method"] == "closed_form"
    assert g.meta["N"] == 10
    assert g.meta["imag_residual_max"] < 1e-10


@pytest.fixture(scope="module")
def ground_grid():
    return W.wigner_grid(states.eigenstate(morse.make_system(10), 0), W.PhaseSpaceGrid(-6, 28, 201, -4, 4, 201))


def test_normalization_reference_window(ground_grid):
    # This window clips p at +-4 where |W| is still 1e-6 of its peak, so the
    # strict boundary test refuses it even though the integral is fine.
    with pytest.raises(CoverageError):
        W.normalization(ground_grid)
    assert W.normalization(ground_grid, coverage_tol=None) == pytest.approx(1.0, abs=1e-3)


def test_normalization_linear(ground_grid):
    doubled = ground_grid.scaled(2.0)
    assert W.normalization(doubled, None) == pytest.approx(2 * W.normalization(ground_grid, None), rel=1e-15)


def test_marginal_eigenstate(ground_grid):
    s = morse.make_system(10)
    marg = W.marginal_x(ground_grid, coverage_tol=1e-5)
    ref = morse.wavefunction(s, 0, ground_grid.xs) ** 2
    assert np.max(np.abs(marg - ref)) < 1e-6


@pytest.fixture(scope="module")
def auto_docs_grid():
    s = morse.make_system(10)
    st_ = states.docs(s, states.solve_zeta_for_mean(s, 0.25))
    return st_, W.wigner_grid(st_, W.auto_grid_spec(st_, 121, 121))


def test_auto_window_covers(auto_docs_grid):
    st_, g = auto_docs_grid
    assert W.normalization(g) == pytest.approx(st_.norm_sq, abs=1e-3)
    assert g.x_min == pytest.approx(-5.895, abs=1e-3)


def test_marginal_matches_density(auto_docs_grid):
    st_, g = auto_docs_grid
    dens = np.abs(states.position_wavefunction(st_, g.xs)) ** 2
    marg = W.marginal_x(g)
    assert np.max(np.abs(marg - dens)[1:-1]) < 1e-6
    assert np.trapezoid(marg, dx=g.dx) == pytest.approx(st_.norm_sq, abs=1e-3)


def test_negativity_reports(sys10):
    g = W.wigner_grid(states.dpacs(sys10, 0.1, 1), W.PhaseSpaceGrid(-3, 6, 31, -2, 2, 21))
    mn, x, p, vol = W.negativity(g)
    assert mn < 0 and vol > 0
    assert mn == g.values.min()
    assert W.wigner_point(states.dpacs(sys10, 0.1, 1), x, p) == mn


def test_ground_state_has_small_negative_region(sys10):
    # A non-Gaussian pure state cannot have a nonnegative Wigner function.
    g = states.eigenstate(sys10, 0)
    val = W.wigner_point_closed(g, 2.0957, -2.4307, TIGHT)
    assert -2.3e-8 < val < -2.2e-8
    assert val == pytest.approx(W.wigner_point_quadrature(g, 2.0957, -2.4307), rel=1e-6)


def test_config_validation():
    for kw in ({"method": "fft"}, {"scaling": "none"}, {"bessel_rel_tol": 1e-3}, {"quad_points": 10}, {"quad_window": -1.0}):
        with pytest.raises(DomainError):
            W.WignerConfig(**kw)


def test_grid_validation():
    with pytest.raises(DomainError):
        W.PhaseSpaceGrid(0, 1, 1, 0, 1, 2)
    with pytest.raises(DomainError):
        W.PhaseSpaceGrid(1, 0, 2, 0, 1, 2)
    with pytest.raises(DomainError):
        W.PhaseSpaceGrid(0, 1, 2, 0, 1, 2, np.zeros((3, 2)))
    with pytest.raises(DomainError):
        W.PhaseSpaceGrid(0, 1, 2, 0, 1, 2, np.full((2, 2), np.inf))


def test_zero_state_rejected(sys10):
    z = states.BoundState(sys10, np.zeros(10))
    with pytest.raises(DomainError):
        W.wigner_point(z, 0.0, 0.0)
    with pytest.raises(DomainError):
        W.wigner_point(z, 0.0, 0.0, QUAD)


def test_failed_point_is_reported(monkeypatch, docs_quarter):
    monkeypatch.setattr(_kernels, "wigner_grid_sum", lambda *a: 4)
    with pytest.raises(AccuracyError) as info:
        W.wigner_values(docs_quarter, [0.0, 1.0], [0.1, 0.2, 0.3])
    assert info.value.where == (1.0, 0.2)


def test_imaginary_residual_raises(monkeypatch, docs_quarter):
    def fake(weights, nb, xis, sigmas, tol, log_scaled, out_re, out_im):
        out_re[:] = 1.0
        out_im[:] = 0.0
        out_im[0, 1] = 1e-3
        return -1

    monkeypatch.setattr(_kernels, "wigner_grid_sum", fake)
    with pytest.raises(ConsistencyError) as info:
        W.wigner_values(docs_quarter, [0.0, 1.0], [0.1, 0.2])
    assert info.value.where == (0.0, 0.2)


def test_coverage_error_on_clipped_grid(docs_quarter):
    g = W.wigner_grid(docs_quarter, W.PhaseSpaceGrid(-1, 1, 5, -0.5, 0.5, 5))
    with pytest.raises(CoverageError):
        W.marginal_x(g)
