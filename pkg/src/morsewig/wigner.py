"""Wigner functions of bound Morse states.

Two independent routes are provided:

* the closed form, where the phase-space integral of every product of
  Laguerre-type eigenfunctions reduces to modified Bessel functions
  ``K_{j - 2ip/(hbar beta)}(xi(x))`` of integer-shifted complex order;
* direct quadrature of ``(1/2 pi hbar) int exp(-ipy/hbar) Psi*(x-y/2) Psi(x+y/2) dy``.

For a state ``sum_n c_n |n>`` the closed form is evaluated as a Hermitian
Toeplitz quadratic form: substituting ``a = n - s`` (and ``b = k - r``) in
the double Laguerre expansion gives

    W = 2/(pi beta hbar) Re sum_{a,b} z_a conj(z_b) K_{a-b-2ip/(hbar beta)}(xi),
    z_a = xi^(N-a) sum_{n>=a} c_n C_{N,n} (-1)^(n-a) binom(2N-n, a) / (n-a)!,

so each point needs one Bessel row ``j = 0..N-1`` and ``O(N^2)`` work.
:func:`pair_kernel`, :func:`eigen_wigner` and :func:`ground_wigner` keep the
literal per-pair sums as cross-checks.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import _kernels, morse
from .errors import AccuracyError, ConsistencyError, CoverageError, DomainError
from .specfun import binomial, bessel_k
from .states import position_wavefunction

__all__ = [
    "WignerConfig",
    "PhaseSpaceGrid",
    "kernel_weights",
    "wigner_point_closed",
    "wigner_point_quadrature",
    "wigner_point",
    "wigner_values",
    "wigner_grid",
    "auto_grid_spec",
    "normalization",
    "marginal_x",
    "negativity",
    "pair_kernel",
    "eigen_wigner",
    "ground_wigner",
    "REALNESS_TOL",
    "COVERAGE_TOL",
]

REALNESS_TOL = 1e-10
COVERAGE_TOL = 1e-12
METHODS = ("closed_form", "quadrature")
SCALINGS = ("log_scaled", "direct")


@dataclass(frozen=True)
class WignerConfig:
    method: str = "closed_form"
    bessel_rel_tol: float = 1e-10
    quad_window: float = None
    quad_points: int = 2048
    scaling: str = "log_scaled"

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.scaling not in SCALINGS:
            raise DomainError(f"scaling must be one of {SCALINGS}, got {self.scaling!r}")
        if not 1e-15 < self.bessel_rel_tol < 1e-3:
            raise DomainError(f"bessel_rel_tol must lie in (1e-15, 1e-3), got {self.bessel_rel_tol!r}")
        if self.quad_points < 64:
            raise DomainError(f"quad_points must be >= 64, got {self.quad_points}")
        if self.quad_window is not None and not self.quad_window > 0:
            raise DomainError(f"quad_window must be positive, got {self.quad_window!r}")


@dataclass
class PhaseSpaceGrid:
    """Rectangular ``(x, p)`` lattice; ``values[i, k]`` is ``W(x_i, p_k)``."""

    x_min: float
    x_max: float
    nx: int
    p_min: float
    p_max: float
    np: int
    values: object = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.nx < 2 or self.np < 2:
            raise DomainError(f"grid needs nx, np >= 2, got ({self.nx}, {self.np})")
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise DomainError("grid bounds must satisfy x_max > x_min and p_max > p_min")
        if self.values is not None:
            v = np.asarray(self.values, dtype=float)
            if v.shape != (self.nx, self.np):
                raise DomainError(f"values shape {v.shape} != ({self.nx}, {self.np})")
            if not np.all(np.isfinite(v)):
                raise DomainError("grid values must be finite")
            self.values = v

    @property
    def xs(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def ps(self):
        return np.linspace(self.p_min, self.p_max, self.np)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dp(self):
        return (self.p_max - self.p_min) / (self.np - 1)

    def spec(self):
        """Copy without values or metadata."""
        return PhaseSpaceGrid(self.x_min, self.x_max, self.nx, self.p_min, self.p_max, self.np)

    def scaled(self, factor):
        return replace(self, values=self.values * factor, meta=dict(self.meta))


def kernel_weights(state):
    """Laguerre-contracted amplitudes ``u_a`` (``z_a`` without the ``xi^(N-a)`` factor)."""
    sys = state.system
    nb = sys.n_bound
    u = np.zeros(nb, dtype=np.complex128)
    for n in range(nb):
        cn = state.coeffs[n]
        if cn == 0:
            continue
        cc = cn * morse.norm_const(sys, n)
        for a in range(n + 1):
            u[a] += cc * (-1) ** (n - a) * binomial(2 * nb - n, a) / math.factorial(n - a)
    return u


def _prefactor(sys):
    return 2.0 / (math.pi * sys.beta * sys.hbar)


def _sigma(sys, p):
    return -2.0 * np.asarray(p, dtype=float) / (sys.hbar * sys.beta)


def _closed_values(state, xs, ps, cfg):
    sys = state.system
    if state.norm_sq == 0:
        raise DomainError("Wigner function of the zero state")
    xs = np.ascontiguousarray(xs, dtype=float)
    ps = np.ascontiguousarray(ps, dtype=float)
    xis = np.ascontiguousarray(morse.morse_variable(sys, xs))
    sigmas = np.ascontiguousarray(_sigma(sys, ps))
    out_re = np.empty((xs.size, ps.size))
    out_im = np.empty((xs.size, ps.size))
    failed = _kernels.wigner_grid_sum(
        kernel_weights(state), sys.n_bound, xis, sigmas, cfg.bessel_rel_tol,
        cfg.scaling == "log_scaled", out_re, out_im,
    )
    if failed >= 0:
        i, k = divmod(failed, ps.size)
        raise AccuracyError(
            f"Bessel quadrature did not converge at (x, p) = ({xs[i]!r}, {ps[k]!r})",
            where=(float(xs[i]), float(ps[k])),
        )
    pref = _prefactor(sys)
    w = pref * out_re
    resid = pref * np.abs(out_im) / (1.0 + np.abs(w))
    _check_values(w, resid, xs, ps)
    return w, resid


def _check_values(w, resid, xs, ps):
    bad = ~np.isfinite(w)
    if np.any(bad):
        i, k = np.argwhere(bad)[0]
        raise AccuracyError(
            f"non-finite Wigner value at (x, p) = ({xs[i]!r}, {ps[k]!r})",
            where=(float(xs[i]), float(ps[k])),
        )
    if resid.size and resid.max() >= REALNESS_TOL:
        i, k = np.unravel_index(np.argmax(resid), resid.shape)
        raise ConsistencyError(
            f"imaginary residual {resid[i, k]:.3e} at (x, p) = ({xs[i]!r}, {ps[k]!r})",
            estimate=w[i, k], where=(float(xs[i]), float(ps[k])),
        )


def _window(state, x, cfg):
    if cfg.quad_window is not None:
        return cfg.quad_window
    sys = state.system
    return max(2.0 * (x - morse.left_cutoff(sys)), 2.0 / sys.beta)


def _quadrature_column(state, x, ps, cfg, resolution=1):
    sys = state.system
    hbar = sys.hbar
    ps = np.asarray(ps, dtype=float)
    half = _window(state, x, cfg)
    p_abs = float(np.max(np.abs(ps))) if ps.size else 0.0
    n = max(cfg.quad_points, math.ceil(32 * (1 + p_abs * half / (math.pi * hbar))))
    n *= resolution
    y = np.linspace(-half, half, n + 1)
    plus = position_wavefunction(state, x + 0.5 * y)
    minus = position_wavefunction(state, x - 0.5 * y)
    edge = min(abs(plus[-1]), abs(minus[-1]))
    if edge > 1e-10:
        raise AccuracyError(
            f"quadrature window half-width {half} too small at x={x}: |Psi| = {edge:.2e} at its end",
            where=(float(x), None),
        )
    weights = np.full(y.size, y[1] - y[0])
    weights[[0, -1]] *= 0.5
    g = np.conj(minus) * plus * weights
    vals = np.exp(-1j * np.outer(ps, y) / hbar) @ g / (2.0 * math.pi * hbar)
    return vals


def _quadrature_values(state, xs, ps, cfg):
    if state.norm_sq == 0:
        raise DomainError("Wigner function of the zero state")
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(ps, dtype=float)
    out = np.empty((xs.size, ps.size), dtype=np.complex128)
    for i, x in enumerate(xs):
        out[i] = _quadrature_column(state, x, ps, cfg)
    w = out.real
    resid = np.abs(out.imag) / (1.0 + np.abs(w))
    _check_values(w, resid, xs, ps)
    return w, resid


def wigner_values(state, xs, ps, cfg=None, with_residual=False):
    """``W(xs[i], ps[k])`` on the outer product of two coordinate lists.

    Each entry depends only on its own ``(x, p)``, so permuting the inputs
    permutes the output bit for bit.
    """
    cfg = cfg or WignerConfig()
    if cfg.method == "closed_form":
        w, resid = _closed_values(state, xs, ps, cfg)
    else:
        w, resid = _quadrature_values(state, xs, ps, cfg)
    return (w, resid) if with_residual else w


def wigner_point_closed(state, x, p, cfg=None):
    cfg = replace(cfg or WignerConfig(), method="closed_form")
    return float(wigner_values(state, [x], [p], cfg)[0, 0])


def wigner_point_quadrature(state, x, p, cfg=None):
    cfg = replace(cfg or WignerConfig(), method="quadrature")
    return float(wigner_values(state, [x], [p], cfg)[0, 0])


def wigner_point(state, x, p, cfg=None):
    cfg = cfg or WignerConfig()
    return float(wigner_values(state, [x], [p], cfg)[0, 0])


def wigner_grid(state, spec, cfg=None):
    """Fill a copy of ``spec`` with Wigner values of ``state``."""
    cfg = cfg or WignerConfig()
    w, resid = wigner_values(state, spec.xs, spec.ps, cfg, with_residual=True)
    meta = dict(spec.meta)
    meta.update(
        label=state.label,
        N=state.system.n_bound,
        method=cfg.method,
        scaling=cfg.scaling,
        bessel_rel_tol=cfg.bessel_rel_tol,
        quad_points=cfg.quad_points,
        norm_sq=state.norm_sq,
        imag_residual_max=float(resid.max()),
    )
    return PhaseSpaceGrid(spec.x_min, spec.x_max, spec.nx, spec.p_min, spec.p_max, spec.np, w, meta)


def _density_right_edge(state, x_from, rel=1e-14):
    sys = state.system
    xs = np.linspace(x_from, x_from + 200.0 / sys.beta, 20001)
    dens = np.abs(position_wavefunction(state, xs)) ** 2
    live = np.nonzero(dens > rel * dens.max())[0]
    return float(xs[min(live[-1] + 1, xs.size - 1)])


def auto_grid_spec(state, nx=201, np_=201, cfg=None, tol=COVERAGE_TOL, max_expand=40):
    """Grid bounds that contain the support of ``state``.

    The left edge sits where ``xi^(2N) exp(-xi) = 1e-14`` on the wall side and
    the right edge starts where ``|Psi|^2`` has dropped by 1e-14 from its
    peak.  The momentum range starts from a coherent-state estimate and
    grows by 25% (the right edge by ``2/beta``) until the boundary values
    fall below ``tol`` times the peak, judged on the four edges and a coarse
    interior lattice.  Cross terms between levels decay more slowly than
    ``|Psi|^2``, which is why the right edge may move.
    """
    cfg = cfg or WignerConfig()
    sys = state.system
    nb = sys.n_bound
    hb = sys.hbar * sys.beta
    xi_left = brentq(lambda xi: 2 * nb * math.log(xi) - xi - math.log(1e-14), 2.0 * nb, 1e4)
    x_left = (math.log(2 * nb + 1) - math.log(xi_left)) / sys.beta
    x_right = _density_right_edge(state, x_left)
    p_max = 4.0 * math.sqrt(2 * nb * sys.chi) * hb + hb
    for _ in range(max_expand):
        xs = np.linspace(x_left, x_right, nx)
        ps = np.linspace(-p_max, p_max, np_)
        interior = wigner_values(state, np.linspace(x_left, x_right, 61), np.linspace(-p_max, p_max, 41), cfg)
        limit = tol * np.max(np.abs(interior))
        p_edge = np.max(np.abs(wigner_values(state, xs, [-p_max, p_max], cfg)))
        x_edge = np.max(np.abs(wigner_values(state, [x_left, x_right], ps, cfg)))
        if p_edge < limit and x_edge < limit:
            return PhaseSpaceGrid(x_left, x_right, nx, -p_max, p_max, np_)
        if p_edge >= limit:
            p_max *= 1.25
        if x_edge >= limit:
            x_right += 2.0 / sys.beta
    raise CoverageError(
        f"auto window did not converge after {max_expand} expansions "
        f"(x_right={x_right:.6g}, p_max={p_max:.6g})"
    )


def _coverage(grid, tol=COVERAGE_TOL):
    v = grid.values
    if v is None:
        raise DomainError("grid has no values")
    peak = np.max(np.abs(v))
    edge = max(np.abs(v[0]).max(), np.abs(v[-1]).max(), np.abs(v[:, 0]).max(), np.abs(v[:, -1]).max())
    if edge >= tol * peak:
        raise CoverageError(
            f"boundary |W| = {edge:.3e} exceeds {tol:g} x max|W| = {tol * peak:.3e}",
            where=(grid.x_min, grid.x_max, grid.p_min, grid.p_max),
        )


def normalization(grid, coverage_tol=COVERAGE_TOL):
    """Trapezoid estimate of the phase-space integral of ``W``.

    Raises :class:`CoverageError` if a boundary value reaches
    ``coverage_tol`` times the peak; ``coverage_tol=None`` skips the check.
    """
    if coverage_tol is not None:
        _coverage(grid, coverage_tol)
    return float(np.trapezoid(np.trapezoid(grid.values, dx=grid.dp, axis=1), dx=grid.dx))


def marginal_x(grid, coverage_tol=COVERAGE_TOL):
    """Position density ``int W dp`` for every grid column (coverage as in :func:`normalization`)."""
    if coverage_tol is not None:
        _coverage(grid, coverage_tol)
    return np.trapezoid(grid.values, dx=grid.dp, axis=1)


def negativity(grid):
    """``(min_value, x_at_min, p_at_min, negative_volume)`` of the grid."""
    v = grid.values
    i, k = np.unravel_index(np.argmin(v), v.shape)
    neg = np.maximum(0.0, -v)
    volume = np.trapezoid(np.trapezoid(neg, dx=grid.dp, axis=1), dx=grid.dx)
    return float(v[i, k]), float(grid.xs[i]), float(grid.ps[k]), float(volume)


def pair_kernel(sys, n, k, x, p, rel_tol=1e-12):
    """Bessel kernel ``Kern_{n,k}(x, p)`` of the pair ``(|n>, <k|)``, literal double sum.

    ``W = Re sum_{n,k} c_n conj(c_k) Kern_{n,k}``.
    """
    nb = sys.n_bound
    xi = float(morse.morse_variable(sys, x))
    sigma = float(_sigma(sys, p))
    total = 0j
    for r in range(k + 1):
        for s in range(n + 1):
            coef = (
                binomial(2 * nb - k, k - r) * binomial(2 * nb - n, n - s)
                * (-xi) ** (r + s) / (math.factorial(r) * math.factorial(s))
            )
            total += coef * bessel_k(complex(r + n - s - k, sigma), xi, rel_tol)
    return (
        _prefactor(sys) * morse.norm_const(sys, n) * morse.norm_const(sys, k)
        * xi ** (2 * nb - n - k) * total
    )


def eigen_wigner(sys, m, x, p, rel_tol=1e-12):
    """Wigner function of the bound eigenstate ``|m>`` from its dedicated closed form."""
    nb = sys.n_bound
    if not 0 <= m < nb:
        raise DomainError(f"level {m} outside 0..{nb - 1}")
    xi = float(morse.morse_variable(sys, x))
    sigma = float(_sigma(sys, p))
    total = 0j
    for r in range(m + 1):
        for s in range(m + 1):
            coef = (
                binomial(2 * nb - m, m - r) * binomial(2 * nb - m, m - s)
                * (-xi) ** (r + s) / (math.factorial(r) * math.factorial(s))
            )
            total += coef * bessel_k(complex(r - s, sigma), xi, rel_tol)
    pref = 4.0 * math.factorial(m) * (nb - m) / (math.pi * sys.hbar * math.gamma(2 * nb - m + 1))
    return pref * xi ** (2 * nb - 2 * m) * total


def ground_wigner(sys, x, p, rel_tol=1e-12):
    """Ground-state Wigner function ``2/(pi hbar Gamma(2N)) xi^(2N) K_{-2ip/(beta hbar)}(xi)``."""
    nb = sys.n_bound
    xi = float(morse.morse_variable(sys, x))
    k = bessel_k(complex(0.0, float(_sigma(sys, p))), xi, rel_tol)
    return 2.0 / (math.pi * sys.hbar * math.gamma(2 * nb)) * xi ** (2 * nb) * k
