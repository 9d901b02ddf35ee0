"""Hot numeric kernels.

Everything here is written so that it compiles under ``numba.njit`` and also
runs unchanged as plain numpy (see :mod:`morsewig._accel`).  Public wrappers
with argument checking live in :mod:`morsewig.specfun` and
:mod:`morsewig.wigner`; the functions below trust their inputs.

Bessel functions are always handled in the scaled form
``Ks_nu(x) = exp(x) * K_nu(x)`` and in the canonical quadrant
``Re nu >= 0, Im nu >= 0``; callers fold the other quadrants in with
``K_{-nu} = K_nu`` and ``K_{conj nu} = conj K_nu``.
"""

import cmath
import math

import numpy as np

from ._accel import USE_NUMBA, jit

GL_ORDER = 16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
GL_NODES = np.ascontiguousarray(_GL_X)
GL_WEIGHTS = np.ascontiguousarray(_GL_W)

# Exponent change allowed across one Gauss-Legendre panel, and the widest panel.
PANEL_SPAN = 16.0
PANEL_HMAX = 1.5
MAX_PANELS = 200000
MAX_SPLIT = 64
# Extra decades kept beyond ln(1/tol) when truncating the contour tails.
TAIL_MARGIN = 12.0


@jit
def _exponent_slope(t, x, nu):
    return abs(nu - x * cmath.sinh(t))


@jit
def _axis_exponent(s, x, order):
    return -x * (math.cosh(s) - 1.0) + order * s


@jit
def _saddle_height(x, nu_re, nu_im):
    nu = complex(nu_re, nu_im)
    t0 = cmath.asinh(nu / x)
    phi = min(max(t0.imag, 0.0), 0.5 * math.pi)
    t = complex(t0.real, phi)
    height = (-x * (cmath.cosh(t) - 1.0) + nu * t).real
    return t0.real, phi, height


@jit
def _walk(z0, z1, x, nu, ta, tb, count, store):
    """Cover the straight segment z0 -> z1 with panels; return the new count.

    With ``store`` false only the number of panels is computed.
    """
    length = abs(z1 - z0)
    if length == 0.0:
        return count
    d = (z1 - z0) / length
    u = 0.0
    while u < length:
        if count >= MAX_PANELS:
            return -1
        f = _exponent_slope(z0 + d * u, x, nu)
        h = PANEL_HMAX
        if f * h > PANEL_SPAN:
            h = PANEL_SPAN / f
        v = min(length, u + h)
        f2 = _exponent_slope(z0 + d * v, x, nu)
        if f2 * (v - u) > PANEL_SPAN:
            v = u + PANEL_SPAN / f2
        if store:
            ta[count] = z0 + d * u
            tb[count] = z0 + d * v
        count += 1
        u = v
    return count


@jit
def contour_panels(x, nu_re, nu_im, tol, extra_order):
    """Panels of the integration contour for ``Ks_nu`` (and ``Ks_{nu+1}`` when ``extra_order`` is 1).

    The contour rises vertically from the real axis to the height of the
    saddle point of ``-x cosh t + nu t``, runs horizontally through it and
    drops back.  Real-axis tails beyond the vertical legs are below
    ``tol * exp(-TAIL_MARGIN)`` relative to the saddle height and are dropped.
    """
    path_re = nu_re + 0.5 * extra_order
    a, phi, m_path = _saddle_height(x, path_re, nu_im)
    m_lo = _saddle_height(x, nu_re, nu_im)[2]
    if extra_order > 0.0:
        m_hi = _saddle_height(x, nu_re + extra_order, nu_im)[2]
        m_lo = min(m_lo, m_hi)
    cut = min(m_lo, m_path) - (math.log(1.0 / tol) + TAIL_MARGIN)
    j_hi = nu_re + extra_order
    s_right = max(a, math.asinh(j_hi / x)) + 0.5
    while _axis_exponent(s_right, x, j_hi) > cut:
        s_right += 0.5
    s_left = min(a, 0.0) - 0.5
    while _axis_exponent(s_left, x, nu_re) > cut:
        s_left -= 0.5

    nu = complex(path_re, nu_im)
    corners = np.array([complex(s_left, 0.0), complex(s_left, phi),
                        complex(s_right, phi), complex(s_right, 0.0)])
    ta = np.empty(0, dtype=np.complex128)
    tb = np.empty(0, dtype=np.complex128)
    count = 0
    for leg in range(3):
        count = _walk(corners[leg], corners[leg + 1], x, nu, ta, tb, count, False)
        if count < 0:
            return ta, tb
    ta = np.empty(count, dtype=np.complex128)
    tb = np.empty(count, dtype=np.complex128)
    count = 0
    for leg in range(3):
        count = _walk(corners[leg], corners[leg + 1], x, nu, ta, tb, count, True)
    return ta, tb


def _panel_sums_numpy(ta, tb, split, x, nu, extra_order):
    step = (tb - ta) / split
    starts = (ta.reshape(-1, 1) + np.outer(step, np.arange(split) * 1.0)).ravel()
    halves = 0.5 * np.repeat(step, split)
    t = (starts + halves).reshape(-1, 1) + np.outer(halves, GL_NODES)
    w = np.outer(halves, GL_WEIGHTS)
    f = np.exp(-x * (np.cosh(t) - 1.0) + nu * t) * w
    first = 0.5 * np.sum(f)
    mass0 = 0.5 * np.sum(np.abs(f))
    second = 0j
    mass1 = 0.0
    if extra_order > 0.0:
        g = f * np.exp(t)
        second = 0.5 * np.sum(g)
        mass1 = 0.5 * np.sum(np.abs(g))
    return first, second, mass0, mass1


def _panel_sums_loop(ta, tb, split, x, nu, extra_order):
    # Real arithmetic on t = s + i phi:
    # cosh t = cosh s cos phi + i sinh s sin phi.
    nu_re = nu.real
    nu_im = nu.imag
    first_re = 0.0
    first_im = 0.0
    second_re = 0.0
    second_im = 0.0
    mass0 = 0.0
    mass1 = 0.0
    for p in range(ta.shape[0]):
        step = (tb[p] - ta[p]) / split
        half = 0.5 * step
        for q in range(split):
            mid = ta[p] + (q + 0.5) * step
            for g in range(GL_NODES.shape[0]):
                t = mid + half * GL_NODES[g]
                s = t.real
                phi = t.imag
                es = math.exp(s)
                ch = 0.5 * (es + 1.0 / es)
                sh = 0.5 * (es - 1.0 / es)
                cp = math.cos(phi)
                sp = math.sin(phi)
                e_re = -x * (ch * cp - 1.0) + nu_re * s - nu_im * phi
                e_im = -x * sh * sp + nu_re * phi + nu_im * s
                mag = math.exp(e_re)
                w = half * GL_WEIGHTS[g]
                f_re = mag * math.cos(e_im)
                f_im = mag * math.sin(e_im)
                v_re = f_re * w.real - f_im * w.imag
                v_im = f_re * w.imag + f_im * w.real
                first_re += v_re
                first_im += v_im
                m = mag * abs(w)
                mass0 += m
                if extra_order > 0.0:
                    mass1 += es * m
                    # extra_order is 1: exp(t) = es (cos phi + i sin phi)
                    second_re += es * (v_re * cp - v_im * sp)
                    second_im += es * (v_re * sp + v_im * cp)
    return (0.5 * complex(first_re, first_im), 0.5 * complex(second_re, second_im),
            0.5 * mass0, 0.5 * mass1)


_panel_sums = jit(_panel_sums_loop) if USE_NUMBA else _panel_sums_numpy


@jit
def bessel_ks_pair(nu_re, nu_im, x, tol, extra_order):
    """Scaled ``Ks_nu(x)`` and, if ``extra_order`` is 1, ``Ks_{nu+1}(x)``.

    Requires ``nu_re >= 0``, ``nu_im >= 0``, ``x > 0``.  Both values come from
    the same contour and are refined by doubling the node count until
    successive estimates agree to ``tol`` relative to the integral of the
    integrand's modulus along the contour.  On the saddle contour that mass
    is the size of the result, except near zeros of an oscillating
    ``K_{i sigma}`` where no relative accuracy is attainable.  Returns
    ``(value, second, converged, change)`` where ``change`` is the last
    scaled difference seen.
    """
    ta, tb = contour_panels(x, nu_re, nu_im, tol, extra_order)
    if ta.shape[0] == 0:
        return complex(np.nan, np.nan), complex(np.nan, np.nan), False, np.inf
    nu = complex(nu_re, nu_im)
    prev0, prev1, _, _ = _panel_sums(ta, tb, 1, x, nu, extra_order)
    split = 2
    change = np.inf
    while split <= MAX_SPLIT:
        cur0, cur1, mass0, mass1 = _panel_sums(ta, tb, split, x, nu, extra_order)
        d0 = abs(cur0 - prev0)
        d1 = abs(cur1 - prev1)
        change = d0 / mass0 if mass0 > 0.0 else np.inf
        if extra_order > 0.0:
            c1 = d1 / mass1 if mass1 > 0.0 else np.inf
            change = max(change, c1)
        if change <= tol:
            return cur0, cur1, True, change
        prev0 = cur0
        prev1 = cur1
        split *= 2
    return prev0, prev1, False, change


@jit
def bessel_ks(nu_re, nu_im, x, tol):
    """Scaled ``Ks_nu(x)`` for any complex order, folding into the canonical quadrant."""
    if nu_re < 0.0 or (nu_re == 0.0 and nu_im < 0.0):
        nu_re = -nu_re
        nu_im = -nu_im
    flip = nu_im < 0.0
    value, _, ok, change = bessel_ks_pair(nu_re, abs(nu_im), x, tol, 0.0)
    if flip:
        value = value.conjugate()
    if nu_im == 0.0 or nu_re == 0.0:
        # K of real or purely imaginary order is real for real x.
        value = complex(value.real, 0.0)
    return value, ok, change


@jit
def bessel_ks_row(sigma, x, jmax, tol, out):
    """Fill ``out[j] = Ks_{j + i sigma}(x)`` for ``j = 0..jmax``.

    Two quadrature seeds (``j = 0, 1``) on a shared contour, then the upward
    recurrence ``K_{v+1} = K_{v-1} + (2 v / x) K_v``.  Returns
    ``(converged, change)``.
    """
    s = abs(sigma)
    k0, k1, ok, change = bessel_ks_pair(0.0, s, x, tol, 1.0)
    k0 = complex(k0.real, 0.0)
    if s == 0.0:
        k1 = complex(k1.real, 0.0)
    out[0] = k0
    if jmax >= 1:
        out[1] = k1
    for j in range(1, jmax):
        out[j + 1] = out[j - 1] + (2.0 * complex(j, s) / x) * out[j]
    if sigma < 0.0:
        for j in range(jmax + 1):
            out[j] = out[j].conjugate()
    return ok, change


@jit
def wigner_point_sum(weights, n_bound, xi, sigma, tol, log_scaled, row, z):
    """Bilinear Bessel-kernel sum at one phase-space point.

    ``weights[a]`` are the state-dependent Laguerre-contracted amplitudes
    (see :func:`morsewig.wigner.kernel_weights`).  The returned complex sum
    still lacks the ``2 / (pi beta hbar)`` prefactor; its imaginary part is a
    pure rounding residual.  Returns ``(sum, converged, change)``.
    """
    nb = n_bound
    ok, change = bessel_ks_row(sigma, xi, nb - 1, tol, row)
    log_xi = math.log(xi)
    if log_scaled:
        for a in range(nb):
            e = (nb - a) * log_xi - 0.5 * xi
            z[a] = weights[a] * math.exp(e) if e > -745.0 else 0j
        damp = 1.0
    else:
        for a in range(nb):
            z[a] = weights[a] * xi ** (nb - a)
        damp = math.exp(-xi)
    total = 0j
    for a in range(nb):
        za = z[a]
        if za == 0:
            continue
        for b in range(nb):
            zb = z[b]
            if zb == 0:
                continue
            d = a - b
            k = row[d] if d >= 0 else row[-d].conjugate()
            total += za * zb.conjugate() * k
    return total * damp, ok, change


@jit
def wigner_grid_sum(weights, n_bound, xis, sigmas, tol, log_scaled, out_re, out_im):
    """Fill ``out_*[i, k]`` with the kernel sum at ``(xis[i], sigmas[k])``.

    Stops at the first point whose Bessel row fails to converge and returns
    its flat index; returns -1 when every point succeeded.
    """
    nb = n_bound
    row = np.empty(max(nb, 2), dtype=np.complex128)
    z = np.empty(nb, dtype=np.complex128)
    for i in range(xis.shape[0]):
        for k in range(sigmas.shape[0]):
            total, ok, _ = wigner_point_sum(weights, nb, xis[i], sigmas[k], tol, log_scaled, row, z)
            if not ok:
                return i * sigmas.shape[0] + k
            out_re[i, k] = total.real
            out_im[i, k] = total.imag
    return -1
