"""Special functions: log-gamma, binomials, associated Laguerre polynomials and
modified Bessel functions of the third kind with complex order.

The Bessel functions are evaluated from the integral representation

    K_nu(x) = 1/2 * int_{-inf}^{inf} exp(-x cosh t + nu t) dt

on a contour lifted into the strip ``0 <= Im t <= pi/2`` so that it passes
through the saddle point.  Along the real axis the integrand oscillates with
frequency ``Im nu`` while the result is of order ``exp(-pi |Im nu| / 2)``,
so plain real-axis quadrature loses all significant digits for moderate
imaginary orders; on the lifted contour the integrand magnitude matches the
result.
"""

import math

import numpy as np

from . import _kernels
from .errors import AccuracyError, DomainError

__all__ = [
    "log_gamma",
    "binomial",
    "laguerre",
    "laguerre_coeffs",
    "bessel_k",
    "bessel_k_scaled",
    "bessel_k_row",
    "bessel_k_row_scaled",
]

MAX_ORDER = 64
DEFAULT_REL_TOL = 1e-12


def log_gamma(x):
    """Return ``ln Gamma(x)`` for ``x > 0``."""
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"log_gamma needs a positive finite argument, got {x!r}")
    return math.lgamma(x)


def binomial(a, b):
    """Binomial coefficient ``a choose b`` as a float (exact integer, then rounded once)."""
    if int(a) != a or int(b) != b:
        raise DomainError(f"binomial needs integer arguments, got ({a}, {b})")
    if a < 0 or b < 0 or b > a:
        raise DomainError(f"binomial({a}, {b}) needs 0 <= b <= a")
    return float(math.comb(int(a), int(b)))


def laguerre(n, k, x):
    """Associated Laguerre polynomial ``L_n^k(x)`` by the three-term recurrence.

    ``x`` may be a scalar or an array; the result has the same shape.
    """
    if n < 0:
        raise DomainError(f"laguerre degree must be nonnegative, got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + k - x
    for m in range(1, n):
        prev, cur = cur, ((2 * m + k + 1 - x) * cur - (m + k) * prev) / (m + 1)
    return cur if cur.ndim else float(cur)


def laguerre_coeffs(n, k):
    """Monomial coefficients ``a_m`` of ``L_n^k(x) = sum_m a_m x^m``, ``m = 0..n``."""
    if n < 0 or k < 0:
        raise DomainError(f"laguerre_coeffs needs n, k >= 0, got ({n}, {k})")
    return [(-1) ** m * binomial(n + k, n - m) / math.factorial(m) for m in range(n + 1)]


def _check_bessel_args(nu, x, rel_tol):
    nu = complex(nu)
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"Bessel K needs a positive finite argument, got x={x!r}")
    if not (math.isfinite(nu.real) and math.isfinite(nu.imag)):
        raise DomainError(f"Bessel order must be finite, got {nu!r}")
    if abs(nu.real) > MAX_ORDER:
        raise DomainError(f"|Re nu| = {abs(nu.real)} exceeds the supported bound {MAX_ORDER}")
    if not 1e-15 < rel_tol < 1e-3:
        raise DomainError(f"rel_tol must lie in (1e-15, 1e-3), got {rel_tol!r}")
    return nu, x


def bessel_k_scaled(nu, x, rel_tol=DEFAULT_REL_TOL):
    """Return ``exp(x) * K_nu(x)`` for complex order ``nu`` and ``x > 0``."""
    nu, x = _check_bessel_args(nu, x, rel_tol)
    value, ok, change = _kernels.bessel_ks(nu.real, nu.imag, x, rel_tol)
    if not ok or not np.isfinite(value):
        raise AccuracyError(
            f"K_{nu}({x}) did not converge (last relative change {change:.2e})",
            estimate=value * math.exp(-x),
        )
    return complex(value)


def bessel_k(nu, x, rel_tol=DEFAULT_REL_TOL):
    """Modified Bessel function of the third kind ``K_nu(x)``, complex order.

    Symmetric in the order (``K_{-nu} = K_nu``) and conjugation-covariant
    (``K_{conj nu} = conj K_nu``) by construction.  Raises
    :class:`~morsewig.errors.AccuracyError` if the node-doubling refinement
    does not reach ``rel_tol``.

    >>> round(bessel_k(0.5, 1.0).real, 7)
    0.4610685
    """
    return bessel_k_scaled(nu, x, rel_tol) * math.exp(-float(x))


def bessel_k_row_scaled(sigma, x, j_max, rel_tol=DEFAULT_REL_TOL):
    """``exp(x) * K_{j + i sigma}(x)`` for ``j = 0..j_max`` as a complex array."""
    _check_bessel_args(complex(j_max, sigma), x, rel_tol)
    if j_max < 0:
        raise DomainError(f"j_max must be nonnegative, got {j_max}")
    out = np.empty(max(j_max + 1, 2), dtype=np.complex128)
    ok, change = _kernels.bessel_ks_row(float(sigma), float(x), int(j_max), rel_tol, out)
    if not ok or not np.all(np.isfinite(out[: j_max + 1])):
        raise AccuracyError(
            f"Bessel row seeds for sigma={sigma}, x={x} did not converge "
            f"(last relative change {change:.2e})",
            estimate=out[: j_max + 1] * math.exp(-x),
        )
    return out[: j_max + 1]


def bessel_k_row(sigma, x, j_max, rel_tol=DEFAULT_REL_TOL):
    """``[K_{i sigma}(x), K_{1 + i sigma}(x), ..., K_{j_max + i sigma}(x)]``.

    Two quadrature seeds followed by the upward recurrence, which is the
    stable direction for ``K``.
    """
    return bessel_k_row_scaled(sigma, x, j_max, rel_tol) * math.exp(-float(x))
