"""Morse oscillator: potential, spectrum, bound wavefunctions and the
f-deformed ladder algebra whose spectrum reproduces it.

Conventions: ``N`` bound levels ``n = 0..N-1``, anharmonicity
``chi = 1/(2N+1)``, range parameter ``beta = sqrt(2 mass omega chi / hbar)``
and depth ``D = hbar omega / (4 chi)``.  With ``hbar = omega = mass = 1`` this
gives ``beta = sqrt(2 chi)``.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .specfun import laguerre

__all__ = [
    "MorseSystem",
    "make_system",
    "potential",
    "energy",
    "deformed_energy",
    "deformed_energies",
    "morse_variable",
    "log_morse_variable",
    "norm_const",
    "wavefunction",
    "basis",
    "deformation_sq",
    "ladder_coeffs",
    "commutator_value",
    "f_factorial",
    "left_cutoff",
]


@dataclass(frozen=True)
class MorseSystem:
    n_bound: int
    hbar: float
    omega: float
    mass: float
    chi: float
    beta: float
    depth: float

    def params(self):
        """The independent parameters, keyed as in the JSON interchange formats."""
        return {"N": self.n_bound, "hbar": self.hbar, "omega": self.omega, "mass": self.mass}


def make_system(n_bound, hbar=1.0, omega=1.0, mass=1.0):
    """Build a :class:`MorseSystem` with ``N = n_bound`` bound states."""
    if int(n_bound) != n_bound or n_bound < 2:
        raise DomainError(f"n_bound must be an integer >= 2, got {n_bound!r}")
    for name, value in (("hbar", hbar), ("omega", omega), ("mass", mass)):
        if not (value > 0 and math.isfinite(value)):
            raise DomainError(f"{name} must be positive and finite, got {value!r}")
    n_bound = int(n_bound)
    chi = 1.0 / (2 * n_bound + 1)
    beta = math.sqrt(2.0 * mass * omega * chi / hbar)
    depth = hbar * omega / (4.0 * chi)
    return MorseSystem(n_bound, float(hbar), float(omega), float(mass), chi, beta, depth)


def _check_level(sys, n):
    if int(n) != n or not 0 <= n < sys.n_bound:
        raise DomainError(f"level {n!r} outside the bound range 0..{sys.n_bound - 1}")
    return int(n)


def potential(sys, x):
    """``V(x) = D[(1 - exp(-beta x))^2 - 1]``; minimum ``-D`` at ``x = 0``."""
    q = 1.0 - np.exp(-sys.beta * np.asarray(x, dtype=float))
    return sys.depth * (q * q - 1.0)


def energy(sys, n):
    """Morse level ``E_n = hbar omega (n + 1/2) - hbar omega chi (n + 1/2)^2``."""
    n = _check_level(sys, n)
    h = n + 0.5
    return sys.hbar * sys.omega * (h - sys.chi * h * h)


def deformed_energy(sys, n):
    """Eigenvalue of the deformed Hamiltonian; equals ``energy - hbar omega chi / 4``."""
    n = _check_level(sys, n)
    h = n + 0.5
    return sys.hbar * sys.omega * (h - sys.chi * h * h - 0.25 * sys.chi)


def deformed_energies(sys):
    """All deformed levels as an array (used for time evolution)."""
    h = np.arange(sys.n_bound) + 0.5
    return sys.hbar * sys.omega * (h - sys.chi * h * h - 0.25 * sys.chi)


def log_morse_variable(sys, x):
    return math.log(2 * sys.n_bound + 1) - sys.beta * np.asarray(x, dtype=float)


def morse_variable(sys, x):
    """``xi(x) = (2N + 1) exp(-beta x)``."""
    return np.exp(log_morse_variable(sys, x))


@lru_cache(maxsize=None)
def _log_norm_const(n_bound, beta, n):
    return 0.5 * (
        math.log(2.0) + math.lgamma(n + 1) + math.log(beta) + math.log(n_bound - n)
        - math.lgamma(2 * n_bound - n + 1)
    )


def norm_const(sys, n):
    """Normalization ``C_{N,n} = sqrt(2 n! beta (N - n) / Gamma(2N - n + 1))``."""
    n = _check_level(sys, n)
    return math.exp(_log_norm_const(sys.n_bound, sys.beta, n))


def wavefunction(sys, n, x):
    """Bound eigenfunction ``psi_{N,n}(x)``, normalized in ``x``.

    The factor ``C exp(-xi/2) xi^(N-n)`` is assembled in the log domain, so
    deep inside the repulsive wall the result underflows cleanly to zero.
    """
    n = _check_level(sys, n)
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    log_xi = log_morse_variable(sys, flat)
    expo = (_log_norm_const(sys.n_bound, sys.beta, n) + (sys.n_bound - n) * log_xi
            - 0.5 * np.exp(np.minimum(log_xi, 700.0)))
    live = expo > -740.0
    out = np.zeros_like(flat)
    poly = laguerre(n, 2 * sys.n_bound - 2 * n, np.exp(log_xi[live]))
    out[live] = np.exp(expo[live]) * poly
    return out.reshape(x.shape) if x.ndim else float(out[0])


def basis(sys, x):
    """All bound eigenfunctions on ``x``: array of shape ``(N,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    return np.stack([np.asarray(wavefunction(sys, n, x)) for n in range(sys.n_bound)])


def deformation_sq(sys, n):
    """Deformation function ``f^2(n) = 1 - chi n``."""
    if n < 0:
        raise DomainError(f"deformation_sq needs n >= 0, got {n}")
    return 1.0 - sys.chi * n


def ladder_coeffs(sys, n):
    """Matrix elements ``(down, up)`` of the deformed lowering/raising operators on ``|n>``.

    ``up`` is also returned for ``n = N - 1`` although ``|N>`` lies outside
    the bound basis; truncation is the caller's job.
    """
    n = _check_level(sys, n)
    down = math.sqrt(n * (1.0 - sys.chi * n))
    up = math.sqrt((n + 1) * (1.0 - sys.chi * (n + 1)))
    return down, up


def commutator_value(sys, n):
    """Eigenvalue of ``[A, A^dagger] = 1 - chi (2n + 1)`` on ``|n>``."""
    if n < 0:
        raise DomainError(f"commutator_value needs n >= 0, got {n}")
    return 1.0 - sys.chi * (2 * n + 1)


def f_factorial(sys, n):
    """``f(1) f(2) ... f(n) = sqrt((2N)! / ((2N+1)^n (2N-n)!))``."""
    two_n = 2 * sys.n_bound
    if int(n) != n or not 0 <= n <= two_n:
        raise DomainError(f"f_factorial needs 0 <= n <= 2N = {two_n}, got {n!r}")
    return math.exp(
        0.5 * (math.lgamma(two_n + 1) - n * math.log(two_n + 1) - math.lgamma(two_n - n + 1))
    )


@lru_cache(maxsize=None)
def left_cutoff(sys, threshold=1e-16):
    """Position left of which every bound eigenfunction is below ``threshold``.

    Steps left from the potential minimum; past the outermost node every
    level decays monotonically into the wall.
    """
    step = 0.05 / sys.beta
    x = 0.0
    while True:
        x -= step
        if np.max(np.abs(basis(sys, np.array([x])))) < threshold:
            return x
