"""Deformed displacement-operator coherent states (DOCS), deformed
photon-added coherent states (DPACS) and their free evolution, all as
amplitude vectors over the ``N`` bound Morse levels.
"""

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from . import morse
from .errors import DomainError
from .morse import MorseSystem, make_system

__all__ = [
    "BoundState",
    "zeta_from_alpha",
    "docs",
    "dpacs",
    "eigenstate",
    "occupation",
    "mean_n",
    "solve_zeta_for_mean",
    "evolve",
    "revival_period",
    "fidelity",
    "position_wavefunction",
    "state_to_json",
    "state_from_json",
]


@dataclass(frozen=True)
class BoundState:
    """Amplitudes ``coeffs[n] = <n|state>`` for ``n = 0..N-1``.

    ``coeffs`` is stored as a read-only complex array.
    """

    system: MorseSystem
    coeffs: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128)
        if c.shape != (self.system.n_bound,):
            raise DomainError(
                f"expected {self.system.n_bound} amplitudes, got shape {c.shape}"
            )
        if not np.all(np.isfinite(c)):
            raise DomainError("amplitudes must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def norm_sq(self):
        return float(np.sum(np.abs(self.coeffs) ** 2))

    def __repr__(self):
        return f"BoundState(N={self.system.n_bound}, label={self.label!r}, norm_sq={self.norm_sq:.15g})"


def zeta_from_alpha(sys, alpha):
    """Map a displacement amplitude to ``zeta = exp(i arg alpha) tan(|alpha| sqrt(chi))``."""
    alpha = complex(alpha)
    r = abs(alpha) * math.sqrt(sys.chi)
    if r >= 0.5 * math.pi:
        raise DomainError(f"|alpha| sqrt(chi) = {r} reaches the tangent singularity at pi/2")
    if alpha == 0:
        return 0j
    return cmath.rect(math.tan(r), cmath.phase(alpha))


def _docs_amplitudes(n_bound, zeta, levels):
    """``sqrt(binom(2N, n)) zeta^n / (1 + |zeta|^2)^N`` for the given levels."""
    levels = np.asarray(levels)
    out = np.zeros(levels.shape, dtype=np.complex128)
    r = abs(zeta)
    if r == 0:
        out[levels == 0] = 1.0
        return out
    lg = math.lgamma
    two_n = 2 * n_bound
    log_binom = np.array([lg(two_n + 1) - lg(n + 1) - lg(two_n - n + 1) for n in levels])
    log_mag = 0.5 * log_binom + levels * math.log(r) - n_bound * math.log1p(r * r)
    return np.exp(log_mag) * np.exp(1j * levels * cmath.phase(zeta))


def docs(sys, zeta):
    """Deformed displacement-operator coherent state ``|zeta>``.

    Truncated to the bound levels and deliberately not renormalized, so its
    squared norm is slightly below one for large ``|zeta|``.
    """
    zeta = complex(zeta)
    c = _docs_amplitudes(sys.n_bound, zeta, np.arange(sys.n_bound))
    return BoundState(sys, c, f"docs:zeta={zeta.real:.17g},{zeta.imag:.17g}")


def dpacs(sys, zeta, m):
    """Deformed photon-added coherent state ``|zeta, m>``, unit norm.

    Amplitude on level ``n + m`` is proportional to
    ``sqrt(binom(2N, n+m)) (n+m)!/n! zeta^n``; levels below ``m`` are empty.
    """
    if int(m) != m or not 0 <= m < sys.n_bound:
        raise DomainError(f"m must lie in 0..{sys.n_bound - 1}, got {m!r}")
    m = int(m)
    zeta = complex(zeta)
    c = np.zeros(sys.n_bound, dtype=np.complex128)
    n = np.arange(sys.n_bound - m)
    lg = math.lgamma
    two_n = 2 * sys.n_bound
    log_mag = np.array(
        [0.5 * (lg(two_n + 1) - lg(k + m + 1) - lg(two_n - k - m + 1)) + lg(k + m + 1) - lg(k + 1)
         for k in n]
    )
    r = abs(zeta)
    if r == 0:
        c[m] = 1.0
    else:
        log_mag = log_mag + n * math.log(r)
        log_mag -= log_mag.max()
        c[m:] = np.exp(log_mag) * np.exp(1j * n * cmath.phase(zeta))
        c /= math.sqrt(np.sum(np.abs(c) ** 2))
    return BoundState(sys, c, f"dpacs:m={m}:zeta={zeta.real:.17g},{zeta.imag:.17g}")


def eigenstate(sys, n):
    if int(n) != n or not 0 <= n < sys.n_bound:
        raise DomainError(f"level {n!r} outside the bound range 0..{sys.n_bound - 1}")
    c = np.zeros(sys.n_bound, dtype=np.complex128)
    c[int(n)] = 1.0
    return BoundState(sys, c, f"eigen:n={int(n)}")


def occupation(state):
    """Level populations ``P(n) = |c_n|^2`` (not renormalized)."""
    return np.abs(state.coeffs) ** 2


def mean_n(state):
    """Mean excitation ``sum n P(n) / sum P(n)``."""
    p = occupation(state)
    total = p.sum()
    if total == 0:
        raise DomainError("mean_n of the zero state")
    return float(np.dot(np.arange(p.size), p) / total)


def _docs_mean(n_bound, t):
    p = np.abs(_docs_amplitudes(n_bound, t, np.arange(n_bound))) ** 2
    return float(np.dot(np.arange(n_bound), p) / p.sum())


def solve_zeta_for_mean(sys, nbar, phase=0.0):
    """The DOCS parameter ``zeta = exp(i phase) t`` whose mean excitation is ``nbar``.

    ``t`` is found by bisection; the bracket starts from the untruncated
    relation ``nbar = 2N t^2 / (1 + t^2)`` and is doubled until it encloses
    the root.
    """
    n_bound = sys.n_bound
    if not 0 <= nbar < n_bound - 1:
        raise DomainError(f"nbar must lie in [0, {n_bound - 1}), got {nbar!r}")
    if nbar == 0:
        return 0j
    t_hi = 2.0 * math.sqrt(nbar / (2 * n_bound - nbar))
    while _docs_mean(n_bound, t_hi) < nbar:
        t_hi *= 2.0
    t = bisect(lambda s: _docs_mean(n_bound, s) - nbar, 0.0, t_hi, xtol=1e-300, rtol=1e-15, maxiter=2000)
    if abs(_docs_mean(n_bound, t) - nbar) >= 1e-10:
        raise DomainError(f"could not match nbar={nbar} (reached {_docs_mean(n_bound, t)})")
    return cmath.rect(t, phase)


def evolve(state, t):
    """Free evolution under the deformed Hamiltonian for time ``t``."""
    sys = state.system
    phases = np.exp(-1j * morse.deformed_energies(sys) * t / sys.hbar)
    return BoundState(sys, state.coeffs * phases, f"{state.label}@t={t:.17g}")


def revival_period(sys):
    """``tau = 2 pi / (omega chi)``: every level phase realigns after ``tau``."""
    return 2.0 * math.pi / (sys.omega * sys.chi)


def fidelity(a, b):
    """``|<a|b>| / (||a|| ||b||)``."""
    if a.system != b.system:
        raise DomainError("fidelity between states of different systems")
    na, nb = math.sqrt(a.norm_sq), math.sqrt(b.norm_sq)
    if na == 0 or nb == 0:
        raise DomainError("fidelity with the zero state")
    return float(min(1.0, abs(np.vdot(a.coeffs, b.coeffs)) / (na * nb)))


def position_wavefunction(state, x):
    """``Psi(x) = sum_n c_n psi_{N,n}(x)``; complex, same shape as ``x``."""
    x = np.asarray(x, dtype=float)
    psi = morse.basis(state.system, x)
    out = np.tensordot(state.coeffs, psi, axes=(0, 0))
    return out if x.ndim else complex(out)


def state_to_json(state):
    sys = state.system
    doc = dict(sys.params())
    doc["label"] = state.label
    doc["coeffs"] = [[float(c.real), float(c.imag)] for c in state.coeffs]
    return json.dumps(doc, indent=1)


def state_from_json(text):
    doc = json.loads(text)
    sys = make_system(doc["N"], doc.get("hbar", 1.0), doc.get("omega", 1.0), doc.get("mass", 1.0))
    coeffs = np.array([complex(re, im) for re, im in doc["coeffs"]])
    return BoundState(sys, coeffs, doc.get("label", ""))
