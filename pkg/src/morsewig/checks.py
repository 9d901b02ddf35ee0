"""Built-in verification suite shared by ``morsewig check`` and the tests.

Each criterion is a function returning ``(passed, detail)``.  Grids are
cached per suite run so that criteria sharing a state and window (and the
realness sweep over all of them) compute each grid once.
"""

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import poisson

from . import morse, states
from .errors import MorsewigError
from .specfun import bessel_k, laguerre
from .wigner import (
    PhaseSpaceGrid,
    WignerConfig,
    auto_grid_spec,
    eigen_wigner,
    ground_wigner,
    marginal_x,
    negativity,
    normalization,
    wigner_grid,
    wigner_point_closed,
)

__all__ = ["CheckResult", "Suite", "run_checks", "CRITERIA"]

ORACLE_WINDOW = PhaseSpaceGrid(-4.0, 12.0, 32, -3.0, 3.0, 32)
DYNAMICS_WINDOW = PhaseSpaceGrid(-4.0, 12.0, 64, -3.0, 3.0, 64)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.number:2d} {self.name}: {self.detail}"


class Suite:
    """Shared state for one run: the test system, states and a grid cache."""

    def __init__(self, bessel_rel_tol=1e-10):
        self.bessel_rel_tol = bessel_rel_tol
        self.system = morse.make_system(10)
        self._grids = {}

    @property
    def cfg(self):
        # Built on use, so an invalid injected tolerance fails only the
        # criteria that evaluate Wigner grids.
        return WignerConfig(bessel_rel_tol=self.bessel_rel_tol)

    def docs_quarter(self):
        sys = self.system
        return states.docs(sys, states.solve_zeta_for_mean(sys, 0.25))

    def dpacs_quarter(self, m):
        sys = self.system
        return states.dpacs(sys, states.solve_zeta_for_mean(sys, 0.25), m)

    def norm_states(self):
        sys = self.system
        out = [states.eigenstate(sys, 0), states.eigenstate(sys, 3), self.docs_quarter()]
        return out + [self.dpacs_quarter(m) for m in (1, 2, 3)]

    def grid(self, state, spec=None, cfg=None):
        """Closed-form grid of ``state`` on ``spec`` (auto window if None), cached."""
        cfg = cfg or self.cfg
        key = (state.coeffs.tobytes(), None if spec is None else tuple(vars(spec.spec()).values())[:6], cfg)
        if key not in self._grids:
            if spec is None:
                spec = auto_grid_spec(state, cfg=cfg)
            self._grids[key] = wigner_grid(state, spec, cfg)
        return self._grids[key]

    def closed_grids(self):
        return [g for g in self._grids.values() if g.meta.get("method") == "closed_form"]


def check_oracle(suite):
    s = suite.docs_quarter()
    t0 = time.perf_counter()
    closed = wigner_grid(s, ORACLE_WINDOW, suite.cfg)
    quad = wigner_grid(s, ORACLE_WINDOW, WignerConfig(method="quadrature"))
    elapsed = time.perf_counter() - t0
    suite._grids[(s.coeffs.tobytes(), "oracle", suite.cfg)] = closed
    diff = float(np.max(np.abs(closed.values - quad.values)))
    return diff < 1e-6 and elapsed < 60.0, f"max|closed - quadrature| = {diff:.3e} (< 1e-6), {elapsed:.1f} s (< 60 s)"


def check_realness(suite):
    # Make sure every grid of the other criteria is in the cache.
    for s in suite.norm_states():
        suite.grid(s)
    _dynamics_grids(suite)
    if not any(k[1] == "oracle" for k in suite._grids):
        check_oracle(suite)
    grids = suite.closed_grids()
    worst = max(g.meta["imag_residual_max"] for g in grids)
    return worst < 1e-10, f"max |Im|/(1+|Re|) = {worst:.3e} over {len(grids)} grids (< 1e-10)"


def check_normalization(suite):
    parts = []
    ok = True
    for s in suite.norm_states():
        g = suite.grid(s)
        err = abs(normalization(g) - s.norm_sq)
        ok &= err < 1e-3
        parts.append(f"{s.label.split(':zeta')[0]} {err:.1e}")
    return ok, "|int W - |c|^2|: " + ", ".join(parts) + " (< 1e-3)"


def check_marginals(suite):
    s = suite.docs_quarter()
    g = suite.grid(s)
    dens = np.abs(states.position_wavefunction(s, g.xs)) ** 2
    err = float(np.max(np.abs(marginal_x(g) - dens)[1:-1]))
    return err < 1e-6, f"max|int W dp - |Psi|^2| = {err:.3e} over interior columns (< 1e-6)"


def check_specialization(suite):
    # Points fixed in advance: seed 0, x in [-2, 10], p in [-1.5, 1.5].
    sys = suite.system
    rng = np.random.default_rng(0)
    pts = rng.uniform([-2.0, -1.5], [10.0, 1.5], size=(20, 2))
    tight = WignerConfig(bessel_rel_tol=1e-13)
    worst = 0.0
    for m in range(4):
        e = states.eigenstate(sys, m)
        for x, p in pts:
            ref = eigen_wigner(sys, m, x, p, 1e-13).real
            worst = max(worst, abs(wigner_point_closed(e, x, p, tight) - ref) / abs(ref))
    g0 = states.docs(sys, 0.0)
    worst0 = 0.0
    for x, p in pts:
        ref = ground_wigner(sys, x, p, 1e-13).real
        worst0 = max(worst0, abs(wigner_point_closed(g0, x, p, tight) - ref) / abs(ref))
    ok = worst < 1e-10 and worst0 < 1e-10
    return ok, f"eigenstate m=0..3 rel {worst:.2e}, ground rel {worst0:.2e} at 20 points (< 1e-10)"


def _dynamics_grids(suite):
    s = suite.docs_quarter()
    tau = states.revival_period(suite.system)
    return {
        name: suite.grid(states.evolve(s, f * tau) if f else s, DYNAMICS_WINDOW)
        for name, f in (("0", 0.0), ("tau", 1.0), ("tau/4", 0.25), ("3tau/4", 0.75))
    }


def check_revival(suite):
    s = suite.docs_quarter()
    tau = states.revival_period(suite.system)
    fid = states.fidelity(s, states.evolve(s, tau))
    g = _dynamics_grids(suite)
    diff = float(np.max(np.abs(g["tau"].values - g["0"].values)))
    ok = abs(fid - 1.0) < 1e-12 and diff < 1e-8
    return ok, f"|1 - fidelity| = {abs(fid - 1.0):.1e} (< 1e-12), max|W(tau) - W(0)| = {diff:.2e} (< 1e-8)"


def check_time_mirror(suite):
    g = _dynamics_grids(suite)
    diff = float(np.max(np.abs(g["tau/4"].values - g["3tau/4"].values[:, ::-1])))
    return diff < 1e-8, f"max|W(tau/4; x, p) - W(3tau/4; x, -p)| = {diff:.2e} (< 1e-8)"


def check_negativity(suite):
    mins = {}
    for m in (1, 2, 3):
        mins[f"dpacs m={m}"] = negativity(suite.grid(suite.dpacs_quarter(m)))[0]
    mins["docs t=tau/4"] = negativity(_dynamics_grids(suite)["tau/4"])[0]
    ground = negativity(suite.grid(states.docs(suite.system, 0.0)))[0]
    failed = [k for k, v in mins.items() if not v < 0]
    if not ground >= -1e-10:
        failed.append("zeta=0 nonnegative")
    detail = ", ".join(f"{k} min {v:.2e}" for k, v in mins.items())
    detail = f"{detail} (< 0); zeta=0 min {ground:.2e} (>= -1e-10)"
    if failed:
        detail += "; failing clause: " + ", ".join(failed)
    return not failed, detail


def check_occupation(suite):
    worst = 0.0
    for m in (1, 2, 3):
        worst = max(worst, float(np.max(states.occupation(suite.dpacs_quarter(m))[:m])))
    return worst == 0.0, f"max P(n < m) over m=1,2,3 = {worst!r} (exactly 0)"


def check_contraction(suite):
    sys = morse.make_system(150)
    s = states.docs(sys, states.solve_zeta_for_mean(sys, 4.0))
    occ = states.occupation(s)
    n = np.arange(occ.size)
    tv = 0.5 * (np.sum(np.abs(occ - poisson.pmf(n, 4.0))) + poisson.sf(occ.size - 1, 4.0))
    return tv < 0.01, f"N=150, <n>=4: total variation to Poisson = {tv:.4f} (< 0.01)"


def _laguerre_exact(n, k, x):
    x = Fraction(x)
    return sum(Fraction((-1) ** m * math.comb(n + k, n - m), math.factorial(m)) * x**m for m in range(n + 1))


def check_special_functions(suite):
    xs = np.linspace(0.1, 30.0, 60)
    half = 0.0
    for x in xs:
        k12 = math.sqrt(math.pi / (2 * x)) * math.exp(-x)
        for nu, ref in ((0.5, k12), (1.5, k12 * (1 + 1 / x)), (2.5, k12 * (1 + 3 / x + 3 / x**2))):
            half = max(half, abs(bessel_k(nu, x).real - ref) / ref)
    rec = 0.0
    for x in (0.5, 2.0, 10.0, 50.0):
        for sigma in (0.0, 5.0, 20.0):
            ks = [bessel_k(complex(j, sigma), x) for j in range(12)]
            for j in range(1, 11):
                nu = complex(j, sigma)
                rec = max(rec, abs(ks[j + 1] - ks[j - 1] - 2 * nu / x * ks[j]) / abs(ks[j + 1]))
    lag = 0.0
    # The series is summed in exact rational arithmetic; in floating point
    # it is itself ill-conditioned (up to ~1e8 at n=10, k=32, x=49).
    for n in range(11):
        for k in range(0, 41, 4):
            for x in np.linspace(-50.0, 50.0, 41):
                ref = _laguerre_exact(n, k, x)
                got = laguerre(n, k, x)
                if ref == 0:
                    lag = max(lag, abs(got))
                else:
                    lag = max(lag, abs(float((Fraction(got) - ref) / ref)))
    ok = half < 1e-10 and rec < 1e-9 and lag < 1e-10
    return ok, f"half-integer K rel {half:.1e} (< 1e-10), recurrence residual {rec:.1e} (< 1e-9), Laguerre rel {lag:.1e} (< 1e-10)"


def check_basis(suite):
    sys = suite.system
    x = np.linspace(-8.0 / sys.beta, 30.0 / sys.beta, 20000)
    psi = morse.basis(sys, x)
    gram = np.trapezoid(psi[:, None, :] * psi[None, :, :], x, axis=-1)
    err = float(np.max(np.abs(gram - np.eye(sys.n_bound))))
    return err < 1e-8, f"max|Gram - I| = {err:.2e} (< 1e-8)"


CRITERIA = [
    (1, "oracle equivalence", check_oracle),
    (2, "realness", check_realness),
    (3, "normalization", check_normalization),
    (4, "marginals", check_marginals),
    (5, "specialization chain", check_specialization),
    (6, "revival", check_revival),
    (7, "time mirror", check_time_mirror),
    (8, "negativity onset", check_negativity),
    (9, "occupation support", check_occupation),
    (10, "harmonic contraction", check_contraction),
    (11, "special functions", check_special_functions),
    (12, "basis integrity", check_basis),
]


def run_one(number, suite):
    for num, name, func in CRITERIA:
        if num == number:
            t0 = time.perf_counter()
            try:
                ok, detail = func(suite)
            except MorsewigError as exc:
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            return CheckResult(num, name, bool(ok), detail, time.perf_counter() - t0)
    raise KeyError(number)


def run_checks(numbers=None, bessel_rel_tol=1e-10, report=None):
    """Run the selected criteria (all by default); ``report`` gets each result as it finishes."""
    suite = Suite(bessel_rel_tol)
    results = []
    for num, _, _ in CRITERIA:
        if numbers is None or num in numbers:
            r = run_one(num, suite)
            results.append(r)
            if report:
                report(r)
    return results
