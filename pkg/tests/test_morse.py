import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from morsewig import morse
from morsewig.errors import DomainError


def test_system_constants(sys10):
    assert sys10.chi == 1 / 21
    assert sys10.beta == pytest.approx(math.sqrt(2 / 21), rel=1e-15)
    assert sys10.beta == pytest.approx(0.3086067, abs=1e-7)
    assert sys10.depth == pytest.approx(5.25, rel=1e-15)
    assert sys10.params() == {"N": 10, "hbar": 1.0, "omega": 1.0, "mass": 1.0}


def test_system_units():
    s = morse.make_system(6, hbar=2.0, omega=0.5, mass=3.0)
    assert s.beta == pytest.approx(math.sqrt(2 * 3.0 * 0.5 * s.chi / 2.0))
    assert s.depth == pytest.approx(2.0 * 0.5 / (4 * s.chi))


@pytest.mark.parametrize("args", [(1,), (2.5,), (10, 0.0), (10, 1.0, -1.0), (10, 1.0, 1.0, float("inf"))])
def test_make_system_rejects(args):
    with pytest.raises(DomainError):
        morse.make_system(*args)


def test_potential_shape(sys10):
    assert morse.potential(sys10, 0.0) == -sys10.depth
    x = np.linspace(-2, 40, 500)
    v = morse.potential(sys10, x)
    assert v.min() >= -sys10.depth
    assert morse.potential(sys10, 200.0) == pytest.approx(0.0, abs=1e-20)


def test_spectrum(sys10):
    e = [morse.energy(sys10, n) for n in range(10)]
    gaps = np.diff(e)
    assert np.all(gaps > 0)
    assert np.allclose(np.diff(gaps), -2 * sys10.chi * sys10.hbar * sys10.omega)
    assert e[-1] < sys10.depth
    for n in range(10):
        assert morse.deformed_energy(sys10, n) == pytest.approx(e[n] - sys10.chi / 4)
    assert np.allclose(morse.deformed_energies(sys10), [morse.deformed_energy(sys10, n) for n in range(10)])


def test_level_range(sys10):
    for bad in (-1, 10, 2.5):
        with pytest.raises(DomainError):
            morse.energy(sys10, bad)
        with pytest.raises(DomainError):
            morse.wavefunction(sys10, bad, 0.0)


def test_morse_variable(sys10):
    assert morse.morse_variable(sys10, 0.0) == pytest.approx(21.0)
    assert morse.log_morse_variable(sys10, 1.0) == pytest.approx(math.log(21) - sys10.beta)


@pytest.mark.parametrize("n", [0, 3, 6, 9])
def test_schroedinger_residual(sys10, n):
    # Second-order finite differences: residual scales as h^2.
    x = np.linspace(-3, 25, 28001)
    h = x[1] - x[0]
    psi = morse.wavefunction(sys10, n, x)
    d2 = (psi[2:] - 2 * psi[1:-1] + psi[:-2]) / h**2
    h_psi = -0.5 * d2 + morse.potential(sys10, x[1:-1]) * psi[1:-1]
    e = morse.energy(sys10, n) - sys10.depth
    assert np.max(np.abs(h_psi - e * psi[1:-1])) < 2e-6


def test_gram_matrix(sys10):
    x = np.linspace(-8 / sys10.beta, 30 / sys10.beta, 20000)
    psi = morse.basis(sys10, x)
    gram = np.trapezoid(psi[:, None] * psi[None, :], x, axis=-1)
    assert np.max(np.abs(gram - np.eye(10))) < 1e-8


def test_gram_larger_system():
    s = morse.make_system(24)
    x = np.linspace(-8 / s.beta, 40 / s.beta, 30000)
    psi = morse.basis(s, x)
    gram = np.trapezoid(psi[:, None] * psi[None, :], x, axis=-1)
    assert np.max(np.abs(gram - np.eye(24))) < 1e-8


def test_wavefunction_wall_underflow(sys10):
    assert morse.wavefunction(sys10, 0, -60.0) == 0.0
    assert np.all(np.isfinite(morse.wavefunction(sys10, 5, np.linspace(-100, 300, 50))))


def test_wavefunction_shapes(sys10):
    assert isinstance(morse.wavefunction(sys10, 2, 0.5), float)
    assert morse.wavefunction(sys10, 2, np.zeros((2, 3))).shape == (2, 3)
    assert morse.basis(sys10, np.zeros(7)).shape == (10, 7)


def test_node_count(sys10):
    x = np.linspace(-6, 40, 20000)
    for n in range(10):
        psi = morse.wavefunction(sys10, n, x)
        live = psi[np.abs(psi) > 1e-12]
        assert np.count_nonzero(np.diff(np.sign(live))) == n


def test_norm_const(sys10):
    c = morse.norm_const(sys10, 0)
    assert c == pytest.approx(math.sqrt(2 * sys10.beta * 10 / math.factorial(20)))


def test_ladder_algebra(sys10):
    for n in range(10):
        down, up = morse.ladder_coeffs(sys10, n)
        assert down == pytest.approx(math.sqrt(n * morse.deformation_sq(sys10, n)))
        assert up**2 - down**2 == pytest.approx(morse.commutator_value(sys10, n))
    assert morse.ladder_coeffs(sys10, 0)[0] == 0.0


def test_ladder_reproduces_spectrum(sys10):
    # H = (hbar omega / 2)(A A^+ + A^+ A) is diagonal with the deformed levels.
    for n in range(10):
        down, up = morse.ladder_coeffs(sys10, n)
        assert 0.5 * (up**2 + down**2) == pytest.approx(morse.deformed_energy(sys10, n))


def test_f_factorial(sys10):
    prod = 1.0
    for n in range(21):
        assert morse.f_factorial(sys10, n) == pytest.approx(prod, rel=1e-12)
        prod *= math.sqrt(morse.deformation_sq(sys10, n + 1)) if n < 20 else 1.0
    with pytest.raises(DomainError):
        morse.f_factorial(sys10, 21)


def test_left_cutoff(sys10):
    x0 = morse.left_cutoff(sys10)
    assert -8 < x0 < -4
    assert np.max(np.abs(morse.basis(sys10, np.array([x0, x0 - 1.0])))) < 1e-16


@given(st.integers(2, 40), st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.1, 5))
def test_depth_holds_exactly_n_levels(n, hbar, omega, mass):
    s = morse.make_system(n, hbar, omega, mass)
    top = morse.energy(s, n - 1)
    assert top < s.depth
    # Continuing the level formula to n = N lands exactly on the dissociation edge.
    h = n + 0.5
    assert hbar * omega * (h - s.chi * h * h) == pytest.approx(s.depth, rel=1e-12)
