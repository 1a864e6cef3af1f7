"""Shared samplers and oracles for the test suite."""

import math

import numpy as np
import pytest
import scipy.linalg

from spinotto import BlochVector, CycleSpec

SQRT2 = math.sqrt(2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_bloch(rng, concentration=1.0) -> BlochVector:
    """Random physical state: Dirichlet eigenvalues plus a random direction."""
    lam = rng.dirichlet(concentration * np.ones(4))
    lo, l2, l3, hi = lam
    if lo > hi:
        lo, hi = hi, lo
    d = (hi - lo) / SQRT2
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    v = d * direction
    return BlochVector(v[0], v[1], v[2], (l2 - l3) / SQRT2, lo + hi - 0.5)


def random_spec(rng, dephasing=False, short_adiabats=True) -> CycleSpec:
    """Random engine controls with a comfortably unique limit cycle."""
    omega_a = rng.uniform(3.0, 7.0)
    tau_adiabat = rng.uniform(0.01, 0.05) if short_adiabats else rng.uniform(0.2, 1.0)
    return CycleSpec(
        t_cold=rng.uniform(0.8, 2.5),
        t_hot=rng.uniform(4.0, 10.0),
        omega_a=omega_a,
        omega_b=omega_a + rng.uniform(3.0, 9.0),
        j=rng.uniform(0.8, 3.5),
        gamma_cold=rng.uniform(0.2, 1.6),
        gamma_hot=rng.uniform(0.2, 1.6),
        dephasing_cold=rng.uniform(0.002, 0.02) if dephasing else 0.0,
        dephasing_hot=rng.uniform(0.002, 0.02) if dephasing else 0.0,
        tau_cold=rng.uniform(0.1, 1.2),
        tau_hot=rng.uniform(0.1, 1.2),
        tau_ab=tau_adiabat,
        tau_ba=rng.uniform(0.01, 0.05) if short_adiabats else tau_adiabat,
    )


def hamiltonian_matrix(omega: float, j: float) -> np.ndarray:
    """H = omega*B1 + J*B2 in the spin-product basis."""
    h = np.zeros((4, 4), dtype=complex)
    h[0, 0] = omega / SQRT2
    h[3, 3] = -omega / SQRT2
    h[0, 3] = j / SQRT2
    h[3, 0] = j / SQRT2
    return h


def gibbs_matrix(omega: float, j: float, temperature: float) -> np.ndarray:
    """Independent Gibbs-state oracle exp(-H/T)/Z."""
    g = scipy.linalg.expm(-hamiltonian_matrix(omega, j) / temperature)
    return g / np.trace(g)


def fig1_spec() -> CycleSpec:
    return CycleSpec(
        t_cold=1.5, t_hot=7.5, omega_a=5.08364, omega_b=12.6355, j=2.0,
        gamma_cold=0.3423, gamma_hot=0.3423, dephasing_cold=0.0, dephasing_hot=0.0,
        tau_cold=3.0, tau_hot=2.5, tau_ab=0.01, tau_ba=0.01,
    )


def fig5_spec(tau_hot: float, tau_cold: float) -> CycleSpec:
    return CycleSpec(
        t_cold=1.5, t_hot=7.5, omega_a=5.0836387, omega_b=12.63545, j=2.0,
        gamma_cold=0.10662, gamma_hot=1.0048, dephasing_cold=0.0, dephasing_hot=0.0,
        tau_cold=tau_cold, tau_hot=tau_hot, tau_ab=0.05, tau_ba=0.06,
    )


FIG5_TIMES = {"1": (0.32, 0.64), "2": (0.581, 1.1602), "3": (1.5, 3.6)}


def fig6_spec() -> CycleSpec:
    return CycleSpec(
        t_cold=1.5, t_hot=7.5, omega_a=5.0836387, omega_b=12.635485, j=2.0,
        gamma_cold=1.7, gamma_hot=1.7, dephasing_cold=0.0, dephasing_hot=0.0,
        tau_cold=0.6, tau_hot=0.0, tau_ab=0.03, tau_ba=0.03,
    )


def fig3_spec(tau_adiabat: float, dephasing_hot: float, dephasing_cold: float) -> CycleSpec:
    # fields and bath couplings fall back to the fig1 values
    return CycleSpec(
        t_cold=1.5, t_hot=7.5, omega_a=5.08364, omega_b=12.6355, j=2.0,
        gamma_cold=0.3423, gamma_hot=0.3423,
        dephasing_cold=dephasing_cold, dephasing_hot=dephasing_hot,
        tau_cold=0.6, tau_hot=0.6, tau_ab=tau_adiabat, tau_ba=tau_adiabat,
    )


def linear_fit(x, y):
    """Least-squares line fit returning (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(((y - pred) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    return float(slope), float(intercept), 1.0 - ss_res / ss_tot
