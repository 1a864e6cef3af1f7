"""Operator-basis bookkeeping for the coupled two-spin working medium.

The 4x4 state of the medium is fully parameterized by five real expectation
values (b1..b5) of an orthonormal, traceless operator set.  This module
rebuilds density matrices from them, evaluates their spectrum in closed form,
changes to the energy eigenbasis of H = omega*B1 + J*B2, and computes matrix
functions (square root, logarithm) spectrally.

Units: hbar = k_B = 1 throughout; everything is dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT2 = math.sqrt(2.0)

# Eigenvalues are clamped at this floor before taking logarithms, so entropy
# expressions stay finite (never NaN) for numerically pure states.
LOG_EIGENVALUE_FLOOR = 1e-300

# A reconstructed eigenvalue below this marks the state as non-physical.
PHYSICALITY_TOL = -1e-10


@dataclass(frozen=True)
class BlochVector:
    """Expectation values b1..b5 that completely determine the 4x4 state.

    Any real values are accepted at construction; physicality (a positive
    semidefinite reconstructed matrix) is checked via :func:`vn_eigenvalues`.
    """

    b1: float
    b2: float
    b3: float
    b4: float
    b5: float

    def as_array(self) -> np.ndarray:
        return np.array([self.b1, self.b2, self.b3, self.b4, self.b5])

    @classmethod
    def from_array(cls, values) -> "BlochVector":
        b1, b2, b3, b4, b5 = (float(v) for v in values)
        return cls(b1, b2, b3, b4, b5)

    @property
    def d(self) -> float:
        """Norm of the (b1, b2, b3) block."""
        return math.sqrt(self.b1**2 + self.b2**2 + self.b3**2)


@dataclass(frozen=True)
class SpectralInfo:
    """Closed-form eigenvalues of the reconstructed density matrix.

    The labels follow the fixed convention lam4 >= lam1 (d >= 0); lam2 and
    lam3 are the populations of the inner doublet.  They sum to one
    algebraically.
    """

    lam1: float
    lam2: float
    lam3: float
    lam4: float
    d: float

    def as_array(self) -> np.ndarray:
        return np.array([self.lam1, self.lam2, self.lam3, self.lam4])

    @property
    def physical(self) -> bool:
        return min(self.lam1, self.lam2, self.lam3, self.lam4) >= PHYSICALITY_TOL


@dataclass(frozen=True)
class EnergyBasisTransform:
    """The symmetric involution C that diagonalizes H = omega*B1 + J*B2.

    Its nontrivial entries are mu = sqrt((Omega - omega)/(2 Omega)) and
    chi = sqrt((Omega + omega)/(2 Omega)) with Omega = sqrt(omega^2 + J^2);
    C @ C is the identity.
    """

    omega: float
    j: float
    big_omega: float
    mu: float
    chi: float

    def matrix(self) -> np.ndarray:
        c = np.zeros((4, 4))
        c[0, 0] = -self.mu
        c[0, 3] = self.chi
        c[1, 1] = 1.0
        c[2, 2] = 1.0
        c[3, 0] = self.chi
        c[3, 3] = self.mu
        return c


def energy_basis_transform(omega: float, j: float) -> EnergyBasisTransform:
    """Build the basis change for field omega and coupling j (Omega > 0)."""
    big_omega = math.hypot(omega, j)
    if big_omega == 0.0:
        raise ValueError("energy basis undefined for omega = J = 0")
    mu = math.sqrt(max(big_omega - omega, 0.0) / (2.0 * big_omega))
    chi = math.sqrt((big_omega + omega) / (2.0 * big_omega))
    return EnergyBasisTransform(omega, j, big_omega, mu, chi)


def reconstruct_density(b: BlochVector) -> np.ndarray:
    """Rebuild the 4x4 density matrix (spin-product basis) from b1..b5.

    The result is Hermitian with unit trace by construction for any input.
    """
    quarter = 0.25
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = quarter + b.b1 / SQRT2 + b.b5 / 2.0
    rho[1, 1] = quarter + b.b4 / SQRT2 - b.b5 / 2.0
    rho[2, 2] = quarter - b.b4 / SQRT2 - b.b5 / 2.0
    rho[3, 3] = quarter - b.b1 / SQRT2 + b.b5 / 2.0
    rho[0, 3] = (b.b2 - 1j * b.b3) / SQRT2
    rho[3, 0] = (b.b2 + 1j * b.b3) / SQRT2
    return rho


def vn_eigenvalues(b: BlochVector) -> SpectralInfo:
    """Eigenvalues of the reconstructed state, in the labeled closed form."""
    d = b.d
    half_b5 = b.b5 / 2.0
    return SpectralInfo(
        lam1=0.25 - d / SQRT2 + half_b5,
        lam2=0.25 + b.b4 / SQRT2 - half_b5,
        lam3=0.25 - b.b4 / SQRT2 - half_b5,
        lam4=0.25 + d / SQRT2 + half_b5,
        d=d,
    )


def to_energy_basis(b: BlochVector, omega: float, j: float) -> np.ndarray:
    """Return C rho C, the state expressed in the energy eigenbasis."""
    c = energy_basis_transform(omega, j).matrix()
    return c @ reconstruct_density(b) @ c


def energy_populations(b: BlochVector, omega: float, j: float) -> np.ndarray:
    """Diagonal of the energy-basis state, in closed form.

    The populations are ordered by increasing energy of the outer doublet:
    (-Omega/sqrt(2), 0, 0, +Omega/sqrt(2)) with E = omega*b1 + J*b2 entering
    the outer entries.
    """
    big_omega = math.hypot(omega, j)
    if big_omega == 0.0:
        raise ValueError("energy basis undefined for omega = J = 0")
    e_scaled = (omega * b.b1 + j * b.b2) / (SQRT2 * big_omega)
    half_b5 = b.b5 / 2.0
    return np.array([
        0.25 - e_scaled + half_b5,
        0.25 + b.b4 / SQRT2 - half_b5,
        0.25 - b.b4 / SQRT2 - half_b5,
        0.25 + e_scaled + half_b5,
    ])


def matrix_function(rho: np.ndarray, f) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    ``f`` receives the (real) eigenvalue array and must return an array of
    the same shape.
    """
    lam, q = np.linalg.eigh(rho)
    return (q * f(lam)) @ q.conj().T


def matrix_sqrt(rho: np.ndarray) -> np.ndarray:
    """Spectral square root; tiny negative eigenvalues are clipped to zero."""
    return matrix_function(rho, lambda lam: np.sqrt(np.clip(lam, 0.0, None)))


def matrix_log(rho: np.ndarray) -> np.ndarray:
    """Spectral logarithm with eigenvalues floored at a tiny positive value.

    The floor keeps log of a (numerically) zero eigenvalue finite; callers
    that need a support check must perform it themselves.
    """
    return matrix_function(
        rho, lambda lam: np.log(np.clip(lam, LOG_EIGENVALUE_FLOOR, None))
    )


def thermal_state(omega: float, j: float, temperature: float) -> BlochVector:
    """Gibbs state of H = omega*B1 + J*B2 at the given temperature.

    It is the unique fixed point of every bath-coupled constant-field branch
    with matching (omega, J, T).  The (b1, b2) block points along the field
    axis (omega, J)/Omega, b3 = b4 = 0.
    """
    if temperature <= 0.0:
        raise ValueError("temperature must be positive")
    big_omega = math.hypot(omega, j)
    if big_omega == 0.0:
        raise ValueError("thermal state undefined for omega = J = 0")
    # t = tanh(Omega / (2 sqrt(2) T)) parameterizes all Gibbs quantities in
    # an overflow-free way.
    t = math.tanh(big_omega / (2.0 * SQRT2 * temperature))
    e_eq = -(big_omega / SQRT2) * t
    return BlochVector(
        b1=omega * e_eq / big_omega**2,
        b2=j * e_eq / big_omega**2,
        b3=0.0,
        b4=0.0,
        b5=t * t / 2.0,
    )
