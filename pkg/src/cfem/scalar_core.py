"""Midpoint-integrated 1D elements for -u'' + lam*u = 0.

A single element of complex length L contributes the symmetric 2x2 stiffness
relation with diagonal 1/L + lam*L/4 and off-diagonal -1/L + lam*L/4. The
diagonal/off-diagonal pair of any assembled-and-condensed mesh satisfies
k_diag**2 - k_off**2 = lam, which is exactly the algebraic statement that
augmenting a half-space by one element preserves the half-space impedance
sqrt(lam). All operations here are pure functions.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .numerics import (
    BlockTridiagonalMatrix,
    BlockTridiagSolver,
    SingularSystemError,
    generalized_eig_dense,
    schur_complement_boundary,
)
from .pade_grid import PadeGrid


def sqrt_decay(lam: complex) -> complex:
    """Branch of sqrt(lam) with Re >= 0; real-negative lam maps to +i*sqrt|lam|.

    This is the decaying-solution convention for the half-space impedance.
    """
    k = cmath.sqrt(lam)
    if k.real < 0 or (k.real == 0 and k.imag < 0):
        k = -k
    return k


@dataclass(frozen=True)
class SpectralParameter:
    """Pair (lam, k) with k = sqrt(lam) on the decaying branch."""

    lam: complex
    k: complex

    @classmethod
    def from_lambda(cls, lam: complex) -> "SpectralParameter":
        return cls(lam=complex(lam), k=sqrt_decay(complex(lam)))

    @classmethod
    def from_omega(cls, omega: float) -> "SpectralParameter":
        return cls.from_lambda(-complex(omega) ** 2)


@dataclass(frozen=True)
class ElementDtN:
    """2x2 symmetric stiffness of one midpoint element."""

    k_diag: complex
    k_off: complex
    length: complex
    lam: complex


@dataclass(frozen=True)
class DtNMap2:
    """Persymmetric 2x2 two-point DtN map."""

    k_diag: complex
    k_off: complex

    def fixed_point_defect(self, lam: complex) -> float:
        return abs(self.k_diag**2 - self.k_off**2 - lam)


@dataclass(frozen=True)
class AssembledSystem1D:
    """Symmetric tridiagonal assembly of element stiffness blocks."""

    diag: np.ndarray
    offdiag: np.ndarray
    grid: PadeGrid

    @property
    def dim(self) -> int:
        return self.diag.shape[0]

    def to_dense(self) -> np.ndarray:
        dense = np.diag(self.diag.astype(complex))
        idx = np.arange(self.dim - 1)
        dense[idx, idx + 1] = self.offdiag
        dense[idx + 1, idx] = self.offdiag
        return dense

    def as_block_tridiagonal(self) -> BlockTridiagonalMatrix:
        return BlockTridiagonalMatrix.from_blocks(
            self.diag.reshape(-1, 1, 1), self.offdiag.reshape(-1, 1, 1)
        )


def element_dtn(length: complex, lam: complex) -> ElementDtN:
    """Midpoint-integrated stiffness of a single element."""
    if length == 0:
        raise ValueError("element length must be nonzero")
    return ElementDtN(
        k_diag=1 / length + lam * length / 4,
        k_off=-1 / length + lam * length / 4,
        length=length,
        lam=lam,
    )


def element_propagator(length: complex, k: complex) -> complex:
    """(1 + k*L/2) / (1 - k*L/2): one Crank-Nicolson step across the element."""
    denom = 1 - k * length / 2
    if denom == 0:
        raise ZeroDivisionError(f"propagator pole at k*L = 2 (L={length}, k={k})")
    return (1 + k * length / 2) / denom


def mesh_propagator(grid: PadeGrid, k: complex) -> complex:
    """Product of element propagators; independent of element ordering."""
    out = 1.0 + 0.0j
    for j, length in enumerate(grid.lengths):
        if 1 - k * length / 2 == 0:
            raise ZeroDivisionError(f"propagator pole at element {j} (L={length})")
        out *= element_propagator(length, k)
    return out


def exact_propagator(k: complex, length: float) -> complex:
    """exp(k*L), the exact transfer factor of psi' = k*psi over (0, L)."""
    return cmath.exp(k * length)


def exact_dtn(lam: complex, length: float) -> DtNMap2:
    """Closed-form two-point DtN map of -u'' + lam*u = 0 on (0, L)."""
    if lam == 0:
        return DtNMap2(k_diag=1 / length, k_off=-1 / length)
    k = sqrt_decay(lam)
    sh = cmath.sinh(k * length)
    if abs(sh) <= 1e-12 * max(1.0, abs(cmath.cosh(k * length))):
        raise ZeroDivisionError("lam is a Dirichlet resonance of the interval")
    return DtNMap2(k_diag=k * cmath.cosh(k * length) / sh, k_off=-k / sh)


def propagator_to_dtn(length: complex, lam: complex) -> DtNMap2:
    """Rebuild the element DtN map from the first-order (u, v/sqrt(lam))
    transfer matrix; equals element_dtn up to round-off.

    Used as an independent construction in tests: the transfer matrix is
    (I - (L/2)S)^-1 (I + (L/2)S) with S = [[0, k], [k, 0]] and k = sqrt(lam).
    """
    k = sqrt_decay(lam)
    s = np.array([[0, k], [k, 0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    p = np.linalg.solve(eye - (length / 2) * s, eye + (length / 2) * s)
    p11, p12 = p[0]
    p21, p22 = p[1]
    if p12 == 0:
        raise ZeroDivisionError("transfer matrix has no DtN form (p12 = 0)")
    det = p11 * p22 - p12 * p21
    k00 = k * p11 / p12
    k0l = -k / p12
    kl0 = -k * det / p12
    kll = k * p22 / p12
    # symmetric up to round-off; average the two off-diagonal estimates
    return DtNMap2(k_diag=(k00 + kll) / 2, k_off=(k0l + kl0) / 2)


def assemble_1d(grid: PadeGrid, lam: complex) -> AssembledSystem1D:
    """Tridiagonal assembly of element stiffness blocks over the mesh."""
    n = grid.n
    diag = np.zeros(n + 1, dtype=complex)
    offdiag = np.zeros(n, dtype=complex)
    for j, length in enumerate(grid.lengths):
        elem = element_dtn(length, lam)
        diag[j] += elem.k_diag
        diag[j + 1] += elem.k_diag
        offdiag[j] = elem.k_off
    return AssembledSystem1D(diag=diag, offdiag=offdiag, grid=grid)


def assemble_stiffness_mass(grid: PadeGrid):
    """Separate tridiagonal stiffness (1/L) and midpoint mass (L/4) parts."""
    n = grid.n
    kd = np.zeros(n + 1, dtype=complex)
    ko = np.zeros(n, dtype=complex)
    md = np.zeros(n + 1, dtype=complex)
    mo = np.zeros(n, dtype=complex)
    for j, length in enumerate(grid.lengths):
        kd[j] += 1 / length
        kd[j + 1] += 1 / length
        ko[j] = -1 / length
        md[j] += length / 4
        md[j + 1] += length / 4
        mo[j] = length / 4
    return (kd, ko), (md, mo)


def condense_dtn(grid: PadeGrid, lam: complex) -> DtNMap2:
    """Schur complement of the assembled mesh onto its two end nodes."""
    system = assemble_1d(grid, lam)
    if grid.n == 1:
        return DtNMap2(k_diag=system.diag[0], k_off=system.offdiag[0])
    condensed = schur_complement_boundary(system.to_dense(), np.array([0, grid.n]))
    return DtNMap2(
        k_diag=(condensed[0, 0] + condensed[1, 1]) / 2,
        k_off=(condensed[0, 1] + condensed[1, 0]) / 2,
    )


def solve_two_point(
    grid: PadeGrid,
    lam: complex,
    left_neumann: complex,
    right_dirichlet: complex,
):
    """Solve the assembled system with flux data on the left and the right
    node pinned. Returns (u0, interior values, uL); the interior values are
    diagnostic only (interior nodes sit at complex coordinates)."""
    system = assemble_1d(grid, lam)
    n = grid.n
    rhs = np.zeros(n, dtype=complex)
    rhs[0] = left_neumann
    if right_dirichlet != 0:
        rhs[-1] -= system.offdiag[-1] * right_dirichlet
    reduced = BlockTridiagonalMatrix.from_blocks(
        system.diag[:n].reshape(-1, 1, 1), system.offdiag[: n - 1].reshape(-1, 1, 1)
    )
    u = BlockTridiagSolver(reduced).solve(rhs)
    return u[0], u[1:], complex(right_dirichlet)


def relative_error(u_exact: complex, u_approx: complex) -> float:
    """|a - b| / (|a| + |b|); zero when both vanish. Lies in [0, 1]."""
    denom = abs(u_exact) + abs(u_approx)
    if denom == 0:
        return 0.0
    return abs(u_exact - u_approx) / denom


def halfspace_fixed_point_check(element: ElementDtN) -> float:
    """Residual of the one-element half-space augmentation identity."""
    k_hs = sqrt_decay(element.lam)
    return abs(k_hs - (element.k_diag - element.k_off**2 / (element.k_diag + k_hs)))


def generalized_spectrum(grid: PadeGrid) -> np.ndarray:
    """Generalized eigenvalues of the interior stiffness part with respect to
    the interior midpoint-mass part (Dirichlet conditions at both ends).

    For n = 1 there is no interior node and the spectrum is empty. The
    returned values are real and nonnegative up to round-off even though
    both matrices are complex symmetric.
    """
    (kd, ko), (md, mo) = assemble_stiffness_mass(grid)
    n = grid.n
    if n < 2:
        return np.array([], dtype=complex)
    k_int = np.diag(kd[1:n]) + np.diag(ko[1 : n - 1], 1) + np.diag(ko[1 : n - 1], -1)
    m_int = np.diag(md[1:n]) + np.diag(mo[1 : n - 1], 1) + np.diag(mo[1 : n - 1], -1)
    return generalized_eig_dense(k_int, m_int)


def propagator_magnitude_lemma_check(grid: PadeGrid, k: complex) -> bool:
    """|P| > 1 for Re(k) > 0 and |P| < 1 for Re(k) < 0."""
    if k.real == 0:
        raise ValueError("Re(k) must be nonzero")
    mag = abs(mesh_propagator(grid, k))
    return mag > 1 if k.real > 0 else mag < 1
