"""In-plane elastodynamic layers with complex-length elements.

The vertical semi-discretization of the in-plane equations produces four
matrix operators (a, b1, b2, d) acting on the interleaved (ux, uz) nodal
vector; b2 = -b1.T is fixed by requiring the discrete traction expression
-(a d/dx + b1) to be consistent with the weak form, which the fixed-point
residual test verifies loudly. The horizontal midpoint element and the
block assembly are shared with the scalar layer module.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .layered_2d import Assembled2D, _assemble_columns, horizontal_element_blocks
from .numerics import BlockTridiagSolver, generalized_eig_dense
from .pade_grid import PadeGrid


@dataclass(frozen=True)
class ElasticMaterial:
    """Isotropic (visco)elastic material via complex Lame constants."""

    lame_lambda: complex
    mu: complex
    rho: float

    @property
    def d11(self) -> complex:
        return self.lame_lambda + 2 * self.mu

    d22 = d11

    @property
    def d33(self) -> complex:
        return self.mu

    @property
    def d12(self) -> complex:
        return self.lame_lambda


def material_from_engineering(shear: complex, nu: float, rho: float) -> ElasticMaterial:
    """Shear modulus and Poisson ratio to Lame constants."""
    if not -1.0 < nu < 0.5:
        raise ValueError("Poisson ratio must lie in (-1, 0.5)")
    return ElasticMaterial(
        lame_lambda=2 * shear * nu / (1 - 2 * nu), mu=complex(shear), rho=rho
    )


@dataclass(frozen=True)
class InPlaneCoefficients:
    """2x2 coefficient matrices of the expanded in-plane operator."""

    dxx: np.ndarray
    dxz: np.ndarray
    dzz: np.ndarray
    rho: float

    @classmethod
    def isotropic(cls, material: ElasticMaterial) -> "InPlaneCoefficients":
        d11, d12, d33 = material.d11, material.d12, material.d33
        return cls(
            dxx=np.array([[d11, 0], [0, d33]], dtype=complex),
            dxz=np.array([[0, d12], [d33, 0]], dtype=complex),
            dzz=np.array([[d33, 0], [0, d11]], dtype=complex),
            rho=material.rho,
        )

    @classmethod
    def scalar_analog(cls, shear: complex, rho: float) -> "InPlaneCoefficients":
        """Decoupled coefficients whose components each reproduce the scalar
        layer operator; used as the reduction oracle in tests."""
        eye = np.eye(2, dtype=complex)
        return cls(dxx=shear * eye, dxz=np.zeros((2, 2), dtype=complex),
                   dzz=shear * eye, rho=rho)


@dataclass(frozen=True)
class ElasticVerticalOperators:
    """Semi-discretized vertical operators (bottom node clamped).

    a: dxx mass-like; b1: dxz coupling; d: -dzz stiffness + rho*omega^2 mass.
    All of size N x N with N = 2 * free vertical nodes, dofs interleaved
    (ux_1, uz_1, ux_2, uz_2, ...).
    """

    a: np.ndarray
    b1: np.ndarray
    d: np.ndarray
    omega: float

    @property
    def ndof(self) -> int:
        return self.a.shape[0]

    @property
    def b2(self) -> np.ndarray:
        return -self.b1.T


@dataclass(frozen=True)
class ElasticProfile:
    """Vertical profile of in-plane coefficient pieces tiling (0, H)."""

    height: float
    pieces: tuple[tuple[float, float, InPlaneCoefficients], ...]
    nz: int

    @classmethod
    def uniform(cls, height: float, coeffs: InPlaneCoefficients, nz: int) -> "ElasticProfile":
        return cls(height=height, pieces=((0.0, height, coeffs),), nz=nz)

    def coefficients_at(self, z: float) -> InPlaneCoefficients:
        for z0, z1, coeffs in self.pieces:
            if z0 - 1e-12 <= z <= z1 + 1e-12:
                return coeffs
        raise ValueError(f"z={z} outside profile")


def semidiscretize_z_elastic(profile: ElasticProfile, omega: float) -> ElasticVerticalOperators:
    """Galerkin vertical matrices with linear elements; bottom Dirichlet on
    both components, top traction-free."""
    nz = profile.nz
    edges = np.linspace(0.0, profile.height, nz + 1)
    ndof_full = 2 * (nz + 1)
    a = np.zeros((ndof_full, ndof_full), dtype=complex)
    b1 = np.zeros((ndof_full, ndof_full), dtype=complex)
    rzz = np.zeros((ndof_full, ndof_full), dtype=complex)
    mass_rho = np.zeros((ndof_full, ndof_full), dtype=float)
    for e in range(nz):
        h = edges[e + 1] - edges[e]
        coeffs = profile.coefficients_at(0.5 * (edges[e] + edges[e + 1]))
        mass = np.array([[2.0, 1.0], [1.0, 2.0]]) * h / 6.0
        grad = np.array([[1.0, -1.0], [-1.0, 1.0]]) / h
        conv = np.array([[-0.5, 0.5], [-0.5, 0.5]])  # int phi_i phi_j' dz
        sl = slice(2 * e, 2 * e + 4)
        a[sl, sl] += np.kron(mass, coeffs.dxx)
        b1[sl, sl] += np.kron(conv, coeffs.dxz)
        rzz[sl, sl] += np.kron(grad, coeffs.dzz)
        mass_rho[sl, sl] += coeffs.rho * np.kron(mass, np.eye(2))
    keep = slice(2, None)  # clamp both components of the bottom node
    d = -rzz[keep, keep] + omega**2 * mass_rho[keep, keep]
    return ElasticVerticalOperators(
        a=a[keep, keep], b1=b1[keep, keep], d=d, omega=omega
    )


@dataclass(frozen=True)
class PlaneWaveMode:
    """Horizontal wavenumber and vertical mode shape of one guided mode."""

    kx: complex
    phi: np.ndarray

    def dispersion_residual(self, ops: ElasticVerticalOperators) -> float:
        pencil = (
            -self.kx**2 * ops.a
            + 1j * self.kx * (ops.b1 + ops.b2)
            + ops.d
        )
        return float(np.linalg.norm(pencil @ self.phi))


def dispersion_modes(ops: ElasticVerticalOperators) -> list[PlaneWaveMode]:
    """All finite modes of the quadratic pencil in kx via a 2N linearization.

    The pencil -kx^2 a + i kx (b1 + b2) + d is linearized as
    [[d, i(b1+b2)], [0, I]] v = kx [[0, a], [I, 0]] v with v = (phi, kx*phi).
    """
    n = ops.ndof
    b = ops.b1 + ops.b2
    lhs = np.zeros((2 * n, 2 * n), dtype=complex)
    rhs = np.zeros((2 * n, 2 * n), dtype=complex)
    lhs[:n, :n] = ops.d
    lhs[:n, n:] = 1j * b
    lhs[n:, n:] = np.eye(n)
    rhs[:n, n:] = ops.a
    rhs[n:, :n] = np.eye(n)
    vals, vecs = generalized_eig_dense(lhs, rhs, vectors=True)
    modes = []
    dnorm = np.linalg.norm(ops.d)
    for val, vec in zip(vals, vecs.T):
        if not np.isfinite(val):
            continue
        phi = vec[:n]
        norm = np.linalg.norm(phi)
        if norm == 0:
            continue
        mode = PlaneWaveMode(kx=complex(val), phi=phi / norm)
        if mode.dispersion_residual(ops) <= 1e-9 * max(dnorm, 1.0):
            modes.append(mode)
    return modes


def element_stiffness_elastic(length: complex, ops: ElasticVerticalOperators) -> np.ndarray:
    """Midpoint-integrated 2N x 2N layer stiffness for one element."""
    if length == 0:
        raise ValueError("element length must be nonzero")
    k00, k01, k10, k11 = horizontal_element_blocks(
        length, ops.a, ops.b1, ops.d, rule="midpoint"
    )
    return np.block([[k00, k01], [k10, k11]])


def halfspace_stiffness(mode: PlaneWaveMode, ops: ElasticVerticalOperators) -> np.ndarray:
    """Exact right half-space impedance -(i kx a + b1) for the given mode."""
    return -(1j * mode.kx * ops.a + ops.b1)


def displacement_propagator(length: complex, kx: complex) -> complex:
    """(1 + i kx L/2) / (1 - i kx L/2); same form as the scalar element."""
    denom = 1 - 1j * kx * length / 2
    if denom == 0:
        raise ZeroDivisionError("propagation factor pole at i*kx*L = 2")
    return (1 + 1j * kx * length / 2) / denom


def fixed_point_residual(
    length: complex, ops: ElasticVerticalOperators, mode: PlaneWaveMode
) -> float:
    """Residual of the half-space augmentation identity for one element.

    Applies the assembled (element + half-space) operator to the exact pair
    (phi, P*phi); vanishes for any complex element length when the traction
    convention is consistent.
    """
    n = ops.ndof
    k = element_stiffness_elastic(length, ops)
    k_hs = halfspace_stiffness(mode, ops)
    p = displacement_propagator(length, mode.kx)
    u = np.concatenate([mode.phi, p * mode.phi])
    full = k.copy()
    full[:n, :n] -= k_hs
    full[n:, n:] += k_hs
    return float(np.linalg.norm(full @ u))


def traction_pair(
    length: complex, ops: ElasticVerticalOperators, mode: PlaneWaveMode
):
    """(F0, FL) from the element stiffness acting on (phi, P*phi)."""
    n = ops.ndof
    k = element_stiffness_elastic(length, ops)
    p = displacement_propagator(length, mode.kx)
    u = np.concatenate([mode.phi, p * mode.phi])
    f = k @ u
    return f[:n], -f[n:]


def elastic_xoperators(ops: ElasticVerticalOperators):
    return ops.a, ops.b1, ops.d


def assemble_elastic(
    profiles: list[ElasticProfile],
    grids: list[PadeGrid],
    omega: float,
) -> Assembled2D:
    """Multi-subdomain elastic assembly; profiles[i] pairs with grids[i]."""
    operators = [
        elastic_xoperators(semidiscretize_z_elastic(profile, omega))
        for profile in profiles
    ]
    lengths = [list(grid.lengths) for grid in grids]
    return _assemble_columns(lengths, operators, rule="midpoint")


def assemble_elastic_regular(
    profiles, subdomain_lengths, omega: float, nx_per_subdomain: int
) -> Assembled2D:
    operators = [
        elastic_xoperators(semidiscretize_z_elastic(profile, omega))
        for profile in profiles
    ]
    lengths = [
        [sub_len / nx_per_subdomain] * nx_per_subdomain
        for sub_len in subdomain_lengths
    ]
    return _assemble_columns(lengths, operators, rule="consistent")


def traction_load_left(profile: ElasticProfile, fx, fy=None) -> np.ndarray:
    """Consistent load for tractions (fx(z), fy(z)) applied on the x = 0 face."""
    nz = profile.nz
    edges = np.linspace(0.0, profile.height, nz + 1)
    load = np.zeros(2 * (nz + 1), dtype=complex)
    gp = np.array([-1.0, 1.0]) / np.sqrt(3.0)
    for e in range(nz):
        z0, z1 = edges[e], edges[e + 1]
        h = z1 - z0
        for xi in gp:
            z = 0.5 * (z0 + z1) + 0.5 * h * xi
            shapes = np.array([(z1 - z) / h, (z - z0) / h])
            w = 0.5 * h
            fxv = fx(z)
            fyv = fy(z) if fy is not None else 0.0
            load[2 * e] += w * shapes[0] * fxv
            load[2 * e + 1] += w * shapes[0] * fyv
            load[2 * e + 2] += w * shapes[1] * fxv
            load[2 * e + 3] += w * shapes[1] * fyv
    return load[2:]


def solve_elastic(system: Assembled2D, load: np.ndarray) -> np.ndarray:
    """Block-tridiagonal solve with the load applied on the x = 0 column."""
    m = system.matrix.block_size
    rhs = np.zeros(system.ncolumns * m, dtype=complex)
    rhs[:m] = np.asarray(load, dtype=complex).reshape(-1)
    x = BlockTridiagSolver(system.matrix).solve(rhs)
    return x.reshape(system.ncolumns, m)
