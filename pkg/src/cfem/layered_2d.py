"""Vertical semi-discretization and tensor-product assembly for the scalar
layer problem (Laplace/Helmholtz on a stratified strip).

The strip (0, Lx) x (0, H) is discretized with conventional linear elements
in z and complex-length midpoint elements in x. The z direction carries a
homogeneous Dirichlet condition at the bottom and a natural condition at the
top; the x direction couples node columns through block-tridiagonal systems
with dense vertical blocks. Only columns at real x coordinates (subdomain
interfaces) carry physically meaningful values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import (
    BlockTridiagonalMatrix,
    BlockTridiagSolver,
    generalized_eig_dense,
)
from .pade_grid import PadeGrid


@dataclass(frozen=True)
class LayerProfile:
    """Vertical material profile: (z0, z1, G, rho) pieces tiling (0, H)."""

    height: float
    pieces: tuple[tuple[float, float, complex, float], ...]
    nz: int

    def __post_init__(self):
        if self.nz < 1:
            raise ValueError("nz must be >= 1")
        z = 0.0
        for z0, z1, _, rho in self.pieces:
            if abs(z0 - z) > 1e-12 * self.height or z1 <= z0:
                raise ValueError("pieces must tile (0, H) without gaps or overlap")
            if rho < 0:
                raise ValueError("density must be nonnegative")
            z = z1
        if abs(z - self.height) > 1e-12 * self.height:
            raise ValueError("pieces must end at z = H")

    @classmethod
    def uniform(cls, height: float, shear: complex, density: float, nz: int) -> "LayerProfile":
        return cls(height=height, pieces=((0.0, height, complex(shear), density),), nz=nz)

    def material_at(self, z: float) -> tuple[complex, float]:
        for z0, z1, shear, rho in self.pieces:
            if z0 - 1e-12 <= z <= z1 + 1e-12:
                return shear, rho
        raise ValueError(f"z={z} outside profile")

    def element_edges(self) -> np.ndarray:
        """Uniform element edges; piece boundaries must land on them."""
        edges = np.linspace(0.0, self.height, self.nz + 1)
        for z0, z1, _, _ in self.pieces:
            for boundary in (z0, z1):
                if np.min(np.abs(edges - boundary)) > 1e-9 * self.height:
                    raise ValueError(
                        f"piece boundary z={boundary} does not align with the nz={self.nz} mesh"
                    )
        return edges


@dataclass(frozen=True)
class VerticalOperators:
    """Semi-discretized vertical matrices, bottom Dirichlet dof removed.

    rz: modulus-weighted gradient stiffness; gz: modulus-weighted mass-like
    matrix multiplying d2/dx2; mz: density mass matrix.
    """

    rz: np.ndarray
    gz: np.ndarray
    mz: np.ndarray

    @property
    def ndof(self) -> int:
        return self.rz.shape[0]


@dataclass(frozen=True)
class SubdomainSpec:
    """One x interval: length, modulus multiplier, and its complex grid."""

    x_length: float
    modulus_scale: complex
    grid: PadeGrid

    def __post_init__(self):
        if abs(self.x_length - self.grid.total_length) > 1e-12 * abs(self.x_length):
            raise ValueError("x_length must equal grid.total_length")


@dataclass(frozen=True)
class Assembled2D:
    """Block-tridiagonal tensor-product system plus node-column metadata."""

    matrix: BlockTridiagonalMatrix
    node_x: np.ndarray
    interface_columns: tuple[int, ...]

    @property
    def ncolumns(self) -> int:
        return self.matrix.nblocks


def semidiscretize_z(profile: LayerProfile) -> VerticalOperators:
    """Linear-element vertical matrices with exact (consistent) integration."""
    edges = profile.element_edges()
    ndof_full = profile.nz + 1
    rz = np.zeros((ndof_full, ndof_full), dtype=complex)
    gz = np.zeros((ndof_full, ndof_full), dtype=complex)
    mz = np.zeros((ndof_full, ndof_full), dtype=float)
    for e in range(profile.nz):
        h = edges[e + 1] - edges[e]
        zmid = 0.5 * (edges[e] + edges[e + 1])
        shear, rho = profile.material_at(zmid)
        sl = slice(e, e + 2)
        grad = np.array([[1.0, -1.0], [-1.0, 1.0]]) / h
        mass = np.array([[2.0, 1.0], [1.0, 2.0]]) * h / 6.0
        rz[sl, sl] += shear * grad
        gz[sl, sl] += shear * mass
        mz[sl, sl] += rho * mass
    # homogeneous Dirichlet at z = 0: drop the first row/column
    return VerticalOperators(rz=rz[1:, 1:], gz=gz[1:, 1:], mz=mz[1:, 1:])


def modal_lambdas(ops: VerticalOperators, omega: float) -> np.ndarray:
    """Generalized eigenvalues of (rz - omega^2 mz) with respect to gz.

    Diagnostic decomposition of the semi-discrete operator into decoupled
    two-point problems -u'' + lam*u = 0; never used in the actual solves.
    """
    return generalized_eig_dense(ops.rz - omega**2 * ops.mz, ops.gz)


def horizontal_element_blocks(
    length: complex,
    a: np.ndarray,
    b1: np.ndarray | None,
    d: np.ndarray,
    rule: str = "midpoint",
):
    """2x2 block stiffness of one horizontal element for the semi-discrete
    equation (a u')' + (b1 u)' + b2 u' + d u = 0 with b2 = -b1.T.

    rule "midpoint" gives the complex-length element; "consistent" gives the
    standard linear element (exact x integration) used by the regular-FEM
    baseline. Returns (k00, k01, k10, k11).
    """
    m = a.shape[0]
    if b1 is None:
        b_sym = b_skew = np.zeros((m, m), dtype=complex)
    else:
        b_sym = (b1 + b1.T) / 2
        b_skew = (b1 - b1.T) / 2
    al = a / length
    if rule == "midpoint":
        dm_diag = dm_off = length * d / 4
    elif rule == "consistent":
        dm_diag = length * d / 3
        dm_off = length * d / 6
    else:
        raise ValueError(f"unknown integration rule {rule!r}")
    k00 = al - b_sym - dm_diag
    k01 = -al - b_skew - dm_off
    k10 = -al + b_skew - dm_off
    k11 = al + b_sym - dm_diag
    return k00, k01, k10, k11


def _assemble_columns(
    element_lengths_per_sub,
    operators_per_sub,
    rule: str,
):
    """Shared block-tridiagonal assembly over a chain of subdomains.

    element_lengths_per_sub: list of length lists (one per subdomain);
    operators_per_sub: matching list of (a, b1, d) triples. Subdomains share
    their interface node column.
    """
    ncols = sum(len(ls) for ls in element_lengths_per_sub) + 1
    m = operators_per_sub[0][0].shape[0]
    diag = np.zeros((ncols, m, m), dtype=complex)
    lower = np.zeros((ncols - 1, m, m), dtype=complex)
    node_x = np.zeros(ncols, dtype=complex)
    interfaces = [0]
    col = 0
    for lengths, (a, b1, d) in zip(element_lengths_per_sub, operators_per_sub):
        for length in lengths:
            k00, k01, k10, k11 = horizontal_element_blocks(length, a, b1, d, rule)
            diag[col] += k00
            diag[col + 1] += k11
            lower[col] += k10
            # upper blocks equal k01 = k10.T by construction (set below)
            node_x[col + 1] = node_x[col] + length
            col += 1
        interfaces.append(col)
    upper = np.transpose(lower, (0, 2, 1)).copy()
    matrix = BlockTridiagonalMatrix.from_blocks(diag, lower, upper)
    return Assembled2D(matrix=matrix, node_x=node_x, interface_columns=tuple(interfaces))


def condensed_interface_solution(
    element_lengths_per_sub,
    operators_per_sub,
    rule: str,
    load: np.ndarray,
):
    """Interface-column solution by a right-to-left Schur-complement sweep.

    Equivalent to assembling the full block-tridiagonal system and solving,
    but holds only O(m^2) state plus one m x m propagation matrix per
    subdomain, so reference meshes with thousands of columns fit in memory.
    The load acts on the x = 0 column; the right end is natural. Returns the
    list of interface-column values (x = 0, each split, the right end).
    """
    import scipy.linalg as sla

    m = operators_per_sub[0][0].shape[0]
    schur = np.zeros((m, m), dtype=complex)
    segment_props: list[np.ndarray] = []
    for lengths, (a, b1, d) in zip(
        reversed(element_lengths_per_sub), reversed(operators_per_sub)
    ):
        prop = np.eye(m, dtype=complex)
        for length in reversed(lengths):
            k00, k01, k10, k11 = horizontal_element_blocks(length, a, b1, d, rule)
            lu, piv = sla.lu_factor(k11 + schur, check_finite=False)
            trans = -sla.lu_solve((lu, piv), k10, check_finite=False)
            schur = k00 + k01 @ trans
            prop = prop @ trans
        segment_props.append(prop)
    segment_props.reverse()
    u = np.linalg.solve(schur, np.asarray(load, dtype=complex).reshape(-1))
    values = [u]
    for prop in segment_props:
        u = prop @ u
        values.append(u)
    return values


def scalar_xoperators(ops: VerticalOperators, scale: complex, omega: float):
    """(a, b1, d) triple of the scalar layer for one subdomain."""
    a = scale * ops.gz
    d = -(scale * ops.rz - omega**2 * ops.mz)
    return a, None, d


def assemble_2d(
    profile: LayerProfile,
    subdomains: list[SubdomainSpec] | tuple[SubdomainSpec, ...],
    omega: float,
) -> Assembled2D:
    """Tensor-product CFEM assembly across the subdomain chain."""
    ops = semidiscretize_z(profile)
    lengths = [list(sub.grid.lengths) for sub in subdomains]
    operators = [scalar_xoperators(ops, sub.modulus_scale, omega) for sub in subdomains]
    return _assemble_columns(lengths, operators, rule="midpoint")


def assemble_2d_regular(
    profile: LayerProfile,
    subdomains,
    omega: float,
    nx_per_subdomain: int,
) -> Assembled2D:
    """Regular-FEM assembly: uniform real x mesh, consistent integration."""
    ops = semidiscretize_z(profile)
    lengths = [
        [sub.x_length / nx_per_subdomain] * nx_per_subdomain for sub in subdomains
    ]
    operators = [scalar_xoperators(ops, sub.modulus_scale, omega) for sub in subdomains]
    return _assemble_columns(lengths, operators, rule="consistent")


def boundary_bump(y: np.ndarray | float) -> np.ndarray | float:
    """Smooth excitation exp(16 + 4/(y(y-1))): equals 1 at y = 0.5 and
    vanishes with all derivatives at y = 0 and y = 1."""
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    inside = (y > 0.0) & (y < 1.0)
    yi = y[inside]
    out[inside] = np.exp(16.0 + 4.0 / (yi * (yi - 1.0)))
    return out if out.ndim else float(out)


def neumann_load_left(profile: LayerProfile, f) -> np.ndarray:
    """Consistent load vector int N^T f dz on the x = 0 column.

    Two-point Gauss quadrature per vertical element (exact for the linear
    shape functions against a smooth f).
    """
    edges = profile.element_edges()
    load = np.zeros(profile.nz + 1, dtype=complex)
    gp = np.array([-1.0, 1.0]) / np.sqrt(3.0)
    for e in range(profile.nz):
        z0, z1 = edges[e], edges[e + 1]
        h = z1 - z0
        for xi in gp:
            z = 0.5 * (z0 + z1) + 0.5 * h * xi
            shapes = np.array([(z1 - z) / h, (z - z0) / h])
            load[e : e + 2] += 0.5 * h * shapes * f(z)
    return load[1:]  # bottom Dirichlet dof removed


def solve_2d(system: Assembled2D, load: np.ndarray) -> np.ndarray:
    """Block-tridiagonal solve; load applies to the x = 0 column.

    Returns the full nodal field with shape (ncolumns, vertical dofs); only
    interface columns are physically meaningful.
    """
    m = system.matrix.block_size
    rhs = np.zeros(system.ncolumns * m, dtype=complex)
    load = np.asarray(load, dtype=complex).reshape(-1)
    if load.shape[0] != m:
        raise ValueError("load must match the vertical dof count")
    rhs[:m] = load
    x = BlockTridiagSolver(system.matrix).solve(rhs)
    return x.reshape(system.ncolumns, m)


def interface_values(system: Assembled2D, field: np.ndarray, x_positions) -> np.ndarray:
    """Concatenated field values at the interface columns nearest the given
    real x positions."""
    cols = []
    for x in x_positions:
        candidates = [c for c in system.interface_columns]
        best = min(candidates, key=lambda c: abs(system.node_x[c].real - x))
        if abs(system.node_x[best] - x) > 1e-9 * max(1.0, abs(x)):
            raise ValueError(f"no interface column at x={x}")
        cols.append(best)
    return np.concatenate([field[c] for c in cols])


def interface_error(u: np.ndarray, u_ref: np.ndarray) -> float:
    """Euclidean relative norm ||u - u_ref|| / ||u_ref||."""
    u = np.asarray(u).reshape(-1)
    u_ref = np.asarray(u_ref).reshape(-1)
    if u.shape != u_ref.shape:
        raise ValueError("shape mismatch")
    ref_norm = np.linalg.norm(u_ref)
    if ref_norm == 0:
        raise ValueError("zero reference")
    return float(np.linalg.norm(u - u_ref) / ref_norm)


def regular_fem_baseline(
    profile: LayerProfile,
    subdomains,
    omega: float,
    nx: int,
    load: np.ndarray,
    monitor_x,
) -> np.ndarray:
    """Interface solution of the regular-FEM discretization (nx uniform real
    elements per subdomain)."""
    system = assemble_2d_regular(profile, subdomains, omega, nx)
    field = solve_2d(system, load)
    return interface_values(system, field, monitor_x)
