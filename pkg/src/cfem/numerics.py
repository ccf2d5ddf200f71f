"""Shared linear-algebra kernels: polynomial roots, block-tridiagonal LU,
Schur complements and dense generalized eigensolves.

Everything here operates on plain numpy arrays in complex double precision.
The solvers are deliberately simple (no pivoting across blocks, one step of
iterative refinement) because the assembled systems they serve are complex
symmetric and well conditioned at the benchmark parameters.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla


class NumericalError(RuntimeError):
    """A kernel failed to reach its accuracy contract."""


class SingularSystemError(NumericalError):
    """A pivot (block) was singular; carries the offending index."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


def poly_roots(coeffs, polish_steps: int = 4) -> np.ndarray:
    """Roots of sum_j coeffs[j] * x**j via a balanced companion matrix.

    Each eigenvalue is polished with Newton iterations on a Horner
    evaluation of the original (unnormalized) coefficients, which recovers
    full double precision even when the raw coefficients are huge.
    """
    c = list(coeffs)
    if len(c) < 2:
        raise ValueError("degree must be >= 1")
    if c[-1] == 0:
        raise ValueError("leading coefficient must be nonzero")
    # numpy expects descending powers; its companion matrix is balanced.
    roots = np.roots(np.asarray(c[::-1], dtype=float))
    dcoeffs = [j * cj for j, cj in enumerate(c)][1:]
    polished = []
    for r in roots:
        r = complex(r)
        for _ in range(polish_steps):
            p = _horner(c, r)
            dp = _horner(dcoeffs, r)
            if dp == 0:
                break
            step = p / dp
            r -= step
            if abs(step) <= 1e-17 * abs(r):
                break
        polished.append(r)
    polished = np.asarray(polished, dtype=complex)
    scale = np.array([sum(abs(cj) * abs(r) ** j for j, cj in enumerate(c)) for r in polished])
    resid = np.array([abs(_horner(c, complex(r))) for r in polished])
    if np.any(resid > 1e3 * np.finfo(float).eps * scale):
        raise NumericalError(
            f"root polishing did not converge; worst residual {resid.max():.3e}"
        )
    return polished


def _horner(coeffs, x: complex) -> complex:
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class BlockTridiagonalMatrix:
    """Complex symmetric block-tridiagonal matrix.

    diag has shape (nb, m, m); lower/upper have shape (nb-1, m, m) with
    upper[i] = lower[i].T so the assembled matrix equals its transpose.
    """

    diag: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    @property
    def nblocks(self) -> int:
        return self.diag.shape[0]

    @property
    def block_size(self) -> int:
        return self.diag.shape[1]

    @classmethod
    def from_blocks(cls, diag, lower, upper=None) -> "BlockTridiagonalMatrix":
        diag = np.asarray(diag, dtype=complex)
        lower = np.asarray(lower, dtype=complex)
        if upper is None:
            upper = np.transpose(lower, (0, 2, 1)).copy()
        else:
            upper = np.asarray(upper, dtype=complex)
        if diag.ndim != 3 or diag.shape[1] != diag.shape[2]:
            raise ValueError("diag must have shape (nb, m, m)")
        if lower.shape != (diag.shape[0] - 1, *diag.shape[1:]):
            raise ValueError("lower has inconsistent shape")
        return cls(diag, lower, upper)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        nb, m = self.nblocks, self.block_size
        xb = x.reshape(nb, m)
        out = np.einsum("bij,bj->bi", self.diag, xb)
        out[1:] += np.einsum("bij,bj->bi", self.lower, xb[:-1])
        out[:-1] += np.einsum("bij,bj->bi", self.upper, xb[1:])
        return out.reshape(-1)

    def to_dense(self) -> np.ndarray:
        nb, m = self.nblocks, self.block_size
        dense = np.zeros((nb * m, nb * m), dtype=complex)
        for i in range(nb):
            dense[i * m:(i + 1) * m, i * m:(i + 1) * m] = self.diag[i]
        for i in range(nb - 1):
            dense[(i + 1) * m:(i + 2) * m, i * m:(i + 1) * m] = self.lower[i]
            dense[i * m:(i + 1) * m, (i + 1) * m:(i + 2) * m] = self.upper[i]
        return dense

    def norm_estimate(self) -> float:
        return max(
            float(np.abs(self.diag).sum(axis=(1, 2)).max()),
            float(np.abs(self.lower).sum(axis=(1, 2)).max(initial=0.0))
            + float(np.abs(self.upper).sum(axis=(1, 2)).max(initial=0.0)),
        )


class BlockTridiagSolver:
    """Block Thomas factorization (no pivoting across blocks).

    Pivot blocks are LU factorized in place of a work array; solve applies
    one step of iterative refinement to guard mildly conditioned systems.
    """

    def __init__(self, matrix: BlockTridiagonalMatrix):
        self.matrix = matrix
        nb, m = matrix.nblocks, matrix.block_size
        self._pivots = np.empty((nb, m, m), dtype=complex)
        self._piv_idx = np.empty((nb, m), dtype=np.int32)
        self._gains = np.empty((max(nb - 1, 0), m, m), dtype=complex)
        pivot = matrix.diag[0].copy()
        for i in range(nb):
            try:
                with warnings.catch_warnings():
                    # scipy warns about exact zero pivots; we raise instead
                    warnings.simplefilter("ignore")
                    lu, piv = sla.lu_factor(pivot, check_finite=False)
            except Exception as exc:  # pragma: no cover - scipy raises rarely
                raise SingularSystemError(f"block {i} factorization failed", i) from exc
            if not np.all(np.isfinite(lu)) or np.any(np.abs(np.diagonal(lu)) == 0):
                raise SingularSystemError(f"singular pivot block {i}", i)
            self._pivots[i] = lu
            self._piv_idx[i] = piv
            if i < nb - 1:
                # gain = lower_i @ inv(C_i)
                self._gains[i] = sla.lu_solve(
                    (lu, piv), matrix.lower[i].T, trans=1, check_finite=False
                ).T
                pivot = matrix.diag[i + 1] - self._gains[i] @ matrix.upper[i]

    def _solve_once(self, b: np.ndarray) -> np.ndarray:
        nb, m = self.matrix.nblocks, self.matrix.block_size
        y = b.reshape(nb, m).astype(complex).copy()
        for i in range(1, nb):
            y[i] -= self._gains[i - 1] @ y[i - 1]
        x = np.empty_like(y)
        x[-1] = sla.lu_solve((self._pivots[-1], self._piv_idx[-1]), y[-1], check_finite=False)
        for i in range(nb - 2, -1, -1):
            x[i] = sla.lu_solve(
                (self._pivots[i], self._piv_idx[i]),
                y[i] - self.matrix.upper[i] @ x[i + 1],
                check_finite=False,
            )
        return x.reshape(-1)

    def solve(self, b: np.ndarray, refine: bool = True) -> np.ndarray:
        b = np.asarray(b, dtype=complex).reshape(-1)
        x = self._solve_once(b)
        if refine:
            x = x + self._solve_once(b - self.matrix.matvec(x))
        return x


def block_tridiag_solve(matrix: BlockTridiagonalMatrix, b: np.ndarray) -> np.ndarray:
    """Solve matrix @ x = b with one refinement step."""
    return BlockTridiagSolver(matrix).solve(b)


def schur_complement_boundary(matrix, boundary: np.ndarray) -> np.ndarray:
    """Condense a symmetric system onto the given boundary indices.

    matrix may be dense or a BlockTridiagonalMatrix (densified; callers stay
    at desk scale). Returns K_bb - K_bi @ inv(K_ii) @ K_ib.
    """
    if isinstance(matrix, BlockTridiagonalMatrix):
        matrix = matrix.to_dense()
    matrix = np.asarray(matrix, dtype=complex)
    ndof = matrix.shape[0]
    boundary = np.asarray(boundary, dtype=int)
    interior = np.setdiff1d(np.arange(ndof), boundary)
    if interior.size == 0:
        return matrix[np.ix_(boundary, boundary)].copy()
    k_bb = matrix[np.ix_(boundary, boundary)]
    k_bi = matrix[np.ix_(boundary, interior)]
    k_ib = matrix[np.ix_(interior, boundary)]
    k_ii = matrix[np.ix_(interior, interior)]
    try:
        with warnings.catch_warnings():
            # scipy warns about exact zero pivots; we raise instead
            warnings.simplefilter("ignore")
            lu, piv = sla.lu_factor(k_ii, check_finite=False)
    except Exception as exc:
        raise SingularSystemError("singular interior block") from exc
    if np.any(np.abs(np.diagonal(lu)) == 0) or not np.all(np.isfinite(lu)):
        raise SingularSystemError("singular interior block")
    return k_bb - k_bi @ sla.lu_solve((lu, piv), k_ib, check_finite=False)


def generalized_eig_dense(a: np.ndarray, b: np.ndarray, vectors: bool = False):
    """Eigenvalues (optionally vectors) of a @ v = lam * b @ v via dense QZ."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2:
        raise ValueError("a and b must be square and of equal shape")
    if a.size:
        # slogdet instead of det: determinants of large mass matrices
        # underflow double precision even when well conditioned
        sign, _ = np.linalg.slogdet(b)
        if sign == 0:
            raise SingularSystemError("b is singular")
    if vectors:
        vals, vecs = sla.eig(a, b)
        return vals, vecs
    return sla.eig(a, b, right=False)
