"""Sparse operators with band metadata and a deterministic operator norm."""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import ConvergenceError

DENSE_THRESHOLD = 64
POWER_TOL = 1e-10
POWER_MAXITER = 100_000


@dataclass(frozen=True)
class SparseOp:
    """A finite complex matrix plus the largest ``|l(row) - l(col)|`` over
    its nonzero entries (``band``)."""

    matrix: sp.csr_matrix
    band: int = 0

    @classmethod
    def from_entries(cls, shape, entries: dict, band: int = 0) -> SparseOp:
        if entries:
            rows, cols = zip(*entries)
            vals = list(entries.values())
        else:
            rows, cols, vals = (), (), ()
        m = sp.csr_matrix((np.asarray(vals, dtype=complex), (rows, cols)), shape=shape)
        return cls(m, band)

    @property
    def shape(self):
        return self.matrix.shape

    def entries(self) -> dict:
        coo = self.matrix.tocoo()
        return {(int(i), int(j)): complex(v) for i, j, v in zip(coo.row, coo.col, coo.data) if v != 0}

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def adjoint(self) -> SparseOp:
        return SparseOp(self.matrix.conj().T.tocsr(), self.band)

    def compress(self, rows, cols=None) -> SparseOp:
        """Sub-matrix on index sets (``cols`` defaults to ``rows``)."""
        cols = rows if cols is None else cols
        return SparseOp(self.matrix[np.asarray(rows)][:, np.asarray(cols)].tocsr(), self.band)

    def __add__(self, other: SparseOp) -> SparseOp:
        return SparseOp((self.matrix + other.matrix).tocsr(), max(self.band, other.band))

    def __sub__(self, other: SparseOp) -> SparseOp:
        return SparseOp((self.matrix - other.matrix).tocsr(), max(self.band, other.band))

    def __mul__(self, scalar) -> SparseOp:
        return SparseOp((self.matrix * scalar).tocsr(), self.band if scalar else 0)

    __rmul__ = __mul__

    def __matmul__(self, other: SparseOp) -> SparseOp:
        return SparseOp((self.matrix @ other.matrix).tocsr(), self.band + other.band)

    def norm(self, tol: float = POWER_TOL) -> float:
        return op_norm(self, tol)


def _seed_vector(n: int, shape) -> np.ndarray:
    seed = zlib.crc32(f"{shape[0]}x{shape[1]}".encode())
    rng = np.random.default_rng(seed)
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def op_norm(A, tol: float = POWER_TOL, maxiter: int = POWER_MAXITER,
            dense_threshold: int = DENSE_THRESHOLD) -> float:
    """Largest singular value.

    Small matrices (min dimension <= ``dense_threshold``) use a dense SVD.
    Larger ones run power iteration on ``A*A`` from a start vector seeded by
    the matrix shape, stopping when successive Rayleigh quotients agree to
    relative ``tol`` and the eigen-residual ``|A*Ax - qx|`` is below
    ``tol * q``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = A.matrix if isinstance(A, SparseOp) else A
    m, n = M.shape
    if m == 0 or n == 0:
        return 0.0
    if sp.issparse(M) and M.nnz == 0:
        return 0.0
    if min(m, n) <= dense_threshold:
        dense = M.toarray() if sp.issparse(M) else np.asarray(M)
        return float(np.linalg.norm(dense, 2)) if dense.any() else 0.0
    MH = M.conj().T
    x = _seed_vector(n, (m, n))
    x /= np.linalg.norm(x)
    prev = None
    for _ in range(maxiter):
        y = MH @ (M @ x)
        q = float(np.vdot(x, y).real)
        ny = np.linalg.norm(y)
        if ny == 0:
            return 0.0
        resid = np.linalg.norm(y - q * x)
        x = y / ny
        if (prev is not None and abs(q - prev) <= tol * abs(q)
                and resid <= tol * abs(q)):
            return float(np.sqrt(max(q, 0.0)))
        prev = q
    raise ConvergenceError(f"power iteration did not converge in {maxiter} steps", (prev, q))
