"""
Structured linear algebra for the ranking models.

Dense matrices are plain float64 ndarrays, sparse matrices are scipy CSR.
`SparsePlusRank1` carries diag(scale)·sparse + left·rightᵀ so the smoothed
document-term probability matrix never has to be densified for scoring.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import cast

import numpy as np
from numpy.typing import NDArray
from scipy import sparse
from sklearn.metrics.pairwise import cosine_similarity

from matlm.exceptions import DomainError

Array = NDArray[np.float64]
IndexArray = NDArray[np.int64]


def as_vector(values: object, name: str = "vector") -> Array:
    vector = np.asarray(values, dtype=np.float64)
    if vector.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional, got shape {vector.shape}.")
    return cast(Array, vector)


def as_frequency_matrix(matrix: object) -> sparse.csr_matrix:
    """
    Canonical CSR copy: duplicates summed, explicit zeros dropped, sorted indices.
    """
    csr = sparse.csr_matrix(matrix, dtype=np.float64, copy=True)
    csr.sum_duplicates()
    csr.eliminate_zeros()
    csr.sort_indices()
    if not np.isfinite(csr.data).all():
        raise DomainError("Frequency matrix contains non-finite values.")
    if (csr.data < 0).any():
        raise DomainError("Frequency matrix contains negative values.")
    return csr


def readonly(array: NDArray) -> NDArray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SparsePlusRank1:
    """
    diag(scale)·sparse + left·rightᵀ with `sparse` of shape (m, n).
    """

    scale: Array
    sparse: sparse.csr_matrix
    left: Array
    right: Array

    def __post_init__(self) -> None:
        rows, cols = self.sparse.shape
        if self.scale.shape != (rows,):
            raise DomainError(f"scale has length {self.scale.size}, expected {rows}.")
        if self.left.shape != (rows,):
            raise DomainError(f"left has length {self.left.size}, expected {rows}.")
        if self.right.shape != (cols,):
            raise DomainError(f"right has length {self.right.size}, expected {cols}.")

    @property
    def shape(self) -> tuple[int, int]:
        rows, cols = self.sparse.shape
        return int(rows), int(cols)

    @property
    def storage_bytes(self) -> int:
        """Bytes held by the structured representation (O(nnz + m + n))."""
        return int(
            self.sparse.data.nbytes
            + self.sparse.indices.nbytes
            + self.sparse.indptr.nbytes
            + self.scale.nbytes
            + self.left.nbytes
            + self.right.nbytes
        )

    def columns(self, cols: IndexArray) -> Array:
        """Dense m×len(cols) block of the represented matrix."""
        block = self.sparse[:, cols].toarray()
        block *= self.scale[:, None]
        block += np.outer(self.left, self.right[cols])
        return cast(Array, block)

    def to_dense(self) -> Array:
        return self.columns(np.arange(self.shape[1], dtype=np.int64))


def diag_inv_scale(v: object, matrix: sparse.spmatrix) -> sparse.csr_matrix:
    """
    Divide row i of `matrix` by v[i], keeping the sparsity pattern.
    """
    divisors = as_vector(v, "divisor vector")
    csr = sparse.csr_matrix(matrix, dtype=np.float64, copy=True)
    if divisors.size != csr.shape[0]:
        raise DomainError(
            f"Divisor vector has length {divisors.size}, matrix has {csr.shape[0]} rows."
        )
    bad = np.flatnonzero(~(divisors > 0))
    if bad.size:
        row = int(bad[0])
        raise DomainError(f"Row {row} divisor must be positive, got {divisors[row]!r}.")
    csr.data = csr.data / np.repeat(divisors, np.diff(csr.indptr))
    return csr


def spr1_matvec(structured: SparsePlusRank1, x: object) -> Array:
    vector = as_vector(x, "x")
    rows, cols = structured.shape
    if vector.size != cols:
        raise DomainError(f"Vector has length {vector.size}, matrix has {cols} columns.")
    result = structured.scale * (structured.sparse @ vector)
    result += structured.left * float(structured.right @ vector)
    return cast(Array, result)


def spr1_matmat(structured: SparsePlusRank1, x: object) -> Array:
    """
    Product with a dense n×q block; column j equals spr1_matvec with x[:, j].
    """
    block = np.asarray(x, dtype=np.float64)
    rows, cols = structured.shape
    if block.ndim != 2 or block.shape[0] != cols:
        raise DomainError(f"Block has shape {block.shape}, expected ({cols}, q).")
    result = np.asarray(structured.sparse @ block) * structured.scale[:, None]
    result += np.outer(structured.left, structured.right @ block)
    return cast(Array, result)


def col_normalize(matrix: object) -> Array:
    """
    Scale every column to unit sum: M·diag(1ᵀM)⁻¹.
    """
    dense = np.asarray(matrix, dtype=np.float64)
    if dense.ndim != 2:
        raise DomainError("col_normalize expects a 2D matrix.")
    sums = dense.sum(axis=0)
    bad = np.flatnonzero(~(sums > 0))
    if bad.size:
        column = int(bad[0])
        raise DomainError(f"Column {column} has zero total mass and cannot be normalized.")
    return cast(Array, dense / sums)


def cosine_columns(matrix: object, q: object) -> Array:
    """
    Cosine between each column of `matrix` and `q`; zero-norm columns score 0.
    """
    dense = np.asarray(matrix, dtype=np.float64)
    vector = as_vector(q, "q")
    if dense.ndim != 2 or dense.shape[0] != vector.size:
        raise DomainError(f"Matrix shape {dense.shape} does not match vector length {vector.size}.")
    if dense.shape[1] == 0:
        return cast(Array, np.zeros((0,), dtype=np.float64))
    similarity = cosine_similarity(dense.T, vector[None, :])[:, 0]
    return cast(Array, np.clip(similarity, -1.0, 1.0))


def dense_matmul(a: object, b: object) -> Array:
    left = np.asarray(a, dtype=np.float64)
    right = np.asarray(b, dtype=np.float64)
    if left.ndim != 2 or right.ndim != 2 or left.shape[1] != right.shape[0]:
        raise DomainError(f"Cannot multiply shapes {left.shape} and {right.shape}.")
    return cast(Array, left @ right)
