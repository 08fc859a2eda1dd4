"""Dense matrices over GF(2) and GF(2^r), the polar kernel and permutations.

Binary matrices are ``uint8`` numpy arrays, non-binary matrices are ``int64``
arrays of field elements paired with a :class:`~nbscl.galois.FieldSpec`.
Permutations are index arrays and never materialised as N x N matrices.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, NotBijective, RankDeficient, Singular
from .galois import FieldSpec, make_field

KERNEL = np.array([[1, 0], [1, 1]], dtype=np.uint8)


def kronecker_power(n: int) -> np.ndarray:
    """``F^{(x)n}`` for the kernel ``F = [[1, 0], [1, 1]]``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    G = np.ones((1, 1), dtype=np.uint8)
    for _ in range(n):
        G = np.kron(KERNEL, G).astype(np.uint8)
    return G


def gf2_matmul(A, B) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    return ((A @ B) & 1).astype(np.uint8)


def gf2_inverse(M) -> np.ndarray:
    """Inverse of a square binary matrix by Gauss-Jordan elimination."""
    M = np.asarray(M, dtype=np.uint8) & 1
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise Singular(f"matrix of shape {M.shape} is not square")
    n = M.shape[0]
    aug = np.concatenate([M, np.eye(n, dtype=np.uint8)], axis=1)
    for col in range(n):
        rows = np.nonzero(aug[col:, col])[0]
        if len(rows) == 0:
            raise Singular(f"no pivot in column {col}")
        piv = col + rows[0]
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        mask = aug[:, col].astype(bool)
        mask[col] = False
        aug[mask] ^= aug[col]
    return aug[:, n:].copy()


def polar_transform(x, axis: int = -1) -> np.ndarray:
    """Multiply symbol vectors by ``F^{(x)n}`` using the butterfly.

    Works on any integer dtype: the only operation is XOR, so binary vectors
    and GF(2^r) symbol vectors (integer packed) are handled alike.  The
    transform is an involution, so it also applies ``G_p^{-1}``.
    """
    x = np.array(x, copy=True)
    x = np.moveaxis(x, axis, -1)
    N = x.shape[-1]
    if N & (N - 1):
        raise LengthMismatch(f"length {N} is not a power of two")
    half = 1
    while half < N:
        v = x.reshape(x.shape[:-1] + (N // (2 * half), 2, half))
        v[..., 0, :] ^= v[..., 1, :]
        half *= 2
    return np.moveaxis(x, -1, axis)


def nb_rref(field: FieldSpec, M):
    """Reduced row-echelon form over ``field``.

    Returns ``(R, M_rref, pivots)`` with ``M_rref = R @ M``.  The pivot for
    each column is the first not-yet-used row holding a nonzero entry there.
    """
    M = np.asarray(M, dtype=np.int64)
    K, N = M.shape
    aug = np.concatenate([M, np.eye(K, dtype=np.int64)], axis=1)
    pivots = []
    row = 0
    for col in range(N):
        if row == K:
            break
        nz = np.nonzero(aug[row:, col])[0]
        if len(nz) == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            aug[[row, piv]] = aug[[piv, row]]
        aug[row] = field.mul_vec(field.inv(int(aug[row, col])), aug[row])
        factors = aug[:, col].copy()
        factors[row] = 0
        hit = np.nonzero(factors)[0]
        if len(hit):
            aug[hit] ^= field.mul_vec(factors[hit, None], aug[row][None, :])
        pivots.append(col)
        row += 1
    if row < K:
        raise RankDeficient(f"rank {row} < {K} rows")
    return aug[:, N:].copy(), aug[:, :N].copy(), pivots


def nb_inverse(field: FieldSpec, M) -> np.ndarray:
    M = np.asarray(M, dtype=np.int64)
    if M.shape[0] != M.shape[1]:
        raise Singular(f"matrix of shape {M.shape} is not square")
    try:
        R, _, _ = nb_rref(field, M)
    except RankDeficient as exc:
        raise Singular(str(exc)) from None
    return R


def nb_rank(field: FieldSpec, M) -> int:
    M = np.asarray(M, dtype=np.int64)
    aug = M.copy()
    rank = 0
    for col in range(M.shape[1]):
        nz = np.nonzero(aug[rank:, col])[0]
        if len(nz) == 0:
            continue
        piv = rank + nz[0]
        aug[[rank, piv]] = aug[[piv, rank]]
        aug[rank] = field.mul_vec(field.inv(int(aug[rank, col])), aug[rank])
        factors = aug[:, col].copy()
        factors[rank] = 0
        aug ^= field.mul_vec(factors[:, None], aug[rank][None, :])
        rank += 1
        if rank == M.shape[0]:
            break
    return rank


@dataclass(frozen=True, eq=False)
class Permutation:
    """``perm[b] = a`` iff ``P[a, b] = 1``.

    With ``c = x P`` this means ``c[b] = x[perm[b]]``.
    """

    perm: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(len(perm))):
            raise NotBijective("index map is not a bijection")
        perm.setflags(write=False)
        object.__setattr__(self, "perm", perm)

    def __len__(self):
        return len(self.perm)

    def __eq__(self, other):
        return isinstance(other, Permutation) and np.array_equal(self.perm, other.perm)

    @classmethod
    def identity(cls, N: int) -> "Permutation":
        return cls(np.arange(N))

    def inverse_indices(self) -> np.ndarray:
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(len(self.perm))
        return inv

    def as_matrix(self) -> np.ndarray:
        P = np.zeros((len(self), len(self)), dtype=np.uint8)
        P[self.perm, np.arange(len(self))] = 1
        return P


def apply_permutation(v, P: Permutation, axis: int = -1) -> np.ndarray:
    """``v P`` along ``axis``."""
    v = np.asarray(v)
    if v.shape[axis] != len(P):
        raise LengthMismatch(f"vector length {v.shape[axis]} != permutation length {len(P)}")
    return np.take(v, P.perm, axis=axis)


def apply_inverse_permutation(v, P: Permutation, axis: int = -1) -> np.ndarray:
    """``v P^{-1}`` along ``axis``."""
    v = np.asarray(v)
    if v.shape[axis] != len(P):
        raise LengthMismatch(f"vector length {v.shape[axis]} != permutation length {len(P)}")
    return np.take(v, P.inverse_indices(), axis=axis)


def build_permutation(n: int, field_N: FieldSpec | None = None) -> Permutation:
    """Power-of-alpha permutation for length ``N = 2^n``.

    Column ``b < N - 1`` maps to the row whose index is the integer packing
    of ``alpha^b`` in a field with ``N`` elements; column ``N - 1`` maps to
    row 0.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if field_N is None:
        field_N = make_field(n)
    if field_N.r != n:
        raise ValueError(f"field has 2^{field_N.r} elements, need 2^{n}")
    N = 1 << n
    perm = np.empty(N, dtype=np.int64)
    for b in range(N - 1):
        perm[b] = field_N.alpha_pow(b)
    perm[N - 1] = 0
    if len(np.unique(perm)) != N:
        raise NotBijective("alpha powers do not cover the field")
    return Permutation(perm)
