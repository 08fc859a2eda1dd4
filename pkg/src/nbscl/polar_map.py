"""Map a non-binary code onto r coupled binary polar codes.

For a generator ``G`` and permutation ``P`` the matrix ``G P^{-1} G_p^{-1}`` is
brought to reduced row-echelon form ``M = R G P^{-1} G_p^{-1}``.  Its pivot
columns form the information set shared by all r binary component codes and
its remaining columns define the dynamic frozen symbols.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import log_ndtr

from .codes import CodeSpec
from .errors import IndexNotFrozen, LengthMismatch, NotACodeword
from .matrix import (Permutation, apply_inverse_permutation, apply_permutation, build_permutation,
                     nb_inverse, nb_rref, polar_transform)


@dataclass(frozen=True, eq=False)
class PolarMapping:
    code: CodeSpec
    perm: Permutation
    M_r: np.ndarray
    R: np.ndarray
    R_inv: np.ndarray
    info_set: np.ndarray
    frozen_set: np.ndarray
    tau: np.ndarray

    @property
    def N(self) -> int:
        return self.code.N

    @property
    def n(self) -> int:
        return self.code.N.bit_length() - 1

    @property
    def r(self) -> int:
        return self.code.field.r

    @property
    def field(self):
        return self.code.field

    def is_info(self) -> np.ndarray:
        mask = np.zeros(self.N, dtype=bool)
        mask[self.info_set] = True
        return mask

    def frozen_terms(self):
        """CSR view of the nonzero coefficients of every frozen column.

        Returns ``(ptr, rows, coefs)``; the terms of column ``i`` are
        ``rows[ptr[i]:ptr[i+1]]`` with matching ``coefs``.  Information
        columns are empty.
        """
        ptr = np.zeros(self.N + 1, dtype=np.int64)
        rows, coefs = [], []
        info = self.is_info()
        for i in range(self.N):
            if not info[i]:
                nz = np.nonzero(self.M_r[:, i])[0]
                rows.extend(nz.tolist())
                coefs.extend(self.M_r[nz, i].tolist())
            ptr[i + 1] = len(rows)
        return ptr, np.array(rows, dtype=np.int64), np.array(coefs, dtype=np.int64)


def default_permutation(code: CodeSpec) -> Permutation:
    return build_permutation(code.N.bit_length() - 1)


def build_mapping(code: CodeSpec, perm: Permutation | None = None) -> PolarMapping:
    N = code.N
    if N < 2 or N & (N - 1):
        raise LengthMismatch(f"code length {N} is not a power of two")
    if perm is None:
        perm = default_permutation(code)
    if len(perm) != N:
        raise LengthMismatch("permutation length differs from code length")
    T = polar_transform(apply_inverse_permutation(code.gen, perm, axis=1), axis=1)
    R, M, pivots = nb_rref(code.field, T)
    info = np.array(pivots, dtype=np.int64)
    frozen = np.array([i for i in range(N) if i not in set(pivots)], dtype=np.int64)
    tau = np.searchsorted(info, np.arange(N), side="left")
    for arr in (M, R, info, frozen, tau):
        arr.setflags(write=False)
    R_inv = nb_inverse(code.field, R)
    R_inv.setflags(write=False)
    return PolarMapping(code, perm, M, R, R_inv, info, frozen, tau)


def polar_encode(mapping: PolarMapping, m) -> np.ndarray:
    """``c = (m R^{-1}) M G_p P``; identical to ``m G`` by construction."""
    m = np.asarray(m, dtype=np.int64)
    if m.shape != (mapping.code.K,):
        raise LengthMismatch(f"message length {m.shape} != K={mapping.code.K}")
    f = mapping.field
    uA = f.dot(m, mapping.R_inv)
    u = f.dot(uA, mapping.M_r)
    return apply_permutation(polar_transform(u), mapping.perm)


def message_from_info(mapping: PolarMapping, uA) -> np.ndarray:
    return mapping.field.dot(np.asarray(uA, dtype=np.int64), mapping.R)


def symbols_to_bits(symbols, r: int) -> np.ndarray:
    """(N,) symbols -> (r, N) binary components."""
    symbols = np.asarray(symbols, dtype=np.int64)
    return ((symbols[None, :] >> np.arange(r)[:, None]) & 1).astype(np.uint8)


def bits_to_symbols(bits) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.int64)
    return np.sum(bits << np.arange(bits.shape[0])[:, None], axis=0)


def polar_inputs(mapping: PolarMapping, c) -> np.ndarray:
    """Recover the r binary polar input vectors ``u_j = c_j P^{-1} G_p^{-1}``."""
    c = np.asarray(c, dtype=np.int64)
    if c.shape != (mapping.N,):
        raise LengthMismatch(f"codeword length {c.shape} != N={mapping.N}")
    return polar_transform(apply_inverse_permutation(symbols_to_bits(c, mapping.r), mapping.perm, axis=1), axis=1)


def decompose(mapping: PolarMapping, c) -> np.ndarray:
    """Split a codeword into its r binary components, checking that each is a
    polar codeword whose frozen bits obey the dynamic constraints."""
    c = np.asarray(c, dtype=np.int64)
    comps = symbols_to_bits(c, mapping.r)
    u_bits = polar_inputs(mapping, c)
    u = bits_to_symbols(u_bits)
    uA = u[mapping.info_set]
    expected = mapping.field.dot(uA, mapping.M_r) if len(uA) else np.zeros(mapping.N, np.int64)
    bad = np.nonzero(expected != u)[0]
    if len(bad):
        i = int(bad[0])
        comp = int(np.nonzero(symbols_to_bits([expected[i] ^ u[i]], mapping.r)[:, 0])[0][0])
        raise NotACodeword(f"frozen constraint violated at index {i}, component {comp}")
    return comps


def frozen_value(mapping: PolarMapping, prefix, i: int) -> int:
    """Value of frozen symbol ``i`` given the information symbols decided so far."""
    if i < 0 or i >= mapping.N or i in set(mapping.info_set.tolist()):
        raise IndexNotFrozen(f"index {i} is not frozen")
    t = int(mapping.tau[i])
    prefix = np.asarray(prefix, dtype=np.int64)
    if len(prefix) < t:
        raise LengthMismatch(f"need {t} information symbols, got {len(prefix)}")
    if t == 0:
        return 0
    terms = mapping.field.mul_vec(prefix[:t], mapping.M_r[:t, i])
    return int(np.bitwise_xor.reduce(terms))


def reconstruct(mapping: PolarMapping, u) -> np.ndarray:
    """``c = u G_p P``."""
    u = np.asarray(u, dtype=np.int64)
    if u.shape != (mapping.N,):
        raise LengthMismatch(f"input length {u.shape} != N={mapping.N}")
    return apply_permutation(polar_transform(u), mapping.perm)


# reliability analysis -------------------------------------------------------

_PHI_SWITCH = 10.0


def _phi(x: float) -> float:
    if x <= 0:
        return 1.0
    if x < _PHI_SWITCH:
        return float(np.exp(-0.4527 * x ** 0.86 + 0.0218))
    return float(np.sqrt(np.pi / x) * np.exp(-x / 4.0) * (1.0 - 10.0 / (7.0 * x)))


def _phi_inv(y: float) -> float:
    if y >= 1.0:
        return 0.0
    if y <= 0.0:
        return np.inf
    hi = 1.0
    while _phi(hi) > y:
        hi *= 2.0
        if hi > 1e12:
            return hi
    return brentq(lambda x: _phi(x) - y, 0.0, hi, xtol=1e-14, rtol=1e-12)


@dataclass(frozen=True)
class SubchannelReliability:
    pe: np.ndarray
    design_snr: float
    mean_llr: np.ndarray

    def to_csv(self, path, info_set=()) -> None:
        info = set(int(i) for i in info_set)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "pe", "in_info_set"])
            for i, p in enumerate(self.pe):
                w.writerow([i, f"{p:.6e}", int(i in info)])


def ga_reliabilities(n: int, design_snr_db: float, code_rate: float) -> SubchannelReliability:
    """Subchannel error probabilities for BPSK-AWGN by Gaussian approximation.

    Index bits are consumed from the most significant one: a 0 bit takes the
    check-node ("minus") branch, a 1 bit the variable-node ("plus") branch.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    sigma2 = 1.0 / (2.0 * code_rate * 10.0 ** (design_snr_db / 10.0))
    N = 1 << n
    idx = np.arange(N)
    mean = np.full(N, 2.0 / sigma2)
    cache: dict[float, float] = {}
    for s in range(n - 1, -1, -1):
        plus = (idx >> s) & 1
        new = np.empty(N)
        for i in range(N):
            m = mean[i]
            if plus[i]:
                new[i] = 2.0 * m
            else:
                if m not in cache:
                    p = _phi(m)
                    cache[m] = _phi_inv(p * (2.0 - p))
                new[i] = cache[m]
        mean = new
    log_pe = log_ndtr(-np.sqrt(mean / 2.0))
    pe = np.clip(np.exp(log_pe), np.finfo(float).tiny, 1.0)
    return SubchannelReliability(pe, design_snr_db, mean)


def sc_union_bound(rel: SubchannelReliability, info_set) -> float:
    info = np.asarray(info_set, dtype=np.int64)
    return float(np.sum(rel.pe[info])) if len(info) else 0.0
