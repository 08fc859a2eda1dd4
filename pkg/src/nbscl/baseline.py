"""Algebraic baselines: Berlekamp-Massey hard-decision decoding of the cyclic
code and Chase-BM soft-decision decoding of its extension.

BM runs on the length ``N - 1`` cyclic prefix; the extension symbol only takes
part in candidate ranking.  Syndromes and locators live in the root field of
the code (GF(2^r) itself for RS codes, a splitting field for BCH codes).
"""
from __future__ import annotations

import numpy as np
from numba import njit

from .codes import CodeSpec
from .errors import DecodeFailure, LengthMismatch
from .scl_decoder import DecodeResult

OK = 0
FAIL_DEGREE = 1
FAIL_ROOTS = 2
FAIL_SUBFIELD = 3


@njit(cache=True)
def _gmul(a, b, gexp, glog):
    if a == 0 or b == 0:
        return 0
    return gexp[glog[a] + glog[b]]


@njit(cache=True)
def _ginv(a, gexp, glog, order):
    return gexp[(order - glog[a]) % order]


@njit(cache=True)
def _bm_kernel(y, embed, unembed, gexp, glog, order, step, n2t):
    """Returns ``(status, corrected, field_ops)``."""
    n0 = y.shape[0]
    fops = 0
    out = y.copy()

    # syndromes S_k = y(omega^k), k = 1..2t, by Horner's rule
    S = np.zeros(n2t, dtype=np.int64)
    allzero = True
    for k in range(1, n2t + 1):
        w = gexp[(step * k) % order]
        acc = 0
        for pos in range(n0 - 1, -1, -1):
            acc = _gmul(acc, w, gexp, glog) ^ embed[y[pos]]
        fops += 2 * n0
        S[k - 1] = acc
        if acc != 0:
            allzero = False
    if allzero:
        return OK, out, fops

    # Berlekamp-Massey
    C = np.zeros(n2t + 1, dtype=np.int64)
    B = np.zeros(n2t + 1, dtype=np.int64)
    T = np.zeros(n2t + 1, dtype=np.int64)
    C[0] = 1
    B[0] = 1
    Lc = 0
    m = 1
    b = 1
    for k in range(n2t):
        d = S[k]
        for i in range(1, Lc + 1):
            d ^= _gmul(C[i], S[k - i], gexp, glog)
        fops += 2 * Lc
        if d == 0:
            m += 1
            continue
        coef = _gmul(d, _ginv(b, gexp, glog, order), gexp, glog)
        fops += 2
        if 2 * Lc <= k:
            for i in range(n2t + 1):
                T[i] = C[i]
            for i in range(n2t + 1 - m):
                if B[i] != 0:
                    C[i + m] ^= _gmul(coef, B[i], gexp, glog)
                    fops += 2
            Lc = k + 1 - Lc
            for i in range(n2t + 1):
                B[i] = T[i]
            b = d
            m = 1
        else:
            for i in range(n2t + 1 - m):
                if B[i] != 0:
                    C[i + m] ^= _gmul(coef, B[i], gexp, glog)
                    fops += 2
            m += 1
    deg = 0
    for i in range(n2t + 1):
        if C[i] != 0:
            deg = i
    if deg != Lc or 2 * Lc > n2t:
        return FAIL_DEGREE, out, fops

    # Chien search over positions: root at omega^{-pos}
    locs = np.empty(Lc, dtype=np.int64)
    nroots = 0
    for pos in range(n0):
        x = gexp[(order - (step * pos) % order) % order]
        acc = 0
        for i in range(Lc, -1, -1):
            acc = _gmul(acc, x, gexp, glog) ^ C[i]
        fops += 2 * (Lc + 1)
        if acc == 0:
            if nroots == Lc:
                return FAIL_ROOTS, out, fops
            locs[nroots] = pos
            nroots += 1
    if nroots != Lc:
        return FAIL_ROOTS, out, fops

    # Forney: e = Omega(X^-1) / Lambda'(X^-1) for first root exponent 1
    Om = np.zeros(n2t, dtype=np.int64)
    for i in range(n2t):
        acc = 0
        for k in range(0, min(i, Lc) + 1):
            acc ^= _gmul(C[k], S[i - k], gexp, glog)
        fops += 2 * (min(i, Lc) + 1)
        Om[i] = acc
    for e in range(Lc):
        pos = locs[e]
        xinv = gexp[(order - (step * pos) % order) % order]
        num = 0
        for i in range(n2t - 1, -1, -1):
            num = _gmul(num, xinv, gexp, glog) ^ Om[i]
        fops += 2 * n2t
        # formal derivative in characteristic two keeps odd powers only
        den = 0
        x2 = _gmul(xinv, xinv, gexp, glog)
        for i in range(Lc - (1 - Lc % 2), 0, -2):
            den = _gmul(den, x2, gexp, glog) ^ C[i]
        fops += Lc + 1
        if den == 0:
            return FAIL_ROOTS, out, fops
        val = _gmul(num, _ginv(den, gexp, glog, order), gexp, glog)
        fops += 2
        sym = unembed[val]
        if sym < 0:
            return FAIL_SUBFIELD, out, fops
        out[pos] ^= sym
        fops += 1
    return OK, out, fops


@njit(cache=True)
def _chase_kernel(llr, eta, embed, unembed, gexp, glog, order, step, n2t):
    """``llr`` is (r, N) in natural codeword order; the last position is the
    extension symbol.  Returns ``(found, codeword, best_mask, field_ops, flops)``."""
    r = llr.shape[0]
    N = llr.shape[1]
    n0 = N - 1
    flops = 0
    fops = 0

    hard = np.zeros(N, dtype=np.int64)
    alt = np.zeros(N, dtype=np.int64)
    gap = np.empty(n0)
    for i in range(N):
        weakest = 0
        for j in range(r):
            if llr[j, i] < 0.0:
                hard[i] |= 1 << j
            if j > 0:
                flops += 1
                if abs(llr[j, i]) < abs(llr[weakest, i]):
                    weakest = j
        flops += r
        alt[i] = hard[i] ^ (1 << weakest)
        if i < n0:
            gap[i] = abs(llr[weakest, i])

    # eta least reliable positions (stable by index on ties)
    pos = np.argsort(gap, kind="mergesort")[:eta]
    flops += int(n0 * np.log2(max(n0, 2)))

    best = np.zeros(N, dtype=np.int64)
    best_score = -np.inf
    best_mask = -1
    y = np.empty(n0, dtype=np.int64)
    for mask in range(1 << eta):
        for i in range(n0):
            y[i] = hard[i]
        for k in range(eta):
            if (mask >> k) & 1:
                y[pos[k]] = alt[pos[k]]
        status, cw, f = _bm_kernel(y, embed, unembed, gexp, glog, order, step, n2t)
        fops += f
        if status != OK:
            continue
        par = 0
        for i in range(n0):
            par ^= cw[i]
        fops += n0 - 1
        score = 0.0
        for i in range(N):
            s = cw[i] if i < n0 else par
            for j in range(r):
                if (s >> j) & 1:
                    score -= llr[j, i]
                else:
                    score += llr[j, i]
        flops += N * r + 1
        if score > best_score:
            best_score = score
            best_mask = mask
            for i in range(n0):
                best[i] = cw[i]
            best[n0] = par
    return best_mask >= 0, best, best_mask, fops, flops


def _root_tables(code: CodeSpec):
    info = code.cyclic
    if info is None:
        raise ValueError(f"{code.name} has no cyclic root structure")
    rf = info.root_field
    unembed = np.full(rf.q, -1, dtype=np.int64)
    unembed[info.embed] = np.arange(code.field.q)
    return (np.ascontiguousarray(info.embed, dtype=np.int64), unembed,
            np.ascontiguousarray(rf.exp), np.ascontiguousarray(rf.log),
            rf.order, info.root_step, info.n_consecutive)


def syndromes(code: CodeSpec, y) -> np.ndarray:
    """``S_k = y(omega^k)`` for k = 1..2t in the root field."""
    info = code.cyclic
    rf = info.root_field
    y = np.asarray(y, dtype=np.int64)
    out = np.zeros(info.n_consecutive, dtype=np.int64)
    for k in range(1, info.n_consecutive + 1):
        w = rf.alpha_pow(info.root_step * k)
        acc = 0
        for sym in y[::-1]:
            acc = rf.mul(acc, w) ^ int(info.embed[sym])
        out[k - 1] = acc
    return out


def bm_decode(code: CodeSpec, y_hard, return_ops: bool = False):
    """Hard-decision BM decoding of the cyclic code underlying ``code``.

    ``y_hard`` has length ``N - 1`` for an extended code.  Raises
    :class:`DecodeFailure` when the locator is inconsistent; beyond ``t``
    errors a wrong codeword may be returned.
    """
    base = code.cyclic_part()
    y = np.ascontiguousarray(y_hard, dtype=np.int64)
    if y.shape != (base.N,):
        raise LengthMismatch(f"received word length {y.shape} != {base.N}")
    status, out, fops = _bm_kernel(y, *_root_tables(code))
    if status != OK:
        raise DecodeFailure({FAIL_DEGREE: "locator degree mismatch",
                             FAIL_ROOTS: "locator roots not all in the field",
                             FAIL_SUBFIELD: "error value outside the symbol field"}[status])
    return (out, int(fops)) if return_ops else out


class ChaseBmDecoder:
    """Chase-BM with ``eta`` flipped positions on an extended cyclic code.

    Each of the ``eta`` least reliable symbols (smallest gap between best and
    second-best symbol likelihood) takes either its hard decision or its
    second-best symbol.  The successful candidate with the largest
    correlation over all N positions wins; ties go to the smaller flip mask.
    """

    def __init__(self, code: CodeSpec, eta: int):
        if not code.extended:
            raise ValueError("Chase-BM expects an extended code")
        if not 0 <= eta <= code.N - 1:
            raise ValueError(f"eta must be in [0, {code.N - 1}]")
        self.code = code
        self.eta = int(eta)
        self._tables = _root_tables(code)

    @property
    def name(self) -> str:
        return f"Chase-BM({self.eta})"

    def decode(self, llr) -> DecodeResult:
        """``llr``: (r, N) bit LLRs in natural codeword order."""
        llr = np.ascontiguousarray(llr, dtype=np.float64)
        if llr.shape != (self.code.field.r, self.code.N):
            raise LengthMismatch(f"expected LLRs of shape {(self.code.field.r, self.code.N)}")
        found, cw, mask, fops, flops = _chase_kernel(llr, self.eta, *self._tables)
        if not found:
            hard = np.sum((llr < 0).astype(np.int64) << np.arange(llr.shape[0])[:, None], axis=0)
            return DecodeResult(hard, hard, 0.0, int(fops), int(flops), success=False)
        return DecodeResult(cw, cw, float(mask), int(fops), int(flops))


def chase_bm_decode(code: CodeSpec, y, eta: int, noise_var: float) -> np.ndarray:
    """Chase-BM on received BPSK samples ``y`` of shape (r, N)."""
    llr = 2.0 * np.asarray(y, dtype=float) / noise_var
    res = ChaseBmDecoder(code, eta).decode(llr)
    if not res.success:
        raise DecodeFailure(f"all {1 << eta} test vectors failed")
    return res.codeword
