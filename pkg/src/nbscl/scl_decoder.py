"""SC and SCL decoding of non-binary codes through r coupled binary SC decoders.

Every path carries r LLR trees and r partial-sum trees, one per binary
component.  At an information index a path splits into ``2^r`` children, one
per field symbol; at a frozen index the symbol is the linear combination of
the information symbols already decided on that path.

Operation counting
------------------
Counters are per frame and follow one fixed convention:

* field ops: one per GF(2^r) multiplication or addition on symbols (frozen
  symbol evaluation, final reconstruction ``u G_p P``).
* flops: one per real addition, multiplication, comparison and per ``exp`` /
  ``ln`` call.  ``f`` costs 12 in exact form and 1 (a single comparison of
  magnitudes, the sign being a bit operation) in min-sum form; ``g`` costs 1.

Path metrics
------------
The default ``"hard"`` metric charges ``|lam|`` for every component whose
decision disagrees with the sign of its stage-0 LLR.  The optional ``"llr"``
metric charges ``ln(1 + e^{-(1-2b) lam})`` per decided bit ``b``, the exact
negative log-likelihood.  The two differ by ``ln(1 + e^{-|lam|})`` per
component, a term shared by all children of a path, so both sorters apply
unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .matrix import apply_permutation, polar_transform
from .polar_map import PolarMapping, frozen_value

LLR_CLIP = 40.0
SORTERS = ("full", "r_step")
F_MODES = ("exact", "minsum")
FLOPS_F_EXACT = 12
FLOPS_F_MINSUM = 1
FLOPS_METRIC_CORRECTION = 4
METRICS = ("hard", "llr")


# scalar LLR arithmetic ------------------------------------------------------

def llr_f(x, y):
    """``ln((e^(x+y) + 1) / (e^x + e^y))`` without overflow."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = (np.sign(x) * np.sign(y) * np.minimum(np.abs(x), np.abs(y))
           + np.log1p(np.exp(-np.abs(x + y))) - np.log1p(np.exp(-np.abs(x - y))))
    return out[()] if out.ndim == 0 else out


def llr_f_minsum(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.sign(x) * np.sign(y) * np.minimum(np.abs(x), np.abs(y))
    return out[()] if out.ndim == 0 else out


def llr_g(x, y, bit):
    x = np.asarray(x, dtype=float)
    out = np.where(np.asarray(bit) & 1, -x, x) + y
    return out[()] if out.ndim == 0 else out


@njit(cache=True, inline="always")
def _f(a, b, minsum):
    m = min(abs(a), abs(b))
    if (a < 0.0) != (b < 0.0):
        m = -m
    if minsum:
        return m
    return m + np.log1p(np.exp(-abs(a + b))) - np.log1p(np.exp(-abs(a - b)))


# sorting primitives ---------------------------------------------------------

@njit(cache=True)
def _merge_sort(keys, idx, n, tk, ti):
    """Stable ascending sort of ``keys[:n]`` carrying ``idx[:n]``; returns the
    number of key comparisons."""
    comps = 0
    width = 1
    src_k, src_i, dst_k, dst_i = keys, idx, tk, ti
    flipped = False
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            a, b, k = lo, mid, lo
            while a < mid and b < hi:
                comps += 1
                if src_k[b] < src_k[a]:
                    dst_k[k] = src_k[b]
                    dst_i[k] = src_i[b]
                    b += 1
                else:
                    dst_k[k] = src_k[a]
                    dst_i[k] = src_i[a]
                    a += 1
                k += 1
            while a < mid:
                dst_k[k] = src_k[a]
                dst_i[k] = src_i[a]
                a += 1
                k += 1
            while b < hi:
                dst_k[k] = src_k[b]
                dst_i[k] = src_i[b]
                b += 1
                k += 1
        src_k, dst_k = dst_k, src_k
        src_i, dst_i = dst_i, src_i
        flipped = not flipped
        width *= 2
    if flipped:
        for k in range(n):
            keys[k] = tk[k]
            idx[k] = ti[k]
    return comps


@njit(cache=True)
def _prune_full(parent_metrics, absllr, eta, P, r, L, out_m, out_p, out_s):
    """Keep the L best of the ``2^r P`` children.

    Returns ``(survivors, comparisons, additions)``.  Children are enumerated
    in (parent, symbol) order and sorted stably, so ties resolve by parent
    index then symbol value.
    """
    q = 1 << r
    total = P * q
    keys = np.empty(total)
    idx = np.empty(total, dtype=np.int64)
    adds = 0
    for a in range(P):
        for s in range(q):
            v = parent_metrics[a]
            diff = s ^ eta[a]
            for j in range(r):
                if (diff >> j) & 1:
                    v += absllr[a, j]
                    adds += 1
            keys[a * q + s] = v
            idx[a * q + s] = a * q + s
    comps = _merge_sort(keys, idx, total, np.empty(total), np.empty(total, dtype=np.int64))
    keep = min(L, total)
    for k in range(keep):
        out_m[k] = keys[k]
        out_p[k] = idx[k] // q
        out_s[k] = idx[k] % q
    return keep, comps, adds


@njit(cache=True)
def _prune_r_step(parent_metrics, absllr, eta, P, r, L, out_m, out_p, out_s):
    """r-step selection of the L best children; same contract as ``_prune_full``."""
    comps = 0
    adds = 0
    cap = max(2 * L, 2 * P)
    tk = np.empty(cap)
    ti = np.empty(cap, dtype=np.int64)

    # per-path component order by ascending reliability
    order = np.empty((P, r), dtype=np.int64)
    okeys = np.empty(r)
    oidx = np.empty(r, dtype=np.int64)
    otk = np.empty(r)
    oti = np.empty(r, dtype=np.int64)
    for a in range(P):
        for j in range(r):
            okeys[j] = absllr[a, j]
            oidx[j] = j
        comps += _merge_sort(okeys, oidx, r, otk, oti)
        for j in range(r):
            order[a, j] = oidx[j]

    # sorted parent metrics
    cm = np.empty(cap)
    cp = np.empty(cap, dtype=np.int64)
    cmask = np.empty(cap, dtype=np.int64)
    pk = np.empty(P)
    pi = np.empty(P, dtype=np.int64)
    for a in range(P):
        pk[a] = parent_metrics[a]
        pi[a] = a
    comps += _merge_sort(pk, pi, P, tk, ti)
    m = P
    for k in range(P):
        cm[k] = pk[k]
        cp[k] = pi[k]
        cmask[k] = 0

    xk = np.empty(cap)
    xi = np.empty(cap, dtype=np.int64)
    nm = np.empty(cap)
    npar = np.empty(cap, dtype=np.int64)
    nmask = np.empty(cap, dtype=np.int64)
    for j in range(r):
        for k in range(m):
            comp = order[cp[k], j]
            xk[k] = cm[k] + absllr[cp[k], comp]
            xi[k] = k
        adds += m
        comps += _merge_sort(xk, xi, m, tk, ti)
        keep = min(L, 2 * m)
        a = 0
        b = 0
        for k in range(keep):
            take_a = False
            if a < m and b < m:
                comps += 1
                take_a = not (xk[b] < cm[a])
            elif a < m:
                take_a = True
            if take_a:
                nm[k] = cm[a]
                npar[k] = cp[a]
                nmask[k] = cmask[a]
                a += 1
            else:
                src = xi[b]
                nm[k] = xk[b]
                npar[k] = cp[src]
                nmask[k] = cmask[src] | (1 << order[cp[src], j])
                b += 1
        m = keep
        for k in range(m):
            cm[k] = nm[k]
            cp[k] = npar[k]
            cmask[k] = nmask[k]
    for k in range(m):
        out_m[k] = cm[k]
        out_p[k] = cp[k]
        out_s[k] = eta[cp[k]] ^ cmask[k]
    return m, comps, adds


# the decoder ------------------------------------------------------------------

@njit(cache=True)
def _scl_kernel(ch, n, is_info, tau, M, gexp, glog, L, rstep, minsum, llr_metric):
    r = ch.shape[0]
    N = ch.shape[1]
    K = M.shape[0]
    fcost = FLOPS_F_MINSUM if minsum else FLOPS_F_EXACT
    flops = 0
    fops = 0

    llr = np.zeros((L, r, N))
    bits = np.zeros((L, r, 2, N), dtype=np.uint8)
    uA = np.zeros((L, max(K, 1)), dtype=np.int64)
    uhat = np.zeros((L, N), dtype=np.int64)
    metric = np.zeros(L)
    act = np.zeros(L, dtype=np.int64)
    P = 1
    act[0] = 0

    absllr = np.empty((L, r))
    eta = np.empty(L, dtype=np.int64)
    pm = np.empty(L)
    sm = np.empty(L)
    sp = np.empty(L, dtype=np.int64)
    ss = np.empty(L, dtype=np.int64)
    nchild = np.zeros(L, dtype=np.int64)
    slot_of = np.empty(L, dtype=np.int64)
    free = np.empty(L, dtype=np.int64)
    in_use = np.zeros(L, dtype=np.bool_)

    for i in range(N):
        # LLR recursion down to stage 0
        if i == 0:
            top = n - 1
        else:
            top = 0
            while not (i >> top) & 1:
                top += 1
        for a in range(P):
            l = act[a]
            for j in range(r):
                for s in range(top, -1, -1):
                    h = 1 << s
                    right = (i >> s) & 1
                    for t in range(h):
                        if s + 1 == n:
                            x = ch[j, t]
                            y = ch[j, t + h]
                        else:
                            x = llr[l, j, 2 * h + t]
                            y = llr[l, j, 3 * h + t]
                        if right:
                            if bits[l, j, 0, h + t]:
                                llr[l, j, h + t] = y - x
                            else:
                                llr[l, j, h + t] = x + y
                        else:
                            llr[l, j, h + t] = _f(x, y, minsum)
                    flops += h if right else h * fcost
            ev = 0
            for j in range(r):
                lam = llr[l, j, 1]
                absllr[a, j] = abs(lam)
                if lam < 0.0:
                    ev |= 1 << j
            eta[a] = ev
            flops += r
            if llr_metric:
                # every child of this path pays ln(1 + e^-|lam|) per component
                corr = 0.0
                for j in range(r):
                    corr += np.log1p(np.exp(-absllr[a, j]))
                metric[l] += corr
                flops += FLOPS_METRIC_CORRECTION * r

        if not is_info[i]:
            t_i = tau[i]
            for a in range(P):
                l = act[a]
                v = 0
                for t in range(t_i):
                    u = uA[l, t]
                    c = M[t, i]
                    if u != 0 and c != 0:
                        v ^= gexp[glog[u] + glog[c]]
                if t_i > 0:
                    fops += 2 * t_i - 1
                diff = v ^ eta[a]
                for j in range(r):
                    if (diff >> j) & 1:
                        metric[l] += absllr[a, j]
                        flops += 1
                uhat[l, i] = v
        else:
            t_i = tau[i]
            for a in range(P):
                pm[a] = metric[act[a]]
            if rstep:
                S, comps, adds = _prune_r_step(pm, absllr, eta, P, r, L, sm, sp, ss)
            else:
                S, comps, adds = _prune_full(pm, absllr, eta, P, r, L, sm, sp, ss)
            flops += comps + adds
            # slot assignment: first child of a parent stays in place
            for a in range(P):
                nchild[a] = 0
            for l in range(L):
                in_use[l] = False
            for k in range(S):
                a = sp[k]
                if nchild[a] == 0:
                    slot_of[k] = act[a]
                    in_use[act[a]] = True
                else:
                    slot_of[k] = -1
                nchild[a] += 1
            nfree = 0
            for l in range(L):
                if not in_use[l]:
                    free[nfree] = l
                    nfree += 1
            fptr = 0
            for k in range(S):
                if slot_of[k] < 0:
                    dst = free[fptr]
                    fptr += 1
                    src = act[sp[k]]
                    llr[dst] = llr[src]
                    bits[dst] = bits[src]
                    for t in range(t_i):
                        uA[dst, t] = uA[src, t]
                    for t in range(i):
                        uhat[dst, t] = uhat[src, t]
                    slot_of[k] = dst
            for k in range(S):
                l = slot_of[k]
                uA[l, t_i] = ss[k]
                uhat[l, i] = ss[k]
                metric[l] = sm[k]
                act[k] = l
            P = S

        # partial sums
        if i < N - 1:
            for a in range(P):
                l = act[a]
                v = uhat[l, i]
                for j in range(r):
                    bits[l, j, i & 1, 1] = (v >> j) & 1
                    s = 0
                    while s < n - 1 and (i >> s) & 1:
                        h = 1 << s
                        dst = (i >> (s + 1)) & 1
                        for t in range(h):
                            lb = bits[l, j, 0, h + t]
                            rb = bits[l, j, 1, h + t]
                            bits[l, j, dst, 2 * h + t] = lb ^ rb
                            bits[l, j, dst, 3 * h + t] = rb
                        s += 1

    best = act[0]
    for a in range(1, P):
        flops += 1
        if metric[act[a]] < metric[best]:
            best = act[a]
    fops += (N // 2) * n
    return uhat[best].copy(), metric[best], fops, flops


@dataclass
class DecodeResult:
    codeword: np.ndarray
    u: np.ndarray
    metric: float = 0.0
    field_ops: int = 0
    flops: int = 0
    success: bool = True


class SclDecoder:
    """SCL decoder bound to one :class:`PolarMapping`.

    ``decode`` takes the r de-permuted channel LLR vectors as an ``(r, N)``
    array.  The instance only holds read-only tables and may be reused.
    """

    def __init__(self, mapping: PolarMapping, list_size: int = 1, sorter: str = "r_step",
                 f_mode: str = "exact", metric: str = "hard"):
        if list_size < 1:
            raise ValueError("list size must be at least 1")
        if sorter not in SORTERS:
            raise ValueError(f"unknown sorter {sorter!r}")
        if f_mode not in F_MODES:
            raise ValueError(f"unknown f mode {f_mode!r}")
        if metric not in METRICS:
            raise ValueError(f"unknown path metric {metric!r}")
        self.mapping = mapping
        self.list_size = int(list_size)
        self.sorter = sorter
        self.f_mode = f_mode
        self.metric = metric
        self._is_info = mapping.is_info()
        self._tau = np.ascontiguousarray(mapping.tau, dtype=np.int64)
        self._M = np.ascontiguousarray(mapping.M_r, dtype=np.int64)
        if self._M.shape[0] == 0:
            self._M = np.zeros((1, mapping.N), dtype=np.int64)
        self._exp = np.ascontiguousarray(mapping.field.exp)
        self._log = np.ascontiguousarray(mapping.field.log)

    @property
    def name(self) -> str:
        return f"SCL({self.list_size})"

    def decode(self, channel_llrs) -> DecodeResult:
        ch = np.ascontiguousarray(np.clip(channel_llrs, -LLR_CLIP, LLR_CLIP), dtype=np.float64)
        if ch.shape != (self.mapping.r, self.mapping.N):
            raise ValueError(f"expected LLRs of shape {(self.mapping.r, self.mapping.N)}, got {ch.shape}")
        u, metric, fops, flops = _scl_kernel(ch, self.mapping.n, self._is_info, self._tau, self._M,
                                             self._exp, self._log, self.list_size,
                                             self.sorter == "r_step", self.f_mode == "minsum",
                                             self.metric == "llr")
        c = apply_permutation(polar_transform(u), self.mapping.perm)
        return DecodeResult(c, u, float(metric), int(fops), int(flops))


def scl_decode(mapping: PolarMapping, channel_llrs, list_size: int, sorter: str = "r_step",
               f_mode: str = "exact", metric: str = "hard"):
    """Returns ``(codeword, u, final_metric)``."""
    res = SclDecoder(mapping, list_size, sorter, f_mode, metric).decode(channel_llrs)
    return res.codeword, res.u, res.metric


def sc_decode(mapping: PolarMapping, channel_llrs, f_mode: str = "exact"):
    """Plain successive cancellation, written as a recursion on whole
    sub-blocks.  Returns ``(codeword, u)``."""
    f = llr_f if f_mode == "exact" else llr_f_minsum
    ch = np.clip(np.asarray(channel_llrs, dtype=float), -LLR_CLIP, LLR_CLIP)
    r, N = ch.shape
    info = mapping.is_info()
    u = np.zeros(N, dtype=np.int64)
    uA = []

    def rec(lam, lo):
        size = lam.shape[1]
        if size == 1:
            i = lo
            if info[i]:
                sym = int(np.sum((lam[:, 0] < 0).astype(np.int64) << np.arange(r)))
                uA.append(sym)
            else:
                sym = frozen_value(mapping, uA, i)
            u[i] = sym
            return ((sym >> np.arange(r)) & 1).astype(np.uint8)[:, None]
        h = size // 2
        a = rec(f(lam[:, :h], lam[:, h:]), lo)
        b = rec(llr_g(lam[:, :h], lam[:, h:], a), lo + h)
        return np.concatenate([a ^ b, b], axis=1)

    rec(ch, 0)
    return apply_permutation(polar_transform(u), mapping.perm), u


def split_metrics(path_metric: float, stage0_llrs) -> np.ndarray:
    """Child metrics for every symbol value, indexed by the symbol's integer."""
    lam = np.asarray(stage0_llrs, dtype=float)
    r = len(lam)
    eta = (lam < 0).astype(np.int64)
    out = np.full(1 << r, float(path_metric))
    for s in range(1 << r):
        for j in range(r):
            if ((s >> j) & 1) != eta[j]:
                out[s] += abs(lam[j])
    return out


def _hard_symbols(stage0):
    r = stage0.shape[1]
    return np.sum((stage0 < 0).astype(np.int64) << np.arange(r), axis=1)


def _run_prune(kernel, parent_metrics, stage0_llrs, L):
    pm = np.ascontiguousarray(parent_metrics, dtype=float)
    stage0 = np.ascontiguousarray(np.atleast_2d(stage0_llrs), dtype=float)
    P, r = stage0.shape
    absllr = np.ascontiguousarray(np.abs(stage0))
    eta = _hard_symbols(stage0)
    cap = max(L, P << r)
    out_m, out_p, out_s = np.empty(cap), np.empty(cap, np.int64), np.empty(cap, np.int64)
    S, comps, adds = kernel(pm, absllr, eta, P, r, L, out_m, out_p, out_s)
    return out_m[:S].copy(), out_p[:S].copy(), out_s[:S].copy(), int(comps)


def prune_full(parent_metrics, stage0_llrs, L):
    """Full sort of all children.  ``stage0_llrs`` is ``(P, r)``.

    Returns ``(metrics, parents, symbols, comparisons)`` of the survivors in
    ascending metric order.
    """
    return _run_prune(_prune_full, parent_metrics, stage0_llrs, L)


def prune_r_step(parent_metrics, stage0_llrs, L):
    """r merge steps over per-path reliability orders; same return shape as
    :func:`prune_full`."""
    return _run_prune(_prune_r_step, parent_metrics, stage0_llrs, L)
