"""Reed-Solomon and non-binary BCH codes, their one-symbol extensions, and
user-supplied generator matrices."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .errors import DimensionUnreachable, InvalidDimension, LengthMismatch, RankDeficient
from .galois import FieldSpec, make_field
from .matrix import nb_rank


@dataclass(frozen=True, eq=False)
class CyclicInfo:
    """Root structure of a narrow-sense cyclic code of length ``length``.

    The roots ``omega^1 .. omega^(n_consecutive)`` (plus conjugates) live in
    ``root_field``; ``omega = alpha_root^root_step`` is a primitive
    ``length``-th root of unity and ``embed[s]`` is the image of code symbol
    ``s`` in ``root_field``.
    """

    length: int
    gen_poly: np.ndarray
    root_field: FieldSpec
    embed: np.ndarray
    root_step: int
    n_consecutive: int
    root_exponents: tuple

    @property
    def t(self) -> int:
        return self.n_consecutive // 2


@dataclass(frozen=True, eq=False)
class CodeSpec:
    field: FieldSpec
    N: int
    K: int
    gen: np.ndarray
    family: str = "custom"
    design_params: dict = dc_field(default_factory=dict)
    cyclic: CyclicInfo | None = None
    extended: bool = False

    def __post_init__(self):
        gen = np.asarray(self.gen, dtype=np.int64)
        if gen.shape != (self.K, self.N):
            raise LengthMismatch(f"generator shape {gen.shape} != ({self.K}, {self.N})")
        if np.any((gen < 0) | (gen >= self.field.q)):
            raise ValueError("generator entries outside the field")
        if self.K and nb_rank(self.field, gen) != self.K:
            raise RankDeficient("generator matrix does not have full row rank")
        gen.setflags(write=False)
        object.__setattr__(self, "gen", gen)

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def name(self) -> str:
        return f"({self.N}, {self.K}) {self.family} over GF({self.field.q})"

    def cyclic_part(self) -> "CodeSpec":
        """The length ``N - 1`` cyclic code underlying an extended code."""
        if not self.extended:
            return self
        return CodeSpec(self.field, self.N - 1, self.K, self.gen[:, :-1], self.family.lstrip("e"),
                        dict(self.design_params), self.cyclic, extended=False)


# polynomial helpers (coefficients low degree first) ------------------------

def poly_mul(field: FieldSpec, a, b) -> np.ndarray:
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i, ai in enumerate(a):
        if ai:
            out[i:i + len(b)] ^= field.mul_vec(int(ai), b)
    return out


def poly_from_roots(field: FieldSpec, roots) -> np.ndarray:
    g = np.array([1], dtype=np.int64)
    for x in roots:
        g = poly_mul(field, g, [x, 1])     # X - x == X + x
    return g


def poly_eval(field: FieldSpec, p, x: int) -> int:
    acc = 0
    for c in reversed(list(p)):
        acc = field.mul(acc, x) ^ int(c)
    return acc


def generator_from_poly(g, length: int) -> np.ndarray:
    """Rows are the coefficient vectors of ``g(X) X^t``."""
    g = np.asarray(g, dtype=np.int64)
    K = length - (len(g) - 1)
    gen = np.zeros((K, length), dtype=np.int64)
    for t in range(K):
        gen[t, t:t + len(g)] = g
    return gen


# constructions -------------------------------------------------------------

def rs_generator(field: FieldSpec, K: int) -> np.ndarray:
    """Narrow-sense RS code of length ``2^r - 1``: roots ``alpha^1 .. alpha^(n-K)``."""
    n0 = field.order
    if not 1 <= K <= n0:
        raise InvalidDimension(f"K={K} outside [1, {n0}]")
    g = poly_from_roots(field, [field.alpha_pow(i) for i in range(1, n0 - K + 1)])
    return generator_from_poly(g, n0)


def _rs_cyclic(field: FieldSpec, K: int) -> CyclicInfo:
    n0 = field.order
    d1 = n0 - K
    g = poly_from_roots(field, [field.alpha_pow(i) for i in range(1, d1 + 1)])
    return CyclicInfo(n0, g, field, np.arange(field.q, dtype=np.int64), 1, d1, tuple(range(1, d1 + 1)))


def subfield_embedding(small: FieldSpec, big: FieldSpec) -> np.ndarray:
    """Table mapping each element of ``small`` to its image in ``big``."""
    if big.r % small.r:
        raise ValueError(f"GF(2^{small.r}) is not a subfield of GF(2^{big.r})")
    step = big.order // small.order
    gamma = None
    for e in range(small.order):
        cand = big.alpha_pow(e * step)
        if np.gcd(e, small.order) != 1 and small.order > 1:
            continue
        # evaluate p_small(cand) with binary coefficients
        acc, x = 0, 1
        for d in range(small.r + 1):
            if small.primitive_poly >> d & 1:
                acc ^= x
            x = big.mul(x, cand)
        if acc == 0:
            gamma = cand
            break
    if gamma is None:
        raise ValueError("no root of the subfield polynomial found")
    embed = np.zeros(small.q, dtype=np.int64)
    powers = [big.pow(gamma, j) for j in range(small.r)]
    for s in range(small.q):
        v = 0
        for j in range(small.r):
            if s >> j & 1:
                v ^= powers[j]
        embed[s] = v
    return embed


def cyclotomic_coset(e: int, q: int, n: int) -> list[int]:
    coset, x = [], e % n
    while x not in coset:
        coset.append(x)
        x = (x * q) % n
    return coset


def _bch_cyclic(field: FieldSpec, length: int, target_K: int) -> CyclicInfo:
    q = field.q
    m = 1
    while (q ** m - 1) % length:
        m += 1
        if field.r * m > 16:
            raise DimensionUnreachable(f"no splitting field of size <= 2^16 for length {length}")
    big = field if m == 1 else make_field(field.r * m)
    embed = subfield_embedding(field, big)
    step = big.order // length
    if target_K == length:
        return CyclicInfo(length, np.array([1], np.int64), big, embed, step, 0, ())
    roots: set[int] = set()
    for delta in range(2, length + 2):
        roots.update(cyclotomic_coset(delta - 1, q, length))
        dim = length - len(roots)
        if dim <= target_K:
            break
    if dim != target_K:
        raise DimensionUnreachable(f"designed distances skip K={target_K} (next dimension {dim})")
    # extend the consecutive run as far as the root set allows
    n_consec = 0
    while (n_consec + 1) % length in roots and n_consec + 1 < length:
        n_consec += 1
    exps = tuple(sorted(roots))
    g_big = poly_from_roots(big, [big.alpha_pow(step * e) for e in exps])
    inv_embed = {int(v): s for s, v in enumerate(embed)}
    if any(int(c) not in inv_embed for c in g_big):
        raise DimensionUnreachable("generator polynomial escapes the symbol field")
    g = np.array([inv_embed[int(c)] for c in g_big], dtype=np.int64)
    return CyclicInfo(length, g, big, embed, step, n_consec, exps)


def nb_bch_generator(field: FieldSpec, length: int, target_K: int) -> np.ndarray:
    """Narrow-sense BCH code over ``field`` of the given length and dimension.

    The designed distance is increased from 2 until the dimension drops to
    ``target_K`` or below; anything but an exact hit is an error.
    """
    if not 1 <= target_K <= length:
        raise InvalidDimension(f"K={target_K} outside [1, {length}]")
    info = _bch_cyclic(field, length, target_K)
    return generator_from_poly(info.gen_poly, length)


def extend(field: FieldSpec, gen) -> np.ndarray:
    """Append an overall parity column (the XOR of each row)."""
    gen = np.asarray(gen, dtype=np.int64)
    parity = np.bitwise_xor.reduce(gen, axis=1) if gen.shape[1] else np.zeros(gen.shape[0], np.int64)
    return np.concatenate([gen, parity[:, None]], axis=1)


def encode(code: CodeSpec, m) -> np.ndarray:
    m = np.asarray(m, dtype=np.int64)
    if m.shape != (code.K,):
        raise LengthMismatch(f"message length {m.shape} != K={code.K}")
    return code.field.dot(m, code.gen)


def reed_solomon(r: int, K: int, extended: bool = True, field: FieldSpec | None = None) -> CodeSpec:
    field = field or make_field(r)
    gen = rs_generator(field, K)
    info = _rs_cyclic(field, K)
    params = {"roots": f"alpha^1..alpha^{info.n_consecutive}", "designed_distance": info.n_consecutive + 1}
    if extended:
        return CodeSpec(field, field.q, K, extend(field, gen), "eRS", params, info, extended=True)
    return CodeSpec(field, field.order, K, gen, "RS", params, info)


def nb_bch(r: int, length: int, K: int, extended: bool = True, field: FieldSpec | None = None) -> CodeSpec:
    field = field or make_field(r)
    if not 1 <= K <= length:
        raise InvalidDimension(f"K={K} outside [1, {length}]")
    info = _bch_cyclic(field, length, K)
    gen = generator_from_poly(info.gen_poly, length)
    params = {"root_field": info.root_field.describe(),
              "designed_distance": info.n_consecutive + 1,
              "root_exponents": " ".join(map(str, info.root_exponents))}
    if extended:
        return CodeSpec(field, length + 1, K, extend(field, gen), "NB-eBCH", params, info, extended=True)
    return CodeSpec(field, length, K, gen, "NB-BCH", params, info)


# plain-text matrix files -------------------------------------------------

def load_code(path) -> CodeSpec:
    """Read ``r N K primitive_poly`` followed by K rows of N integers."""
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise ValueError(f"{path}: empty code file")
    head = lines[0].split()
    if len(head) != 4:
        raise ValueError(f"{path}: header must be 'r N K primitive_poly'")
    r, N, K = (int(x) for x in head[:3])
    field = make_field(r, int(head[3], 0))
    rows = [[int(x) for x in ln.split()] for ln in lines[1:]]
    if len(rows) != K or any(len(row) != N for row in rows):
        raise LengthMismatch(f"{path}: expected {K} rows of {N} entries")
    return CodeSpec(field, N, K, np.array(rows, dtype=np.int64).reshape(K, N), "custom")


def save_code(code: CodeSpec, path) -> None:
    out = [f"{code.field.r} {code.N} {code.K} {code.field.primitive_poly:#x}"]
    out += [" ".join(str(int(x)) for x in row) for row in code.gen]
    Path(path).write_text("\n".join(out) + "\n")
