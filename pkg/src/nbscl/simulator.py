"""BPSK/AWGN channel, Monte Carlo FER estimation and operation-count reports.

Every frame draws its message and noise from a Philox stream keyed by the run
seed with the frame index in the counter, so any frame can be regenerated on
its own and results do not depend on how frames are split across workers.
Decoders run on the same seed therefore see identical frames (common random
numbers).
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from .baseline import ChaseBmDecoder, _bm_kernel, _root_tables, OK
from .codes import CodeSpec, encode
from .errors import ConfigInvalid
from .matrix import apply_inverse_permutation
from .polar_map import PolarMapping, build_mapping, symbols_to_bits
from .scl_decoder import LLR_CLIP, DecodeResult, SclDecoder

COUNT_CONVENTION = "ops-v1"
DECODER_KINDS = ("sc", "scl", "bm", "chase-bm", "ml")


@dataclass(frozen=True)
class ChannelConfig:
    ebn0_db: float
    code_rate: float
    seed: int = 0
    noiseless: bool = False

    def __post_init__(self):
        if not 0 < self.code_rate <= 1:
            raise ConfigInvalid(f"code rate {self.code_rate} outside (0, 1]")

    @property
    def noise_var(self) -> float:
        """``N0 / 2`` with ``Eb`` counted per information bit."""
        return 1.0 / (2.0 * self.code_rate * 10.0 ** (self.ebn0_db / 10.0))


@dataclass
class OpCounters:
    field_ops: int = 0
    flops: int = 0

    def add(self, res: DecodeResult):
        self.field_ops += res.field_ops
        self.flops += res.flops


def frame_rng(seed: int, frame: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & (2 ** 64 - 1),
                                                counter=[0, 0, 0, int(frame)]))


def random_message(code: CodeSpec, rng: np.random.Generator) -> np.ndarray:
    return rng.integers(0, code.field.q, size=code.K, dtype=np.int64)


def transmit(c, cfg: ChannelConfig, rng: np.random.Generator, r: int | None = None) -> np.ndarray:
    """BPSK over AWGN.  Returns ``y`` of shape (N, r); ``y.ravel()`` follows
    the binary-composition order ``c_{0,0} .. c_{0,r-1}, c_{1,0}, ...``."""
    c = np.asarray(c, dtype=np.int64)
    if r is None:
        r = max(int(c.max()).bit_length(), 1)
    bits = symbols_to_bits(c, r).T
    noise = rng.standard_normal(bits.shape)
    if cfg.noiseless:
        noise[:] = 0.0
    return (1.0 - 2.0 * bits) + math.sqrt(cfg.noise_var) * noise


def channel_llrs(y, cfg: ChannelConfig, mapping: PolarMapping | None = None) -> np.ndarray:
    """Bit LLRs ``2 y / sigma^2`` regrouped to (r, N) and clipped.

    With a mapping the columns are de-permuted (``y P^{-1}``) so that row j is
    the input of the j-th SC decoder; without one they stay in codeword order.
    """
    L = np.clip(2.0 * np.asarray(y, dtype=float).T / cfg.noise_var, -LLR_CLIP, LLR_CLIP)
    if mapping is not None:
        L = apply_inverse_permutation(L, mapping.perm, axis=1)
    return np.ascontiguousarray(L)


# decoders -------------------------------------------------------------------

@dataclass(frozen=True)
class DecoderSpec:
    kind: str = "scl"
    list_size: int = 1
    sorter: str = "r_step"
    f_mode: str = "exact"
    eta: int = 0
    metric: str = "hard"

    def __post_init__(self):
        if self.kind not in DECODER_KINDS:
            raise ConfigInvalid(f"unknown decoder {self.kind!r}")
        if self.kind == "scl" and self.list_size < 1:
            raise ConfigInvalid("list size must be positive")
        if self.metric not in ("hard", "llr"):
            raise ConfigInvalid(f"unknown path metric {self.metric!r}")
        if self.kind == "chase-bm" and self.eta < 0:
            raise ConfigInvalid("eta must be non-negative")

    @property
    def label(self) -> str:
        if self.kind == "scl":
            return f"SCL({self.list_size})"
        if self.kind == "chase-bm":
            return f"Chase-BM({self.eta})"
        return {"sc": "SC", "bm": "BM", "ml": "ML"}[self.kind]


class _PolarFrontEnd:
    def __init__(self, mapping, dec):
        self.mapping = mapping
        self.dec = dec

    def decode(self, y, cfg):
        return self.dec.decode(channel_llrs(y, cfg, self.mapping))


class _BmFrontEnd:
    def __init__(self, code):
        self.code = code
        self.tables = _root_tables(code)

    def decode(self, y, cfg):
        r = self.code.field.r
        hard = np.sum((np.asarray(y).T < 0).astype(np.int64) << np.arange(r)[:, None], axis=0)
        status, out, fops = _bm_kernel(np.ascontiguousarray(hard[:-1]), *self.tables)
        if status != OK:
            return DecodeResult(hard, hard, 0.0, int(fops), 0, success=False)
        par = int(np.bitwise_xor.reduce(out))
        cw = np.append(out, par)
        return DecodeResult(cw, cw, 0.0, int(fops) + len(out) - 1, 0)


class _ChaseFrontEnd:
    def __init__(self, code, eta):
        self.dec = ChaseBmDecoder(code, eta)

    def decode(self, y, cfg):
        return self.dec.decode(channel_llrs(y, cfg))


class MlDecoder:
    """Exhaustive maximum-likelihood decoding by codebook correlation.

    Only feasible for tiny codebooks (``q^K`` up to a few million).
    """

    MAX_CODEWORDS = 1 << 22

    def __init__(self, code: CodeSpec, chunk: int = 1 << 16):
        size = code.field.q ** code.K
        if size > self.MAX_CODEWORDS:
            raise ValueError(f"codebook of {size} words is too large for exhaustive ML")
        q, K, r = code.field.q, code.K, code.field.r
        msgs = (np.arange(size)[:, None] // q ** np.arange(K)[None, :]) % q
        cw = np.zeros((size, code.N), dtype=np.int64)
        for t in range(K):
            cw ^= code.field.mul_vec(msgs[:, t:t + 1], code.gen[t][None, :])
        self.code = code
        self.codewords = cw
        # bit j of symbol i sits in column j * N + i
        self._bits = np.concatenate([((cw >> j) & 1) for j in range(r)], axis=1).astype(np.float64)
        self.chunk = chunk

    def decode_batch(self, llrs) -> np.ndarray:
        """``llrs``: (B, r, N) in codeword order.  Returns indices of the most
        likely codewords (smallest sum of LLRs over the 1-bits)."""
        lam = np.asarray(llrs, dtype=np.float64).reshape(len(llrs), -1).T
        best_val = np.full(lam.shape[1], np.inf)
        best_idx = np.zeros(lam.shape[1], dtype=np.int64)
        for lo in range(0, len(self._bits), self.chunk):
            cost = self._bits[lo:lo + self.chunk] @ lam
            arg = np.argmin(cost, axis=0)
            val = cost[arg, np.arange(cost.shape[1])]
            better = val < best_val
            best_val[better] = val[better]
            best_idx[better] = arg[better] + lo
        return best_idx

    def decode(self, y, cfg):
        idx = self.decode_batch(channel_llrs(y, cfg)[None])[0]
        cw = self.codewords[idx]
        return DecodeResult(cw, cw, 0.0, 0, 0)


def make_decoder(code: CodeSpec, spec: DecoderSpec, mapping: PolarMapping | None = None):
    if spec.kind in ("sc", "scl"):
        mapping = mapping or build_mapping(code)
        L = 1 if spec.kind == "sc" else spec.list_size
        return _PolarFrontEnd(mapping, SclDecoder(mapping, L, spec.sorter, spec.f_mode, spec.metric))
    if spec.kind == "bm":
        return _BmFrontEnd(code)
    if spec.kind == "chase-bm":
        return _ChaseFrontEnd(code, spec.eta)
    return MlDecoder(code)


# Monte Carlo -----------------------------------------------------------------

@dataclass(frozen=True)
class StopRule:
    target_errors: int = 200
    max_frames: int = 10 ** 6
    batch: int = 100

    def __post_init__(self):
        if self.target_errors < 1 or self.max_frames < 1 or self.batch < 1:
            raise ConfigInvalid("stop rule values must be positive")


@dataclass
class SimResult:
    snr_db: float
    frames: int
    errors: int
    mean_field_ops: float
    mean_flops: float
    error_frames: list = dc_field(default_factory=list, repr=False)
    metadata: dict = dc_field(default_factory=dict, repr=False)

    @property
    def fer(self) -> float:
        return self.errors / self.frames if self.frames else 0.0

    @property
    def fer_std(self) -> float:
        p = self.fer
        return math.sqrt(p * (1 - p) / self.frames) if self.frames else 0.0


def simulate_frames(code, decoder, cfg: ChannelConfig, start: int, count: int):
    """Decode frames ``start .. start+count-1``.  Returns
    ``(error_frame_indices, field_ops, flops)``."""
    errors = []
    ops = OpCounters()
    r = code.field.r
    for k in range(start, start + count):
        rng = frame_rng(cfg.seed, k)
        c = encode(code, random_message(code, rng))
        y = transmit(c, cfg, rng, r)
        res = decoder.decode(y, cfg)
        ops.add(res)
        if not np.array_equal(res.codeword, c):
            errors.append(k)
    return errors, ops.field_ops, ops.flops


_worker = {}


def _worker_init(code, spec):
    _worker["code"] = code
    _worker["dec"] = make_decoder(code, spec)


def _worker_run(cfg, start, count):
    return simulate_frames(_worker["code"], _worker["dec"], cfg, start, count)


def run_fer(code: CodeSpec, spec: DecoderSpec, snrs, stop: StopRule = StopRule(), seed: int = 0,
            threads: int = 1, noiseless: bool = False, metadata: dict | None = None):
    """FER sweep; one :class:`SimResult` per SNR point.

    Frames are processed in batches of ``stop.batch``; a point ends after the
    first batch at which the error target is met, or at ``max_frames``.
    """
    snrs = [float(s) for s in snrs]
    if not snrs:
        raise ConfigInvalid("empty SNR list")
    if threads < 1:
        raise ConfigInvalid("threads must be positive")
    meta = run_metadata(code, spec, seed)
    meta.update(metadata or {})
    pool = None
    if threads > 1:
        pool = ProcessPoolExecutor(threads, initializer=_worker_init, initargs=(code, spec))
    else:
        decoder = make_decoder(code, spec)
    results = []
    try:
        for snr in snrs:
            cfg = ChannelConfig(snr, code.rate, seed, noiseless)
            frames, errs, fops, flops = 0, [], 0, 0
            while frames < stop.max_frames and len(errs) < stop.target_errors:
                starts = []
                for w in range(threads):
                    s = frames + w * stop.batch
                    if s < stop.max_frames:
                        starts.append(s)
                counts = [min(stop.batch, stop.max_frames - s) for s in starts]
                if pool is None:
                    outs = [simulate_frames(code, decoder, cfg, starts[0], counts[0])]
                else:
                    outs = list(pool.map(_worker_run, [cfg] * len(starts), starts, counts))
                for cnt, (e, fo, fl) in zip(counts, outs):
                    frames += cnt
                    errs.extend(e)
                    fops += fo
                    flops += fl
                    if len(errs) >= stop.target_errors:
                        break
            results.append(SimResult(snr, frames, len(errs), fops / frames, flops / frames,
                                     errs, dict(meta, ebn0_db=snr, noise_var=cfg.noise_var)))
    finally:
        if pool is not None:
            pool.shutdown()
    return results


def run_metadata(code: CodeSpec, spec: DecoderSpec, seed: int) -> dict:
    meta = {
        "code": code.name,
        "family": code.family,
        "N": code.N,
        "K": code.K,
        "field": code.field.describe(),
        "permutation": "alpha-power (column b -> alpha^b in GF(N), last column -> 0)",
        "seed": seed,
        "rng": "Philox4x64 key=seed counter=(0,0,0,frame)",
        "decoder": spec.label,
        "sorter": spec.sorter if spec.kind in ("sc", "scl") else "-",
        "f_mode": spec.f_mode if spec.kind in ("sc", "scl") else "-",
        "path_metric": spec.metric if spec.kind in ("sc", "scl") else "-",
        "count_convention": COUNT_CONVENTION,
    }
    meta.update({f"design.{k}": v for k, v in code.design_params.items()})
    return meta


# CSV output --------------------------------------------------------------------

FER_COLUMNS = ["snr_db", "frames", "errors", "fer", "mean_field_ops", "mean_flops"]


def _header_block(meta: dict) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in meta.items())


def fer_csv(results, metadata: dict | None = None) -> str:
    meta = dict(results[0].metadata if results else {})
    meta.pop("ebn0_db", None)
    meta.pop("noise_var", None)
    meta.update(metadata or {})
    buf = io.StringIO()
    buf.write(_header_block(meta))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FER_COLUMNS)
    for res in results:
        w.writerow([f"{res.snr_db:g}", res.frames, res.errors, f"{res.fer:.6e}",
                    f"{res.mean_field_ops:.6e}", f"{res.mean_flops:.6e}"])
    return buf.getvalue()


def count_report(results, metadata: dict | None = None) -> str:
    """Scheme vs mean field operations and FLOPs; all results must share a
    code and SNR."""
    if not results:
        raise ValueError("no results")
    codes = {res.metadata.get("code") for res in results}
    snrs = {res.snr_db for res in results}
    if len(codes) > 1 or len(snrs) > 1:
        raise ValueError("count report needs results for one code at one SNR")
    meta = {"code": codes.pop(), "ebn0_db": snrs.pop(), "count_convention": COUNT_CONVENTION}
    meta.update(metadata or {})
    buf = io.StringIO()
    buf.write(_header_block(meta))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme", "sorter", "f_mode", "frames", "mean_field_ops", "mean_flops"])
    for res in results:
        m = res.metadata
        w.writerow([m.get("decoder"), m.get("sorter"), m.get("f_mode"), res.frames,
                    f"{res.mean_field_ops:.4e}", f"{res.mean_flops:.4e}"])
    return buf.getvalue()


def result_dict(res: SimResult) -> dict:
    d = asdict(res)
    d["fer"] = res.fer
    return d
