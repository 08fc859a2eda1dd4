"""Command line front end.

Exit codes: 0 success, 1 runtime failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import configparser
import re
import sys
from pathlib import Path

import numpy as np

from . import codes as codes_mod
from .errors import ConfigInvalid, NbsclError
from .polar_map import build_mapping, decompose, ga_reliabilities, polar_encode, polar_inputs, sc_union_bound
from .scl_decoder import prune_full, prune_r_step
from .simulator import DecoderSpec, StopRule, fer_csv, run_fer

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2

SCHEMA = {
    "code": {"family", "r", "k", "length", "file", "primitive_poly"},
    "decoder": {"kind", "list_size", "sorter", "f_mode", "eta", "metric"},
    "simulation": {"snr_db", "seed", "target_errors", "max_frames", "batch", "threads"},
    "output": {"fer_csv"},
}
REQUIRED = {"code": {"family"}, "decoder": {"kind"}, "simulation": {"snr_db"}}
FAMILIES = ("eRS", "NB-eBCH", "custom")


# config handling ----------------------------------------------------------------

def _line_index(text: str):
    """Map (section, key) and section names to 1-based line numbers."""
    where, section = {}, None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip().lower()
            where.setdefault(section, no)
        elif section and line and line[0] not in "#;" and ("=" in line or ":" in line):
            key = re.split(r"[=:]", line, 1)[0].strip().lower()
            where.setdefault((section, key), no)
    return where


def parse_snr_list(value: str):
    value = value.strip()
    m = re.fullmatch(r"([-\d.]+)\s*:\s*([-\d.]+)\s*:\s*([-\d.]+)", value)
    if m:
        lo, hi, step = (float(x) for x in m.groups())
        if step <= 0:
            raise ValueError("step must be positive")
        count = int(round((hi - lo) / step)) + 1
        return [round(lo + i * step, 10) for i in range(count)]
    return [float(x) for x in re.split(r"[,\s]+", value) if x]


class RunConfig:
    """Validated simulation config read from an INI-style file."""

    def __init__(self, path):
        self.path = Path(path)
        try:
            text = self.path.read_text()
        except OSError as exc:
            raise ConfigInvalid(f"cannot read {path}: {exc}") from None
        lines = _line_index(text)
        cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        try:
            cp.read_string(text, source=str(path))
        except configparser.Error as exc:
            lineno = getattr(exc, "lineno", None)
            raise ConfigInvalid(str(exc).splitlines()[0], lineno) from None

        for sec in cp.sections():
            if sec not in SCHEMA:
                raise ConfigInvalid(f"unknown section [{sec}]", lines.get(sec.lower()))
            for key in cp[sec]:
                if key not in SCHEMA[sec]:
                    raise ConfigInvalid(f"unknown key {key!r} in [{sec}]", lines.get((sec.lower(), key)))
        for sec, keys in REQUIRED.items():
            if sec not in cp:
                raise ConfigInvalid(f"missing section [{sec}]")
            for key in keys:
                if key not in cp[sec]:
                    raise ConfigInvalid(f"missing key {key!r} in [{sec}]", lines.get(sec))

        def get(sec, key, conv, default=None):
            if sec not in cp or key not in cp[sec]:
                return default
            raw = cp[sec][key]
            try:
                return conv(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigInvalid(f"bad value {raw!r} for {key}: {exc}", lines.get((sec, key))) from None

        intc = lambda s: int(s, 0)
        self.family = get("code", "family", str)
        if self.family not in FAMILIES:
            raise ConfigInvalid(f"family must be one of {FAMILIES}", lines.get(("code", "family")))
        self.r = get("code", "r", intc)
        self.K = get("code", "k", intc)
        self.length = get("code", "length", intc)
        self.code_file = get("code", "file", str)
        self.primitive_poly = get("code", "primitive_poly", intc)
        if self.family == "custom" and not self.code_file:
            raise ConfigInvalid("custom family needs 'file'", lines.get(("code", "family")))
        if self.family != "custom" and (self.r is None or self.K is None):
            raise ConfigInvalid(f"{self.family} needs 'r' and 'K'", lines.get("code"))
        if self.family == "NB-eBCH" and self.length is None:
            raise ConfigInvalid("NB-eBCH needs 'length'", lines.get("code"))

        try:
            self.decoder = DecoderSpec(
                kind=get("decoder", "kind", str),
                list_size=get("decoder", "list_size", intc, 1),
                sorter=get("decoder", "sorter", str, "r_step"),
                f_mode=get("decoder", "f_mode", str, "exact"),
                eta=get("decoder", "eta", intc, 0),
                metric=get("decoder", "metric", str, "hard"))
        except ConfigInvalid as exc:
            raise ConfigInvalid(str(exc), lines.get("decoder")) from None
        if self.decoder.sorter not in ("full", "r_step"):
            raise ConfigInvalid("sorter must be 'full' or 'r_step'", lines.get(("decoder", "sorter")))
        if self.decoder.f_mode not in ("exact", "minsum"):
            raise ConfigInvalid("f_mode must be 'exact' or 'minsum'", lines.get(("decoder", "f_mode")))

        self.snrs = get("simulation", "snr_db", parse_snr_list)
        if not self.snrs:
            raise ConfigInvalid("empty SNR list", lines.get(("simulation", "snr_db")))
        self.seed = get("simulation", "seed", intc, 0)
        self.threads = get("simulation", "threads", intc, 1)
        try:
            self.stop = StopRule(get("simulation", "target_errors", intc, 200),
                                 get("simulation", "max_frames", intc, 10 ** 6),
                                 get("simulation", "batch", intc, 100))
        except ConfigInvalid as exc:
            raise ConfigInvalid(str(exc), lines.get("simulation")) from None
        self.fer_csv = get("output", "fer_csv", str)

    def build_code(self):
        try:
            return make_code(self.family, self.r, self.K, self.length, self.code_file, self.primitive_poly)
        except (NbsclError, ValueError, OSError) as exc:
            raise ConfigInvalid(f"cannot build code: {exc}") from None


def make_code(family, r=None, K=None, length=None, code_file=None, primitive_poly=None):
    if family == "custom":
        return codes_mod.load_code(code_file)
    from .galois import make_field
    field = make_field(r, primitive_poly)
    if family == "eRS":
        return codes_mod.reed_solomon(r, K, field=field)
    if family == "NB-eBCH":
        return codes_mod.nb_bch(r, length, K, field=field)
    raise ConfigInvalid(f"unknown family {family!r}")


# subcommands ---------------------------------------------------------------------

def cmd_simulate(args) -> int:
    try:
        cfg = RunConfig(args.config)
        code = cfg.build_code()
    except ConfigInvalid as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    seed = cfg.seed if args.seed is None else args.seed
    threads = args.threads or cfg.threads
    out = args.out or cfg.fer_csv
    try:
        results = run_fer(code, cfg.decoder, cfg.snrs, cfg.stop, seed=seed, threads=threads)
        text = fer_csv(results, {"config": cfg.path.name, "target_errors": cfg.stop.target_errors,
                                 "max_frames": cfg.stop.max_frames, "batch": cfg.stop.batch})
        if out:
            Path(out).write_text(text)
        else:
            sys.stdout.write(text)
    except Exception as exc:  # noqa: BLE001 - reported through the exit code
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def _code_from_args(args):
    if args.config:
        return RunConfig(args.config).build_code()
    if args.family is None:
        raise ConfigInvalid("give --config, or --family with its parameters")
    try:
        return make_code(args.family, args.r, args.K, args.length, args.code_file, args.poly)
    except (NbsclError, ValueError, TypeError, OSError) as exc:
        raise ConfigInvalid(str(exc)) from None


def _degenerate_length(args):
    """Code length for a zero-dimension request, or None if K > 0."""
    if args.config or args.K != 0 or args.family not in ("eRS", "NB-eBCH"):
        return None
    if args.r is None or not 1 <= args.r <= 16:
        raise ConfigInvalid("need 1 <= r <= 16")
    if args.family == "eRS":
        return 1 << args.r
    if args.length is None or args.length < 1:
        raise ConfigInvalid("NB-eBCH needs a positive 'length'")
    return args.length + 1


def cmd_analyze(args) -> int:
    try:
        N = _degenerate_length(args)
        if N is None:
            code = _code_from_args(args)
            mapping = build_mapping(code)
            N, name, field_desc, info_set = code.N, code.name, code.field.describe(), mapping.info_set
        else:
            # K = 0: every index is frozen and the bound is empty
            from .galois import make_field
            if N & (N - 1):
                raise ConfigInvalid(f"code length {N} is not a power of two")
            name = f"({N}, 0) {args.family}"
            field_desc = make_field(args.r, args.poly).describe()
            info_set = np.zeros(0, dtype=np.int64)
    except (ConfigInvalid, NbsclError) as exc:
        print(f"invalid code: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    # a zero-rate code has no Eb; fall back to one information symbol
    rate = max(len(info_set), 1) / N
    rel = ga_reliabilities(N.bit_length() - 1, args.snr, rate)
    bound = sc_union_bound(rel, info_set)
    zero_in = 0 in set(info_set.tolist())
    header = [f"# code: {name}", f"# field: {field_desc}", f"# design_snr_db: {args.snr}",
              f"# info_set: {' '.join(map(str, info_set.tolist()))}",
              f"# zero_in_info_set: {str(zero_in).lower()}", f"# union_bound: {bound:.6e}"]
    rows = ["index,pe,in_info_set"]
    info = set(info_set.tolist())
    rows += [f"{i},{p:.6e},{int(i in info)}" for i, p in enumerate(rel.pe)]
    text = "\n".join(header + rows) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"union bound {bound:.6e}; index 0 {'in' if zero_in else 'not in'} information set")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def sortbench(r: int, L: int, trials: int, seed: int = 0):
    """Random pruning instances; returns (passes, mean full comparisons,
    mean r-step comparisons).  Metrics and LLRs are multiples of 2^-16 so
    every sum is exact and survivors can be compared bit for bit."""
    rng = np.random.default_rng(seed)
    passes, cf, cr = 0, 0, 0
    for _ in range(trials):
        P = L if rng.random() < 0.8 else int(rng.integers(1, L + 1))
        pm = np.round(rng.exponential(20.0, P) * 2 ** 16) / 2 ** 16
        lam = np.round(rng.normal(0.0, 4.0, (P, r)) * 2 ** 16) / 2 ** 16
        mf, _, _, c1 = prune_full(pm, lam, L)
        mr, _, _, c2 = prune_r_step(pm, lam, L)
        passes += np.array_equal(np.sort(mf), np.sort(mr))
        cf += c1
        cr += c2
    return passes, cf / trials, cr / trials


def cmd_sortbench(args) -> int:
    if not (1 <= args.r <= 8 and 1 <= args.L <= 1024 and args.trials >= 1):
        print("need 1 <= r <= 8, 1 <= L <= 1024, trials >= 1", file=sys.stderr)
        return EXIT_CONFIG
    passes, cf, cr = sortbench(args.r, args.L, args.trials, args.seed)
    print("r,L,trials,equivalent,mean_comparisons_full,mean_comparisons_r_step")
    print(f"{args.r},{args.L},{args.trials},{passes},{cf:.1f},{cr:.1f}")
    return EXIT_OK if passes == args.trials else EXIT_RUNTIME


def cmd_encode(args) -> int:
    try:
        code = _code_from_args(args)
        mapping = build_mapping(code)
    except (ConfigInvalid, NbsclError) as exc:
        print(f"invalid code: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.message:
        m = np.array([int(x, 0) for x in re.split(r"[,\s]+", args.message.strip())], dtype=np.int64)
    else:
        m = np.random.default_rng(args.seed).integers(0, code.field.q, code.K)
    try:
        c = codes_mod.encode(code, m)
        comps = decompose(mapping, c)
    except NbsclError as exc:
        print(f"encode failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    u = polar_inputs(mapping, c)
    print(f"# {code.name}, {code.field.describe()}")
    print("info_set:", " ".join(map(str, mapping.info_set.tolist())))
    print("message: ", " ".join(map(str, m.tolist())))
    print("codeword:", " ".join(map(str, c.tolist())))
    print("polar_encode matches:", bool(np.array_equal(polar_encode(mapping, m), c)))
    for j in range(code.field.r):
        print(f"c_{j}:", "".join(map(str, comps[j].tolist())), f" u_{j}:", "".join(map(str, u[j].tolist())))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nbscl", description="SCL decoding of non-binary codes via polar decomposition")
    sub = p.add_subparsers(dest="command", required=True)

    def code_opts(sp):
        sp.add_argument("--config", help="config file whose [code] section defines the code")
        sp.add_argument("--family", choices=FAMILIES)
        sp.add_argument("--r", type=int)
        sp.add_argument("--K", type=int)
        sp.add_argument("--length", type=int, help="cyclic length (NB-eBCH)")
        sp.add_argument("--code-file", help="matrix file (custom family)")
        sp.add_argument("--poly", type=lambda s: int(s, 0), help="primitive polynomial bitmask")

    sp = sub.add_parser("simulate", help="run an FER sweep from a config file")
    sp.add_argument("--config", required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--threads", type=int)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("analyze", help="subchannel reliabilities and the SC union bound")
    code_opts(sp)
    sp.add_argument("--snr", type=float, default=6.0, help="design Eb/N0 in dB")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("sortbench", help="full vs r-step pruning comparisons")
    sp.add_argument("--r", type=int, default=5)
    sp.add_argument("--L", type=int, default=32)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_sortbench)

    sp = sub.add_parser("encode", help="dump message, codeword and binary decomposition")
    code_opts(sp)
    sp.add_argument("--message", help="K field elements, space or comma separated")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_encode)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
