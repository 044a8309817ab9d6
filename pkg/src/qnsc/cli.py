"""Command-line front end.

Subcommands: simulate, sweep, srm, encrypt, decrypt, attack, report.
Exit codes: 0 on success, 1 for configuration problems (bad flags,
unparseable config file, invalid parameter combinations, missing files),
2 for numeric failures inside a computation.

Configuration is resolved in layers: built-in scenario defaults, then the
flat key=value config file (# starts a comment), then command-line
flags.  The seed falls back to the QNSC_SEED environment variable when
neither a flag nor the config provides one.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import time

import numpy as np

from . import report
from .adversary import (
    NumericInstabilityError,
    PskConstellation,
    eve_decode_block,
    gram_srm_brute,
    srm_error_psk,
)
from .analytics import SystemParams
from .experiment import (
    CSV_COLUMNS,
    CSV_SCHEMA,
    ExperimentConfig,
    PURPOSE_ATTACK,
    PURPOSE_DECRYPT,
    dumps_canonical,
    record_csv_row,
    record_to_json,
    results_csv,
    run_simulate,
    shard_rng,
    wilson_halfwidth,
)
from .keystream import SecretKey
from .transceiver import Frame, stream_decrypt, stream_encrypt

SEED_ENV_VAR = "QNSC_SEED"

# Built-in operating points.  The plain demonstration point uses the
# recommended analytic parameters as-is; the -stream variant rounds the
# mode and grid counts up to powers of two so plaintext bits and key bits
# pack exactly, which the cipher path requires.
SCENARIOS = {
    "paper-sec5": SystemParams(
        m_modes=10,
        j_phases=60000,
        alpha_sq=1000.0,
        sigma_ho=0.25,
        sigma_he=1.0,
        b_base_hz=1e9,
        lambda_factor=20.0,
        b_s_hz=1e9,
        key_bits=256,
    ),
    "paper-sec5-stream": SystemParams(
        m_modes=16,
        j_phases=65536,
        alpha_sq=1000.0,
        sigma_ho=0.25,
        sigma_he=1.0,
        b_base_hz=1e9,
        lambda_factor=32.0,
        b_s_hz=1e9,
        key_bits=256,
    ),
}

DEFAULT_SCENARIO = "paper-sec5"
DEFAULT_TRIALS = 100_000


class ConfigError(Exception):
    """Anything wrong with flags, config files, or parameter values."""


class _Parser(argparse.ArgumentParser):
    # Flag mistakes are configuration mistakes: exit 1, not argparse's 2.
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


# --- config file ------------------------------------------------------------

_PARAM_KEYS = {
    "m_modes": int,
    "j_phases": int,
    "alpha_sq": float,
    "sigma_ho": float,
    "sigma_he": float,
    "b_base_hz": float,
    "lambda_factor": float,
    "b_s_hz": float,
    "key_bits": int,
}

_LIST_KEYS = {"sweep_j": int, "sweep_m": int, "sweep_alpha_sq": float}

_OTHER_KEYS = {
    "scenario": str,
    "trials": int,
    "seed": int,
    "shards": int,
    "format": str,
    "out": str,
    "key_hex": str,
}

_ALL_KEYS = {**_PARAM_KEYS, **_LIST_KEYS, **_OTHER_KEYS}


def parse_config_file(path: str) -> dict:
    """Flat key=value file into {key: (parsed_value, line_no)}."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    out = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        if key in _LIST_KEYS:
            conv = _LIST_KEYS[key]
            items = [v.strip() for v in value.split(",") if v.strip()]
            try:
                parsed = [conv(v) for v in items]
            except ValueError as exc:
                raise ConfigError(f"{path}:{line_no}: field {key!r}: {exc}") from exc
        else:
            conv = _ALL_KEYS[key]
            try:
                parsed = conv(value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{line_no}: field {key!r}: {exc}") from exc
        out[key] = (parsed, line_no)
    return out


def _resolve(args) -> dict:
    """Layer defaults, scenario, config file, env, then flags."""
    cfg = parse_config_file(args.config) if args.config else {}

    def from_cfg(key, default=None):
        return cfg[key][0] if key in cfg else default

    scenario = args.scenario or from_cfg("scenario") or DEFAULT_SCENARIO
    if scenario not in SCENARIOS:
        known = ", ".join(sorted(SCENARIOS))
        raise ConfigError(f"unknown scenario {scenario!r} (known: {known})")
    overrides = {k: cfg[k][0] for k in _PARAM_KEYS if k in cfg}
    try:
        params = dataclasses.replace(SCENARIOS[scenario], **overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    seed = args.seed
    if seed is None:
        seed = from_cfg("seed")
    if seed is None and os.environ.get(SEED_ENV_VAR):
        text = os.environ[SEED_ENV_VAR]
        try:
            seed = int(text)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {text!r}") from exc
    if seed is None:
        seed = 0
    if not 0 <= seed < 2**64:
        raise ConfigError(f"seed must fit an unsigned 64-bit integer, got {seed}")

    trials = args.trials if args.trials is not None else from_cfg("trials", DEFAULT_TRIALS)
    shards = args.shards if args.shards is not None else from_cfg("shards", 1)
    fmt = args.format or from_cfg("format", "json")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    out = args.out or from_cfg("out")
    return {
        "scenario": scenario,
        "params": params,
        "trials": trials,
        "seed": seed,
        "shards": shards,
        "format": fmt,
        "out": out,
        "cfg_file": cfg,
    }


def _load_key(args, cfg_file) -> SecretKey:
    if getattr(args, "key", None):
        return SecretKey.from_hex(args.key)
    if getattr(args, "key_file", None):
        try:
            return SecretKey.from_file(args.key_file)
        except OSError as exc:
            raise ConfigError(f"cannot read key file: {exc}") from exc
    if "key_hex" in cfg_file:
        return SecretKey.from_hex(cfg_file["key_hex"][0])
    raise ConfigError("a secret key is required (--key, --key-file, or key_hex in config)")


# --- subcommands ------------------------------------------------------------


def cmd_simulate(args) -> int:
    r = _resolve(args)
    cfg = ExperimentConfig(
        params=r["params"],
        trials=r["trials"],
        master_seed=r["seed"],
        shards=r["shards"],
        scenario=r["scenario"],
    )
    rec = run_simulate(cfg)
    json_text = record_to_json(rec)
    csv_text = results_csv([record_csv_row(rec)])
    if r["out"]:
        with open(r["out"] + ".json", "w", encoding="utf-8") as f:
            f.write(json_text)
        with open(r["out"] + ".csv", "w", encoding="utf-8") as f:
            f.write(csv_text)
    sys.stdout.write(csv_text if r["format"] == "csv" else json_text)
    print(f"simulate: wall time {rec.wall_time_s:.3f} s", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    r = _resolve(args)
    cfg_file = r["cfg_file"]

    def axis(key, fallback):
        if key in cfg_file:
            values = cfg_file[key][0]
            if not values:
                raise ConfigError(f"sweep range {key!r} is empty")
            return values
        return [fallback]

    p = r["params"]
    j_axis = axis("sweep_j", p.j_phases)
    m_axis = axis("sweep_m", p.m_modes)
    a2_axis = axis("sweep_alpha_sq", p.alpha_sq)
    points = sorted(
        ((j, m, a2) for j in j_axis for m in m_axis for a2 in a2_axis),
        key=lambda t: (t[0], t[1], t[2]),
    )
    rows = []
    for j, m, a2 in points:
        params = dataclasses.replace(p, j_phases=j, m_modes=m, alpha_sq=a2)
        cfg = ExperimentConfig(
            params=params,
            trials=r["trials"],
            master_seed=r["seed"],
            shards=r["shards"],
            scenario=r["scenario"],
        )
        rows.append(record_csv_row(run_simulate(cfg)))
    text = results_csv(rows)
    if r["out"]:
        with open(r["out"], "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_srm(args) -> int:
    r = _resolve(args)
    p = r["params"]
    c = PskConstellation(p.alpha_mag, p.j_phases)
    closed = srm_error_psk(c, p.m_modes)
    brute = None
    agreement = None
    if p.j_phases <= 16:
        one_mode = gram_srm_brute(c.states())
        brute = 1.0 - (1.0 - one_mode) ** p.m_modes
        agreement = abs(brute - closed)
    doc = {
        "schema": "qnsc-srm-v1",
        "scenario": r["scenario"],
        "m_modes": p.m_modes,
        "j_phases": p.j_phases,
        "alpha_sq": p.alpha_sq,
        "srm_error": closed,
        "gram_brute_error": brute,
        "agreement": agreement,
    }
    text = dumps_canonical(doc) + "\n"
    if r["out"]:
        with open(r["out"], "w", encoding="utf-8") as f:
            f.write(text)
    sys.stdout.write(text)
    return 0


def cmd_encrypt(args) -> int:
    r = _resolve(args)
    p = r["params"]
    key = _load_key(args, r["cfg_file"])
    try:
        with open(args.infile, "rb") as f:
            payload = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read input: {exc}") from exc
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))
    try:
        frame = stream_encrypt(bits, key, p.m_modes, p.j_phases, p.alpha_mag)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    with open(args.out, "wb") as f:
        f.write(frame.to_bytes())
    print(
        f"encrypt: {bits.size} bits -> {len(frame.codewords)} codewords "
        f"(M={p.m_modes}, J={p.j_phases})",
        file=sys.stderr,
    )
    return 0


def _read_frame(path: str) -> Frame:
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read ciphertext: {exc}") from exc
    try:
        return Frame.from_bytes(raw)
    except ValueError as exc:
        raise ConfigError(f"bad ciphertext frame: {exc}") from exc


def cmd_decrypt(args) -> int:
    r = _resolve(args)
    key = _load_key(args, r["cfg_file"])
    frame = _read_frame(args.infile)
    sigma = args.sigma_ho if args.sigma_ho is not None else r["params"].sigma_ho
    rng = shard_rng(r["seed"], PURPOSE_DECRYPT, 0)
    try:
        bits = stream_decrypt(frame, key, sigma_ho=sigma, rng=rng)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if bits.size % 8 != 0:
        raise ConfigError("recovered bit count is not a whole number of bytes")
    data = np.packbits(bits.astype(np.uint8)).tobytes()
    with open(args.out, "wb") as f:
        f.write(data)
    print(f"decrypt: {bits.size} bits recovered", file=sys.stderr)
    return 0


def cmd_attack(args) -> int:
    """Key-less interception: estimate phase indices, assume an all-zero key.

    Under that assumption the plaintext mode should sit at the half-turn
    index J/2, so the guess is the mode whose estimated index is
    circularly closest to J/2.  The running key makes the true indices
    uniform, so this recovers nothing better than chance; the point of
    the command is to measure that.
    """
    r = _resolve(args)
    p = r["params"]
    frame = _read_frame(args.infile)
    m, j = frame.m_modes, frame.j_phases
    sigma = args.sigma_he if args.sigma_he is not None else p.sigma_he
    rng = shard_rng(r["seed"], PURPOSE_ATTACK, 0)
    half = j // 2
    bps = max(m.bit_length() - 1, 1)
    bits = np.zeros(len(frame.codewords) * bps, dtype=np.int64)
    for i, cw in enumerate(frame.codewords):
        est = np.asarray(eve_decode_block(cw, j, sigma, rng))
        dist = np.minimum((est - half) % j, (half - est) % j)
        val = int(np.argmin(dist))
        for b in range(bps):
            bits[i * bps + b] = (val >> (bps - 1 - b)) & 1
    if frame.pad_bits:
        bits = bits[: -frame.pad_bits]
    doc = {
        "schema": "qnsc-attack-v1",
        "m_modes": m,
        "j_phases": j,
        "sigma_he": sigma,
        "n_codewords": len(frame.codewords),
        "n_bits": int(bits.size),
        "seed": r["seed"],
    }
    if args.truth:
        try:
            with open(args.truth, "rb") as f:
                true_bits = np.unpackbits(np.frombuffer(f.read(), dtype=np.uint8))
        except OSError as exc:
            raise ConfigError(f"cannot read truth file: {exc}") from exc
        if true_bits.size != bits.size:
            raise ConfigError(
                f"truth has {true_bits.size} bits but attack recovered {bits.size}"
            )
        matches = int(np.count_nonzero(true_bits == bits))
        doc["bit_matches"] = matches
        doc["bit_recovery_rate"] = matches / bits.size if bits.size else 0.0
        doc["bit_recovery_ci"] = wilson_halfwidth(matches, int(bits.size))
    if args.out:
        data = np.packbits(bits.astype(np.uint8)).tobytes()
        with open(args.out, "wb") as f:
            f.write(data)
    sys.stdout.write(dumps_canonical(doc) + "\n")
    return 0


def cmd_report(args) -> int:
    r = _resolve(args)
    p = r["params"]
    cfg_file = r["cfg_file"]
    j_values = cfg_file["sweep_j"][0] if "sweep_j" in cfg_file else [
        64, 256, 1024, 4096, 16384, 65536
    ]
    a2_values = (
        cfg_file["sweep_alpha_sq"][0]
        if "sweep_alpha_sq" in cfg_file
        else [1.0, 10.0, 100.0, 1000.0]
    )
    if not j_values or not a2_values:
        raise ConfigError("report sweep ranges must be non-empty")
    out_dir = r["out"] or "report"
    t0 = time.monotonic()
    rows = report.report_rows(p, j_values, a2_values)
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "report.csv")
    with open(csv_path, "w", encoding="utf-8") as f:
        f.write(report.rows_to_csv(rows))
    figures = report.render_figures(p, rows, out_dir)
    print(f"report: wall time {time.monotonic() - t0:.3f} s", file=sys.stderr)
    for path in [csv_path] + figures:
        print(path)
    return 0


# --- entry point ------------------------------------------------------------


def _add_common(sp) -> None:
    sp.add_argument("--config", metavar="PATH", help="flat key=value config file")
    sp.add_argument("--seed", type=int, metavar="U64", help="master seed")
    sp.add_argument("--trials", type=int, metavar="N", help="Monte Carlo trials")
    sp.add_argument("--shards", type=int, metavar="N", help="independent MC shards")
    sp.add_argument("--out", metavar="PATH", help="output path (see each command)")
    sp.add_argument("--format", choices=("csv", "json"), help="stdout format")
    sp.add_argument("--scenario", metavar="NAME", help="built-in operating point")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qnsc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="one operating point: analytics + Monte Carlo")
    _add_common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="Cartesian sweep over J, M, alpha_sq")
    _add_common(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("srm", help="collective-measurement error with brute cross-check")
    _add_common(sp)
    sp.set_defaults(func=cmd_srm)

    sp = sub.add_parser("encrypt", help="encrypt a file into a ciphertext frame")
    _add_common(sp)
    sp.add_argument("--in", dest="infile", required=True, metavar="PATH")
    sp.add_argument("--key", metavar="HEX", help="secret key, lowercase hex")
    sp.add_argument("--key-file", metavar="PATH", help="file holding the hex key")
    sp.set_defaults(func=cmd_encrypt)

    sp = sub.add_parser("decrypt", help="decrypt a ciphertext frame with the key")
    _add_common(sp)
    sp.add_argument("--in", dest="infile", required=True, metavar="PATH")
    sp.add_argument("--key", metavar="HEX", help="secret key, lowercase hex")
    sp.add_argument("--key-file", metavar="PATH", help="file holding the hex key")
    sp.add_argument("--sigma-ho", type=float, metavar="S", help="receiver noise override")
    sp.set_defaults(func=cmd_decrypt)

    sp = sub.add_parser("attack", help="key-less interception of a ciphertext frame")
    _add_common(sp)
    sp.add_argument("--in", dest="infile", required=True, metavar="PATH")
    sp.add_argument("--truth", metavar="PATH", help="original plaintext for scoring")
    sp.add_argument("--sigma-he", type=float, metavar="S", help="interceptor noise override")
    sp.set_defaults(func=cmd_attack)

    sp = sub.add_parser("report", help="analytic sweep: CSV plus rendered figures")
    _add_common(sp)
    sp.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"qnsc: config error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"qnsc: config error: {exc}", file=sys.stderr)
        return 1
    except NumericInstabilityError as exc:
        print(f"qnsc: numeric failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
