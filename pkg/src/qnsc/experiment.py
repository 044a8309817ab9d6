"""Sharded Monte Carlo runners and the result records they fill.

Reproducibility contract: every random stream derives from
(master_seed, purpose, shard_index) through numpy's SeedSequence, shards
are processed in ascending index order with a fixed chunk size, and
error counts are integers, so a fixed (seed, shard count) pair gives
byte-identical results on every run and platform.  Changing the shard
count changes the draws (legitimately), not the statistics.

Serialized output: the JSON record keeps a fixed field order and formats
floats with 17 significant digits so two runs can be diffed byte for
byte; wall time is deliberately not part of the record (it would break
the diff) and goes to stderr instead.  The CSV schema is versioned by a
leading comment line.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import analytics
from .adversary import PskConstellation, srm_error_psk
from .analytics import SystemParams, underflowed_to_zero

# Stream purposes keep the per-quantity rngs independent of each other.
PURPOSE_BOB = 0
PURPOSE_EVE = 1
PURPOSE_CPPM = 2
PURPOSE_ATTACK = 3
PURPOSE_DECRYPT = 4
PURPOSE_WRONG_KEY = 5

_CHUNK = 250_000

CSV_SCHEMA = "qnsc-results-v1"
CSV_COLUMNS = [
    "scenario",
    "M",
    "J",
    "alpha_sq",
    "sigma_ho",
    "sigma_he",
    "trials",
    "bob_mc",
    "bob_ci",
    "bob_analytic_paper",
    "bob_analytic_exact",
    "eve_mc",
    "eve_ci",
    "eve_analytic_paper",
    "srm_error",
    "masking_ratio",
    "w_channel_hz",
    "seed",
]


def shard_rng(master_seed: int, purpose: int, shard: int) -> np.random.Generator:
    """Independent, reproducible stream for one (purpose, shard) cell."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, purpose, shard)))


def split_trials(total: int, shards: int) -> list:
    """Balanced per-shard trial counts; low shard indices take the remainder."""
    if total < 0:
        raise ValueError(f"trial count must be non-negative, got {total}")
    if shards < 1:
        raise ValueError(f"shard count must be at least 1, got {shards}")
    base, rem = divmod(total, shards)
    return [base + (1 if i < rem else 0) for i in range(shards)]


def wilson_interval(k: int, n: int, z: float = 1.959963984540054) -> tuple:
    """Wilson 95% score interval (lo, hi) for k successes in n trials."""
    if n <= 0:
        return 0.0, 1.0
    phat = k / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (phat + z2 / (2.0 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def wilson_halfwidth(k: int, n: int) -> float:
    lo, hi = wilson_interval(k, n)
    return (hi - lo) / 2.0


def bob_symbol_error_mc(
    m: int,
    alpha_mag: float,
    sigma_ho: float,
    trials: int,
    master_seed: int,
    shards: int = 1,
) -> int:
    """Errors of the minimum-quadrature rule over random symbols.

    Per trial, the signal mode reads N(-a, sigma^2), the others
    N(+a, sigma^2), and the decision is the argmin; this is the same rule
    as bob_decode on a derandomized codeword, vectorized.
    """
    errors = 0
    for shard, n in enumerate(split_trials(trials, shards)):
        rng = shard_rng(master_seed, PURPOSE_BOB, shard)
        done = 0
        while done < n:
            nc = min(_CHUNK, n - done)
            sym = rng.integers(0, m, size=nc)
            x = alpha_mag + sigma_ho * rng.standard_normal((nc, m))
            x[np.arange(nc), sym] -= 2.0 * alpha_mag
            errors += int(np.count_nonzero(np.argmin(x, axis=1) != sym))
            done += nc
    return errors


def eve_block_error_mc(
    m: int,
    j: int,
    alpha_mag: float,
    sigma_he: float,
    trials: int,
    master_seed: int,
    shards: int = 1,
) -> int:
    """Block errors of heterodyne nearest-phase interception.

    The randomized per-mode phases are modelled as uniform grid indices,
    which is exact for even J (a pi plaintext flip is a half-turn of an
    even grid, so the ciphertext ensemble stays uniform on the grid).
    """
    if j % 2 != 0:
        raise ValueError(f"ciphertext phase ensemble needs an even grid, got {j}")
    errors = 0
    for shard, n in enumerate(split_trials(trials, shards)):
        rng = shard_rng(master_seed, PURPOSE_EVE, shard)
        done = 0
        while done < n:
            nc = min(_CHUNK, n - done)
            truth = rng.integers(0, j, size=(nc, m))
            z = alpha_mag * np.exp(2j * np.pi * truth / j)
            z = z + sigma_he * (
                rng.standard_normal((nc, m)) + 1j * rng.standard_normal((nc, m))
            )
            est = np.mod(np.round(np.angle(z) * j / (2.0 * np.pi)).astype(np.int64), j)
            errors += int(np.count_nonzero(np.any(est != truth, axis=1)))
            done += nc
    return errors


def eve_index_error_mc(
    j: int,
    alpha_mag: float,
    sigma_he: float,
    trials: int,
    master_seed: int,
    shards: int = 1,
) -> int:
    """Per-mode index errors of the nearest-phase decoder, true index 0."""
    errors = 0
    for shard, n in enumerate(split_trials(trials, shards)):
        rng = shard_rng(master_seed, PURPOSE_EVE, shard)
        done = 0
        while done < n:
            nc = min(4 * _CHUNK, n - done)
            z = alpha_mag + sigma_he * (
                rng.standard_normal(nc) + 1j * rng.standard_normal(nc)
            )
            est = np.mod(np.round(np.angle(z) * j / (2.0 * np.pi)).astype(np.int64), j)
            errors += int(np.count_nonzero(est != 0))
            done += nc
    return errors


def eve_index_histogram(
    j: int, alpha_mag: float, sigma_he: float, trials: int, master_seed: int
) -> np.ndarray:
    """Decoded-index counts over trials, for uniformity checks."""
    counts = np.zeros(j, dtype=np.int64)
    rng = shard_rng(master_seed, PURPOSE_EVE, 0)
    done = 0
    while done < trials:
        nc = min(4 * _CHUNK, trials - done)
        z = alpha_mag + sigma_he * (
            rng.standard_normal(nc) + 1j * rng.standard_normal(nc)
        )
        est = np.mod(np.round(np.angle(z) * j / (2.0 * np.pi)).astype(np.int64), j)
        counts += np.bincount(est, minlength=j)
        done += nc
    return counts


def cppm_error_mc(
    alpha_sq: float, trials: int, master_seed: int, shards: int = 1
) -> int:
    """Codeword errors of the photon-counting on-off baseline.

    Empty slots count exactly zero, so the only error event is the signal
    slot drawing a zero Poisson count (an erasure, scored as an error).
    """
    errors = 0
    for shard, n in enumerate(split_trials(trials, shards)):
        rng = shard_rng(master_seed, PURPOSE_CPPM, shard)
        done = 0
        while done < n:
            nc = min(4 * _CHUNK, n - done)
            counts = rng.poisson(alpha_sq, size=nc)
            errors += int(np.count_nonzero(counts == 0))
            done += nc
    return errors


def wrong_key_error_mc(
    m: int,
    j: int,
    alpha_mag: float,
    sigma_ho: float,
    trials: int,
    master_seed: int,
    shards: int = 1,
) -> int:
    """Symbol errors when the receiver derandomizes with an unrelated key.

    The residual phase per mode is then uniform on the grid, so each mode
    reads a*cos(residual) (+pi on the signal mode) plus noise and the
    argmin decision carries no plaintext information.
    """
    errors = 0
    for shard, n in enumerate(split_trials(trials, shards)):
        rng = shard_rng(master_seed, PURPOSE_WRONG_KEY, shard)
        done = 0
        while done < n:
            nc = min(_CHUNK, n - done)
            sym = rng.integers(0, m, size=nc)
            residual = rng.integers(0, j, size=(nc, m)) * (2.0 * np.pi / j)
            residual[np.arange(nc), sym] += np.pi
            x = alpha_mag * np.cos(residual) + sigma_ho * rng.standard_normal((nc, m))
            errors += int(np.count_nonzero(np.argmin(x, axis=1) != sym))
            done += nc
    return errors


# --- result records -------------------------------------------------------


@dataclass
class ExperimentConfig:
    """One simulate/sweep invocation: operating point plus sampling plan."""

    params: SystemParams
    trials: int
    master_seed: int
    shards: int = 1
    scenario: str = "custom"

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trial count must be at least 1, got {self.trials}")
        if self.shards < 1:
            raise ValueError(f"shard count must be at least 1, got {self.shards}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("seed must fit an unsigned 64-bit integer")


@dataclass
class ResultRecord:
    """Everything one simulate run produced, analytic and sampled."""

    config: ExperimentConfig
    bob_errors: int
    eve_errors: int
    bob_analytic_paper: float
    bob_analytic_sign_rule: float
    bob_analytic_exact: float
    eve_analytic_paper: float
    eve_analytic_chord: float
    srm_error: float
    cppm_bob_error: float
    masking_ratio: float
    masking_ok: bool
    w_channel_hz: float
    w_channel_bound_ok: bool
    w_cppm_hz: float
    block_length_bits: float
    key_capacity_log2: float
    underflow: list = field(default_factory=list)
    wall_time_s: float = 0.0  # stderr only; never serialized

    @property
    def bob_mc(self) -> float:
        return self.bob_errors / self.config.trials

    @property
    def eve_mc(self) -> float:
        return self.eve_errors / self.config.trials

    @property
    def bob_ci(self) -> float:
        return wilson_halfwidth(self.bob_errors, self.config.trials)

    @property
    def eve_ci(self) -> float:
        return wilson_halfwidth(self.eve_errors, self.config.trials)


def run_simulate(cfg: ExperimentConfig) -> ResultRecord:
    """Analytic sweep point plus Bob/Eve Monte Carlo at the same parameters."""
    t0 = time.monotonic()
    p = cfg.params
    bob_errors = bob_symbol_error_mc(
        p.m_modes, p.alpha_mag, p.sigma_ho, cfg.trials, cfg.master_seed, cfg.shards
    )
    eve_errors = eve_block_error_mc(
        p.m_modes, p.j_phases, p.alpha_mag, p.sigma_he, cfg.trials, cfg.master_seed, cfg.shards
    )
    bob_paper = analytics.bob_error_paper(p)
    bob_exact = analytics.bob_error_exact_argmin(p)
    eve_paper = analytics.eve_error_heterodyne(p, "paper")
    rec = ResultRecord(
        config=cfg,
        bob_errors=bob_errors,
        eve_errors=eve_errors,
        bob_analytic_paper=bob_paper,
        bob_analytic_sign_rule=analytics.bob_error_sign_rule(p),
        bob_analytic_exact=bob_exact,
        eve_analytic_paper=eve_paper,
        eve_analytic_chord=analytics.eve_error_heterodyne(p, "chord"),
        srm_error=srm_error_psk(PskConstellation(p.alpha_mag, p.j_phases), p.m_modes),
        cppm_bob_error=analytics.cppm_bob_error(p.alpha_sq),
        masking_ratio=analytics.masking_ratio(p),
        masking_ok=analytics.masking_ratio(p) < 1.0,
        w_channel_hz=analytics.bandwidth_proposed(p),
        w_channel_bound_ok=analytics.bandwidth_bound_ok(p),
        w_cppm_hz=analytics.bandwidth_cppm(p),
        block_length_bits=analytics.block_length_bits(p),
        key_capacity_log2=analytics.key_capacity_log2(p),
    )
    noisy_signal = p.alpha_sq > 0 and p.sigma_ho > 0
    for name, value in (
        ("bob_analytic_paper", bob_paper),
        ("bob_analytic_exact", bob_exact),
    ):
        if underflowed_to_zero(value, noisy_signal):
            rec.underflow.append(name)
    if underflowed_to_zero(
        eve_paper, p.sigma_he > 0 and analytics.heterodyne_separation(p) > 0
    ):
        rec.underflow.append("eve_analytic_paper")
    rec.wall_time_s = time.monotonic() - t0
    return rec


# --- canonical serialization ----------------------------------------------


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    return format(float(x), ".17g")


def dumps_canonical(obj, indent: int = 0) -> str:
    """JSON with insertion-ordered keys and .17g floats, for byte-stable diffs."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            f'{pad}  {json.dumps(str(k))}: {dumps_canonical(v, indent + 1)}'
            for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        return "[" + ", ".join(dumps_canonical(v, indent) for v in obj) + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def record_to_dict(rec: ResultRecord) -> dict:
    """Fixed-order mapping of one result record; excludes wall time."""
    cfg, p = rec.config, rec.config.params
    return {
        "schema": "qnsc-simulate-v1",
        "scenario": cfg.scenario,
        "params": {
            "m_modes": p.m_modes,
            "j_phases": p.j_phases,
            "alpha_sq": p.alpha_sq,
            "sigma_ho": p.sigma_ho,
            "sigma_he": p.sigma_he,
            "b_base_hz": p.b_base_hz,
            "lambda_factor": p.lambda_factor,
            "b_s_hz": p.b_s_hz,
            "key_bits": p.key_bits,
        },
        "trials": cfg.trials,
        "master_seed": cfg.master_seed,
        "shards": cfg.shards,
        "results": {
            "bob_mc": rec.bob_mc,
            "bob_ci": rec.bob_ci,
            "bob_errors": rec.bob_errors,
            "eve_mc": rec.eve_mc,
            "eve_ci": rec.eve_ci,
            "eve_errors": rec.eve_errors,
            "bob_analytic_paper": rec.bob_analytic_paper,
            "bob_analytic_sign_rule": rec.bob_analytic_sign_rule,
            "bob_analytic_exact": rec.bob_analytic_exact,
            "eve_analytic_paper": rec.eve_analytic_paper,
            "eve_analytic_chord": rec.eve_analytic_chord,
            "srm_error": rec.srm_error,
            "cppm_bob_error": rec.cppm_bob_error,
            "masking_ratio": rec.masking_ratio,
            "masking_ok": rec.masking_ok,
            "w_channel_hz": rec.w_channel_hz,
            "w_channel_bound_ok": rec.w_channel_bound_ok,
            "w_cppm_hz": rec.w_cppm_hz,
            "block_length_bits": rec.block_length_bits,
            "key_capacity_log2": rec.key_capacity_log2,
            "underflow": list(rec.underflow),
        },
        "code_version": _code_version(),
    }


def _code_version() -> str:
    from . import __version__

    return __version__


def record_to_json(rec: ResultRecord) -> str:
    return dumps_canonical(record_to_dict(rec)) + "\n"


def record_csv_row(rec: ResultRecord) -> list:
    cfg, p = rec.config, rec.config.params
    return [
        cfg.scenario,
        str(p.m_modes),
        str(p.j_phases),
        _fmt_float(p.alpha_sq),
        _fmt_float(p.sigma_ho),
        _fmt_float(p.sigma_he),
        str(cfg.trials),
        _fmt_float(rec.bob_mc),
        _fmt_float(rec.bob_ci),
        _fmt_float(rec.bob_analytic_paper),
        _fmt_float(rec.bob_analytic_exact),
        _fmt_float(rec.eve_mc),
        _fmt_float(rec.eve_ci),
        _fmt_float(rec.eve_analytic_paper),
        _fmt_float(rec.srm_error),
        _fmt_float(rec.masking_ratio),
        _fmt_float(rec.w_channel_hz),
        str(cfg.master_seed),
    ]


def results_csv(rows: list) -> str:
    """Versioned CSV text: schema comment, header, then the given rows."""
    lines = [f"# schema={CSV_SCHEMA}", ",".join(CSV_COLUMNS)]
    lines.extend(",".join(r) for r in rows)
    return "\n".join(lines) + "\n"
