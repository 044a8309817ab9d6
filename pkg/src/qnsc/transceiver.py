"""Transmitter and legitimate-receiver path of the phase-randomized PPM cipher.

Encoding puts the same magnitude on all M frequency modes and flips the
sign (a pi phase) of the mode selected by the plaintext symbol.  The
running key then rotates every mode by its grid phase 2*pi*index/J, which
is what an interceptor sees; the key-holding receiver undoes the rotation
and homodyne-measures each mode, deciding for the most negative
quadrature outcome.

Stream mode maps log2(M) plaintext bits to one symbol (big-endian, symbol
index = bit chunk value, mode number = index + 1), zero-padding the tail,
and serializes codewords into a versioned binary frame:

    magic   b"QNSC"
    version u8   (currently 1)
    m       u16 big-endian   modes per codeword
    j       u32 big-endian   phase grid size
    pad     u32 big-endian   zero bits appended before symbol mapping
    count   u64 big-endian   number of codewords
    payload count*m pairs of big-endian float64 (re, im)

An on-off-keyed PPM variant (all power in one slot, photon counting at
the receiver) is included as the comparison baseline: a slot with zero
amplitude yields exactly zero counts, a slot with amplitude a yields
Poisson counts of mean |a|^2, and a codeword whose every slot counts zero
is an erasure, scored as a decoding error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .keystream import RunningKeyBlock, SecretKey, expand
from .signal import CodeWord, _checked_amplitude

FRAME_MAGIC = b"QNSC"
FRAME_VERSION = 1
_HEADER_BYTES = 4 + 1 + 2 + 4 + 4 + 8


@dataclass(frozen=True)
class PlaintextSymbol:
    """One-based mode selector m in [1, m_modes]."""

    m: int
    m_modes: int

    def __post_init__(self) -> None:
        if self.m_modes < 1:
            raise ValueError(f"mode count must be at least 1, got {self.m_modes}")
        if not 1 <= self.m <= self.m_modes:
            raise ValueError(f"symbol {self.m} out of range [1, {self.m_modes}]")


@dataclass(frozen=True)
class NoiseModel:
    """Receiver noise scales and the common per-mode signal magnitude.

    sigma_ho is the homodyne quadrature noise standard deviation,
    sigma_he the per-quadrature heterodyne noise standard deviation.
    """

    sigma_ho: float
    sigma_he: float
    alpha_mag: float

    def __post_init__(self) -> None:
        for name in ("sigma_ho", "sigma_he", "alpha_mag"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """Per-mode measurement outcomes plus how they were produced."""

    outcomes: np.ndarray
    kind: str
    seed_note: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in ("homodyne", "heterodyne", "photon"):
            raise ValueError(f"unknown measurement kind {self.kind!r}")
        arr = np.array(self.outcomes, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "outcomes", arr)


def ppm_encode(x: PlaintextSymbol, alpha_mag: float, m: int) -> CodeWord:
    """Codeword with +alpha_mag on every mode and -alpha_mag on mode x.m."""
    if alpha_mag <= 0 or not math.isfinite(alpha_mag):
        raise ValueError(f"signal magnitude must be positive, got {alpha_mag}")
    if x.m_modes != m:
        raise ValueError(f"symbol is over {x.m_modes} modes but codeword wants {m}")
    amps = np.full(m, alpha_mag, dtype=np.complex128)
    amps[x.m - 1] = -alpha_mag
    return CodeWord(amps)


def ook_ppm_encode(x: PlaintextSymbol, alpha_mag: float, m: int) -> CodeWord:
    """On-off-keyed baseline: alpha_mag on slot x.m, exact zero elsewhere."""
    if alpha_mag <= 0 or not math.isfinite(alpha_mag):
        raise ValueError(f"signal magnitude must be positive, got {alpha_mag}")
    if x.m_modes != m:
        raise ValueError(f"symbol is over {x.m_modes} modes but codeword wants {m}")
    amps = np.zeros(m, dtype=np.complex128)
    amps[x.m - 1] = alpha_mag
    return CodeWord(amps)


def randomize(cw: CodeWord, block: RunningKeyBlock, j: int) -> CodeWord:
    """Rotate each mode by its running-key grid phase exp(2j*pi*index/j)."""
    if block.j != j:
        raise ValueError(f"block carries grid size {block.j}, caller says {j}")
    if block.m_modes != len(cw):
        raise ValueError(
            f"block covers {block.m_modes} modes but codeword has {len(cw)}"
        )
    return CodeWord(cw.amps * np.exp(1j * block.phases()))


def derandomize(cw: CodeWord, block: RunningKeyBlock, j: int) -> CodeWord:
    """Undo :func:`randomize` by rotating each mode the opposite way."""
    if block.j != j:
        raise ValueError(f"block carries grid size {block.j}, caller says {j}")
    if block.m_modes != len(cw):
        raise ValueError(
            f"block covers {block.m_modes} modes but codeword has {len(cw)}"
        )
    return CodeWord(cw.amps * np.exp(-1j * block.phases()))


def homodyne_measure(a: complex, sigma_ho: float, rng: np.random.Generator) -> float:
    """Real quadrature of amplitude a plus N(0, sigma_ho^2) noise."""
    a = _checked_amplitude(a)
    if sigma_ho < 0:
        raise ValueError(f"noise scale must be non-negative, got {sigma_ho}")
    return float(a.real + sigma_ho * rng.standard_normal())


def homodyne_codeword(
    cw: CodeWord,
    sigma_ho: float,
    rng: np.random.Generator,
    seed_note: Optional[str] = None,
) -> MeasurementRecord:
    """Homodyne-measure every mode of a codeword in mode order."""
    if sigma_ho < 0:
        raise ValueError(f"noise scale must be non-negative, got {sigma_ho}")
    outcomes = cw.amps.real + sigma_ho * rng.standard_normal(len(cw))
    return MeasurementRecord(outcomes, "homodyne", seed_note)


def bob_decode(cw: CodeWord, noise: NoiseModel, rng: np.random.Generator) -> PlaintextSymbol:
    """Homodyne each mode and decide for the most negative outcome."""
    rec = homodyne_codeword(cw, noise.sigma_ho, rng)
    return PlaintextSymbol(int(np.argmin(rec.outcomes)) + 1, len(cw))


def photon_count(a: complex, rng: np.random.Generator) -> int:
    """Poisson photon count of mean |a|^2; zero amplitude always counts zero."""
    a = _checked_amplitude(a)
    return int(rng.poisson(abs(a) ** 2))


def ook_ppm_decode(cw: CodeWord, rng: np.random.Generator) -> Optional[PlaintextSymbol]:
    """Photon-count every slot, decide for the largest; all-zero is an erasure.

    Returns None on erasure; the error-rate bookkeeping scores that as a
    decoding error.
    """
    counts = np.array([photon_count(a, rng) for a in cw.amps])
    if counts.max() == 0:
        return None
    return PlaintextSymbol(int(np.argmax(counts)) + 1, len(cw))


# --- stream mode ---------------------------------------------------------


@dataclass(frozen=True)
class Frame:
    """A serialized ciphertext: codewords plus the header bookkeeping."""

    m_modes: int
    j_phases: int
    pad_bits: int
    codewords: tuple

    def __post_init__(self) -> None:
        if self.m_modes < 2 or (self.m_modes & (self.m_modes - 1)) != 0:
            raise ValueError(
                f"stream mode needs a power-of-two mode count >= 2, got {self.m_modes}"
            )
        if self.pad_bits < 0 or self.pad_bits >= _bits_per_symbol(self.m_modes):
            raise ValueError(f"pad of {self.pad_bits} bits is out of range")
        cws = tuple(self.codewords)
        for cw in cws:
            if len(cw) != self.m_modes:
                raise ValueError("every codeword must span the frame's mode count")
        if not cws and self.pad_bits != 0:
            raise ValueError("an empty frame cannot carry padding")
        object.__setattr__(self, "codewords", cws)

    def to_bytes(self) -> bytes:
        head = (
            FRAME_MAGIC
            + bytes([FRAME_VERSION])
            + self.m_modes.to_bytes(2, "big")
            + self.j_phases.to_bytes(4, "big")
            + self.pad_bits.to_bytes(4, "big")
            + len(self.codewords).to_bytes(8, "big")
        )
        if not self.codewords:
            return head
        amps = np.stack([cw.amps for cw in self.codewords])
        flat = np.empty((amps.shape[0], amps.shape[1], 2), dtype=">f8")
        flat[:, :, 0] = amps.real
        flat[:, :, 1] = amps.imag
        return head + flat.tobytes()

    @classmethod
    def from_bytes(cls, raw: bytes) -> "Frame":
        if len(raw) < _HEADER_BYTES:
            raise ValueError("frame too short for its header")
        if raw[:4] != FRAME_MAGIC:
            raise ValueError("bad frame magic")
        version = raw[4]
        if version != FRAME_VERSION:
            raise ValueError(f"unsupported frame version {version}")
        m = int.from_bytes(raw[5:7], "big")
        j = int.from_bytes(raw[7:11], "big")
        pad = int.from_bytes(raw[11:15], "big")
        count = int.from_bytes(raw[15:23], "big")
        want = _HEADER_BYTES + count * m * 16
        if len(raw) != want:
            raise ValueError(f"frame payload is {len(raw)} bytes, expected {want}")
        if count == 0:
            return cls(m, j, pad, ())
        flat = np.frombuffer(raw, dtype=">f8", offset=_HEADER_BYTES)
        flat = flat.reshape(count, m, 2)
        cws = tuple(CodeWord(flat[i, :, 0] + 1j * flat[i, :, 1]) for i in range(count))
        return cls(m, j, pad, cws)


def _bits_per_symbol(m: int) -> int:
    if m < 2 or (m & (m - 1)) != 0:
        raise ValueError(f"stream mode needs a power-of-two mode count >= 2, got {m}")
    return m.bit_length() - 1


def stream_encrypt(
    bits, key: SecretKey, m: int, j: int, alpha_mag: float
) -> Frame:
    """Encrypt a 0/1 bit sequence into a frame of randomized codewords.

    Bits map big-endian onto symbols, log2(m) bits each; the tail is
    zero-padded and the pad length recorded in the frame header.
    """
    bps = _bits_per_symbol(m)
    arr = np.asarray(bits, dtype=np.int64).ravel()
    if arr.size and not np.all((arr == 0) | (arr == 1)):
        raise ValueError("plaintext bits must be 0 or 1")
    pad = (-arr.size) % bps
    if arr.size == 0:
        return Frame(m, j, 0, ())
    padded = np.concatenate([arr, np.zeros(pad, dtype=np.int64)])
    chunks = padded.reshape(-1, bps)
    weights = (1 << np.arange(bps - 1, -1, -1)).astype(np.int64)
    symbols = chunks @ weights
    blocks = expand(key, m, j, len(symbols))
    cws = []
    for s, block in zip(symbols, blocks):
        cw = ppm_encode(PlaintextSymbol(int(s) + 1, m), alpha_mag, m)
        cws.append(randomize(cw, block, j))
    return Frame(m, j, int(pad), tuple(cws))


def stream_decrypt(
    frame: Frame,
    key: SecretKey,
    sigma_ho: float = 0.0,
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """Derandomize and decode a frame back into its plaintext bits.

    With sigma_ho = 0 the round trip is exact; a positive noise scale
    needs an rng for the homodyne draws.
    """
    if sigma_ho > 0 and rng is None:
        raise ValueError("noisy decryption needs an rng")
    if rng is None:
        rng = np.random.default_rng(0)
    m, j = frame.m_modes, frame.j_phases
    bps = _bits_per_symbol(m)
    noise = NoiseModel(sigma_ho=sigma_ho, sigma_he=0.0, alpha_mag=0.0)
    blocks = expand(key, m, j, len(frame.codewords))
    out = np.zeros(len(frame.codewords) * bps, dtype=np.int64)
    for i, (cw, block) in enumerate(zip(frame.codewords, blocks)):
        sym = bob_decode(derandomize(cw, block, j), noise, rng)
        val = sym.m - 1
        for b in range(bps):
            out[i * bps + b] = (val >> (bps - 1 - b)) & 1
    if frame.pad_bits:
        out = out[: -frame.pad_bits]
    return out
