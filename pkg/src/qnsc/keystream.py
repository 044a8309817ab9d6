"""Deterministic expansion of a short secret key into per-codeword phase indices.

Reference bit generator, fixed so that every platform reproduces the same
stream bit for bit: counter-mode SHA-256.  Byte block i of the stream is

    SHA-256(key_octets || BE64(i)),        i = 0, 1, 2, ...

with the 32-byte digests concatenated in counter order and bits consumed
most-significant-bit first.  One running-key block for an M-mode codeword
over a J-point phase grid consumes exactly M*log2(J) bits, split
big-endian into M indices of log2(J) bits each (the first bit read is the
most significant bit of the first index).

The grid size J must be a power of two here so indices pack into whole
bits; the analysis helpers elsewhere accept any J.  The generator is a
reproducibility device for simulation, not a vetted cryptographic design.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

MIN_KEY_OCTETS = 32

_DIGEST_BYTES = 32


@dataclass(frozen=True)
class SecretKey:
    """Secret seed octets; at least MIN_KEY_OCTETS (256 bits)."""

    octets: bytes

    def __post_init__(self) -> None:
        if not isinstance(self.octets, (bytes, bytearray)):
            raise TypeError("secret key must be given as bytes")
        if len(self.octets) < MIN_KEY_OCTETS:
            raise ValueError(
                f"secret key must be at least {MIN_KEY_OCTETS} octets, got {len(self.octets)}"
            )
        object.__setattr__(self, "octets", bytes(self.octets))

    @classmethod
    def from_hex(cls, text: str) -> "SecretKey":
        """Parse a lowercase-hex key string (64 hex chars for a 256-bit key)."""
        s = text.strip()
        if len(s) % 2 != 0:
            raise ValueError("hex key must have an even number of digits")
        if s != s.lower():
            raise ValueError("hex key must be lowercase")
        try:
            raw = bytes.fromhex(s)
        except ValueError as exc:
            raise ValueError(f"invalid hex key: {exc}") from exc
        return cls(raw)

    @classmethod
    def from_file(cls, path) -> "SecretKey":
        with open(path, "r", encoding="ascii") as f:
            return cls.from_hex(f.read())

    @property
    def n_bits(self) -> int:
        return 8 * len(self.octets)


@dataclass(frozen=True)
class RunningKeyBlock:
    """Per-codeword phase indices, one per mode, each in [0, j)."""

    indices: tuple
    j: int

    def __post_init__(self) -> None:
        if self.j < 2:
            raise ValueError(f"phase grid size must be at least 2, got {self.j}")
        idx = tuple(int(i) for i in self.indices)
        if len(idx) < 1:
            raise ValueError("running-key block must cover at least one mode")
        for i in idx:
            if not 0 <= i < self.j:
                raise ValueError(f"phase index {i} out of range [0, {self.j})")
        object.__setattr__(self, "indices", idx)

    @property
    def m_modes(self) -> int:
        return len(self.indices)

    def phases(self) -> np.ndarray:
        """Grid phases 2*pi*index/j for every mode."""
        return 2.0 * np.pi * np.asarray(self.indices, dtype=np.float64) / self.j


def phase_of(index: int, j: int) -> float:
    """Basis phase 2*pi*index/j of the j-point grid; index must lie in [0, j)."""
    if j < 2:
        raise ValueError(f"phase grid size must be at least 2, got {j}")
    if not 0 <= index < j:
        raise ValueError(f"phase index {index} out of range [0, {j})")
    return 2.0 * math.pi * index / j


def index_bits(j: int) -> int:
    """log2(j) for power-of-two j; the bit width of one phase index."""
    if j < 2 or (j & (j - 1)) != 0:
        raise ValueError(f"phase grid size must be a power of two in the cipher path, got {j}")
    return j.bit_length() - 1


class KeystreamGenerator:
    """Stateful counter-mode SHA-256 bit source seeded only by the key.

    Two generators built from equal keys emit identical bit streams;
    consuming n bits advances the stream by exactly n bits.
    """

    def __init__(self, key: SecretKey):
        self._key = key
        self._block_i = 0
        self._acc = 0
        self._acc_bits = 0

    def take_bits(self, n: int) -> int:
        """Next n stream bits as a big-endian integer."""
        if n < 1:
            raise ValueError("must take at least one bit")
        while self._acc_bits < n:
            digest = hashlib.sha256(
                self._key.octets + self._block_i.to_bytes(8, "big")
            ).digest()
            self._block_i += 1
            self._acc = (self._acc << (8 * _DIGEST_BYTES)) | int.from_bytes(digest, "big")
            self._acc_bits += 8 * _DIGEST_BYTES
        shift = self._acc_bits - n
        out = self._acc >> shift
        self._acc &= (1 << shift) - 1
        self._acc_bits = shift
        return out

    def next_block(self, m: int, j: int) -> RunningKeyBlock:
        """Consume m*log2(j) bits and return one running-key block."""
        if m < 1:
            raise ValueError(f"mode count must be at least 1, got {m}")
        width = index_bits(j)
        return RunningKeyBlock(tuple(self.take_bits(width) for _ in range(m)), j)


def _stream_bytes(key: SecretKey, nbytes: int) -> bytes:
    n_blocks = -(-nbytes // _DIGEST_BYTES)
    chunks = [
        hashlib.sha256(key.octets + i.to_bytes(8, "big")).digest()
        for i in range(n_blocks)
    ]
    return b"".join(chunks)[:nbytes]


def expand_indices(key: SecretKey, m: int, j: int, n_blocks: int) -> np.ndarray:
    """Phase indices for n_blocks codewords as an (n_blocks, m) integer array.

    Vectorized equivalent of reading blocks one by one from
    :class:`KeystreamGenerator`; the two routes agree bit for bit.
    """
    if m < 1:
        raise ValueError(f"mode count must be at least 1, got {m}")
    if n_blocks < 0:
        raise ValueError(f"block count must be non-negative, got {n_blocks}")
    width = index_bits(j)
    if n_blocks == 0:
        return np.zeros((0, m), dtype=np.int64)
    total_bits = n_blocks * m * width
    stream = _stream_bytes(key, (total_bits + 7) // 8)
    bits = np.unpackbits(np.frombuffer(stream, dtype=np.uint8))[:total_bits]
    weights = (1 << np.arange(width - 1, -1, -1)).astype(np.int64)
    idx = bits.reshape(n_blocks * m, width).astype(np.int64) @ weights
    return idx.reshape(n_blocks, m)


def expand(key: SecretKey, m: int, j: int, n_blocks: int) -> list:
    """First n_blocks running-key blocks for an (m, j) cipher configuration."""
    idx = expand_indices(key, m, j, n_blocks)
    return [RunningKeyBlock(tuple(int(v) for v in row), j) for row in idx]


def running_key_capacity(key_bits: int, m: int, j: int) -> float:
    """log2 of the number of running-key sequences a key of key_bits can select.

    A block consumes m*log2(j) key-stream bits, so the selectable sequence
    count is 2^key_bits / (m*log2(j)); this returns its log2,
    key_bits - log2(m*log2(j)).  Any grid size j >= 2 is accepted here.
    """
    if key_bits < 1:
        raise ValueError(f"key size must be positive, got {key_bits}")
    if m < 1:
        raise ValueError(f"mode count must be at least 1, got {m}")
    if j < 2:
        raise ValueError(f"phase grid size must be at least 2, got {j}")
    return key_bits - math.log2(m * math.log2(j))
