"""Complex-amplitude codewords and the linear transforms acting on them.

A coherent optical pulse is fully described here by one complex field
amplitude, and a group of M pulses on distinct frequency modes by a
vector in C^M.  Passive mode-coupling networks act on that vector as an
M x M complex matrix, so the whole transmit/receive path stays in the
amplitude-vector picture; no Fock-space machinery is needed.

The overlap of two coherent states with amplitudes a and b is

    <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a)*b),

whose modulus exp(-|a-b|^2/2) never exceeds 1 and equals 1 only for
a == b.  Everything in this module is pure: inputs are never mutated and
the wrapped numpy arrays are frozen read-only at construction.

Supported regime is dense storage with M up to 64 modes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Max acceptable entry of |L L^H - I| before a matrix stops counting as
# unitary for the cipher path.
UNITARITY_TOL = 1e-10

MAX_MODES = 64


def _checked_amplitude(a: complex) -> complex:
    a = complex(a)
    if not (np.isfinite(a.real) and np.isfinite(a.imag)):
        raise ValueError(f"amplitude must be finite, got {a!r}")
    return a


def coherent_inner_product(a: complex, b: complex) -> complex:
    """Overlap <a|b> of the coherent states with amplitudes a and b."""
    a = _checked_amplitude(a)
    b = _checked_amplitude(b)
    # Real part of the exponent is -|a-b|^2/2 <= 0, so exp never overflows.
    return complex(np.exp(-0.5 * abs(a) ** 2 - 0.5 * abs(b) ** 2 + np.conj(a) * b))


@dataclass(frozen=True, eq=False)
class CodeWord:
    """Ordered per-mode complex amplitudes of an M-mode pulse group."""

    amps: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.amps, dtype=np.complex128, copy=True)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("codeword must be a 1-D vector with at least one mode")
        if not np.all(np.isfinite(arr)):
            raise ValueError("codeword amplitudes must all be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "amps", arr)

    def __len__(self) -> int:
        return int(self.amps.size)

    @property
    def m_modes(self) -> int:
        return int(self.amps.size)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """Square complex matrix coupling the mode amplitudes of a codeword.

    General (non-unitary) entries are accepted so lossy or amplifying
    transforms can be explored; the cipher path itself only ever builds
    diagonal unitaries, and :func:`inverse_unitary` refuses anything
    whose unitarity defect exceeds ``UNITARITY_TOL``.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.entries, dtype=np.complex128, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise ValueError(f"matrix must be square, got shape {arr.shape}")
        if arr.shape[0] > MAX_MODES:
            raise ValueError(f"supported regime is at most {MAX_MODES} modes, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("matrix entries must all be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def unitarity_defect(self) -> float:
        """Largest entry magnitude of L L^H - I."""
        eye = np.eye(self.dim)
        return float(np.max(np.abs(self.entries @ self.entries.conj().T - eye)))

    def is_unitary(self, tol: float = UNITARITY_TOL) -> bool:
        return self.unitarity_defect() <= tol


def apply_symplectic(matrix: SymplecticMatrix, cw: CodeWord) -> CodeWord:
    """Transform a codeword's amplitude vector by the given matrix."""
    if matrix.dim != len(cw):
        raise ValueError(
            f"matrix dimension {matrix.dim} does not match codeword length {len(cw)}"
        )
    return CodeWord(matrix.entries @ cw.amps)


def diagonal_phase_matrix(phases) -> SymplecticMatrix:
    """Diagonal unitary diag(exp(i*phase_k)); off-diagonals are exactly zero."""
    ph = np.asarray(phases, dtype=np.float64)
    if ph.ndim != 1 or ph.size < 1:
        raise ValueError("phases must be a 1-D vector with at least one entry")
    if not np.all(np.isfinite(ph)):
        raise ValueError("phases must all be finite")
    return SymplecticMatrix(np.diag(np.exp(1j * ph)))


def inverse_unitary(matrix: SymplecticMatrix, tol: float = UNITARITY_TOL) -> SymplecticMatrix:
    """Conjugate transpose of a unitary matrix; rejects non-unitary input."""
    defect = matrix.unitarity_defect()
    if defect > tol:
        raise ValueError(
            f"matrix is not unitary: max |L L^H - I| entry is {defect:.3e}, "
            f"tolerance {tol:.1e}"
        )
    return SymplecticMatrix(matrix.entries.conj().T)
