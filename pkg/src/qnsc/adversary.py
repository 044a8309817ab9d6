"""Interceptor models: heterodyne phase estimation and the square-root measurement.

The running key turns every mode into one of J phase states
alpha * exp(2j*pi*l/J), so an interceptor without the key faces J-ary
phase discrimination on each mode independently.

Square-root-measurement (SRM) route.  For the symmetric J-state set the
Gram operator diagonalizes in the discrete-Fourier basis: with pairwise
overlaps c_k = <alpha_0|alpha_k>, the Gram eigenvalues are

    lambda_l = sum_k c_k * exp(-2j*pi*k*l/J),      l = 0..J-1,

real, non-negative, and summing to J.  The single-mode correct-decision
probability is (sum_l sqrt(lambda_l))^2 / J^2 and the M-mode block error

    P_err = 1 - [ (sum_l sqrt(lambda_l))^2 / J^2 ]^M.

A brute-force cross-check builds the Gram matrix G of an arbitrary state
set, takes its Hermitian square root, and uses that the SRM identifies
state j with probability (G^{1/2})_{jj}^2; both routes agree to 1e-10 on
symmetric sets.

Heterodyne route.  Each mode measurement is the amplitude plus circular
complex Gaussian noise (standard deviation sigma_he per quadrature); the
decoder picks the nearest grid phase, which on a uniform grid is just
rounding the measured angle to the nearest multiple of 2*pi/J.

Eigenvalues are clamped at tiny negative round-off (>= NEG_EIG_CLAMP);
anything below NEG_EIG_FAIL means the computation itself went wrong and
raises NumericInstabilityError.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .signal import CodeWord, coherent_inner_product

# Negative eigenvalues above this are round-off and get clamped to zero.
NEG_EIG_CLAMP = -1e-12
# Below this the spectrum is not trustworthy at all.
NEG_EIG_FAIL = -1e-9
# Smallest imaginary residue tolerated on a mathematically real eigenvalue.
# The working bound grows with the transform size: the Fourier sum evaluates
# phases with arguments up to ~2*pi*J, whose round-off is relative, so the
# per-bin error budget is eps * J * sum|overlaps| (with a 16x cushion over the
# worst measured residue).  This floor covers small grids where that product
# drops below round-off scale.
IMAG_RESIDUE_TOL = 1e-10

# Direct O(J^2) Fourier sum up to here, fast transform above.
_DIRECT_DFT_MAX = 4096

MAX_GRAM_STATES = 64


# Spectral mass below this is dropped before the square root.  The cut has
# to clear eigensolver round-off (~1e-13) by orders of magnitude: sqrt is
# infinitely steep at zero, so noise on a near-zero eigenvalue otherwise
# turns into ~1e-7 of phantom sqrt-mass that differs between the Fourier
# and brute-force routes.  A dropped bin forgoes at most sqrt(1e-10) = 1e-5
# of sqrt-mass, far inside the agreement budget of the error formulas.
ZERO_EIG_FLOOR = 1e-10


class NumericInstabilityError(RuntimeError):
    """An eigen-spectrum left its physically valid range by more than round-off."""


@dataclass(frozen=True)
class PskConstellation:
    """J coherent states of common magnitude on the uniform phase grid."""

    alpha_mag: float
    j: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha_mag) and self.alpha_mag >= 0):
            raise ValueError(f"state magnitude must be non-negative, got {self.alpha_mag}")
        if self.j < 2:
            raise ValueError(f"constellation needs at least 2 states, got {self.j}")

    def states(self) -> np.ndarray:
        return self.alpha_mag * np.exp(2j * np.pi * np.arange(self.j) / self.j)


@dataclass(frozen=True, eq=False)
class GramSpectrum:
    """Eigenvalues of the Gram operator of a J-state symmetric set."""

    lambdas: np.ndarray

    def __post_init__(self) -> None:
        lam = np.array(self.lambdas, dtype=np.float64, copy=True)
        if lam.ndim != 1 or lam.size < 2:
            raise ValueError("spectrum must be a 1-D vector of at least 2 eigenvalues")
        if lam.min() < NEG_EIG_FAIL:
            raise NumericInstabilityError(
                f"Gram eigenvalue {lam.min():.3e} below failure threshold {NEG_EIG_FAIL:.1e}"
            )
        # Trace check runs before the round-off clamp so the clamp cannot
        # mask a genuinely shifted spectrum.  The tolerance is relative to
        # the expected trace (= number of states): round-off in the Fourier
        # sum grows with the transform size, while an instability worth
        # failing on shifts the trace by a fixed fraction of it.
        total = float(lam.sum())
        trace_tol = 1e-9 * lam.size
        if abs(total - lam.size) > trace_tol:
            raise NumericInstabilityError(
                f"Gram eigenvalues sum to {total!r}, expected {lam.size} "
                f"within {trace_tol:.1e}"
            )
        lam = np.clip(lam, 0.0, None)
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)

    @property
    def j(self) -> int:
        return int(self.lambdas.size)


def psk_gram_spectrum(c: PskConstellation, use_fft: bool | None = None) -> GramSpectrum:
    """Gram eigenvalues of a phase constellation via the Fourier sum of overlaps.

    use_fft=None picks the direct O(J^2) sum for J <= 4096 and the fast
    transform above; forcing either route is for cross-checking only.
    """
    j = c.j
    a2 = c.alpha_mag**2
    k = np.arange(j)
    # <alpha_0|alpha_k> = exp(-|a|^2 * (1 - exp(2j*pi*k/J))) for equal-magnitude
    # phase states; the exponent's real part is <= 0 so this never overflows.
    overlaps = np.exp(-a2 * (1.0 - np.exp(2j * np.pi * k / j)))
    if use_fft is None:
        use_fft = j > _DIRECT_DFT_MAX
    if use_fft:
        lam = np.fft.fft(overlaps)
    else:
        lam = np.empty(j, dtype=np.complex128)
        for l in range(j):
            lam[l] = np.sum(overlaps * np.exp(-2j * np.pi * k * l / j))
    residue = float(np.max(np.abs(lam.imag)))
    mass = float(np.sum(np.abs(overlaps)))
    residue_tol = max(IMAG_RESIDUE_TOL, 16.0 * np.finfo(float).eps * j * mass)
    if residue > residue_tol:
        raise NumericInstabilityError(
            f"Gram eigenvalues carry imaginary residue {residue:.3e} above "
            f"{residue_tol:.1e}"
        )
    return GramSpectrum(lam.real)


def srm_error_psk(c: PskConstellation, m_modes: int) -> float:
    """Block error of the square-root measurement over m_modes independent modes."""
    if m_modes < 1:
        raise ValueError(f"mode count must be at least 1, got {m_modes}")
    spec = psk_gram_spectrum(c)
    lam = np.where(spec.lambdas < ZERO_EIG_FLOOR, 0.0, spec.lambdas)
    p_one = (np.sum(np.sqrt(lam)) / c.j) ** 2
    p_one = min(float(p_one), 1.0)  # guard the fp round-up past exactly 1
    return 1.0 - p_one**m_modes


def gram_srm_brute(states) -> float:
    """SRM average error for an arbitrary equal-prior coherent-state set.

    Builds the Gram matrix entry by entry, takes its Hermitian square
    root, and averages the per-state correct probabilities
    (G^{1/2})_{jj}^2.  Independent of the Fourier route above.
    """
    amps = [complex(s) for s in states]
    n = len(amps)
    if not 2 <= n <= MAX_GRAM_STATES:
        raise ValueError(f"state count must be in [2, {MAX_GRAM_STATES}], got {n}")
    g = np.empty((n, n), dtype=np.complex128)
    for row in range(n):
        for col in range(n):
            g[row, col] = coherent_inner_product(amps[row], amps[col])
    eigvals, eigvecs = np.linalg.eigh(g)
    if eigvals.min() < NEG_EIG_FAIL:
        raise NumericInstabilityError(
            f"Gram eigenvalue {eigvals.min():.3e} below failure threshold {NEG_EIG_FAIL:.1e}"
        )
    eigvals = np.clip(eigvals, 0.0, None)
    eigvals = np.where(eigvals < ZERO_EIG_FLOOR, 0.0, eigvals)
    root = (eigvecs * np.sqrt(eigvals)) @ eigvecs.conj().T
    diag = np.real(np.diag(root))
    return float(1.0 - np.mean(diag**2))


def rld_crb(alpha_mag: float) -> float:
    """Lower bound 1/(|a|^2 + 1) on the variance of any amplitude estimate.

    Dual-quadrature (heterodyne-style) detection attains it, so no
    interceptor front end resolves the running-key phase grid better than
    this variance allows.
    """
    if not (math.isfinite(alpha_mag) and alpha_mag >= 0):
        raise ValueError(f"state magnitude must be non-negative, got {alpha_mag}")
    return 1.0 / (alpha_mag**2 + 1.0)


def heterodyne_measure(a: complex, sigma_he: float, rng: np.random.Generator) -> complex:
    """Amplitude plus circular complex Gaussian noise, sigma_he per quadrature."""
    if sigma_he < 0:
        raise ValueError(f"noise scale must be non-negative, got {sigma_he}")
    a = complex(a)
    g = rng.standard_normal(2)
    return complex(a + sigma_he * (g[0] + 1j * g[1]))


def nearest_phase_index(z: complex, j: int) -> int:
    """Nearest grid index to the angle of z: round(angle * J / 2pi) mod J.

    On a uniform grid this equals the circular-distance argmin over all
    J candidate phases.
    """
    if j < 2:
        raise ValueError(f"phase grid size must be at least 2, got {j}")
    return int(np.round(np.angle(z) * j / (2.0 * np.pi))) % j


def eve_decode_block(
    cw: CodeWord, j: int, sigma_he: float, rng: np.random.Generator
) -> list:
    """Heterodyne every mode and return the nearest grid index per mode.

    Noise draws go real parts first, then imaginary parts, in mode order.
    """
    if sigma_he < 0:
        raise ValueError(f"noise scale must be non-negative, got {sigma_he}")
    m = len(cw)
    meas = cw.amps + sigma_he * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    return [nearest_phase_index(z, j) for z in meas]


def cppm_eve_bound(z: float, n: float, s: float) -> float:
    """Interceptor error lower bound 1 - Phi(z)^n * Phi(z - 2s) at split point z.

    n is the log2 codeword count of the on-off baseline and s its mean
    photon number; z is a free analysis parameter the source expression
    leaves open, so it is exposed directly.
    """
    if n < 0 or s < 0:
        raise ValueError("n and s must be non-negative")
    return float(1.0 - norm.cdf(z) ** n * norm.cdf(z - 2.0 * s))


def cppm_eve_bound_best(n: float, s: float, grid_points: int = 257) -> tuple:
    """Maximize :func:`cppm_eve_bound` over z in [-10, 10 + 2s].

    A uniform scan brackets the best grid point and a golden-section
    refinement polishes it; returns (bound, z).  The expression is
    monotone decreasing in z, so the maximum sits at the interval edge
    and the value is stable against the scan resolution.
    """
    if grid_points < 3:
        raise ValueError("need at least 3 grid points")
    lo, hi = -10.0, 10.0 + 2.0 * s
    zs = np.linspace(lo, hi, grid_points)
    vals = np.array([cppm_eve_bound(z, n, s) for z in zs])
    best = int(np.argmax(vals))
    a = zs[max(best - 1, 0)]
    b = zs[min(best + 1, grid_points - 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = cppm_eve_bound(c, n, s)
    fd = cppm_eve_bound(d, n, s)
    while b - a > 1e-12 * max(1.0, abs(hi - lo)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = cppm_eve_bound(c, n, s)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = cppm_eve_bound(d, n, s)
    z_star = (a + b) / 2.0
    return cppm_eve_bound(z_star, n, s), float(z_star)
