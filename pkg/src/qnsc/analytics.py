"""Closed-form error rates, bandwidth accounting, and the numeric cross-check oracles.

Every quantity here is a pure function of a parameter set, usable both
for plotting and for validating the Monte Carlo paths.

Receiver error conventions.  With per-mode signal magnitude a = sqrt(alpha_sq)
and homodyne noise sigma_ho, the key-holding receiver's block error is
quoted in two forms that do not agree:

* erf form:        1 - erf(a / (sqrt(2) sigma_ho))^M
                   == 1 - (1 - 2 Q(a / sigma_ho))^M
* per-mode sign:   1 - (1 - Q(a / sigma_ho))^M

(Q is the standard normal tail).  The erf form double-counts relative to
an independent per-mode sign test; both are exposed unchanged, and
neither matches the decision rule actually implemented (pick the most
negative quadrature), whose exact error is the order-statistics integral
in :func:`bob_error_exact_argmin`.  Nothing here resolves the
discrepancy; the simulator reports all three.

Interceptor heterodyne error uses a per-mode separation Delta out of two
conventions: "paper" Delta = a * (1 - cos(2pi/J)), which for large J is
roughly the sagitta of the grid arc, and "chord" Delta = 2a * sin(pi/J),
the straight-line distance between neighbouring states.  Both are kept;
no intent is guessed.

Worked chain at the default demonstration point (M=10, J=60000,
alpha_sq=1000, sigma_he=1): the grid step is 2pi/60000 ~ 1.0472e-4, the
paper separation Delta ~ 1.7339e-7, erf(Delta/2) ~ 9.78e-8, so the
interceptor block error is 1 - (9.78e-8)^10 ~ 1 - 8e-71, i.e. 1 to
machine precision, while the key holder's analytic error underflows to 0.

The homodyne noise scale convention: a quarter-unit standard deviation
(sigma_ho = 0.25) is treated as the quantum-limited scale for unit
signal-to-noise bookkeeping throughout the examples.

Probabilities smaller than 1e-300 are flushed to exactly 0.0 rather than
left as denormals; :func:`underflowed_to_zero` lets report code flag
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.stats import norm

from .keystream import running_key_capacity

UNDERFLOW_FLOOR = 1e-300


@dataclass(frozen=True)
class SystemParams:
    """One operating point of the cipher and its channel bookkeeping.

    m_modes/j_phases set the codeword geometry, alpha_sq the per-mode
    mean photon number, sigma_ho/sigma_he the receiver noise scales,
    b_base_hz the per-symbol base bandwidth, lambda_factor the channel
    spreading multiple, b_s_hz the slot bandwidth of the on-off baseline,
    and key_bits the secret key size.
    """

    m_modes: int
    j_phases: int
    alpha_sq: float
    sigma_ho: float
    sigma_he: float
    b_base_hz: float = 1e9
    lambda_factor: float = 20.0
    b_s_hz: float = 1e9
    key_bits: int = 256

    def __post_init__(self) -> None:
        if self.m_modes < 1:
            raise ValueError(f"mode count must be at least 1, got {self.m_modes}")
        if self.j_phases < 2:
            raise ValueError(f"phase grid size must be at least 2, got {self.j_phases}")
        for name in ("alpha_sq", "sigma_ho", "sigma_he"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")
        for name in ("b_base_hz", "lambda_factor", "b_s_hz"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive, got {v}")
        if self.key_bits < 1:
            raise ValueError(f"key size must be positive, got {self.key_bits}")

    @property
    def alpha_mag(self) -> float:
        return math.sqrt(self.alpha_sq)


def _flush(p: float) -> float:
    # Denormals round to exact zero; everything else passes through.
    if 0.0 < p < UNDERFLOW_FLOOR:
        return 0.0
    return float(p)


def underflowed_to_zero(value: float, true_value_positive: bool) -> bool:
    """Whether a reported 0.0 stands for a positive value below the float floor."""
    return value == 0.0 and true_value_positive


def bob_error_paper(p: SystemParams) -> float:
    """erf-form block error 1 - erf(a/(sqrt(2) sigma_ho))^M of the key holder."""
    a = p.alpha_mag
    if p.sigma_ho == 0.0:
        return 0.0 if a > 0 else 1.0
    return _flush(1.0 - math.erf(a / (math.sqrt(2.0) * p.sigma_ho)) ** p.m_modes)


def bob_error_sign_rule(p: SystemParams) -> float:
    """Independent per-mode sign-test block error 1 - (1 - Q(a/sigma_ho))^M."""
    a = p.alpha_mag
    if p.sigma_ho == 0.0:
        return 0.0 if a > 0 else 1.0
    q = float(norm.sf(a / p.sigma_ho))
    return _flush(float(-np.expm1(p.m_modes * np.log1p(-q))))


def bob_error_exact_argmin(p: SystemParams) -> float:
    """Exact block error of the minimum-quadrature decision rule.

    The signal mode reads N(-a, sigma^2) and each of the other M-1 modes
    N(+a, sigma^2); an error occurs when any non-signal mode undercuts
    the signal mode.  In standardized coordinates,

        P_err = Int phi(t) * [1 - (1 - Phi(t - 2a/sigma))^(M-1)] dt,

    evaluated by adaptive quadrature.  M = 1 can never err.
    """
    if p.m_modes == 1:
        return 0.0
    a = p.alpha_mag
    if p.sigma_ho == 0.0:
        return 0.0 if a > 0 else _flush(1.0 - 1.0 / p.m_modes)
    r = 2.0 * a / p.sigma_ho
    k = p.m_modes - 1

    def integrand(t: float) -> float:
        # log1p(-Phi) hits -inf when Phi rounds to 1; expm1(-inf) = -1 is
        # exactly the right limit, so silence the spurious warning.
        with np.errstate(divide="ignore"):
            log_q = np.log1p(-norm.cdf(t - r))
        return float(norm.pdf(t) * -np.expm1(k * log_q))

    val, _ = integrate.quad(integrand, -np.inf, np.inf, epsabs=1e-14, epsrel=1e-12)
    return _flush(min(max(val, 0.0), 1.0))


def cppm_bob_error(alpha_sq: float) -> float:
    """Codeword error exp(-alpha_sq) of the photon-counting on-off baseline.

    The only error mechanism is the signal slot counting zero (empty
    slots count exactly zero), so the erasure probability is the error
    probability.
    """
    if not (math.isfinite(alpha_sq) and alpha_sq >= 0):
        raise ValueError(f"mean photon number must be non-negative, got {alpha_sq}")
    return _flush(math.exp(-alpha_sq))


def heterodyne_separation(p: SystemParams, delta_mode: str = "paper") -> float:
    """Per-mode separation Delta feeding the heterodyne error formula."""
    a = p.alpha_mag
    step = 2.0 * math.pi / p.j_phases
    if delta_mode == "paper":
        return a * (1.0 - math.cos(step))
    if delta_mode == "chord":
        return 2.0 * a * math.sin(step / 2.0)
    raise ValueError(f"delta_mode must be 'paper' or 'chord', got {delta_mode!r}")


def eve_error_heterodyne(p: SystemParams, delta_mode: str = "paper") -> float:
    """Interceptor block error 1 - erf(Delta/(2 sigma_he))^M."""
    delta = heterodyne_separation(p, delta_mode)
    if p.sigma_he == 0.0:
        return 0.0 if delta > 0 else 1.0
    return _flush(1.0 - math.erf(delta / (2.0 * p.sigma_he)) ** p.m_modes)


def heterodyne_index_error(alpha_mag: float, j: int, sigma_he: float) -> float:
    """Numerically integrated per-mode nearest-phase error (no closed form).

    Integrates the 2-D Gaussian measurement density over the correct
    decision wedge |angle| < pi/J and returns one minus that mass.  This
    is the oracle the heterodyne Monte Carlo is validated against.
    """
    if j < 2:
        raise ValueError(f"phase grid size must be at least 2, got {j}")
    if alpha_mag < 0 or sigma_he < 0:
        raise ValueError("magnitude and noise scale must be non-negative")
    if sigma_he == 0.0:
        return 0.0 if alpha_mag > 0 else 1.0 - 1.0 / j
    a, s = alpha_mag, sigma_he
    half = math.pi / j

    def density(r: float, theta: float) -> float:
        return (
            r
            / (2.0 * math.pi * s * s)
            * math.exp(-(r * r - 2.0 * a * r * math.cos(theta) + a * a) / (2.0 * s * s))
        )

    r_hi = a + 12.0 * s
    mass, _ = integrate.dblquad(
        density, -half, half, 0.0, r_hi, epsabs=1e-12, epsrel=1e-10
    )
    return _flush(min(max(1.0 - mass, 0.0), 1.0))


def masking_ratio(p: SystemParams) -> float:
    """Neighbour arc length over noise unit, 2*pi*a/J; below 1 means masked."""
    return 2.0 * math.pi * p.alpha_mag / p.j_phases


def bandwidth_cppm(p: SystemParams) -> float:
    """Slot-count reading of the on-off baseline's bandwidth, M * b_s_hz."""
    return p.m_modes * p.b_s_hz


def bandwidth_cppm_exponential(p: SystemParams) -> float:
    """Exponential reading with m_modes as a bit count: 2^M * b_s_hz."""
    return float(2**p.m_modes) * p.b_s_hz


def bandwidth_proposed(p: SystemParams) -> float:
    """Channel bandwidth lambda_factor * b_base_hz of the phase-coded scheme."""
    return p.lambda_factor * p.b_base_hz


def bandwidth_bound_ok(p: SystemParams) -> bool:
    """Whether the spreading factor meets the floor lambda_factor >= 2 M."""
    return p.lambda_factor >= 2.0 * p.m_modes


def block_length_bits(p: SystemParams) -> float:
    """Running-key bits consumed per codeword, M * log2(J)."""
    return p.m_modes * math.log2(p.j_phases)


def key_capacity_log2(p: SystemParams) -> float:
    """log2 of the number of running-key sequences the secret key can select."""
    return running_key_capacity(p.key_bits, p.m_modes, p.j_phases)
