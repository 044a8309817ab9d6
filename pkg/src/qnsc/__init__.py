"""Desk-scale simulator for a multi-frequency phase-PPM quantum-noise stream cipher.

The library models the full signal chain: pulse-position encoding over M
frequency modes, key-driven phase randomization on a J-point grid,
homodyne reception by the key holder, and heterodyne or collective
(square-root measurement) interception without the key.  Closed-form
error and bandwidth expressions live next to sharded, reproducible Monte
Carlo so each can validate the other, and a small CLI exposes
simulation, sweeps, stream encryption, and a key-less attack.
"""

__version__ = "0.1.0"

from .adversary import (
    GramSpectrum,
    NumericInstabilityError,
    PskConstellation,
    cppm_eve_bound,
    cppm_eve_bound_best,
    eve_decode_block,
    gram_srm_brute,
    heterodyne_measure,
    nearest_phase_index,
    psk_gram_spectrum,
    rld_crb,
    srm_error_psk,
)
from .analytics import (
    SystemParams,
    bandwidth_bound_ok,
    bandwidth_cppm,
    bandwidth_cppm_exponential,
    bandwidth_proposed,
    block_length_bits,
    bob_error_exact_argmin,
    bob_error_paper,
    bob_error_sign_rule,
    cppm_bob_error,
    eve_error_heterodyne,
    heterodyne_index_error,
    key_capacity_log2,
    masking_ratio,
)
from .experiment import (
    ExperimentConfig,
    ResultRecord,
    run_simulate,
    shard_rng,
)
from .keystream import (
    KeystreamGenerator,
    RunningKeyBlock,
    SecretKey,
    expand,
    expand_indices,
    phase_of,
    running_key_capacity,
)
from .signal import (
    CodeWord,
    SymplecticMatrix,
    apply_symplectic,
    coherent_inner_product,
    diagonal_phase_matrix,
    inverse_unitary,
)
from .transceiver import (
    Frame,
    MeasurementRecord,
    NoiseModel,
    PlaintextSymbol,
    bob_decode,
    derandomize,
    homodyne_measure,
    ook_ppm_decode,
    ook_ppm_encode,
    photon_count,
    ppm_encode,
    randomize,
    stream_decrypt,
    stream_encrypt,
)

__all__ = [
    "__version__",
    "CodeWord",
    "SymplecticMatrix",
    "apply_symplectic",
    "coherent_inner_product",
    "diagonal_phase_matrix",
    "inverse_unitary",
    "SecretKey",
    "RunningKeyBlock",
    "KeystreamGenerator",
    "expand",
    "expand_indices",
    "phase_of",
    "running_key_capacity",
    "PlaintextSymbol",
    "NoiseModel",
    "MeasurementRecord",
    "Frame",
    "ppm_encode",
    "ook_ppm_encode",
    "ook_ppm_decode",
    "randomize",
    "derandomize",
    "homodyne_measure",
    "bob_decode",
    "photon_count",
    "stream_encrypt",
    "stream_decrypt",
    "PskConstellation",
    "GramSpectrum",
    "NumericInstabilityError",
    "psk_gram_spectrum",
    "srm_error_psk",
    "gram_srm_brute",
    "rld_crb",
    "heterodyne_measure",
    "nearest_phase_index",
    "eve_decode_block",
    "cppm_eve_bound",
    "cppm_eve_bound_best",
    "SystemParams",
    "bob_error_paper",
    "bob_error_sign_rule",
    "bob_error_exact_argmin",
    "cppm_bob_error",
    "eve_error_heterodyne",
    "heterodyne_index_error",
    "masking_ratio",
    "bandwidth_cppm",
    "bandwidth_cppm_exponential",
    "bandwidth_proposed",
    "bandwidth_bound_ok",
    "block_length_bits",
    "key_capacity_log2",
    "ExperimentConfig",
    "ResultRecord",
    "run_simulate",
    "shard_rng",
]
