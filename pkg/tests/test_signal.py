"""Codeword, overlap, and mode-transform layer."""

import math

import numpy as np
import pytest

from qnsc.signal import (
    MAX_MODES,
    CodeWord,
    SymplecticMatrix,
    apply_symplectic,
    coherent_inner_product,
    diagonal_phase_matrix,
    inverse_unitary,
)


def random_unitary(dim: int, rng: np.random.Generator) -> SymplecticMatrix:
    """Haar-ish dense unitary from the QR of a complex Gaussian matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return SymplecticMatrix(q)


# --- coherent_inner_product -------------------------------------------------


def test_overlap_identical_states_is_one():
    for a in (0.0, 1.0, 2.5 - 1.25j, -31.6228, 50j):
        got = coherent_inner_product(a, a)
        assert got == pytest.approx(1.0 + 0.0j, abs=1e-15)


def test_overlap_vacuum_pair_is_one():
    assert coherent_inner_product(0.0, 0.0) == 1.0 + 0.0j


def test_overlap_antipodal_half_photon():
    # exp(-0.25 - 0.25 - 0.5) = exp(-1) for the pair (a, -a) at |a|^2 = 0.5
    a = math.sqrt(0.5)
    got = coherent_inner_product(a, -a)
    assert got.real == pytest.approx(0.36787944117144233, rel=1e-15)
    assert got.imag == pytest.approx(0.0, abs=1e-18)


def test_overlap_modulus_never_exceeds_one():
    rng = np.random.default_rng(20260822)
    for _ in range(1000):
        mag_a, mag_b = rng.uniform(0.0, 50.0, size=2)
        ph_a, ph_b = rng.uniform(0.0, 2.0 * np.pi, size=2)
        a = mag_a * np.exp(1j * ph_a)
        b = mag_b * np.exp(1j * ph_b)
        assert abs(coherent_inner_product(a, b)) <= 1.0 + 1e-15


def test_overlap_modulus_matches_distance_form():
    rng = np.random.default_rng(7)
    for _ in range(100):
        a, b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        got = abs(coherent_inner_product(a, b))
        want = math.exp(-0.5 * abs(a - b) ** 2)
        assert got == pytest.approx(want, rel=1e-12)


def test_overlap_rejects_non_finite():
    with pytest.raises(ValueError):
        coherent_inner_product(float("nan"), 1.0)
    with pytest.raises(ValueError):
        coherent_inner_product(1.0, complex(0, float("inf")))


# --- CodeWord -----------------------------------------------------------------


def test_codeword_basic_shape():
    cw = CodeWord(np.array([1.0, -2.0, 3j]))
    assert len(cw) == 3
    assert cw.m_modes == 3
    assert cw.norm() == pytest.approx(math.sqrt(14.0), rel=1e-15)


def test_codeword_is_read_only():
    cw = CodeWord(np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        cw.amps[0] = 9.0


def test_codeword_copies_its_input():
    src = np.array([1.0 + 0j, 2.0])
    cw = CodeWord(src)
    src[0] = 99.0
    assert cw.amps[0] == 1.0 + 0j


def test_codeword_rejects_bad_shapes_and_values():
    with pytest.raises(ValueError):
        CodeWord(np.array([[1.0, 2.0]]))
    with pytest.raises(ValueError):
        CodeWord(np.array([]))
    with pytest.raises(ValueError):
        CodeWord(np.array([1.0, float("nan")]))
    with pytest.raises(ValueError):
        CodeWord(np.array([complex(float("inf"), 0.0)]))


# --- SymplecticMatrix ---------------------------------------------------------


def test_matrix_must_be_square_finite_and_bounded():
    with pytest.raises(ValueError):
        SymplecticMatrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        SymplecticMatrix(np.array([[1.0, float("nan")], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        SymplecticMatrix(np.eye(MAX_MODES + 1))
    SymplecticMatrix(np.eye(MAX_MODES))  # boundary is allowed


def test_unitarity_defect_identity_and_scaled():
    assert SymplecticMatrix(np.eye(4)).unitarity_defect() == 0.0
    scaled = SymplecticMatrix(2.0 * np.eye(2))
    assert scaled.unitarity_defect() == pytest.approx(3.0, rel=1e-15)
    assert not scaled.is_unitary()


# --- apply_symplectic ---------------------------------------------------------


def test_apply_identity_leaves_codeword():
    cw = CodeWord(np.array([1.0 + 2j, -3.0, 0.5j]))
    out = apply_symplectic(SymplecticMatrix(np.eye(3)), cw)
    np.testing.assert_array_equal(out.amps, cw.amps)


def test_apply_phase_flip_first_mode():
    cw = CodeWord(np.array([2.0, 2.0]))
    flip = diagonal_phase_matrix([np.pi, 0.0])
    out = apply_symplectic(flip, cw)
    np.testing.assert_allclose(out.amps, [-2.0, 2.0], atol=1e-15)


def test_apply_balanced_splitter():
    alpha = 3.0 - 1.0j
    split = SymplecticMatrix(np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0))
    out = apply_symplectic(split, CodeWord(np.array([alpha, 0.0])))
    np.testing.assert_allclose(
        out.amps, [alpha / np.sqrt(2.0), alpha / np.sqrt(2.0)], rtol=1e-15
    )


def test_apply_rejects_dimension_mismatch():
    with pytest.raises(ValueError):
        apply_symplectic(SymplecticMatrix(np.eye(3)), CodeWord(np.array([1.0, 2.0])))


# --- diagonal_phase_matrix ------------------------------------------------------


def test_diagonal_phase_examples():
    np.testing.assert_array_equal(diagonal_phase_matrix([0.0, 0.0]).entries, np.eye(2))
    np.testing.assert_allclose(diagonal_phase_matrix([np.pi]).entries, [[-1.0]], atol=1e-15)
    got = diagonal_phase_matrix([np.pi / 2.0, np.pi]).entries
    np.testing.assert_allclose(got, np.diag([1j, -1.0]), atol=1e-15)


def test_diagonal_phase_off_diagonals_exactly_zero():
    m = diagonal_phase_matrix([0.3, 1.7, -2.2, 5.0]).entries
    off = m[~np.eye(4, dtype=bool)]
    assert np.all(off == 0.0)


def test_diagonal_phase_always_unitary():
    rng = np.random.default_rng(11)
    for _ in range(100):
        dim = int(rng.integers(1, 12))
        mat = diagonal_phase_matrix(rng.uniform(-10.0, 10.0, size=dim))
        assert mat.is_unitary()


def test_diagonal_phase_rejects_bad_input():
    with pytest.raises(ValueError):
        diagonal_phase_matrix([])
    with pytest.raises(ValueError):
        diagonal_phase_matrix([0.0, float("inf")])


# --- inverse_unitary -----------------------------------------------------------


def test_inverse_is_conjugate_transpose():
    rng = np.random.default_rng(3)
    mat = random_unitary(5, rng)
    inv = inverse_unitary(mat)
    np.testing.assert_array_equal(inv.entries, mat.entries.conj().T)


def test_inverse_rejects_non_unitary_with_diagnostic():
    with pytest.raises(ValueError, match="not unitary"):
        inverse_unitary(SymplecticMatrix(2.0 * np.eye(3)))


def test_unitary_round_trip_and_norm_1000_cases():
    rng = np.random.default_rng(20260815)
    for trial in range(1000):
        dim = int(rng.integers(1, 9))
        if trial % 2 == 0:
            mat = diagonal_phase_matrix(rng.uniform(-np.pi, np.pi, size=dim))
        else:
            mat = random_unitary(dim, rng)
        cw = CodeWord(rng.standard_normal(dim) + 1j * rng.standard_normal(dim))
        sent = apply_symplectic(mat, cw)
        assert sent.norm() == pytest.approx(cw.norm(), rel=1e-12)
        back = apply_symplectic(inverse_unitary(mat), sent)
        np.testing.assert_allclose(back.amps, cw.amps, atol=1e-12)
