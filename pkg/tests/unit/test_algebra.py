"""
Tests for spin and motion operators.
"""

import math

import numpy as np
import pytest
from scipy import linalg

from sigmaz_sdf.core.algebra import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ladder,
    number_operator,
    pauli_sum,
    pure_state,
    rotation,
    sigma_phi,
    spin_operator,
    sz_sum,
    thermal_populations,
    thermal_state,
    weighted_pauli_sum,
)
from sigmaz_sdf.core.state import HilbertLayout, parity, populations
from sigmaz_sdf.exceptions import ValidationError


class TestLayout:
    """Test Hilbert-space layout conventions."""

    def test_dimensions(self):
        layout = HilbertLayout(n_spins=2, fock_dim=5)
        assert layout.spin_dim == 4
        assert layout.dim == 20

    def test_labels_put_ion_zero_first(self):
        layout = HilbertLayout(n_spins=2, fock_dim=3)
        assert layout.spin_labels == ["uu", "ud", "du", "dd"]
        assert layout.spin_index("du") == 2

    def test_unknown_label_rejected(self):
        layout = HilbertLayout(n_spins=1, fock_dim=3)
        with pytest.raises(ValidationError):
            layout.spin_index("ud")

    def test_layout_is_hashable(self):
        """Layouts key the operator caches."""
        assert hash(HilbertLayout(n_spins=1, fock_dim=4)) == hash(
            HilbertLayout(n_spins=1, fock_dim=4)
        )


class TestSpinOperators:
    """Test Pauli sums and embeddings."""

    def test_sigma_phi_limits(self):
        assert np.allclose(sigma_phi(0.0), SIGMA_X)
        assert np.allclose(sigma_phi(math.pi / 2), SIGMA_Y)

    def test_up_is_index_zero(self):
        layout = HilbertLayout(n_spins=1, fock_dim=2)
        state = pure_state(layout, "u")
        value = np.vdot(state.data, sz_sum(layout, (1.0,)) @ state.data)
        assert value.real == pytest.approx(1.0)

    def test_ion_order_in_tensor_product(self, pair_layout):
        """σ_z on ion 0 reads the first letter of the label."""
        op = spin_operator(pair_layout, SIGMA_Z, 0)
        state = pure_state(pair_layout, "ud")
        assert np.vdot(state.data, op @ state.data).real == pytest.approx(1.0)
        op1 = spin_operator(pair_layout, SIGMA_Z, 1)
        assert np.vdot(state.data, op1 @ state.data).real == pytest.approx(-1.0)

    def test_pauli_sum_is_hermitian(self, pair_layout):
        op = pauli_sum(pair_layout, 0.37)
        assert np.allclose(op, op.conj().T)

    def test_weighted_sum_with_opposite_signs(self, pair_layout):
        op = weighted_pauli_sum(pair_layout, 0.0, (1.0, -1.0))
        expected = spin_operator(pair_layout, SIGMA_X, 0) - spin_operator(pair_layout, SIGMA_X, 1)
        assert np.allclose(op, expected)

    def test_sz_sum_half_coupling(self, pair_layout):
        op = sz_sum(pair_layout, (0.5, 0.5))
        state = pure_state(pair_layout, "uu")
        assert np.vdot(state.data, op @ state.data).real == pytest.approx(1.0)

    def test_sz_sum_rejects_bad_coupling(self, pair_layout):
        with pytest.raises(ValidationError):
            sz_sum(pair_layout, (0.3, 1.0))
        with pytest.raises(ValidationError):
            sz_sum(pair_layout, (1.0,))

    def test_cached_operators_are_read_only(self, pair_layout):
        op = sz_sum(pair_layout, (1.0, 1.0))
        with pytest.raises(ValueError):
            op[0, 0] = 3.0


class TestMotionOperators:
    """Test the truncated ladder operators."""

    def test_commutator_below_truncation(self):
        layout = HilbertLayout(n_spins=1, fock_dim=6)
        a, a_dag = ladder(layout)
        commutator = a @ a_dag - a_dag @ a
        diag = np.real(np.diag(commutator)).reshape(2, 6)
        assert np.allclose(diag[:, :-1], 1.0)
        assert np.allclose(diag[:, -1], -5.0)

    def test_number_operator(self):
        layout = HilbertLayout(n_spins=1, fock_dim=4)
        a, a_dag = ladder(layout)
        assert np.allclose(a_dag @ a, number_operator(layout))


class TestStates:
    """Test pure and thermal state builders."""

    def test_thermal_populations_normalised(self):
        probs = thermal_populations(10, 0.5)
        assert probs.sum() == pytest.approx(1.0)
        assert probs[1] / probs[0] == pytest.approx(0.5 / 1.5)

    def test_zero_temperature(self):
        probs = thermal_populations(5, 0.0)
        assert probs.tolist() == [1.0, 0.0, 0.0, 0.0, 0.0]

    def test_negative_nbar_rejected(self, single_layout):
        with pytest.raises(ValidationError):
            thermal_state(single_layout, -0.1, "d")

    def test_thermal_state_is_physical(self, pair_layout):
        state = thermal_state(pair_layout, 0.2, "dd")
        state.check()
        assert populations(state)["dd"] == pytest.approx(1.0)

    def test_mean_occupation(self):
        layout = HilbertLayout(n_spins=1, fock_dim=60)
        state = thermal_state(layout, 0.3, "u")
        n_mean = np.real(np.trace(state.data @ number_operator(layout)))
        assert n_mean == pytest.approx(0.3, rel=1e-6)

    def test_explicit_spin_vector_is_normalised(self, single_layout):
        state = pure_state(single_layout, [1.0, 1.0])
        assert state.norm() == pytest.approx(1.0)

    def test_fock_level_out_of_range(self, single_layout):
        with pytest.raises(ValidationError):
            pure_state(single_layout, "u", fock_level=single_layout.fock_dim)


class TestRotations:
    """Test ideal global rotations."""

    def test_matches_matrix_exponential(self, pair_layout):
        theta, phi = 0.9, 1.3
        expected = linalg.expm(-0.5j * theta * pauli_sum(pair_layout, phi))
        assert np.allclose(rotation(pair_layout, theta, phi), expected)

    def test_pi_pulse_flips_spins(self, pair_layout):
        state = pure_state(pair_layout, "dd")
        flipped = state.with_data(rotation(pair_layout, math.pi, 0.0) @ state.data)
        assert populations(flipped)["uu"] == pytest.approx(1.0)

    def test_half_pi_pulse_gives_zero_parity_product_state(self, pair_layout):
        state = pure_state(pair_layout, "dd")
        rotated = state.with_data(rotation(pair_layout, math.pi / 2, 0.4) @ state.data)
        assert parity(rotated) == pytest.approx(0.0, abs=1e-12)

    def test_unitary(self, single_layout):
        u = rotation(single_layout, 2.1, 0.2)
        assert np.allclose(u @ u.conj().T, np.eye(single_layout.dim))
