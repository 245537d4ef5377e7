import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parametric_rabi import qmat
from parametric_rabi.dynamics import (
    InitialState,
    TruncationError,
    coefficients_at,
    evolve,
    fock_amplitudes,
    initial_coefficients,
    oscillator_rdm,
    population_series,
    qubit_osc_rdm,
    single_qubit_rdms,
    state_vector,
    two_qubit_rdm,
    two_qubit_rdm_series,
)
from parametric_rabi.model import ModelParams
from parametric_rabi.observables import BELL_BASIS
from parametric_rabi.oracle import (
    build_full_hamiltonian,
    exact_evolve,
    initial_product_state,
    oscillator_rdm_exact,
    two_qubit_rdm_exact,
)

P = ModelParams(delta1=0.1, delta2=0.08, lambda1=0.03, lambda2=0.018, g=0.1)


@pytest.fixture(scope="module")
def state():
    return initial_coefficients(P, init=InitialState(theta=0.3, phi=0.4, alpha=1.0))


class TestInitialState:
    def test_product_state(self):
        st0 = initial_coefficients(P, init=InitialState(alpha=0.5))
        rho = two_qubit_rdm(st0).entries
        ref = np.zeros((4, 4))
        ref[0, 0] = 1
        assert np.max(np.abs(rho - ref)) < 1e-9

    def test_bell_state(self):
        st0 = initial_coefficients(P, init=InitialState(theta=np.pi / 4, phi=np.pi / 2))
        rho = two_qubit_rdm(st0).entries
        v = np.zeros(4, dtype=complex)
        v[0], v[3] = 1 / np.sqrt(2), 1j / np.sqrt(2)
        assert np.max(np.abs(rho - np.outer(v, v.conj()))) < 1e-9
        # that vector is the first Bell row
        assert abs(BELL_BASIS[0].conj() @ v) == pytest.approx(1.0)

    def test_residual_recorded(self, state):
        assert abs(state.truncation_residual) < state.eps_trunc
        assert state.norm2() == pytest.approx(1.0, abs=1e-8)

    def test_fixed_cutoff_error_suggests(self):
        p = ModelParams(delta1=0.1, delta2=0.1, lambda1=0.015, lambda2=0.015, n_max=6)
        with pytest.raises(TruncationError, match=r"try N_max >= \d+"):
            initial_coefficients(p, init=InitialState(alpha=2.0))


class TestEvolution:
    def test_phase_additivity(self, state):
        a = evolve(evolve(state, 12.5), 30.25)
        b = evolve(state, 42.75)
        assert np.max(np.abs(a.coeffs - b.coeffs)) < 1e-12
        assert a.t == b.t == 42.75

    def test_moduli_conserved(self, state):
        c = coefficients_at(state, [0.0, 1e3, 7.7e4])
        assert np.max(np.abs(np.abs(c) - np.abs(state.coeffs))) < 1e-13

    def test_negative_time(self, state):
        with pytest.raises(ValueError):
            evolve(state, -1.0)

    def test_series_matches_single(self, state):
        times = [0.0, 17.0, 250.0]
        series = two_qubit_rdm_series(state, times)
        for t, rho in zip(times, series):
            assert np.max(np.abs(rho - two_qubit_rdm(evolve(state, t)).entries)) < 1e-12
        pops = population_series(state, times, chunk=2)
        assert np.allclose(pops, np.real(np.einsum("tii->ti", series)), atol=1e-13)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0, 5e3))
    def test_rdm_is_a_state(self, t):
        rho = two_qubit_rdm(evolve(initial_coefficients(P, init=InitialState(0.3, 0.4, 1.0)), t))
        assert rho.trace() == pytest.approx(1.0, abs=1e-8)
        assert rho.hermiticity_error() == 0.0
        assert np.linalg.eigvalsh(rho.entries).min() > -1e-8


class TestAgainstOracle:
    """With no qubit splitting the frame states are exact eigenstates."""

    p = ModelParams(delta1=0.0, delta2=0.0, lambda1=0.12, lambda2=-0.05, g=0.2)
    init = InitialState(theta=0.6, phi=1.1, alpha=0.7 - 0.2j)
    n_fock = 70

    def test_exact_when_undriven(self):
        st0 = initial_coefficients(self.p, init=self.init)
        h = build_full_hamiltonian(self.p, self.n_fock)
        psi0 = initial_product_state(self.init.theta, self.init.phi, self.init.alpha, self.n_fock)
        assert np.max(np.abs(state_vector(st0, self.n_fock) - psi0)) < 1e-8
        for t in (3.0, 41.0):
            psi = exact_evolve(h, psi0, t)
            evo = evolve(st0, t)
            assert np.max(np.abs(two_qubit_rdm(evo).entries - two_qubit_rdm_exact(psi, self.n_fock))) < 1e-8
            assert np.max(np.abs(oscillator_rdm(evo, self.n_fock).entries - oscillator_rdm_exact(psi, self.n_fock))) < 1e-8

    def test_small_system(self):
        # weak splitting, vacuum start: the block picture stays close to the exact dynamics
        p = ModelParams(delta1=0.05, delta2=0.04, lambda1=0.01, lambda2=0.008, g=0.05)
        st0 = initial_coefficients(p, init=InitialState(theta=0.4))
        h = build_full_hamiltonian(p, 30)
        psi0 = initial_product_state(0.4, 0.0, 0.0, 30)
        for t in (50.0, 400.0):
            ref = two_qubit_rdm_exact(exact_evolve(h, psi0, t), 30)
            assert np.max(np.abs(two_qubit_rdm(evolve(st0, t)).entries - ref)) < 5e-3


class TestReductions:
    def test_single_qubit_vs_partial_trace(self, state):
        rho = two_qubit_rdm(evolve(state, 321.0))
        q1, q2 = single_qubit_rdms(rho)
        assert np.allclose(q1.entries, qmat.partial_trace(rho.entries, 0, (2, 2)), atol=1e-14)
        assert np.allclose(q2.entries, qmat.partial_trace(rho.entries, 1, (2, 2)), atol=1e-14)

    def test_keep_index(self):
        # product |s2=+1> (x) |s1=-1>, which is QUBIT_STATES index 1
        r = np.zeros((4, 4))
        r[1, 1] = 1
        q1, q2 = single_qubit_rdms(r)
        assert q1.entries[0, 0] == 1 and q2.entries[1, 1] == 1

    @pytest.mark.parametrize("keep", [1, 2])
    def test_qubit_oscillator_traces(self, state, keep):
        evo = evolve(state, 123.0)
        n_fock = state.n_max + 20
        rho = qubit_osc_rdm(evo, keep, n_fock).entries
        size = n_fock + 1
        blocks = rho.reshape(2, size, 2, size)
        q = single_qubit_rdms(two_qubit_rdm(evo))[keep - 1].entries
        assert np.max(np.abs(np.einsum("akbk->ab", blocks) - q)) < 1e-8
        osc = oscillator_rdm(evo, n_fock).entries
        assert np.max(np.abs(np.einsum("akal->kl", blocks) - osc)) < 1e-8

    def test_schmidt_entropy(self, state):
        evo = evolve(state, 999.0)
        s_osc = qmat.von_neumann_entropy(oscillator_rdm(evo, state.n_max + 20))
        s_q = qmat.von_neumann_entropy(two_qubit_rdm(evo))
        assert s_osc == pytest.approx(s_q, abs=1e-7)

    def test_fock_grid_too_small(self):
        st0 = initial_coefficients(P, init=InitialState(alpha=3.0))
        with pytest.raises(TruncationError, match="n_fock"):
            oscillator_rdm(st0, 5)

    def test_fock_norm(self, state):
        psi = fock_amplitudes(state, state.n_max + 20)
        assert np.sum(np.abs(psi) ** 2) == pytest.approx(1.0, abs=1e-8)
