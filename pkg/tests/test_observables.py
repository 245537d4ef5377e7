import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parametric_rabi import observables as ob
from parametric_rabi import qmat
from parametric_rabi.dynamics import InitialState, evolve, initial_coefficients, oscillator_rdm
from parametric_rabi.model import ModelParams
from parametric_rabi.oracle import brute_force_operator


def proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def random_state(rng, rank=4):
    g = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    r = g @ g.conj().T
    return r / np.trace(r)


PRODUCT = proj([1, 0, 0, 0])
MIXED = np.eye(4) / 4


class TestBellBasis:
    def test_orthonormal(self):
        assert np.allclose(ob.BELL_BASIS @ ob.BELL_BASIS.conj().T, np.eye(4))

    @pytest.mark.parametrize("k", range(4))
    def test_maximally_entangled(self, k):
        rho = proj(ob.BELL_BASIS[k])
        assert ob.concurrence(rho) == pytest.approx(1.0, abs=1e-12)
        assert 2 * ob.geometric_discord(rho) == pytest.approx(1.0, abs=1e-12)
        coeffs, d = ob.bell_reconstruct(rho)
        label, mag = coeffs.dominant()
        assert label == ob.BELL_LABELS[k] and mag == pytest.approx(1.0, abs=1e-6)
        assert d < 1e-5


class TestSimpleStates:
    def test_product(self):
        assert ob.concurrence(PRODUCT) == 0.0
        assert ob.geometric_discord(PRODUCT) == pytest.approx(0.0, abs=1e-15)
        assert ob.population_inversion(PRODUCT) == 1.0
        assert ob.closest_pure_distance(PRODUCT) == pytest.approx(0.0, abs=1e-7)

    def test_maximally_mixed(self):
        assert ob.concurrence(MIXED) == 0.0
        assert ob.relative_entropy_coherence(MIXED) == pytest.approx(0.0, abs=1e-12)
        assert ob.closest_pure_distance(MIXED) == pytest.approx(math.sqrt(0.75))

    def test_plus_state_coherence(self):
        assert ob.relative_entropy_coherence(np.full((2, 2), 0.5)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("p", [0.2, 0.5, 0.9])
    def test_werner(self, p):
        rho = p * proj(ob.BELL_BASIS[3]) + (1 - p) * MIXED
        assert ob.concurrence(rho) == pytest.approx(max(0.0, (3 * p - 1) / 2), abs=1e-10)


class TestInvariances:
    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31), st.lists(st.floats(-math.pi, math.pi), min_size=4, max_size=4))
    def test_coherence_diagonal_unitary(self, seed, phases):
        rho = random_state(np.random.default_rng(seed))
        u = np.diag(np.exp(1j * np.array(phases)))
        c0 = ob.relative_entropy_coherence(rho)
        assert ob.relative_entropy_coherence(u @ rho @ u.conj().T) == pytest.approx(c0, abs=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**31))
    def test_bloch_roundtrip(self, seed):
        rho = random_state(np.random.default_rng(seed), rank=2)
        assert np.max(np.abs(ob.bloch_decomposition(rho).reconstruct() - rho)) < 1e-12

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**31))
    def test_local_unitary_invariance(self, seed):
        rng = np.random.default_rng(seed)
        rho = random_state(rng)
        u1 = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
        u2 = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
        u = np.kron(u1, u2)
        rot = u @ rho @ u.conj().T
        assert ob.concurrence(rot) == pytest.approx(ob.concurrence(rho), abs=1e-9)
        assert ob.geometric_discord(rot) == pytest.approx(ob.geometric_discord(rho), abs=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**31), st.integers(1, 4))
    def test_bell_search_hits_closed_form(self, seed, rank):
        rho = random_state(np.random.default_rng(seed), rank)
        coeffs, d = ob.bell_reconstruct(rho, seed=seed)
        assert d == pytest.approx(ob.closest_pure_distance(rho), abs=1e-6)
        assert np.linalg.norm(coeffs.as_array()) == pytest.approx(1.0)
        k = int(np.argmax(np.abs(coeffs.as_array())))
        assert abs(coeffs.as_array()[k].imag) < 1e-15 and coeffs.as_array()[k].real > 0

    def test_degradation_raises(self):
        bad = np.diag([0.7, -0.1, 0.1, 0.3])
        with pytest.raises(ob.NumericalDegradationError):
            ob.concurrence(bad)


class TestQuadratures:
    def test_vacuum_and_coherent(self):
        for alpha in (0.0, 1.3 - 0.4j):
            v = brute_force_operator("displacement", alpha, 60)[:, 0]
            mom = ob.quadrature_variance(proj(v))
            assert mom.v_min == pytest.approx(0.5, abs=1e-10)
            assert mom.a_mean == pytest.approx(alpha, abs=1e-10)
            assert not mom.squeezed

    def test_squeezed_vacuum(self):
        r = 0.3
        v = brute_force_operator("squeeze", r, 80)[:, 0]
        mom = ob.quadrature_variance(proj(v))
        assert mom.v_min == pytest.approx(0.5 * math.exp(-2 * r), abs=1e-10)
        assert mom.squeezed

    def test_frame_moments_match_fock(self):
        p = ModelParams(delta1=0.08, delta2=0.06, lambda1=0.08, lambda2=0.06, g=0.1)
        st0 = evolve(initial_coefficients(p, init=InitialState(alpha=0.5)), 700.0)
        fock = ob.quadrature_variance(oscillator_rdm(st0, st0.n_max + 30))
        frame = ob.frame_quadrature_variance(st0)
        assert frame.v_min == pytest.approx(fock.v_min, abs=1e-9)
        assert frame.a_mean == pytest.approx(fock.a_mean, abs=1e-9)
        assert frame.n_mean == pytest.approx(fock.n_mean, abs=1e-9)


class TestHusimi:
    def test_vacuum(self):
        rho = np.zeros((30, 30))
        rho[0, 0] = 1
        field = ob.husimi_q(rho)
        assert field.q.max() == pytest.approx(1 / math.pi, rel=1e-12)
        assert field.peak() == 0
        assert field.normalization == pytest.approx(1.0, abs=1e-3)

    def test_coherent_peak_and_orientation(self):
        beta = 1.5 + 0.75j
        v = brute_force_operator("displacement", beta, 60)[:, 0]
        re = np.linspace(-3, 6, 181)
        im = np.linspace(-4, 5, 181)
        field = ob.husimi_q(proj(v), re, im)
        assert field.peak() == pytest.approx(beta, abs=1e-12)
        assert field.q.shape == (im.size, re.size)

    def test_grid_too_small(self):
        v = brute_force_operator("displacement", 2.0, 60)[:, 0]
        with pytest.raises(ob.GridTooSmallError):
            ob.husimi_q(proj(v), np.linspace(-1, 1, 21), np.linspace(-1, 1, 21))


class TestRevivalDetector:
    def test_cosine(self):
        t = np.linspace(0, 300, 3001)
        peaks = ob.detect_revivals(t, np.cos(2 * np.pi * t / 100))
        assert peaks == pytest.approx([0, 100, 200, 300], abs=1e-9)

    def test_small_wiggles_ignored(self):
        t = np.linspace(0, 300, 3001)
        y = np.cos(2 * np.pi * t / 100) + 0.05 * np.cos(2 * np.pi * t / 7)
        assert len(ob.detect_revivals(t, y)) == 4

    def test_flat(self):
        assert ob.detect_revivals(np.arange(10.0), np.ones(10)) == []
