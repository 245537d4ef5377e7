import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parametric_rabi.model import (
    QUBIT_STATES,
    ModelParams,
    SpectralCollapseError,
    UnsupportedConfigurationError,
    adiabatic_block,
    adiabatic_levels,
    adiabatic_spectrum,
    approx_levels_small_zeta,
    build_frame,
    displacement_for,
    oscillator_energy,
    revival_time_estimate,
)
from parametric_rabi.oracle import ladder

params_strategy = st.builds(
    ModelParams,
    delta1=st.floats(0.0, 0.3),
    delta2=st.floats(0.0, 0.3),
    lambda1=st.floats(-0.3, 0.3),
    lambda2=st.floats(-0.3, 0.3),
    g=st.floats(0.0, 0.45),
)


class TestParams:
    def test_collapse_guard(self):
        with pytest.raises(SpectralCollapseError):
            ModelParams(g=0.5)
        with pytest.raises(ValueError):
            ModelParams(g=-0.1)

    def test_adiabatic_flag(self):
        assert ModelParams(delta1=0.25).adiabatic_warning
        assert not ModelParams(delta1=0.1, delta2=0.2).adiabatic_warning

    def test_couplings(self):
        p = ModelParams(lambda1=0.3, lambda2=0.1)
        assert p.coupling(1, 1) == pytest.approx(0.4)
        assert p.coupling(-1, 1) == pytest.approx(-0.2)
        assert p.coupling(-1, -1) == pytest.approx(-0.4)


class TestFrame:
    def test_no_squeeze(self):
        fr = build_frame(ModelParams(delta1=0.1, delta2=0.1, lambda1=0.015, lambda2=0.015))
        assert fr.Omega == 1.0 and fr.r == 0.0
        assert fr.eta[(1, 1)] == pytest.approx(0.03)

    def test_omega_value(self):
        assert build_frame(ModelParams(g=0.3)).Omega == pytest.approx(0.8)

    def test_near_collapse(self):
        with pytest.warns(RuntimeWarning, match="collapse"):
            fr = build_frame(ModelParams(lambda1=0.1, g=0.4999))
        assert fr.r > 2 and all(math.isfinite(v) for v in fr.eta.values())

    @given(params_strategy)
    def test_invariants(self, p):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fr = build_frame(p)
        assert 0 < fr.Omega <= 1.0 and fr.r >= 0
        assert fr.mu**2 - fr.nu**2 == pytest.approx(1.0, abs=1e-12)
        for s in QUBIT_STATES:
            assert fr.eta[(-s[0], -s[1])] == pytest.approx(-fr.eta[s], abs=1e-15)

    @pytest.mark.parametrize("g, lam", [(0.0, 0.2), (0.2, 0.1), (0.35, -0.25)])
    def test_frame_vacuum_is_ground_state(self, g, lam):
        # omega a^dag a + lam (a + a^dag) + g (a^dag^2 + a^2): lowest level from a dense eigensolve
        p = ModelParams(lambda1=lam, lambda2=0.0, g=g)
        fr = build_frame(p)
        n = 200
        a = ladder(n)
        h = a.T @ a + lam * (a + a.T) + g * (a.T @ a.T + a @ a)
        exact = np.linalg.eigvalsh(h)[:3]
        approx = oscillator_energy(p, fr, np.arange(3))
        assert np.max(np.abs(exact - approx)) < 1e-10


class TestLevels:
    def test_decoupled_block(self):
        p = ModelParams(delta1=0.1, delta2=0.06)
        blk = adiabatic_block(p, build_frame(p), 2)
        assert blk[0, 1] == pytest.approx(0.05) and blk[0, 2] == pytest.approx(0.03)
        assert blk[1, 3] == pytest.approx(0.03) and blk[2, 3] == pytest.approx(0.05)
        assert blk[0, 3] == 0 and blk[1, 2] == 0

    def test_ground_block_offdiagonals(self):
        p = ModelParams(delta1=0.2, delta2=0.15, lambda1=0.32, lambda2=0.17, g=0.1)
        fr = build_frame(p)
        lev = adiabatic_levels(p, fr, 0)
        assert lev.delta1n == pytest.approx(0.1 * math.exp(-fr.zeta_plus**2 / 2))
        assert lev.delta2n == pytest.approx(0.075 * math.exp(-fr.zeta_minus**2 / 2))

    @settings(max_examples=40)
    @given(params_strategy, st.integers(0, 30))
    def test_closed_form_vs_eigensolve(self, p, n):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            fr = build_frame(p)
        blk = adiabatic_block(p, fr, n)
        lev = adiabatic_levels(p, fr, n)
        closed = np.sort(lev.energy_array().ravel())
        assert np.max(np.abs(np.linalg.eigvalsh(blk) - closed)) < 1e-12
        vec = lev.eigenvectors()
        assert np.max(np.abs(vec.T @ vec - np.eye(4))) < 1e-12
        energies = lev.energy_array().ravel()
        assert np.max(np.abs(blk @ vec - vec * energies)) < 1e-12
        assert lev.eps_plus**2 + lev.eps_minus**2 == pytest.approx(0.5, abs=1e-14)
        assert lev.kap_plus**2 + lev.kap_minus**2 == pytest.approx(0.5, abs=1e-14)

    def test_no_exchange_coupling(self):
        p = ModelParams(delta1=0.1, delta2=0.07, lambda1=0.2, lambda2=0.0)
        fr = build_frame(p)
        lev = adiabatic_levels(p, fr, 4)
        e = lev.energies
        split = e[(1, 1)] - e[(1, -1)]
        assert split == pytest.approx(2 * abs(lev.delta1n + lev.delta2n))

    def test_equal_qubits_second_branch(self):
        p = ModelParams(delta1=0.1, delta2=0.1, lambda1=0.015, lambda2=0.015)
        fr = build_frame(p)
        lev = adiabatic_levels(p, fr, np.arange(6))
        e = lev.energies
        lam = fr.Lambda
        assert np.allclose(e[(2, 1)], lev.E11 + 2 * lam) and np.allclose(e[(2, -1)], lev.E11)

    def test_spectrum_sorted(self):
        p = ModelParams(delta1=0.1, delta2=0.08, lambda1=0.05, lambda2=0.03, g=0.2)
        spec = adiabatic_spectrum(p, 5)
        assert spec.shape == (24,) and np.all(np.diff(spec) >= 0)


class TestSmallZeta:
    def test_zero_coupling_reduces(self):
        p = ModelParams(delta1=0.1, delta2=0.07, g=0.2)
        fr = build_frame(p)
        approx = approx_levels_small_zeta(p, fr, np.arange(5))
        exact = adiabatic_levels(p, fr, np.arange(5)).energies
        for key in exact:
            assert np.allclose(approx[key], exact[key], atol=1e-14)

    def test_equal_case_renormalised_splitting(self):
        p = ModelParams(delta1=0.1, delta2=0.1, lambda1=0.015, lambda2=0.015)
        fr = build_frame(p)
        eta10 = displacement_for(p, p.lambda1)
        dtilde = 0.1 * math.exp(-2 * eta10**2)
        lev = adiabatic_levels(p, fr, 0)
        assert lev.Gamma_plus == pytest.approx(dtilde, rel=1e-14)
        approx = approx_levels_small_zeta(p, fr, np.arange(4))
        assert np.allclose(approx[(2, 1)] - approx[(2, -1)], 2 * fr.Lambda)

    def test_error_is_fourth_order(self):
        errs = []
        for lam in (0.04, 0.02):
            p = ModelParams(delta1=0.1, delta2=0.07, lambda1=lam, lambda2=0.5 * lam)
            fr = build_frame(p)
            approx = approx_levels_small_zeta(p, fr, 3)
            exact = adiabatic_levels(p, fr, 3).energies
            errs.append(max(abs(approx[k] - exact[k]) for k in exact))
        # halving zeta should cut the error by ~2^4
        assert 10 < errs[0] / errs[1] < 24


class TestRevival:
    p = ModelParams(delta1=0.1, delta2=0.1, lambda1=0.015, lambda2=0.015)

    def test_reference_values(self):
        assert revival_time_estimate(self.p, k=1) == pytest.approx(6.975e4, rel=1e-2)
        assert revival_time_estimate(self.p, k=2) == pytest.approx(13.980e4, rel=1e-2)

    def test_k_zero(self):
        assert revival_time_estimate(self.p, k=0) == 0.0

    def test_unequal_rejected(self):
        with pytest.raises(UnsupportedConfigurationError):
            revival_time_estimate(ModelParams(delta1=0.1, delta2=0.08, lambda1=0.015, lambda2=0.015))
