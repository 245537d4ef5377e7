"""Hamiltonian parameters, the Bogoliubov oscillator frame and the adiabatic spectrum.

Two-qubit states are labelled by the sigma^x eigenvalues ``(s1, s2)`` and are
always ordered as ``QUBIT_STATES``. Energies are in units of ``omega`` when
``omega == 1`` (the default); times are then the scaled times ``omega t``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .specfun import laguerre_table

QUBIT_STATES = ((1, 1), (-1, 1), (1, -1), (-1, -1))
ADIABATIC_WARN_DELTA = 0.25
COLLAPSE_WARN_RATIO = 0.1
SMALL_ZETA_WARN = 0.2


class SpectralCollapseError(ValueError):
    """Raised for g >= omega/2, where the oscillator spectrum is no longer discrete."""


class UnsupportedConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    delta1: float = 0.1
    delta2: float = 0.1
    lambda1: float = 0.0
    lambda2: float = 0.0
    g: float = 0.0
    omega: float = 1.0
    n_max: int | None = None

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.g < 0:
            raise ValueError(f"parametric strength g must be >= 0, got {self.g}")
        if not self.g < 0.5 * self.omega:
            raise SpectralCollapseError(
                f"g = {self.g} >= omega/2: the oscillator spectrum collapses "
                "(2g/omega -> 1) and the discrete adiabatic frame does not exist"
            )
        if self.n_max is not None and self.n_max < 0:
            raise ValueError("n_max must be >= 0")

    @property
    def delta_plus(self) -> float:
        return self.delta1 + self.delta2

    @property
    def delta_minus(self) -> float:
        return self.delta1 - self.delta2

    @property
    def lambda_plus(self) -> float:
        return self.lambda1 + self.lambda2

    @property
    def lambda_minus(self) -> float:
        return self.lambda1 - self.lambda2

    @property
    def adiabatic_warning(self) -> bool:
        """True when a qubit splitting is large enough to spoil the approximation."""
        lim = ADIABATIC_WARN_DELTA * self.omega
        return abs(self.delta1) >= lim or abs(self.delta2) >= lim

    def coupling(self, s1: int, s2: int) -> float:
        return self.lambda1 * s1 + self.lambda2 * s2


@dataclass(frozen=True)
class BogoliubovFrame:
    Omega: float
    r: float
    mu: float
    nu: float
    eta: dict
    zeta_plus: float
    zeta_minus: float
    Lambda: float
    omega: float = 1.0

    @property
    def collapse_ratio(self) -> float:
        """``Omega / omega``; tends to zero at the spectral collapse."""
        return self.Omega / self.omega


def _eta(omega: float, Omega: float, g: float, coupling: float) -> float:
    # (1 + (omega - Omega)/2g) rewritten as 1 + 2g/(omega + Omega), finite at g = 0
    return math.sqrt((omega + Omega) / (2 * Omega)) * (1 + 2 * g / (omega + Omega)) * coupling / (omega + 2 * g)


def displacement_for(params: ModelParams, coupling: float) -> float:
    """Frame displacement for an arbitrary coupling value (linear in it)."""
    w, g = params.omega, params.g
    Omega = math.sqrt(w * w - 4 * g * g)
    return _eta(w, Omega, g, coupling)


def build_frame(params: ModelParams) -> BogoliubovFrame:
    w, g = params.omega, params.g
    Omega = math.sqrt(w * w - 4 * g * g)
    ratio = Omega / w
    if ratio < COLLAPSE_WARN_RATIO:
        warnings.warn(
            f"Omega/omega = {ratio:.3g}: close to the spectral collapse, frame squeezing is large",
            RuntimeWarning,
            stacklevel=2,
        )
    mu = math.sqrt((w + Omega) / (2 * Omega))
    r = math.acosh(mu)
    nu = math.sinh(r)
    eta = {s: _eta(w, Omega, g, params.coupling(*s)) for s in QUBIT_STATES}
    return BogoliubovFrame(
        Omega=Omega,
        r=r,
        mu=mu,
        nu=nu,
        eta=eta,
        zeta_plus=eta[(1, 1)] - eta[(-1, 1)],
        zeta_minus=eta[(1, 1)] - eta[(1, -1)],
        Lambda=2 * params.lambda1 * params.lambda2 / (w + 2 * g),
        omega=w,
    )


def oscillator_energy(params: ModelParams, frame: BogoliubovFrame, n, s=(1, 1)):
    """``E_n^{s1,s2} = (n + 1/2) Omega - omega/2 - lambda_s^2 / (omega + 2g)``."""
    n = np.asarray(n)
    lam = params.coupling(*s)
    return (n + 0.5) * frame.Omega - 0.5 * params.omega - lam * lam / (params.omega + 2 * params.g)


def _sign(x):
    return np.where(np.asarray(x) >= 0, 1.0, -1.0)


def _mix(chi, lam):
    # 1/2 sqrt((chi +- Lambda)/chi); chi == 0 only when Lambda == 0, where both are 1/2
    with np.errstate(invalid="ignore", divide="ignore"):
        plus = np.where(chi > 0, 0.5 * np.sqrt(np.clip((chi + lam) / chi, 0, None)), 0.5)
        minus = np.where(chi > 0, 0.5 * np.sqrt(np.clip((chi - lam) / chi, 0, None)), 0.5)
    return plus, minus


@dataclass(frozen=True)
class AdiabaticLevel:
    """Block data for one ``n`` (scalars) or for ``n = 0..N`` (arrays)."""

    n: np.ndarray
    E11: np.ndarray
    delta1n: np.ndarray
    delta2n: np.ndarray
    Gamma_plus: np.ndarray
    Gamma_minus: np.ndarray
    chi_plus: np.ndarray
    chi_minus: np.ndarray
    Lambda: float
    eps_plus: np.ndarray
    eps_minus: np.ndarray
    kap_plus: np.ndarray
    kap_minus: np.ndarray

    @property
    def energies(self) -> dict:
        """``{(j, sign): E}`` with ``E_{1,n}^{+-} = E + Lambda +- chi_+`` and ``E_{2,n}^{+-}`` with ``chi_-``."""
        base = self.E11 + self.Lambda
        return {
            (1, +1): base + self.chi_plus,
            (1, -1): base - self.chi_plus,
            (2, +1): base + self.chi_minus,
            (2, -1): base - self.chi_minus,
        }

    def energy_array(self) -> np.ndarray:
        """Energies stacked as ``[j-1, branch, n]`` with branch 0 = '+', 1 = '-'."""
        e = self.energies
        return np.array([[e[(1, 1)], e[(1, -1)]], [e[(2, 1)], e[(2, -1)]]])

    def eigenvectors(self) -> np.ndarray:
        """Adiabatic eigenvectors as columns in the ``QUBIT_STATES`` order.

        Column order: ``E_1^+, E_1^-, E_2^+, E_2^-``. For array levels the
        block index is the leading axis.
        """
        sp, sm = _sign(self.Gamma_plus), _sign(self.Gamma_minus)
        ep, em, kp, km = self.eps_plus, self.eps_minus, self.kap_plus, self.kap_minus
        cols = [
            [em, sp * ep, sp * ep, em],
            [ep, -sp * em, -sp * em, ep],
            [km, sm * kp, -sm * kp, -km],
            [kp, -sm * km, sm * km, -kp],
        ]
        v = np.array(cols, dtype=float)  # [column, row, ...]
        v = np.moveaxis(v, (0, 1), (-1, -2))
        return v


def adiabatic_levels(params: ModelParams, frame: BogoliubovFrame, n) -> AdiabaticLevel:
    """Energies and mixing coefficients of the 4x4 block(s) ``n``.

    ``n`` may be an int or an array of non-negative ints.
    """
    n_arr = np.atleast_1d(np.asarray(n, dtype=int))
    top = int(n_arr.max())
    zp2, zm2 = frame.zeta_plus**2, frame.zeta_minus**2
    lag_p = laguerre_table(top, 0, zp2)[n_arr]
    lag_m = laguerre_table(top, 0, zm2)[n_arr]
    d1 = 0.5 * params.delta1 * math.exp(-0.5 * zp2) * lag_p
    d2 = 0.5 * params.delta2 * math.exp(-0.5 * zm2) * lag_m
    lam = frame.Lambda
    gp, gm = d1 + d2, d1 - d2
    chip = np.sqrt(gp * gp + lam * lam)
    chim = np.sqrt(gm * gm + lam * lam)
    ep, em = _mix(chip, lam)
    kp, km = _mix(chim, lam)
    E11 = oscillator_energy(params, frame, n_arr)
    fields = dict(
        n=n_arr, E11=E11, delta1n=d1, delta2n=d2, Gamma_plus=gp, Gamma_minus=gm,
        chi_plus=chip, chi_minus=chim, eps_plus=ep, eps_minus=em, kap_plus=kp, kap_minus=km,
    )
    if np.ndim(n) == 0:
        fields = {k: v[0] for k, v in fields.items()}
    return AdiabaticLevel(Lambda=lam, **fields)


def adiabatic_block(params: ModelParams, frame: BogoliubovFrame, n: int) -> np.ndarray:
    """The 4x4 block of the Hamiltonian in the frame basis ``|s1,s2; r, n_{s1,s2}>``."""
    lev = adiabatic_levels(params, frame, int(n))
    e = lev.E11
    a, b = lev.delta1n, lev.delta2n
    lam2 = 2 * frame.Lambda
    return np.array(
        [
            [e, a, b, 0.0],
            [a, e + lam2, 0.0, b],
            [b, 0.0, e + lam2, a],
            [0.0, b, a, e],
        ]
    )


def adiabatic_spectrum(params: ModelParams, n_blocks: int, frame: BogoliubovFrame | None = None) -> np.ndarray:
    """All adiabatic energies of blocks ``0..n_blocks``, sorted ascending."""
    frame = frame or build_frame(params)
    lev = adiabatic_levels(params, frame, np.arange(n_blocks + 1))
    return np.sort(lev.energy_array().ravel())


def approx_levels_small_zeta(params: ModelParams, frame: BogoliubovFrame, n) -> dict:
    """Energies with the Laguerre factors kept to first order in ``zeta^2``.

    ``Gamma_{+-,n} ~ Gamma_{+-,0} - (zeta_+^2 Delta_{1,0} +- zeta_-^2 Delta_{2,0}) n`` and
    ``chi`` is linearised around ``n = 0``, which makes every level linear in ``n``.
    """
    if max(frame.zeta_plus**2, frame.zeta_minus**2) > SMALL_ZETA_WARN:
        warnings.warn("zeta^2 > 0.2: the small-zeta expansion is unreliable", RuntimeWarning, stacklevel=2)
    n = np.asarray(n, dtype=float)
    zp2, zm2 = frame.zeta_plus**2, frame.zeta_minus**2
    d10 = 0.5 * params.delta1 * math.exp(-0.5 * zp2)
    d20 = 0.5 * params.delta2 * math.exp(-0.5 * zm2)
    lam = frame.Lambda
    E = oscillator_energy(params, frame, n)
    out = {}
    for j, sgn in ((1, 1.0), (2, -1.0)):
        g0 = d10 + sgn * d20
        slope = zp2 * d10 + sgn * zm2 * d20
        chi0 = math.hypot(g0, lam)
        chi = chi0 - (g0 / chi0 if chi0 else 0.0) * slope * n
        out[(j, +1)] = E + lam + chi
        out[(j, -1)] = E + lam - chi
    return out


def revival_time_estimate(params: ModelParams, frame: BogoliubovFrame | None = None, k: int = 1) -> float:
    """Scaled revival time ``2 pi k / ((2 eta_{1,0})^2 Delta~)`` with ``Delta~ = Delta exp(-2 eta_{1,0}^2)``.

    Only defined for identical qubits with equal couplings.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    same_delta = math.isclose(params.delta1, params.delta2, rel_tol=1e-12, abs_tol=1e-15)
    same_lambda = math.isclose(params.lambda1, params.lambda2, rel_tol=1e-12, abs_tol=1e-15)
    if not (same_delta and same_lambda):
        raise UnsupportedConfigurationError(
            "the revival-time estimate needs equal qubit splittings and equal couplings"
        )
    if k == 0:
        return 0.0
    eta10 = displacement_for(params, params.lambda1)
    if eta10 == 0 or params.delta1 == 0:
        raise UnsupportedConfigurationError("no revivals without coupling and splitting")
    dtilde = params.delta1 * math.exp(-2 * eta10**2)
    return 2 * math.pi * k / ((2 * eta10) ** 2 * dtilde) * params.omega
