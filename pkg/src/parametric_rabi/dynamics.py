"""Time evolution in the adiabatic eigenbasis and the reduced density matrices.

The state is carried as the table ``C[j, branch, n]`` of coefficients on the
adiabatic eigenstates ``|E_{j,n}^{+-}>`` (branch 0 is '+', 1 is '-'). Every
reduced density matrix is assembled from the *frame amplitudes*

    psi = sum_s |s1, s2> (x) sum_n c_{s,n} |r, n_s>,   |r, n_s> = S^dag(r) D^dag(eta_s) |n>,

which are linear combinations of ``C`` fixed by the block eigenvectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import qmat
from .model import QUBIT_STATES, AdiabaticLevel, BogoliubovFrame, ModelParams, adiabatic_levels, build_frame
from .specfun import displaced_overlap_matrix, frame_to_fock, squeezed_coherent_overlaps

EPS_TRUNC = 1e-8
POSITIVITY_TOL = 1e-6
_CUTOFF_STEP = 16
_CUTOFF_LIMIT = 1200


class TruncationError(RuntimeError):
    """The Fock cutoff is too small for the requested accuracy."""


@dataclass(frozen=True)
class InitialState:
    theta: float = 0.0
    phi: float = 0.0
    alpha: complex = 0j


@dataclass(frozen=True)
class EvolutionState:
    params: ModelParams
    frame: BogoliubovFrame
    levels: AdiabaticLevel
    coeffs: np.ndarray
    energies: np.ndarray
    t: float
    truncation_residual: float
    eps_trunc: float = EPS_TRUNC
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_max(self) -> int:
        return self.coeffs.shape[-1] - 1

    def norm2(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


def default_cutoff(frame: BogoliubovFrame, init: InitialState) -> int:
    a = abs(complex(init.alpha))
    return max(48, math.ceil(a * a + 10 * a + 25)) + math.ceil(25 * frame.r)


def _initial_table(params, frame, init, n_max):
    levels = adiabatic_levels(params, frame, np.arange(n_max + 1))
    alpha = complex(init.alpha)
    ov_p = squeezed_coherent_overlaps(n_max, frame.r, frame.eta[(1, 1)], alpha)
    ov_m = squeezed_coherent_overlaps(n_max, frame.r, frame.eta[(-1, -1)], alpha)
    a = math.cos(init.theta) * ov_p
    b = np.exp(1j * init.phi) * math.sin(init.theta) * ov_m
    c = np.empty((2, 2, n_max + 1), dtype=complex)
    c[0, 0] = levels.eps_minus * (a + b)
    c[0, 1] = levels.eps_plus * (a + b)
    c[1, 0] = levels.kap_minus * (a - b)
    c[1, 1] = levels.kap_plus * (a - b)
    return levels, c


def initial_coefficients(
    params: ModelParams,
    frame: BogoliubovFrame | None = None,
    init: InitialState = InitialState(),
    eps_trunc: float = EPS_TRUNC,
) -> EvolutionState:
    """Expansion of ``(cos th |1,1> + e^{i phi} sin th |-1,-1>) (x) |alpha>`` at ``t = 0``.

    The missing weight ``1 - sum |C|^2`` is compared against ``eps_trunc``;
    the exact infinite sum is one (Mehler's Hermite identity), so the
    residual measures the Fock truncation alone. When ``params.n_max`` is
    unset the cutoff grows until the residual is small enough.
    """
    frame = frame or build_frame(params)
    fixed = params.n_max is not None
    n_max = params.n_max if fixed else default_cutoff(frame, init)
    while True:
        levels, c = _initial_table(params, frame, init, n_max)
        residual = 1.0 - float(np.sum(np.abs(c) ** 2))
        if abs(residual) < eps_trunc:
            break
        if fixed or n_max >= _CUTOFF_LIMIT:
            suggestion = _suggest_cutoff(params, frame, init, n_max, eps_trunc)
            raise TruncationError(
                f"Fock cutoff N_max={n_max} leaves truncation residual {residual:.3e} > {eps_trunc:g}; "
                f"try N_max >= {suggestion}"
            )
        n_max += _CUTOFF_STEP
    return EvolutionState(
        params=params,
        frame=frame,
        levels=levels,
        coeffs=c,
        energies=levels.energy_array(),
        t=0.0,
        truncation_residual=residual,
        eps_trunc=eps_trunc,
    )


def _suggest_cutoff(params, frame, init, n_max, eps_trunc):
    n = max(n_max, default_cutoff(frame, init))
    while n < _CUTOFF_LIMIT:
        n += _CUTOFF_STEP
        _, c = _initial_table(params, frame, init, n)
        if abs(1.0 - np.sum(np.abs(c) ** 2)) < eps_trunc:
            return n
    return n


def evolve(state: EvolutionState, t: float) -> EvolutionState:
    """Advance by the scaled time ``t``: ``C -> C exp(-i E t)``."""
    if t < 0:
        raise ValueError("evolution time must be >= 0")
    if t == 0:
        return state
    phases = np.exp(-1j * state.energies * t)
    return replace(state, coeffs=state.coeffs * phases, t=state.t + t, _cache=state._cache)


def coefficients_at(state: EvolutionState, times) -> np.ndarray:
    """``C(t)`` for an array of absolute times, shape ``(T, 2, 2, N+1)``."""
    times = np.asarray(times, dtype=float)
    dt = times - state.t
    return state.coeffs[None] * np.exp(-1j * state.energies[None] * dt[:, None, None, None])


# ---------------------------------------------------------------------------
# frame amplitudes


def frame_amplitudes(state: EvolutionState, coeffs=None) -> np.ndarray:
    """Amplitudes ``c_{s,n}`` with ``s`` in ``QUBIT_STATES`` order, shape ``(..., 4, N+1)``.

    ``c_{1,1} = C~_1^+ + C~_2^+``, ``c_{-1,-1} = C~_1^+ - C~_2^+``,
    ``c_{-1,1} = sgn(G+) C~_1^- + sgn(G-) C~_2^-``, ``c_{1,-1} = sgn(G+) C~_1^- - sgn(G-) C~_2^-``.
    These are the products ``F^{(s)}_{nm} = c_{s,n} c_{s,m}^*`` of the
    qubit-oscillator expansion.
    """
    c = state.coeffs if coeffs is None else coeffs
    vec = state.levels.eigenvectors()  # [n, row(s), column(j,branch)]
    flat = c.reshape(c.shape[:-3] + (4, c.shape[-1]))  # columns E1+, E1-, E2+, E2-
    return np.einsum("nsk,...kn->...sn", vec, flat)


def _overlap_blocks(state: EvolutionState) -> dict:
    """``<r, m_{s'} | r, n_s> = M_{m,n}(eta_{s'} - eta_s)`` for each ordered pair ``s < s'``."""
    key = "overlaps"
    if key not in state._cache:
        eta = state.frame.eta
        blocks = {}
        for i, si in enumerate(QUBIT_STATES):
            for j in range(i + 1, 4):
                sj = QUBIT_STATES[j]
                blocks[(i, j)] = displaced_overlap_matrix(eta[sj] - eta[si], state.n_max)
        state._cache[key] = blocks
    return state._cache[key]


def _fock_transforms(state: EvolutionState, n_fock: int) -> list:
    key = ("fock", n_fock)
    if key not in state._cache:
        fr = state.frame
        state._cache[key] = [frame_to_fock(fr.r, fr.eta[s], n_fock, state.n_max) for s in QUBIT_STATES]
    return state._cache[key]


# ---------------------------------------------------------------------------
# reduced density matrices


def two_qubit_rdm_series(state: EvolutionState, times) -> np.ndarray:
    """Two-qubit RDMs at many times, shape ``(T, 4, 4)``, basis ``QUBIT_STATES``."""
    amp = frame_amplitudes(state, coefficients_at(state, times))
    blocks = _overlap_blocks(state)
    out = np.empty(amp.shape[:-2] + (4, 4), dtype=complex)
    for i in range(4):
        out[..., i, i] = np.sum(np.abs(amp[..., i, :]) ** 2, axis=-1)
    for (i, j), m in blocks.items():
        # rho_{s,s'} = sum_{n,m} c_{s,n} c*_{s',m} M_{m,n}(eta_s' - eta_s)
        val = np.einsum("...m,mn,...n->...", amp[..., j, :].conj(), m, amp[..., i, :])
        out[..., i, j] = val
        out[..., j, i] = val.conj()
    return out


def population_series(state: EvolutionState, times, chunk: int = 4096) -> np.ndarray:
    """Diagonal of the two-qubit RDM at many times, shape ``(T, 4)``.

    Needs no overlap kernels, so long runs are cheap; times are processed
    in chunks to bound memory.
    """
    times = np.asarray(times, dtype=float)
    out = np.empty((times.size, 4))
    for k in range(0, times.size, chunk):
        amp = frame_amplitudes(state, coefficients_at(state, times[k : k + chunk]))
        out[k : k + chunk] = np.sum(np.abs(amp) ** 2, axis=-1)
    return out


def _check_positive(rho, t):
    vals = np.linalg.eigvalsh(rho)
    if vals.min() < -POSITIVITY_TOL:
        raise TruncationError(
            f"reduced density matrix at t={t:g} has eigenvalue {vals.min():.3e}; raise the Fock cutoff"
        )


def two_qubit_rdm(state: EvolutionState) -> qmat.DensityMatrix:
    rho = two_qubit_rdm_series(state, [state.t])[0]
    _check_positive(rho, state.t)
    return qmat.DensityMatrix(rho, "two-qubit", (2, 2))


def single_qubit_rdms(rho4) -> tuple[qmat.DensityMatrix, qmat.DensityMatrix]:
    """The two single-qubit matrices built from sums of two-qubit elements.

    With rows/columns in ``QUBIT_STATES`` order (indices 0..3 for
    ``|1,1>, |-1,1>, |1,-1>, |-1,-1>``)::

        rho_Q1 = [[r00 + r11, r02 + r13], [c.c., r22 + r33]]
        rho_Q2 = [[r00 + r22, r01 + r23], [c.c., r11 + r33]]

    ``rho_Q1`` is the outer Kronecker factor of that ordering and ``rho_Q2``
    the inner one.
    """
    r = qmat.as_array(rho4)
    q1 = np.array([[r[0, 0] + r[1, 1], r[0, 2] + r[1, 3]], [0, r[2, 2] + r[3, 3]]], dtype=complex)
    q1[1, 0] = np.conj(q1[0, 1])
    q2 = np.array([[r[0, 0] + r[2, 2], r[0, 1] + r[2, 3]], [0, r[1, 1] + r[3, 3]]], dtype=complex)
    q2[1, 0] = np.conj(q2[0, 1])
    return qmat.DensityMatrix(q1, "qubit"), qmat.DensityMatrix(q2, "qubit")


def fock_amplitudes(state: EvolutionState, n_fock: int | None = None) -> np.ndarray:
    """The four oscillator vectors ``psi_s`` in the bare Fock basis, shape ``(4, n_fock+1)``."""
    n_fock = state.n_max if n_fock is None else n_fock
    amp = frame_amplitudes(state)
    trans = _fock_transforms(state, n_fock)
    return np.array([trans[i] @ amp[i] for i in range(4)])


def oscillator_rdm(state: EvolutionState, n_fock: int | None = None) -> qmat.DensityMatrix:
    """Oscillator RDM in the bare Fock basis ``|0>..|n_fock>`` (default ``N_max``)."""
    psi = fock_amplitudes(state, n_fock)
    rho = np.einsum("sk,sl->kl", psi, psi.conj())
    rho = 0.5 * (rho + rho.conj().T)
    lost = 1.0 - float(np.real(np.trace(rho))) - state.truncation_residual
    if abs(lost) > state.eps_trunc:
        raise TruncationError(f"Fock grid of {rho.shape[0]} levels loses weight {lost:.3e}; pass a larger n_fock")
    _check_positive(rho, state.t)
    return qmat.DensityMatrix(rho, "oscillator")


def qubit_osc_rdm(state: EvolutionState, keep: int = 1, n_fock: int | None = None) -> qmat.DensityMatrix:
    """Single-qubit plus oscillator RDM, basis ``|+1>, |-1>`` (outer) times Fock (inner).

    ``keep=1`` keeps the qubit described by ``rho_Q1`` of
    :func:`single_qubit_rdms` (the label ``s2``), ``keep=2`` the other one.
    """
    if keep not in (1, 2):
        raise ValueError("keep must be 1 or 2")
    psi = fock_amplitudes(state, n_fock)
    # QUBIT_STATES index = 2 * (s2 == -1) + (s1 == -1)
    grid = psi.reshape(2, 2, -1)  # [s2, s1, k]
    if keep == 2:
        grid = grid.transpose(1, 0, 2)
    rho = np.einsum("aik,bil->akbl", grid, grid.conj())
    size = grid.shape[-1]
    rho = rho.reshape(2 * size, 2 * size)
    rho = 0.5 * (rho + rho.conj().T)
    return qmat.DensityMatrix(rho, "qubit-oscillator", (2, size))


def state_vector(state: EvolutionState, n_fock: int) -> np.ndarray:
    """Full tripartite state in ``QUBIT_STATES (x) Fock`` order."""
    return fock_amplitudes(state, n_fock).ravel()
