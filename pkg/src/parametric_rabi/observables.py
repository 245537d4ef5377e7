"""Physical quantities computed from the reduced density matrices.

Two-qubit matrices use the basis ``|1,1>, |-1,1>, |1,-1>, |-1,-1>``, which
is the Kronecker product of a first (outer) and second (inner) qubit with
``|1>`` as the upper component.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, signal

from . import qmat

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_YY = np.kron(PAULI[2], PAULI[2])

_S2 = 1 / math.sqrt(2)
# rows: Phi+, Phi-, Psi+, Psi- in the product basis above
BELL_BASIS = _S2 * np.array(
    [
        [1, 0, 0, 1j],
        [1, 0, 0, -1j],
        [0, 1j, 1, 0],
        [0, -1j, 1, 0],
    ],
    dtype=complex,
)
BELL_LABELS = ("Phi+", "Phi-", "Psi+", "Psi-")

CONCURRENCE_DUST = 1e-10
CONCURRENCE_FAIL = 1e-8
DEGENERACY_GAP = 1e-10
Q_NORM_TOL = 1e-3
SQUEEZE_TOL = 1e-10


class NumericalDegradationError(RuntimeError):
    pass


class GridTooSmallError(RuntimeError):
    pass


@dataclass(frozen=True)
class BlochDecomposition:
    a: np.ndarray
    b: np.ndarray
    T: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """``(I + a.sigma x I + I x b.sigma + sum T_ij sigma_i x sigma_j) / 4``."""
        rho = np.kron(PAULI[0], PAULI[0]).astype(complex)
        for i in range(3):
            rho = rho + self.a[i] * np.kron(PAULI[i + 1], PAULI[0])
            rho = rho + self.b[i] * np.kron(PAULI[0], PAULI[i + 1])
            for j in range(3):
                rho = rho + self.T[i, j] * np.kron(PAULI[i + 1], PAULI[j + 1])
        return rho / 4


@dataclass(frozen=True)
class BellCoefficients:
    """Amplitudes over ``Phi+, Phi-, Psi+, Psi-``."""

    alpha1: complex
    alpha2: complex
    alpha3: complex
    alpha4: complex
    degenerate: bool = False

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha1, self.alpha2, self.alpha3, self.alpha4])

    def dominant(self) -> tuple[str, float]:
        mags = np.abs(self.as_array())
        k = int(np.argmax(mags))
        return BELL_LABELS[k], float(mags[k])

    def state(self) -> np.ndarray:
        return self.as_array() @ BELL_BASIS


def population_inversion(rho4) -> float:
    r = qmat.as_array(rho4)
    return float(np.real(r[0, 0] - r[3, 3]))


def relative_entropy_coherence(rho) -> float:
    """``S(rho_diag) - S(rho)`` in bits, in the basis the matrix is written in."""
    r = qmat.as_array(rho)
    diag = np.clip(np.real(np.diag(r)), 0.0, None)
    return max(qmat.shannon_bits(diag) - qmat.von_neumann_entropy(r), 0.0)


def bloch_decomposition(rho4) -> BlochDecomposition:
    r = qmat.as_array(rho4)
    a = np.array([np.real(np.trace(r @ np.kron(PAULI[i], PAULI[0]))) for i in (1, 2, 3)])
    b = np.array([np.real(np.trace(r @ np.kron(PAULI[0], PAULI[i]))) for i in (1, 2, 3)])
    t = np.array([[np.real(np.trace(r @ np.kron(PAULI[i], PAULI[j]))) for j in (1, 2, 3)] for i in (1, 2, 3)])
    return BlochDecomposition(a, b, t)


def geometric_discord(rho4) -> float:
    """``D_G = (|a|^2 + |T|^2 - E_max) / 4`` with ``E_max`` the top eigenvalue of ``a a^T + T T^T``.

    Lies in ``[0, 1/2]``; plots conventionally show ``2 D_G``.
    """
    bd = bloch_decomposition(rho4)
    k = np.outer(bd.a, bd.a) + bd.T @ bd.T.T
    e_max = np.linalg.eigvalsh(k)[-1]
    return max(0.25 * (bd.a @ bd.a + np.sum(bd.T**2) - e_max), 0.0)


def concurrence(rho4) -> float:
    r = qmat.as_array(rho4)
    tilde = _YY @ r.conj() @ _YY
    vals = np.sort(np.real(np.linalg.eigvals(r @ tilde)))[::-1]
    if vals.min() < -CONCURRENCE_FAIL:
        raise NumericalDegradationError(f"spin-flip product has eigenvalue {vals.min():.3e}")
    vals = np.where(vals < CONCURRENCE_DUST, np.clip(vals, 0.0, None), vals)
    s = np.sqrt(vals)
    return float(min(max(0.0, s[0] - s[1] - s[2] - s[3]), 1.0))


# ---------------------------------------------------------------------------
# closest Bell-basis pure state


def closest_pure_distance(rho) -> float:
    """``min_psi || rho - |psi><psi| ||_HS = sqrt(Tr rho^2 + 1 - 2 lambda_max)``."""
    vals = qmat.hermitian_eigensystem(rho)[0]
    return math.sqrt(max(qmat.purity(rho) + 1 - 2 * vals[0], 0.0))


def _gauge_fix(c):
    c = c / np.linalg.norm(c)
    k = int(np.argmax(np.abs(c)))
    return c * np.exp(-1j * np.angle(c[k]))


def _hs_objective(rho, p2):
    def f(x):
        c = x[:4] + 1j * x[4:]
        nrm = np.vdot(c, c).real
        if nrm == 0:
            return 4.0
        c = c / math.sqrt(nrm)
        psi = c @ BELL_BASIS
        # ||rho - P||^2 = Tr rho^2 + 1 - 2 <psi|rho|psi>
        return max(p2 + 1 - 2 * np.real(np.vdot(psi, rho @ psi)), 0.0)

    return f


def bell_reconstruct(rho4, seed: int = 0) -> tuple[BellCoefficients, float]:
    """Pure state ``sum alpha_i |Bell_i>`` closest to ``rho4`` in Hilbert-Schmidt norm.

    A derivative-free search over the four complex amplitudes, started from
    the top eigenvector and from one seeded random point. The closed form
    :func:`closest_pure_distance` is the independent check on the result.
    The overall phase is fixed so the largest amplitude is real and positive.
    ``degenerate`` flags a top-eigenvalue gap below ``1e-10``, where any
    minimiser is acceptable.
    """
    rho = qmat.as_array(rho4)
    vals, vecs = qmat.hermitian_eigensystem(rho)
    degenerate = bool(vals[0] - vals[1] < DEGENERACY_GAP)
    p2 = qmat.purity(rho)
    f = _hs_objective(rho, p2)
    rng = np.random.default_rng(seed)
    top = BELL_BASIS.conj() @ vecs[:, 0]
    starts = [top, rng.normal(size=4) + 1j * rng.normal(size=4)]
    best = None
    for c0 in starts:
        x0 = np.concatenate([c0.real, c0.imag])
        res = optimize.minimize(f, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-15, "maxiter": 1600})
        if best is None or res.fun < best.fun:
            best = res
    c = _gauge_fix(best.x[:4] + 1j * best.x[4:])
    coeffs = BellCoefficients(*(complex(x) for x in c), degenerate=degenerate)
    return coeffs, math.sqrt(f(best.x))


# ---------------------------------------------------------------------------
# oscillator quadratures and phase space


@dataclass(frozen=True)
class QuadratureMoments:
    v_min: float
    a_mean: complex
    a2_mean: complex
    n_mean: float

    @property
    def squeezed(self) -> bool:
        # below the vacuum value by more than rounding
        return self.v_min < 0.5 - SQUEEZE_TOL


def _v_min(a, a2, n):
    return 0.5 + n - abs(a) ** 2 - abs(a2 - a * a)


def quadrature_variance(rho_osc) -> QuadratureMoments:
    """Principal-quadrature variance from a Fock-basis oscillator density matrix."""
    r = qmat.as_array(rho_osc)
    size = r.shape[0]
    k = np.arange(size)
    sq = np.sqrt(k[1:])
    # <a> = Tr(rho a) = sum_k sqrt(k) rho_{k,k-1}
    a = complex(np.sum(sq * np.diagonal(r, offset=-1)))
    a2 = complex(np.sum(np.sqrt(k[2:] * k[1:-1]) * np.diagonal(r, offset=-2))) if size > 2 else 0j
    n = float(np.real(np.sum(k * np.diagonal(r))))
    return QuadratureMoments(_v_min(a, a2, n), a, a2, n)


def frame_quadrature_variance(state, pad: int = 8) -> QuadratureMoments:
    """The same moments summed directly in the displaced-squeezed frames.

    In frame ``s`` the annihilator acts as ``mu b - nu b^dag - (mu - nu) eta_s``,
    with ``b`` the ladder operator of the frame number states.
    """
    from .dynamics import frame_amplitudes
    from .model import QUBIT_STATES

    fr = state.frame
    amp = frame_amplitudes(state)
    size = amp.shape[-1] + pad
    b = np.diag(np.sqrt(np.arange(1, size)), 1)
    a_mean = a2_mean = 0j
    n_mean = 0.0
    for i, s in enumerate(QUBIT_STATES):
        c = np.zeros(size, dtype=complex)
        c[: amp.shape[-1]] = amp[i]
        op = fr.mu * b - fr.nu * b.T - (fr.mu - fr.nu) * fr.eta[s] * np.eye(size)
        ac = op @ c
        a_mean += np.vdot(c, ac)
        a2_mean += np.vdot(c, op @ ac)
        n_mean += float(np.vdot(ac, ac).real)
    return QuadratureMoments(_v_min(a_mean, a2_mean, n_mean), complex(a_mean), complex(a2_mean), n_mean)


@dataclass(frozen=True)
class HusimiField:
    re: np.ndarray
    im: np.ndarray
    q: np.ndarray
    normalization: float

    @property
    def cell(self) -> tuple[float, float]:
        return float(self.re[1] - self.re[0]), float(self.im[1] - self.im[0])

    def peak(self) -> complex:
        i, j = np.unravel_index(np.argmax(self.q), self.q.shape)
        return complex(self.re[j], self.im[i])


def default_grid(a_mean: complex, points: int = 201):
    half = 4 + 2 * abs(a_mean)
    re = np.linspace(a_mean.real - half, a_mean.real + half, points)
    im = np.linspace(a_mean.imag - half, a_mean.imag + half, points)
    return re, im


def coherent_amplitudes(beta, n_max: int) -> np.ndarray:
    """``<k|beta>`` for ``k = 0..n_max``, shape ``beta.shape + (n_max+1,)``."""
    beta = np.asarray(beta, dtype=complex)
    out = np.empty(beta.shape + (n_max + 1,), dtype=complex)
    out[..., 0] = np.exp(-0.5 * np.abs(beta) ** 2)
    for k in range(1, n_max + 1):
        out[..., k] = out[..., k - 1] * beta / math.sqrt(k)
    return out


def husimi_q(rho_osc, re=None, im=None, check: bool = True) -> HusimiField:
    """``Q(beta) = <beta|rho|beta> / pi`` on a rectangular grid (rows: Im beta, columns: Re beta)."""
    r = qmat.as_array(rho_osc)
    if re is None or im is None:
        re, im = default_grid(quadrature_variance(r).a_mean)
    re, im = np.asarray(re, float), np.asarray(im, float)
    beta = re[None, :] + 1j * im[:, None]
    amp = coherent_amplitudes(beta, r.shape[0] - 1)
    # <beta|rho|beta> = sum_kl conj(<k|beta>) rho_kl <l|beta>
    q = np.real(np.einsum("...k,kl,...l->...", amp.conj(), r, amp)) / math.pi
    norm = float(np.sum(q) * (re[1] - re[0]) * (im[1] - im[0]))
    field = HusimiField(re, im, q, norm)
    if check:
        if q.min() < -1e-12 or q.max() > 1 / math.pi + 1e-12:
            raise GridTooSmallError(f"Q outside [0, 1/pi]: range [{q.min():.3e}, {q.max():.3e}]")
        if abs(norm - 1) > Q_NORM_TOL:
            raise GridTooSmallError(f"Q normalization {norm:.6f} off by more than {Q_NORM_TOL:g}; enlarge the grid")
    return field


def detect_revivals(t, series, height_frac: float = 0.5, sep_frac: float = 0.1) -> list[float]:
    """Times of major peaks of a uniformly sampled series.

    A peak must rise above ``min + height_frac * (max - min)`` and be at
    least ``sep_frac`` of the time span away from a taller peak. Endpoints
    count as candidate peaks.
    """
    t = np.asarray(t, float)
    y = np.asarray(series, float)
    if y.size < 3 or np.ptp(y) == 0:
        return []
    dt = t[1] - t[0]
    lo = y.min()
    padded = np.concatenate([[lo - 1], y, [lo - 1]])
    dist = max(1, int(round(sep_frac * (t[-1] - t[0]) / dt)))
    idx, _ = signal.find_peaks(padded, height=lo + height_frac * np.ptp(y), distance=dist)
    return [float(t[i - 1]) for i in idx]
