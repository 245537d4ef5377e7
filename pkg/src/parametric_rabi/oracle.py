"""Brute-force reference: dense Hamiltonian on a truncated Fock space.

Product basis is ``QUBIT_STATES (x) |n>``; the qubit index is
``2 * (s2 == -1) + (s1 == -1)``, so ``s2`` is the outer factor. Qubit
labels are sigma^x eigenvalues, hence sigma^x is diagonal and sigma^z flips.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .model import ModelParams

CONVERGENCE_TOL = 1e-8
_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_ZX = np.diag([1.0, -1.0])  # sigma^x in its own eigenbasis
_I2 = np.eye(2)


class OracleConvergenceError(RuntimeError):
    pass


def ladder(n_fock: int) -> np.ndarray:
    """Annihilation operator on ``|0>..|n_fock>``."""
    return np.diag(np.sqrt(np.arange(1, n_fock + 1, dtype=float)), 1)


def qubit_operators():
    """``(sx1, sz1, sx2, sz2)`` as 4x4 matrices in ``QUBIT_STATES`` order."""
    return np.kron(_I2, _ZX), np.kron(_I2, _X), np.kron(_ZX, _I2), np.kron(_X, _I2)


@dataclass(frozen=True)
class FullHamiltonian:
    params: ModelParams
    n_fock: int
    matrix: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigh(self):
        if "eigh" not in self._cache:
            self._cache["eigh"] = np.linalg.eigh(self.matrix)
        return self._cache["eigh"]


def build_full_hamiltonian(params: ModelParams, n_fock: int) -> FullHamiltonian:
    a = ladder(n_fock)
    x = a + a.T
    num = np.diag(np.arange(n_fock + 1, dtype=float))
    i_f = np.eye(n_fock + 1)
    sx1, sz1, sx2, sz2 = qubit_operators()
    w = params.omega
    h = w * np.kron(np.eye(4), num)
    h += np.kron(0.5 * params.delta1 * sz1 + 0.5 * params.delta2 * sz2, i_f)
    h += np.kron(params.lambda1 * sx1 + params.lambda2 * sx2, x)
    h += params.g * np.kron(np.eye(4), a.T @ a.T + a @ a)
    return FullHamiltonian(params, n_fock, h)


def exact_spectrum(h: FullHamiltonian, k: int = 12, check_convergence: bool = False) -> np.ndarray:
    """Lowest ``k`` eigenvalues, ascending.

    With ``check_convergence`` the cutoff is doubled and the levels must
    move by less than ``1e-8``.
    """
    vals = h.eigh()[0][:k]
    if check_convergence:
        big = build_full_hamiltonian(h.params, 2 * h.n_fock)
        drift = np.max(np.abs(np.linalg.eigvalsh(big.matrix)[:k] - vals))
        if drift > CONVERGENCE_TOL:
            raise OracleConvergenceError(f"lowest {k} levels drift by {drift:.3e} on doubling n_fock={h.n_fock}")
    return vals


def exact_evolve(h: FullHamiltonian, psi0, t) -> np.ndarray:
    """``exp(-i H t) psi0`` by spectral decomposition; ``t`` may be an array."""
    vals, vecs = h.eigh()
    proj = vecs.conj().T @ np.asarray(psi0, dtype=complex)
    t = np.asarray(t, dtype=float)
    phases = np.exp(-1j * np.multiply.outer(t, vals))
    return (phases * proj) @ vecs.T


def initial_product_state(theta: float, phi: float, alpha: complex, n_fock: int) -> np.ndarray:
    q = np.zeros(4, dtype=complex)
    q[0] = np.cos(theta)
    q[3] = np.exp(1j * phi) * np.sin(theta)
    return np.kron(q, brute_force_operator("displacement", alpha, n_fock)[:, 0])


def brute_force_operator(kind: str, parameter: complex, n_fock: int, pad: int = 60) -> np.ndarray:
    """``D(alpha)`` or ``S(xi) = exp((xi a^dag^2 - xi^* a^2)/2)`` on ``|0>..|n_fock>``.

    The exponential is taken on a space padded by ``pad`` levels and then
    cropped, which keeps the interior accurate.
    """
    size = n_fock + pad
    a = ladder(size)
    ad = a.T
    if kind == "displacement":
        gen = parameter * ad - np.conj(parameter) * a
    elif kind == "squeeze":
        gen = 0.5 * (parameter * ad @ ad - np.conj(parameter) * a @ a)
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    return expm(gen)[: n_fock + 1, : n_fock + 1]


def parity_operator(n_fock: int) -> np.ndarray:
    """``sigma^z_1 sigma^z_2 exp(i pi a^dag a)``."""
    _, sz1, _, sz2 = qubit_operators()
    return np.kron(sz1 @ sz2, np.diag((-1.0) ** np.arange(n_fock + 1)))


def two_qubit_rdm_exact(psi, n_fock: int) -> np.ndarray:
    m = np.asarray(psi).reshape(4, n_fock + 1)
    return m @ m.conj().T


def oscillator_rdm_exact(psi, n_fock: int) -> np.ndarray:
    m = np.asarray(psi).reshape(4, n_fock + 1)
    return m.T @ m.conj()
