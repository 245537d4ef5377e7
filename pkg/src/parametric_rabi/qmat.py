"""Dense Hermitian matrix helpers: spectra, partial traces, entropies, distances."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HERMITIAN_TOL = 1e-8
NEG_EIG_TOL = 1e-8


class NonHermitianError(ValueError):
    pass


class PositivityError(ValueError):
    pass


@dataclass(frozen=True)
class DensityMatrix:
    """A density matrix tagged with what it describes.

    ``label`` is one of ``two-qubit``, ``qubit``, ``oscillator``,
    ``qubit-oscillator``; ``dims`` gives the tensor factor sizes.
    """

    entries: np.ndarray
    label: str = "two-qubit"
    dims: tuple[int, ...] = field(default=())

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {arr.shape}")
        object.__setattr__(self, "entries", arr)
        if not self.dims:
            object.__setattr__(self, "dims", (arr.shape[0],))
        elif int(np.prod(self.dims)) != arr.shape[0]:
            raise ValueError(f"dims {self.dims} do not match matrix size {arr.shape[0]}")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def hermiticity_error(self) -> float:
        return max_asymmetry(self.entries)


def as_array(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.entries
    return np.asarray(rho, dtype=complex)


def max_asymmetry(m) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def hermitian_eigensystem(m, tol: float = HERMITIAN_TOL):
    """Eigenvalues in descending order and the matching orthonormal columns.

    Raises :class:`NonHermitianError` when ``max|M - M^dag|`` exceeds ``tol``.
    """
    m = as_array(m)
    asym = max_asymmetry(m)
    if asym > tol:
        raise NonHermitianError(f"matrix is not Hermitian: max |M - M^dag| = {asym:.3e}")
    vals, vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    return vals[::-1], vecs[:, ::-1]


def _clipped_spectrum(rho) -> np.ndarray:
    vals = hermitian_eigensystem(rho)[0]
    if vals.min() < -NEG_EIG_TOL:
        raise PositivityError(f"density matrix has eigenvalue {vals.min():.3e} < -{NEG_EIG_TOL:g}")
    return np.clip(vals, 0.0, None)


def shannon_bits(p) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho) -> float:
    """``-Tr(rho log2 rho)`` in bits; eigenvalues in ``[-1e-8, 0)`` count as zero."""
    return shannon_bits(_clipped_spectrum(rho))


def purity(rho) -> float:
    m = as_array(rho)
    return float(np.real(np.vdot(m.conj().T, m)))


def hs_distance(rho, sigma) -> float:
    a, b = as_array(rho), as_array(sigma)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def partial_trace(rho, keep, dims) -> np.ndarray:
    """Trace out every factor not listed in ``keep`` (factor indices into ``dims``).

    Factors are in Kronecker order, i.e. ``dims[0]`` is the outermost index.
    The kept factors appear in the result in their original order.
    """
    m = as_array(rho)
    dims = tuple(int(d) for d in dims)
    if int(np.prod(dims)) != m.shape[0]:
        raise ValueError(f"dims {dims} do not multiply to matrix size {m.shape[0]}")
    if isinstance(keep, int):
        keep = (keep,)
    keep = sorted(set(keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep={keep} out of range for {len(dims)} factors")
    n = len(dims)
    t = m.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    kept = int(np.prod([dims[i] for i in keep])) if keep else 1
    return np.einsum("".join(row) + "".join(col) + "->" + out, t).reshape(kept, kept)
