"""Polynomial and overlap kernels for displaced / squeezed Fock states.

Conventions
-----------
``D(x) = exp(x a^dag - x* a)`` and ``S(xi) = exp((xi a^dag^2 - xi* a^2) / 2)``,
so that ``S^dag a S = mu a + nu a^dag`` with ``mu = cosh r`` and
``nu = exp(i vartheta) sinh r``.

Every Hermite evaluation that multiplies a power of ``sqrt(nu / 2 mu)`` is
carried out on the *scaled* polynomial ``s^n H_n(y / s)``, which is a
polynomial in ``s^2`` and therefore has no singularity as ``nu -> 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

R_MIN = 1e-6
_RESCALE = 1e100


def log_factorial(n: int) -> float:
    """Return ``ln(n!)``."""
    if n < 0:
        raise ValueError(f"log_factorial needs n >= 0, got {n}")
    if n < 2:
        return 0.0
    return math.lgamma(n + 1.0)


# ---------------------------------------------------------------------------
# Laguerre / Hermite


def laguerre_table(n: int, j: float, x):
    """Return ``[L_0^{(j)}(x), ..., L_n^{(j)}(x)]`` by the three-term recurrence.

    ``x`` may be an array; the leading axis of the result is the degree.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = 1.0 + j - x
    for k in range(1, n):
        out[k + 1] = ((2 * k + 1 + j - x) * out[k] - (k + j) * out[k - 1]) / (k + 1)
    return out


def laguerre_assoc(n: int, j: float, x: float) -> float:
    """Associated Laguerre polynomial ``L_n^{(j)}(x)``."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    return float(laguerre_table(n, j, x)[n])


def hermite_scaled(n: int, z: complex) -> tuple[complex, int]:
    """Physicists' Hermite polynomial as ``(mantissa, exponent)``.

    ``H_n(z) == mantissa * 2.0**exponent``. The recurrence
    ``H_{k+1} = 2 z H_k - 2 k H_{k-1}`` is renormalised whenever the running
    values grow past 1e100, so large degrees and arguments do not overflow.
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    z = complex(z)
    h_prev, h = 1.0 + 0j, 2.0 * z
    if n == 0:
        return h_prev, 0
    exponent = 0
    for k in range(1, n):
        h_prev, h = h, 2.0 * z * h - 2.0 * k * h_prev
        big = max(abs(h), abs(h_prev))
        if big > _RESCALE:
            e = math.frexp(big)[1]
            h, h_prev = math.ldexp(1.0, -e) * h, math.ldexp(1.0, -e) * h_prev
            exponent += e
    return h, exponent


def hermite(n: int, z: complex) -> complex:
    """``H_n(z)``; overflows to ``inf`` only when the true value does."""
    m, e = hermite_scaled(n, z)
    if m == 0:
        return 0j
    mag = math.log2(abs(m)) + e
    if mag > 1023:
        return complex(math.inf, 0.0) * (m / abs(m))
    return m * 2.0**e


def scaled_hermite_table(n: int, y, s2, log_prefactor=0.0):
    """Normalised, scaled Hermite values ``exp(P) * s^k H_k(y / s) / sqrt(k!)``.

    Here ``s^2 = s2`` and ``P = log_prefactor``; ``y``, ``s2`` and ``P``
    broadcast together. Values are generated with

        g_{k+1} = (2 y g_k - 2 sqrt(k) s2 g_{k-1}) / sqrt(k + 1)

    and renormalised in log space whenever they leave ``[1e-100, 1e100]``, so
    a Gaussian prefactor that underflows on its own is still handled.
    Returns an array with the degree on the leading axis.
    """
    y = np.asarray(y, dtype=complex)
    s2 = np.asarray(s2, dtype=complex)
    logp = np.asarray(log_prefactor, dtype=complex)
    shape = np.broadcast(y, s2, logp).shape
    y = np.broadcast_to(y, shape)
    s2 = np.broadcast_to(s2, shape)
    logp = np.broadcast_to(logp, shape)

    out = np.empty((n + 1,) + shape, dtype=complex)
    # running log-scale carried separately from the mantissas
    scale = logp.real.copy()
    phase = np.exp(1j * logp.imag)
    g_prev = np.zeros(shape, dtype=complex)
    g = phase.copy()
    out[0] = _apply_scale(g, scale)
    for k in range(n):
        g_next = (2.0 * y * g - 2.0 * math.sqrt(k) * s2 * g_prev) / math.sqrt(k + 1)
        g_prev, g = g, g_next
        mag = np.abs(g)
        rescale = (mag > _RESCALE) | ((mag < 1.0 / _RESCALE) & (mag > 0))
        if np.any(rescale):
            f = np.where(rescale, mag, 1.0)
            g = g / f
            g_prev = g_prev / f
            scale = scale + np.log(f)
        out[k + 1] = _apply_scale(g, scale)
    return out


def _apply_scale(g, scale):
    with np.errstate(over="ignore", under="ignore"):
        return g * np.exp(np.clip(scale, -745.0, 709.0))


# ---------------------------------------------------------------------------
# Displaced number states


@dataclass(frozen=True)
class OverlapKernelArgs:
    m: int
    n: int
    x: float


def displaced_overlap(m, n: int | None = None, x: float | None = None) -> float:
    """``<m| D(x) |n>`` for real ``x`` (both branches of the Laguerre form).

    Accepts ``(m, n, x)`` or a single :class:`OverlapKernelArgs`.
    """
    if isinstance(m, OverlapKernelArgs):
        m, n, x = m.m, m.n, m.x
    if m < 0 or n < 0:
        raise ValueError("Fock indices must be >= 0")
    x = float(x)
    if m >= n:
        return _overlap_lower(m, n, x)
    return (-1) ** (n - m) * _overlap_lower(n, m, x)


def _overlap_lower(m: int, n: int, x: float) -> float:
    # m >= n branch, evaluated in log-magnitude
    j = m - n
    lag = laguerre_assoc(n, j, x * x)
    if lag == 0.0 or (x == 0.0 and j > 0):
        return 0.0
    log_mag = -0.5 * x * x + 0.5 * (log_factorial(n) - log_factorial(m)) + math.log(abs(lag))
    if j:
        log_mag += j * math.log(abs(x))
    sign = math.copysign(1.0, lag) * (math.copysign(1.0, x) ** j)
    return sign * math.exp(log_mag)


def displaced_overlap_matrix(x: float, n_max: int) -> np.ndarray:
    """The block ``M[m, n] = <m| D(x) |n>`` for ``0 <= m, n <= n_max``."""
    x = float(x)
    size = n_max + 1
    out = np.zeros((size, size))
    lf = np.array([log_factorial(k) for k in range(size + size)])
    for j in range(size):
        count = size - j
        n_idx = np.arange(count)
        lag = laguerre_table(count - 1, j, x * x)
        if j and x == 0.0:
            continue
        log_pref = -0.5 * x * x + 0.5 * (lf[n_idx] - lf[n_idx + j])
        if j:
            log_pref = log_pref + j * math.log(abs(x))
        sign = math.copysign(1.0, x) ** j
        with np.errstate(under="ignore"):
            vals = sign * lag * np.exp(log_pref)
        out[n_idx + j, n_idx] = vals
        if j:
            out[n_idx, n_idx + j] = (-1) ** j * vals
    return out


# ---------------------------------------------------------------------------
# Squeezed frames


@dataclass(frozen=True)
class SqueezeDisplaceArgs:
    """Arguments of ``<r, n_eta | alpha>`` with ``|r, n_eta> = S^dag(r) D^dag(eta) |n>``."""

    r: float
    eta: float
    alpha: complex
    n: int
    vartheta: float = 0.0

    @property
    def mu(self) -> float:
        return math.cosh(self.r)

    @property
    def nu(self) -> complex:
        return complex(math.sinh(self.r) * np.exp(1j * self.vartheta))


def squeezed_coherent_overlaps(n_max: int, r: float, eta: float, alpha, r_min: float = R_MIN) -> np.ndarray:
    """``<r, n_eta | alpha>`` for ``n = 0..n_max``; ``alpha`` may be an array.

    Closed form (real squeeze ``r``)::

        (i sqrt(nu/2mu))^n / sqrt(mu n!) H_n(-i((mu-nu) eta + alpha)/sqrt(2 mu nu))
          * exp(-(mu-nu) eta^2/(2mu) - |alpha|^2/2 - alpha^2 nu/(2mu) - eta alpha/mu)

    For ``r < r_min`` the Hermite factor is replaced by its expansion to first
    order in ``nu``, which is the analytic ``nu -> 0`` reduction.
    """
    if r < 0:
        raise ValueError("squeeze magnitude must be >= 0")
    alpha = np.asarray(alpha, dtype=complex)
    mu, nu = math.cosh(r), math.sinh(r)
    s2 = nu / (2.0 * mu)
    y = -1j * ((mu - nu) * eta + alpha) / (2.0 * mu)
    log_pref = (
        -(mu - nu) * eta**2 / (2.0 * mu)
        - 0.5 * np.abs(alpha) ** 2
        - alpha**2 * nu / (2.0 * mu)
        - eta * alpha / mu
        - 0.5 * math.log(mu)
    )
    if r < r_min:
        g = _small_squeeze_table(n_max, y, s2, log_pref)
    else:
        g = scaled_hermite_table(n_max, y, s2, log_pref)
    phase = (1j) ** np.arange(n_max + 1)
    return phase.reshape((-1,) + (1,) * alpha.ndim) * g


def _small_squeeze_table(n_max, y, s2, log_pref):
    # s^n H_n(y/s)/sqrt(n!) = h_n - sqrt(n(n-1)) s2 h_{n-2} + O(s2^2), h_n = (2y)^n/sqrt(n!)
    h = scaled_hermite_table(n_max, y, 0.0, log_pref)
    g = h.copy()
    for k in range(2, n_max + 1):
        g[k] = h[k] - math.sqrt(k * (k - 1)) * s2 * h[k - 2]
    return g


def squeezed_coherent_overlap(args: SqueezeDisplaceArgs) -> complex:
    """Scalar ``<r, n_eta | alpha>`` (real squeeze; ``vartheta`` must be 0)."""
    if args.vartheta != 0.0:
        raise ValueError("frame overlaps are defined for a real squeeze parameter")
    return complex(squeezed_coherent_overlaps(args.n, args.r, args.eta, args.alpha)[args.n])


def _squeeze_parts(xi: complex):
    r = abs(xi)
    theta = np.angle(xi) if r else 0.0
    return math.cosh(r), complex(np.exp(1j * theta) * math.sinh(r))


def disp_squeeze_matrix_element(m: int, alpha: complex, xi: complex, n: int) -> complex:
    """``<m| D(alpha) S(xi) |n>`` from the double-Hermite finite sum.

    Written in normalised form::

        i^m / sqrt(mu) exp(-|a|^2/2 + a*^2 nu/(2mu))
          * sum_k sqrt(C(m,k) C(n,k)) (-i/mu)^k g1_{m-k} g2_{n-k}

    with ``g1_j = s1^j H_j(y1/s1)/sqrt(j!)``, ``s1^2 = nu/2mu``,
    ``y1 = -i(mu a - nu a*)/2mu`` and ``g2`` likewise with ``s2^2 = nu*/2mu``,
    ``y2 = -a*/2mu``. The sum cancels badly for large indices and large
    displacements; :func:`disp_squeeze_matrix` is the stable route for blocks.
    """
    alpha = complex(alpha)
    mu, nu = _squeeze_parts(xi)
    ac = alpha.conjugate()
    g1 = scaled_hermite_table(m, -1j * (mu * alpha - nu * ac) / (2 * mu), nu / (2 * mu))
    g2 = scaled_hermite_table(n, -ac / (2 * mu), nu.conjugate() / (2 * mu))
    total = 0j
    for k in range(min(m, n) + 1):
        log_binom = 0.5 * (
            log_factorial(m) - log_factorial(k) - log_factorial(m - k)
            + log_factorial(n) - log_factorial(k) - log_factorial(n - k)
        )
        total += math.exp(log_binom) * (-1j / mu) ** k * g1[m - k] * g2[n - k]
    pref = (1j) ** m / math.sqrt(mu) * np.exp(-0.5 * abs(alpha) ** 2 + ac**2 * nu / (2 * mu))
    return complex(pref * total)


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Normalised oscillator eigenfunctions ``psi_0..psi_n_max`` at ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    with np.errstate(under="ignore"):
        out[0] = np.pi**-0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, n_max):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def squeeze_matrix(r: float, n_rows: int, n_cols: int | None = None) -> np.ndarray:
    """Block ``<m| S(r) |n>`` for a real squeeze ``r`` (either sign).

    ``S(r)`` acts on wavefunctions as the dilation ``psi(x) -> e^{-r/2} psi(e^{-r} x)``,
    so each element is an overlap integral of two Hermite functions. The
    integrand is smooth and Gaussian-bounded, and the trapezoid rule on a grid
    finer than its highest local wavenumber converges to machine precision.
    """
    if n_cols is None:
        n_cols = n_rows
    r = float(r)
    k_rows = math.sqrt(2 * n_rows + 1)
    k_cols = math.sqrt(2 * n_cols + 1)
    half = max(k_rows, math.exp(r) * k_cols) + 10.0
    kmax = k_rows + math.exp(-r) * k_cols + 10.0
    h = math.pi / kmax / 1.5
    x = np.arange(-half, half + h, h)
    left = hermite_functions(n_rows, x)
    right = math.exp(-0.5 * r) * hermite_functions(n_cols, math.exp(-r) * x)
    out = h * left @ right.T
    # parity selection rule holds exactly
    parity = (np.arange(n_rows + 1)[:, None] + np.arange(n_cols + 1)[None, :]) % 2 == 1
    out[parity] = 0.0
    return out


def displacement_matrix(alpha: complex, n_rows: int, n_cols: int | None = None) -> np.ndarray:
    """Block ``<m| D(alpha) |n>``; complex ``alpha`` via ``R(phi) D(|alpha|) R(-phi)``."""
    if n_cols is None:
        n_cols = n_rows
    alpha = complex(alpha)
    size = max(n_rows, n_cols)
    mag, phi = abs(alpha), np.angle(alpha)
    block = displaced_overlap_matrix(mag, size)[: n_rows + 1, : n_cols + 1]
    diff = np.arange(n_rows + 1)[:, None] - np.arange(n_cols + 1)[None, :]
    return block * np.exp(1j * phi * diff)


def disp_squeeze_matrix(alpha: complex, xi: complex, n_rows: int, n_cols: int | None = None) -> np.ndarray:
    """Block ``A[m, n] = <m| D(alpha) S(xi) |n>`` for ``m <= n_rows``, ``n <= n_cols``.

    The finite double sum of :func:`disp_squeeze_matrix_element` loses all
    accuracy to cancellation at large indices, so blocks are assembled as a
    product of the Laguerre displacement block and the quadrature squeeze
    block, with the inner Fock index carried far enough that the squeezed
    columns have no weight beyond it.
    """
    if n_cols is None:
        n_cols = n_rows
    alpha = complex(alpha)
    r = abs(xi)
    theta = float(np.angle(xi)) if r else 0.0
    inner = n_rows + int(math.ceil(math.exp(2 * r) * (n_cols + 8) + 8 * math.sqrt(n_cols + 8))) + 40
    sq = squeeze_matrix(r, inner, n_cols)
    diff = np.arange(inner + 1)[:, None] - np.arange(n_cols + 1)[None, :]
    sq = sq * np.exp(0.5j * theta * diff)
    return displacement_matrix(alpha, n_rows, inner) @ sq


def frame_to_fock(r: float, eta: float, n_rows: int, n_cols: int | None = None) -> np.ndarray:
    """``T[k, n] = <k| S^dag(r) D^dag(eta) |n>``.

    Uses ``S^dag(r) D^dag(eta) = D(-eta e^{-r}) S(-r)`` for real ``r``, ``eta``.
    """
    return disp_squeeze_matrix(-eta * math.exp(-r), -r, n_rows, n_cols)
