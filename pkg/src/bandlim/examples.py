"""Reference functions and sample sequences.

* G1(z) = sin(pi z) psi(-z): bounded-data samples a_k = 0 (k < 0),
  (-1)^k pi (k >= 0), yet unbounded on the negative axis.
* G3(z) = sum_k (-1)^k sin(pi z / (3 * 2^k)): finite BMO seminorm while
  G3(2^n) grows linearly in n.
* The one-sided sequence (-1)^k / log(k + 1), k >= 1.
* Seeded uniform noise realizations via a counter-based generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .grid import uniform_grid
from .interp import AugmentedSamples
from .specfun import EULER_GAMMA, cospi, digamma, sinpi

__all__ = [
    "NamedFunction",
    "eval_g1",
    "g1_samples",
    "g1_sample_fn",
    "G1_AT_MINUS_HALF",
    "gauss_reference",
    "eval_g3",
    "g3_terms",
    "g3_plus_derivative",
    "g3_plus_exponentials",
    "boche_monich_samples",
    "g2_realization",
    "realization_generator",
    "NAMED_FUNCTIONS",
]

#: G1(-1/2) = sin(-pi/2) psi(1/2) = gamma + 2 log 2.
G1_AT_MINUS_HALF = EULER_GAMMA + 2.0 * math.log(2.0)


@dataclass(frozen=True)
class NamedFunction:
    tag: str
    eval: Callable
    declared_type: float


def eval_g1(z):
    """G1(z) = sin(pi z) psi(-z), continued through the removable points.

    For Re z >= -1/2 the reflection psi(-z) = psi(1 + z) + pi cot(pi z) gives
    the pole-free form sin(pi z) psi(1 + z) + pi cos(pi z); at z = k >= 0 it
    reduces to (-1)^k pi exactly.  For Re z < -1/2, -z lies in the right
    half-plane and the original product is regular.
    """
    z = np.asarray(z)
    scalar = z.ndim == 0
    zz = np.atleast_1d(z)
    cplx = np.iscomplexobj(zz)
    zz = zz.astype(complex if cplx else float)
    out = np.empty_like(zz)
    right = zz.real >= -0.5
    if np.any(right):
        zr = zz[right]
        s = sinpi(zr)
        psi = np.zeros_like(zr)
        nz = s != 0
        if np.any(nz):
            psi[nz] = digamma(1.0 + zr[nz])
        out[right] = s * psi + np.pi * cospi(zr)
    if np.any(~right):
        zl = zz[~right]
        s = sinpi(zl)
        psi = np.zeros_like(zl)
        nz = s != 0
        if np.any(nz):
            psi[nz] = digamma(-zl[nz])
        out[~right] = s * psi
    return out[0] if scalar else out


def g1_samples(K: int, x_tilde: float = -0.5) -> tuple:
    """Uniform b=1 grid on [-K, K] with G1's integer samples and a~ = G1(x~)."""
    grid = uniform_grid(1.0, K, x_tilde)
    k = grid.labels
    a = np.where(k >= 0, np.where(k % 2 == 0, np.pi, -np.pi), 0.0)
    return grid, AugmentedSamples(a, float(eval_g1(x_tilde)))


def g1_sample_fn(k):
    k = np.asarray(k)
    return np.where(k >= 0, np.where(k % 2 == 0, np.pi, -np.pi), 0.0)


def gauss_reference(k: int) -> float:
    """(-1)^k (H_{k-1} + sum_{m=k}^{2k-1} 2/m), the constant-free part at k - 1/2."""
    if k < 1:
        raise ValueError("k must be a positive integer")
    h = math.fsum(1.0 / m for m in range(1, k))
    t = math.fsum(2.0 / m for m in range(k, 2 * k))
    return (-1.0) ** k * (h + t)


def g3_terms(z, tol: float = 1e-15) -> int:
    """Number of G3 terms so that the tail bound pi|z|/(3 2^K) e^{...} is below tol."""
    az = float(np.max(np.abs(np.asarray(z)))) if np.size(z) else 0.0
    if az == 0.0:
        return 1
    ay = float(np.max(np.abs(np.imag(np.asarray(z)))))
    K = 1
    while True:
        lam = np.pi / (3.0 * 2.0**K)
        if lam * az * math.exp(lam * ay) <= tol or K >= 1100:
            return K
        K += 1


def eval_g3(z, tol: float = 1e-15):
    """Partial sums of G3 with K terms, sum_{k>=K} |sin(w_k)| <= tol.

    The omitted terms have |sin(w)| <= |w| e^{|Im w|} with w = pi z/(3 2^k),
    which sums to at most 2 pi |z| e^{pi |Im z|/(3 2^K)}/(3 2^K).
    """
    z = np.asarray(z)
    K = g3_terms(z, tol / 2.0)
    out = np.zeros(z.shape, dtype=np.result_type(z, float))
    for k in range(K - 1, -1, -1):
        out = out + (-1.0) ** k * sinpi(z / (3.0 * 2.0**k))
    return out


def g3_plus_exponentials(n_terms: int = 60, derivative: bool = False):
    """Coefficients and frequencies of G3+(w) = (1/2i) sum_k (-1)^k e^{i lam_k w}.

    With ``derivative`` the coefficients are those of G3+'(w), i.e. multiplied
    by i lam_k; only the derivative series converges.
    """
    k = np.arange(n_terms)
    lam = np.pi / (3.0 * 2.0**k)
    coef = ((-1.0) ** k) / 2j
    if derivative:
        coef = coef * 1j * lam
    return coef, lam


def g3_plus_derivative(w, n_terms: int = 60):
    """d/dw G3+(w) = sum_k (1/2i)(-1)^k (i lam_k) e^{i lam_k w}, analytic on Im w > 0."""
    coef, lam = g3_plus_exponentials(n_terms, derivative=True)
    w = np.asarray(w, dtype=complex)
    out = np.zeros(w.shape, complex)
    for c, l in zip(coef, lam):
        out = out + c * np.exp(1j * l * w)
    return out


def boche_monich_samples(K: int) -> tuple:
    """a_k = (-1)^k / log(k + 1) for 1 <= k <= K, zero otherwise; (x~, a~) = (1/2, 0)."""
    if K < 1:
        raise ValueError("K must be at least 1")
    grid = uniform_grid(1.0, K, 0.5)
    k = grid.labels
    a = np.zeros(k.size)
    pos = k >= 1
    a[pos] = np.where(k[pos] % 2 == 0, 1.0, -1.0) / np.log(k[pos] + 1.0)
    return grid, AugmentedSamples(a, 0.0)


# stream identifiers: one Philox key per (seed, stream, realization)
_STREAM_POS, _STREAM_NEG, _STREAM_EXTRA = 1, 2, 3


def realization_generator(seed: int, stream: int, realization: int = 0) -> np.random.Generator:
    """Counter-based generator keyed only by (seed, stream, realization)."""
    ss = np.random.SeedSequence([int(seed), int(stream), int(realization)])
    return np.random.Generator(np.random.Philox(ss))


def _uniform_draws(seed, stream, realization, n, alpha):
    if n == 0:
        return np.zeros(0)
    u = realization_generator(seed, stream, realization).random(n)
    return alpha * (2.0 * u - 1.0)


def g2_realization(alpha: float, seed: int, K: int, realization: int = 0,
                   one_sided: bool = False, x_tilde: float = 0.5) -> tuple:
    """I.i.d. uniform[-alpha, alpha] samples on k = -K..K plus a~, for nodes k.

    Positive and negative indices draw from separate streams in order of |k|,
    so a window of size K is a prefix of any larger window.  With
    ``one_sided`` the samples at k <= 0 and a~ are zero.
    """
    if not alpha >= 0:
        raise ValueError("alpha must be nonnegative")
    grid = uniform_grid(1.0, K, x_tilde)
    pos = _uniform_draws(seed, _STREAM_POS, realization, K, alpha)  # k = 1..K
    neg = _uniform_draws(seed, _STREAM_NEG, realization, K + 1, alpha)  # k = 0, -1, ..., -K
    extra = float(_uniform_draws(seed, _STREAM_EXTRA, realization, 1, alpha)[0])
    a = np.concatenate([neg[::-1], pos])
    if one_sided:
        a[: K + 1] = 0.0
        extra = 0.0
    return grid, AugmentedSamples(a, extra)


NAMED_FUNCTIONS = {
    "g1": NamedFunction("g1", eval_g1, np.pi),
    "g3": NamedFunction("g3", eval_g3, np.pi / 3.0),
}
