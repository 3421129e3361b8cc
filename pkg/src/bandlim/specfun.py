"""Special functions used by the sampling grids and the reference examples.

Everything here is plain numpy and vectorized over array arguments:

* :func:`digamma` -- psi(z) for complex z via reflection, upward recurrence
  and the Bernoulli asymptotic series.
* :func:`bessel_j0`, :func:`bessel_j1` -- power series near the origin,
  Hankel asymptotic expansion beyond ``BESSEL_CROSSOVER``.
* :func:`bessel_j0_zeros` -- positive zeros of J0 by bisection.
* :func:`sinc`, :func:`sinpi`, :func:`cospi`, :func:`tent`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AccuracyBudget",
    "PoleError",
    "AccuracyWarning",
    "digamma",
    "digamma_with_budget",
    "bessel_j0",
    "bessel_j1",
    "bessel_j0_zeros",
    "sinc",
    "sinpi",
    "cospi",
    "tent",
    "EULER_GAMMA",
]

EULER_GAMMA = 0.57721566490153286061

#: psi is evaluated by its asymptotic series once Re(z) reaches this value.
DIGAMMA_ASYMPTOTIC_THRESHOLD = 12.0

# B_{2n} / (2n) for n = 1..8
_BERNOULLI_OVER_2N = np.array(
    [
        1.0 / 6.0 / 2.0,
        -1.0 / 30.0 / 4.0,
        1.0 / 42.0 / 6.0,
        -1.0 / 30.0 / 8.0,
        5.0 / 66.0 / 10.0,
        -691.0 / 2730.0 / 12.0,
        7.0 / 6.0 / 14.0,
        -3617.0 / 510.0 / 16.0,
    ]
)

BESSEL_CROSSOVER = 12.0
_HANKEL_TERMS = 24


@dataclass(frozen=True)
class AccuracyBudget:
    """Absolute error target for one evaluation and the regime that served it."""

    abs_tol: float = 1e-12
    method_tag: str = "auto"


DEFAULT_BUDGET = AccuracyBudget()


class PoleError(ValueError):
    """Raised when psi is requested at a nonpositive integer."""

    def __init__(self, pole: int):
        super().__init__(f"digamma has a pole at z = {pole}")
        self.pole = pole


class AccuracyWarning(UserWarning):
    pass


def sinpi(x):
    """sin(pi x) with exact argument reduction of the real part.

    Returns exact zeros at the integers, which the generating functions of
    uniform grids rely on.
    """
    x = np.asarray(x)
    if np.iscomplexobj(x):
        re = x.real - 2.0 * np.round(x.real / 2.0)
        return np.sin(np.pi * (re + 1j * x.imag))
    r = x - 2.0 * np.round(x / 2.0)
    out = np.sin(np.pi * r)
    # sin(pi * 1.0) is 1.2e-16, not 0
    return np.where(np.abs(r) == 1.0, 0.0, out)


def cospi(x):
    """cos(pi x) with exact argument reduction of the real part."""
    x = np.asarray(x)
    if np.iscomplexobj(x):
        re = x.real - 2.0 * np.round(x.real / 2.0)
        return np.cos(np.pi * (re + 1j * x.imag))
    r = x - 2.0 * np.round(x / 2.0)
    out = np.cos(np.pi * r)
    return np.where(np.abs(r) == 0.5, 0.0, out)


def sinc(t):
    """Normalized sinc, sin(pi t)/(pi t), with sinc(0) = 1."""
    t = np.asarray(t)
    small = np.abs(t) < 1e-8
    safe = np.where(small, 1.0, t)
    out = sinpi(safe) / (np.pi * safe)
    # second-order Taylor term is below 1e-16 inside the cut
    return np.where(small, 1.0 - (np.pi * t) ** 2 / 6.0, out)


def tent(t):
    """Unit triangular bump: 2t on (0, 1/2], 2 - 2t on (1/2, 1], 0 elsewhere."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    rise = (t > 0.0) & (t <= 0.5)
    fall = (t > 0.5) & (t <= 1.0)
    out[rise] = 2.0 * t[rise]
    out[fall] = 2.0 - 2.0 * t[fall]
    return out


def _check_poles(z):
    re, im = z.real, z.imag
    bad = (im == 0) & (re <= 0) & (re == np.round(re))
    if np.any(bad):
        raise PoleError(int(re[bad].flat[0]))


def _digamma_right(z):
    """psi(z) for Re(z) >= 1/2 by recurrence into the asymptotic zone."""
    shift = np.maximum(np.ceil(DIGAMMA_ASYMPTOTIC_THRESHOLD - z.real), 0).astype(int)
    acc = np.zeros_like(z)
    w = z.copy()
    for _ in range(int(shift.max()) if shift.size else 0):
        active = shift > 0
        acc = acc - np.where(active, 1.0 / np.where(active, w, 1.0), 0.0)
        w = np.where(active, w + 1.0, w)
        shift = shift - 1
    inv2 = 1.0 / (w * w)
    series = np.zeros_like(w)
    for coeff in _BERNOULLI_OVER_2N[::-1]:
        series = (series + coeff) * inv2
    return acc + np.log(w) - 0.5 / w - series


def digamma_with_budget(z, budget: AccuracyBudget = DEFAULT_BUDGET):
    """psi(z) together with the budget actually achieved.

    Returns ``(value, AccuracyBudget)`` where ``abs_tol`` is an a-priori error
    estimate and ``method_tag`` names the regime (``asymptotic``,
    ``recurrence`` or ``reflection``).  Emits :class:`AccuracyWarning` when
    the estimate exceeds ``budget.abs_tol``.
    """
    scalar = np.ndim(z) == 0
    zc = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_poles(zc)

    left = zc.real < 0.5
    out = np.empty_like(zc)
    if np.any(~left):
        out[~left] = _digamma_right(zc[~left])
    if np.any(left):
        zl = zc[left]
        # psi(z) = psi(1 - z) - pi cot(pi z)
        cot = cospi(zl) / sinpi(zl)
        out[left] = _digamma_right(1.0 - zl) - np.pi * cot

    eps = np.finfo(float).eps
    scale = np.maximum(1.0, np.abs(np.log(np.abs(zc) + 1.0)))
    est = 8 * eps * scale
    if np.any(left):
        zl = zc[left]
        # conditioning of the cot term near the poles
        s = np.abs(sinpi(zl))
        est_left = 8 * eps * (np.abs(zl) + 1.0) * np.pi / np.maximum(s * s, 1e-300)
        est = est.copy()
        est[left] = np.maximum(est[left], est_left)
        tag = "reflection"
    elif np.all(zc.real >= DIGAMMA_ASYMPTOTIC_THRESHOLD):
        tag = "asymptotic"
    else:
        tag = "recurrence"
    achieved = float(est.max())
    if achieved > budget.abs_tol:
        warnings.warn(
            f"digamma error estimate {achieved:.2e} exceeds budget {budget.abs_tol:.2e}",
            AccuracyWarning,
            stacklevel=2,
        )

    if not np.iscomplexobj(z) and np.all(np.asarray(z).imag == 0):
        out = out.real
    value = out[0] if scalar else out.reshape(np.shape(z))
    return value, AccuracyBudget(abs_tol=achieved, method_tag=tag)


def digamma(z, budget: AccuracyBudget = DEFAULT_BUDGET):
    """Digamma psi(z) = Gamma'(z)/Gamma(z).

    Real input gives real output.  Raises :class:`PoleError` at the
    nonpositive integers.
    """
    return digamma_with_budget(z, budget)[0]


def _bessel_series(x, nu):
    h = (x * 0.5) ** 2
    term = (x * 0.5) ** nu / math.factorial(nu)
    s = term.copy()
    for m in range(1, 60):
        term = term * (-h / (m * (m + nu)))
        s = s + term
    return s


def _bessel_hankel(x, nu):
    mu = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    a = np.ones_like(x)
    for k in range(1, _HANKEL_TERMS + 1):
        a = a * ((mu - (2 * k - 1) ** 2) / (k * 8.0 * x))
        if k % 2:
            q = q + (-1) ** ((k - 1) // 2) * a
        else:
            p = p + (-1) ** (k // 2) * a
    chi = x - (0.5 * nu + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _bessel(x, nu):
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x))
    cplx = np.iscomplexobj(x)
    x = x.astype(complex if cplx else float)
    flip = x.real < 0
    w = np.where(flip, -x, x)
    out = np.empty_like(w)
    near = np.abs(w) <= BESSEL_CROSSOVER
    if np.any(near):
        out[near] = _bessel_series(w[near], nu)
    if np.any(~near):
        out[~near] = _bessel_hankel(w[~near], nu)
    if nu % 2:
        out = np.where(flip, -out, out)
    return out[0] if scalar else out


def bessel_j0(x):
    """Bessel function J0 (abs error ~1e-12 on the real line for |x| <= 1e4).

    Complex arguments are accepted for the sine-type checks; the same
    series/asymptotic split is used with the crossover applied to |x|.
    """
    return _bessel(x, 0)


def bessel_j1(x):
    """Bessel function J1 on the real line; J0' = -J1."""
    return _bessel(x, 1)


def bessel_j0_zeros(count: int, tol: float = 1e-13) -> np.ndarray:
    """First ``count`` positive zeros of J0.

    Brackets come from the leading asymptotic term ``(m - 1/4) pi``; each
    bracket is refined by bisection until its width is below ``tol``.
    """
    m = np.arange(1, count + 1, dtype=float)
    beta = (m - 0.25) * np.pi
    lo = beta - 0.5
    hi = beta + 0.5
    flo = bessel_j0(lo)
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        fmid = bessel_j0(mid)
        same = np.sign(fmid) == np.sign(flo)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fmid, flo)
        hi = np.where(same, hi, mid)
        if np.all(hi - lo <= 4 * np.finfo(float).eps * hi):
            break
    return 0.5 * (lo + hi)
