"""Functionals of sampled functions.

Running averages, a lower-bound BMO estimator over a dyadic interval family,
the Carleson functional of 2v|g'(u + iv)|^2 du dv over boxes touching the
axis, a principal-value Hilbert transform on a lattice, and the kernel
K(c, t) together with its closed-form Hilbert transform.  All quadrature is
composite trapezoid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.signal import fftconvolve

from .specfun import sinc, sinpi

__all__ = [
    "AnalysisError",
    "SampledFunction",
    "BmoEstimate",
    "CarlesonEstimate",
    "sample",
    "running_average",
    "one_sided_average",
    "bmo_seminorm",
    "dyadic_scales",
    "carleson_functional",
    "hilbert_numeric",
    "kernel_K",
    "kernel_K_hilbert",
    "derivative_sup",
    "trapezoid",
]


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values on the uniform lattice t_i = t0 + i dt, i = 0..n-1."""

    t0: float
    dt: float
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1 or v.size < 2:
            raise AnalysisError("a sampled function needs at least two values")
        if not self.dt > 0:
            raise AnalysisError("dt must be positive")
        if not np.all(np.isfinite(v)):
            raise AnalysisError("sampled values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n)

    @property
    def span(self) -> tuple[float, float]:
        return self.t0, self.t0 + self.dt * (self.n - 1)

    def index_of(self, t: float) -> int:
        """Lattice index of ``t``; ``t`` must be a lattice point to 1e-6 dt."""
        x = (t - self.t0) / self.dt
        i = int(round(x))
        if abs(x - i) > 1e-6 or not 0 <= i < self.n:
            raise AnalysisError(f"t={t!r} is not a point of the lattice")
        return i


def sample(fn, t0: float, t1: float, dt: float, provenance: dict | None = None) -> SampledFunction:
    n = int(round((t1 - t0) / dt)) + 1
    t = t0 + dt * np.arange(n)
    return SampledFunction(t0, dt, np.asarray(fn(t)), dict(provenance or {}))


def trapezoid(values, dt: float) -> float:
    v = np.asarray(values)
    return dt * (v.sum() - 0.5 * (v[0] + v[-1]))


def _cumtrapz(v, dt):
    """c[i] = integral from t_0 to t_i."""
    c = np.zeros(v.size, dtype=np.result_type(v, float))
    c[1:] = np.cumsum(0.5 * dt * (v[1:] + v[:-1]))
    return c


def running_average(f: SampledFunction, radii) -> list[tuple[float, float]]:
    """(r, (1/2r) int_{-r}^{r} |f|) for each radius."""
    absf = np.abs(f.values)
    c = _cumtrapz(absf, f.dt)
    out = []
    for r in radii:
        r = float(r)
        if not r > 0:
            raise AnalysisError("radii must be positive")
        try:
            i0, i1 = f.index_of(-r), f.index_of(r)
        except AnalysisError as e:
            raise AnalysisError(f"radius {r} exceeds the lattice span {f.span}") from e
        out.append((r, float((c[i1] - c[i0]) / (2 * r))))
    return out


def one_sided_average(f: SampledFunction, radii) -> list[tuple[float, float]]:
    """(r, (1/r) int_{-r}^{0} |f|) for each radius."""
    absf = np.abs(f.values)
    c = _cumtrapz(absf, f.dt)
    out = []
    for r in radii:
        r = float(r)
        try:
            i0, i1 = f.index_of(-r), f.index_of(0.0)
        except AnalysisError as e:
            raise AnalysisError(f"radius {r} exceeds the lattice span {f.span}") from e
        out.append((r, float((c[i1] - c[i0]) / r)))
    return out


@dataclass
class BmoEstimate:
    """Lower bound for the BMO seminorm over a finite interval family."""

    seminorm: float
    witness_interval: tuple[float, float]
    scales_tested: list[float]
    offsets_per_scale: int
    per_scale: list[float] = field(default_factory=list)

    def to_dict(self):
        return {
            "seminorm": self.seminorm,
            "witness_interval": list(self.witness_interval),
            "scales_tested": list(self.scales_tested),
            "offsets_per_scale": self.offsets_per_scale,
            "per_scale": list(self.per_scale),
            "kind": "lower bound over a finite interval family",
        }


def dyadic_scales(f: SampledFunction, base_points: int = 64) -> list[float]:
    """Lengths base_points * dt * 2^m that fit in the lattice span."""
    span = f.dt * (f.n - 1)
    out = []
    L = base_points * f.dt
    while L <= span * (1 + 1e-12):
        out.append(L)
        L *= 2
    return out


def bmo_seminorm(f: SampledFunction, scales=None, offsets_per_scale: int = 64) -> BmoEstimate:
    """max over intervals I of (1/|I|) int_I |f - f_I|, f_I the trapezoid mean.

    For a scale of ``m`` lattice cells the window starts are
    ``round(j * m / offsets_per_scale)``, so doubling the offsets adds windows
    and never removes any.
    """
    if offsets_per_scale < 1:
        raise AnalysisError("offsets_per_scale must be positive")
    if scales is None:
        scales = dyadic_scales(f)
    v = f.values
    best, witness, tested, per_scale = -1.0, None, [], []
    for L in scales:
        m = int(round(float(L) / f.dt))
        if m < 4:
            raise AnalysisError(f"scale {L} is below 4 dt")
        if m > f.n - 1:
            continue
        starts_f = np.arange(0, f.n - m, m / offsets_per_scale)
        starts = np.unique(np.round(starts_f).astype(int))
        starts = starts[starts + m <= f.n - 1]
        if starts.size == 0:
            starts = np.array([0])
        win = sliding_window_view(v, m + 1)[starts]
        w = np.ones(m + 1)
        w[0] = w[-1] = 0.5
        length = m * f.dt
        mean = (win @ w) * f.dt / length
        osc = (np.abs(win - mean[:, None]) @ w) * f.dt / length
        j = int(np.argmax(osc))
        tested.append(length)
        per_scale.append(float(osc[j]))
        if osc[j] > best:
            best = float(osc[j])
            witness = (float(f.t0 + starts[j] * f.dt), length)
    if not tested:
        raise AnalysisError("no scale fits inside the lattice span")
    return BmoEstimate(best, witness, tested, offsets_per_scale, per_scale)


@dataclass
class CarlesonEstimate:
    functional: float
    square_family: str
    integrand: str = "2 v |g'(u + i v)|^2 (gradient square of the Poisson extension)"
    witness: tuple[float, float] | None = None
    per_radius: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "functional": self.functional,
            "square_family": self.square_family,
            "integrand": self.integrand,
            "witness": None if self.witness is None else list(self.witness),
            "per_radius": {str(k): v for k, v in self.per_radius.items()},
        }


def _v_weights(r, dv):
    nv = int(round(r / dv))
    v = dv * np.arange(nv + 1)
    w = np.full(nv + 1, dv)
    w[0] = w[-1] = 0.5 * dv
    return v, w


def carleson_functional(
    f_plus_derivative=None,
    a_values=(0.0,),
    radii=(1.0,),
    du: float = 1e-2,
    dv: float = 1e-2,
    exponential_sum=None,
    decay_type: float | None = None,
) -> CarlesonEstimate:
    """max over boxes [a, a + r] x (0, r] of (1/r) int int 2 v |g'(u + i v)|^2 du dv.

    ``f_plus_derivative`` evaluates g' on the closed upper half-plane.  For
    g'(w) = sum_k A_k exp(i lam_k w) pass ``exponential_sum=(A, lam)``; the
    v-quadrature then reduces to a small Gram matrix per radius.  Box corners
    ``a`` and sides ``r`` must be multiples of ``du``.
    """
    a_values = np.asarray(sorted(a_values), dtype=float)
    radii = [float(r) for r in radii]
    if f_plus_derivative is None and exponential_sum is None:
        raise AnalysisError("need a derivative evaluator or an exponential sum")
    ia = np.round(a_values / du).astype(int)
    ir = [int(round(r / du)) for r in radii]
    if np.any(np.abs(ia * du - a_values) > 1e-9) or any(abs(k * du - r) > 1e-9 for k, r in zip(ir, radii)):
        raise AnalysisError("box corners and sides must be multiples of du")
    u_lo, u_hi = ia.min(), ia.max() + max(ir)
    u = du * np.arange(u_lo, u_hi + 1)
    # H[r](u) = int_0^r 2 v |g'(u + iv)|^2 dv by trapezoid in v
    H = {}
    if exponential_sum is not None:
        A, lam = (np.asarray(x) for x in exponential_sum)
        E = A[None, :] * np.exp(1j * np.outer(u, lam))
        for r in radii:
            v, w = _v_weights(r, dv)
            decay = np.exp(-np.add.outer(lam, lam)[:, :, None] * v[None, None, :])
            G = (decay * (2 * v * w)[None, None, :]).sum(axis=2)
            h = np.einsum("ij,jk,ik->i", E, G, np.conj(E)).real
            H[r] = h
    else:
        rmax = max(radii)
        vmax, wmax = _v_weights(rmax, dv)
        acc = {r: np.zeros(u.size) for r in radii}
        for j, vj in enumerate(vmax):
            row = 2 * vj * np.abs(np.asarray(f_plus_derivative(u + 1j * vj))) ** 2
            if not np.all(np.isfinite(row)):
                raise AnalysisError(f"non-finite integrand on the row v={vj}")
            for r in radii:
                nv = int(round(r / dv))
                if j > nv:
                    continue
                wj = 0.5 * dv if j in (0, nv) else dv
                acc[r] += wj * row
        H = acc
    best, witness, per_radius = -1.0, None, {}
    for r, k in zip(radii, ir):
        c = _cumtrapz(H[r], du)
        i0 = ia - u_lo
        vals = (c[i0 + k] - c[i0]) / r
        j = int(np.argmax(vals))
        per_radius[r] = float(vals[j])
        if vals[j] > best:
            best, witness = float(vals[j]), (float(a_values[j]), r)
    fam = f"a in [{a_values.min()}, {a_values.max()}] ({a_values.size} corners), r in {radii}, du={du}, dv={dv}"
    return CarlesonEstimate(best, fam, witness=witness, per_radius=per_radius)


def hilbert_numeric(f: SampledFunction, margin: float | None = None) -> SampledFunction:
    """Hilbert transform (1/pi) PV int g(t)/(s - t) dt at the interior lattice points.

    This is the orientation with H[cos] = sin, the same as the imaginary part
    of ``scipy.signal.hilbert``.  The integral of g(t)/(t - s) is split as
    (g(t) - g(s))/(t - s) + g(s)/(t - s).  The first
    part is smooth with value g'(s) at t = s and is integrated by trapezoid;
    the second has the exact principal value g(s) log((b - s)/(s - a)) on
    [a, b].  Both sums over the lattice are FFT convolutions with 1/(m - n).
    Points within ``margin`` of either edge are dropped (default 10% of the
    span on each side).
    """
    g = np.asarray(f.values)
    n = f.n
    h = f.dt
    a, b = f.span
    if margin is None:
        margin = 0.1 * (b - a)
    j = np.arange(-(n - 1), n)
    kern = np.zeros(j.size)
    kern[j != 0] = 1.0 / j[j != 0]
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    # sum_m w_m x_m / (m - n) = -(x * kern)[n]
    def corr(x):
        return -fftconvolve(x, kern)[n - 1 : 2 * n - 1]
    s1 = corr(w * g)
    s0 = corr(w)
    dg = np.gradient(g, h, edge_order=2)
    s = f.t
    with np.errstate(divide="ignore", invalid="ignore"):
        logterm = np.log((b - s) / (s - a))
    with np.errstate(invalid="ignore"):
        val = -(s1 - g * s0 + h * w * dg + g * logterm) / np.pi
    keep = (s - a >= margin - 1e-12 * h) & (b - s >= margin - 1e-12 * h)
    if not np.any(keep):
        raise AnalysisError("margin leaves no interior points")
    idx = np.nonzero(keep)[0]
    # tail estimate assuming |g| decays at least like 1/t^2 beyond the lattice
    edge = max(abs(g[0]) * max(abs(a), h), abs(g[-1]) * max(abs(b), h))
    tail = edge / (np.pi * margin)
    prov = dict(f.provenance)
    prov.update({"operation": "hilbert_numeric", "margin": margin, "tail_estimate": float(tail)})
    return SampledFunction(float(s[idx[0]]), h, val[idx], prov)


def kernel_K(c: float, t, N: int):
    """K(c, t) = |c| sin(2 pi N t / c) / (pi t (t - c)).

    Partial fractions give the pole-free form
    (2N/|c|) (sinc(2N(t - c)/c) - sinc(2N t/c)).
    """
    if c == 0:
        raise AnalysisError("c must be nonzero")
    if not (N == int(N) and N > abs(c)):
        raise AnalysisError("N must be an integer larger than |c|")
    t = np.asarray(t, dtype=float)
    return (2.0 * N / abs(c)) * (sinc(2.0 * N * (t - c) / c) - sinc(2.0 * N * t / c))


def kernel_K_hilbert(c: float, s, N: int):
    """Closed form c (cos(2 pi N s/c) - 1) / (pi s (c - s)), continued at s = 0 and s = c.

    Same orientation as :func:`hilbert_numeric`.
    """
    if c == 0:
        raise AnalysisError("c must be nonzero")
    s = np.asarray(s, dtype=float)
    u = N * s / c
    v = N * (c - s) / c
    return -(2.0 * N / c) * (sinpi(u) * sinc(u) + sinpi(v) * sinc(v))


def derivative_sup(fn, window: tuple[float, float], h: float) -> float:
    """max over the lattice a + j h of |f(t + h) - f(t - h)| / (2h)."""
    a, b = window
    n = int(round((b - a) / h)) + 1
    t = a + h * np.arange(n)
    d = (np.asarray(fn(t + h)) - np.asarray(fn(t - h))) / (2 * h)
    return float(np.max(np.abs(d)))
