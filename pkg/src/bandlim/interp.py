"""Cardinal-series evaluation for uniform, l^p and bounded sample data.

Three series share one summation kernel:

* ``wsk``: sum_k a_k sinc(b t - k)
* ``lp``: sum_k a_k S(z) / (S'(x_k) (z - x_k))
* ``augmented``: a~ S(z)/S(x~) + sum_k a_k S(z)/S'(x_k) (1/(z - x_k) - 1/(x~ - x_k))

The augmented series converges for bounded data because its summands decay
like 1/x_k^2.  Partial sums are always symmetric (all nodes with
``|x_k| <= R``) and every evaluation carries a :class:`TruncationReport`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .grid import GeneratingFunction, GridError, SamplingGrid, generating_function, uniform_grid
from .specfun import sinpi

__all__ = [
    "InterpolationError",
    "AugmentedSamples",
    "TruncationReport",
    "Interpolant",
    "FarField",
    "interpolate_uniform",
    "interpolate_lp",
    "interpolate_bounded",
    "tail_bound",
    "calibrate_extra_value",
    "lattice_evaluate_uniform",
    "RELIABLE_FRACTION",
]

#: Evaluation points must satisfy |Re z| <= RELIABLE_FRACTION * window half-width.
RELIABLE_FRACTION = 0.8

_CHUNK = 1 << 22  # matrix entries per evaluation block


class InterpolationError(ValueError):
    """Raised on missing extra nodes, bad windows or an unattainable strict tolerance."""


@dataclass(frozen=True, eq=False)
class AugmentedSamples:
    """Samples a_k aligned with the grid positions plus the extra value a~."""

    values: np.ndarray
    extra_value: complex | float | None = None

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 1:
            raise InterpolationError("samples must be one-dimensional")
        if not np.all(np.isfinite(v)):
            raise InterpolationError("samples must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def norm_inf(self) -> float:
        m = float(np.max(np.abs(self.values))) if self.values.size else 0.0
        if self.extra_value is not None:
            m = max(m, abs(self.extra_value))
        return m

    def scaled(self, factor: float) -> "AugmentedSamples":
        extra = None if self.extra_value is None else factor * self.extra_value
        return AugmentedSamples(factor * self.values, extra)


@dataclass
class TruncationReport:
    """Per-point truncation provenance.

    ``terms_used[i]`` counts the summands kept for point ``i``; ``tail_bound[i]``
    bounds the omitted mass.  ``converged`` is true when every tail is at most
    ``requested_tol``.
    """

    terms_used: np.ndarray
    tail_bound: np.ndarray
    requested_tol: float
    method: str = "direct"

    @property
    def converged(self) -> bool:
        return bool(np.all(self.tail_bound <= self.requested_tol))

    @property
    def max_tail(self) -> float:
        return float(np.max(self.tail_bound)) if self.tail_bound.size else 0.0

    def summary(self) -> dict:
        return {
            "points": int(self.terms_used.size),
            "max_terms_used": int(np.max(self.terms_used)) if self.terms_used.size else 0,
            "max_tail_bound": self.max_tail,
            "requested_tol": self.requested_tol,
            "converged": self.converged,
            "method": self.method,
        }


def tail_bound(grid: SamplingGrid, z, R: float, x_tilde: float) -> np.ndarray:
    """Integral-comparison bound for sum_{|x_k| > R} |z - x~| / (|z - x_k| |x~ - x_k|).

    Each node beyond R owns a cell of length lambda(X) on which the summand
    dominates its value at the node, so the sum is at most
    (1/lambda) * 2 int_{R - lambda}^inf |z - x~| / ((t - |z|)(t - |x~|)) dt.
    The result still has to be scaled by ||A||_inf |S(z)| / min |S'(x_k)|.
    """
    z = np.asarray(z)
    lam = grid.separation
    az = np.abs(z)
    ax = abs(x_tilde)
    R_eff = R - lam
    if np.any(R_eff <= np.maximum(az, ax)) or R - max(float(np.max(az)), ax) < grid.max_gap:
        raise InterpolationError(
            f"truncation radius {R} must exceed max(|z|, |x~|) by at least one node gap"
        )
    dz = np.abs(z - x_tilde)
    num = np.log((R_eff - ax) / (R_eff - az))
    den = az - ax
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(np.abs(den) > 1e-12 * R_eff, num / den, 1.0 / (R_eff - np.maximum(az, ax)))
    return 2.0 * dz * ratio / lam


def _lp_tail(grid, z, R, samples_abs, p, outside_norm=0.0):
    """Hoelder bound for the lp tail: stored nodes beyond R plus data outside the window.

    ``outside_norm`` is the caller-declared l^p norm of the samples beyond the
    stored window.
    """
    q = p / (p - 1.0)
    x = grid.nodes
    a_tail = samples_abs[np.abs(x) > R]
    norm_a = (np.sum(a_tail**p) + outside_norm**p) ** (1.0 / p)
    if norm_a == 0.0:
        return np.zeros(np.shape(z))
    # nodes are separated, so sum |z - x_k|^-q is at most the integral from R - lambda
    lam = grid.separation
    az = np.abs(np.asarray(z))
    gap = np.maximum(R - lam - az, lam)
    lq = (2.0 / lam) * gap ** (1.0 - q) / (q - 1.0) + 2.0 * gap ** (-q)
    return norm_a * lq ** (1.0 / q)


@dataclass(frozen=True, eq=False)
class FarField:
    """Moments of the augmented series over nodes outside the stored window.

    For |z|, |x~| < |x_k| the far block satisfies
    sum_k c_k (1/(z - x_k) - 1/(x~ - x_k)) = sum_{n>=1} (x~^n - z^n) M_n,
    with c_k = a_k / S'(x_k) and M_n = sum_k c_k / x_k^(n+1).
    """

    moments: np.ndarray
    validity_radius: float
    inner_radius: float
    outer_radius: float
    sup_abs: float
    spacing: float

    @classmethod
    def from_uniform(
        cls,
        b: float,
        ranges: list[tuple[int, int]],
        sample_fn,
        validity_radius: float,
        chunk: int = 1 << 21,
    ) -> "FarField":
        """Accumulate moments over label ranges ``[k0, k1)`` of the grid k/b.

        ``sample_fn(k)`` returns a_k for an integer array.  The expansion order
        per chunk is the smallest one whose last term is below 1e-17.
        """
        sgn = lambda k: np.where(k % 2 == 0, 1.0, -1.0)  # noqa: E731
        inner = math.inf
        outer = 0.0
        sup_abs = 0.0
        nmax = 1
        parts = []
        for k0, k1 in ranges:
            if k0 <= 0 < k1:
                raise InterpolationError("far-field ranges must exclude the origin")
            for s in range(k0, k1, chunk):
                k = np.arange(s, min(s + chunk, k1))
                x = k / b
                ax = np.abs(x)
                xmin = float(ax.min())
                inner = min(inner, xmin)
                outer = max(outer, float(ax.max()))
                a = np.asarray(sample_fn(k), dtype=float)
                sup_abs = max(sup_abs, float(np.max(np.abs(a))))
                c = a * sgn(k)
                ratio = validity_radius / xmin
                if ratio >= 1.0:
                    raise InterpolationError("validity radius reaches the far-field nodes")
                order = max(1, int(math.ceil(math.log(1e-17) / math.log(ratio))))
                nmax = max(nmax, order)
                inv = 1.0 / x
                term = c * inv  # c / x^(n+1) at n = 0
                m = np.zeros(order + 1)
                for n in range(1, order + 1):
                    term = term * inv
                    m[n] = float(np.sum(term))
                parts.append(m)
        moments = np.zeros(nmax + 1)
        for m in parts:
            moments[: m.size] += m
        if validity_radius >= inner:
            raise InterpolationError("validity radius reaches the far-field nodes")
        return cls(moments, float(validity_radius), inner, outer, sup_abs, 1.0 / b)

    def evaluate(self, z, x_tilde: float):
        """sum_n (x~^n - z^n) M_n; requires |z|, |x~| <= validity radius."""
        z = np.asarray(z)
        if np.any(np.abs(z) > self.validity_radius) or abs(x_tilde) > self.validity_radius:
            raise InterpolationError("far-field expansion used outside its validity radius")
        out = np.zeros(z.shape, dtype=np.result_type(z, float))
        zn = np.ones_like(out)
        xn = 1.0
        for n in range(1, self.moments.size):
            zn = zn * z
            xn = xn * x_tilde
            out = out + (xn - zn) * self.moments[n]
        return out


@dataclass(eq=False)
class Interpolant:
    """Lazy evaluator for one of the three series on a fixed grid and data set."""

    grid: SamplingGrid
    S: GeneratingFunction
    samples: AugmentedSamples
    series_kind: str
    p: float = 2.0
    far_field: FarField | None = None
    strict: bool = False
    outside_norm: float = 0.0

    def __post_init__(self):
        if self.series_kind not in ("wsk", "lp", "augmented"):
            raise InterpolationError(f"unknown series kind {self.series_kind!r}")
        if self.samples.values.size != len(self.grid):
            raise InterpolationError(
                f"{self.samples.values.size} samples for a window of {len(self.grid)} nodes"
            )
        if self.series_kind == "augmented":
            if self.grid.extra_node is None:
                raise InterpolationError("augmented series needs a grid with an extra node")
            if self.samples.extra_value is None:
                raise InterpolationError("augmented series needs the extra value a~")

    @property
    def near_node_radius(self) -> float:
        return self.S.near_node_radius

    @property
    def reliable_radius(self) -> float:
        return RELIABLE_FRACTION * self.grid.half_width

    # -- truncation -----------------------------------------------------------

    def _radius_ladder(self, z):
        """Smallest dyadic radius per point whose tail meets the tolerance."""
        g = self.grid
        base = np.abs(z) + g.max_gap + 2 * g.separation
        if self.series_kind == "augmented":
            base = np.maximum(base, abs(g.extra_node) + g.max_gap + 2 * g.separation)
        return np.maximum(base, 4 * g.max_gap)

    def _tail(self, z, R):
        g = self.grid
        scale = np.abs(self.S(z)) / float(np.min(np.abs(self.S.node_derivatives)))
        if self.series_kind == "augmented":
            if self.far_field is not None:
                R = self.far_field.outer_radius
                sup = max(self.samples.norm_inf, self.far_field.sup_abs)
            else:
                sup = self.samples.norm_inf
            return sup * scale * tail_bound(g, z, R, g.extra_node)
        return scale * _lp_tail(g, z, R, np.abs(self.samples.values), self.p, self.outside_norm)

    def _choose_radius(self, z, tol):
        cap = self.grid.half_width
        R = np.minimum(self._radius_ladder(z), cap)
        tails = np.empty(z.shape)
        done = np.zeros(z.shape, bool)
        while True:
            active = ~done
            t = np.empty(z.shape)
            for r in np.unique(R[active]):
                sel = active & (R == r)
                t[sel] = self._tail_or_inf(z[sel], r)
            tails[active] = t[active]
            ok = active & (t <= tol)
            done |= ok | (active & (R >= cap))
            if np.all(done):
                break
            R = np.where(done, R, np.minimum(2 * R, cap))
        return R, tails

    def _tail_or_inf(self, z, r):
        try:
            return self._tail(z, r)
        except InterpolationError:
            return np.full(z.shape, np.inf)

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, points, tol: float = 1e-9):
        """Return ``(values, TruncationReport)`` at ``points``; results follow input order."""
        if not tol > 0:
            raise InterpolationError("tol must be positive")
        z = np.atleast_1d(np.asarray(points))
        z = z.astype(complex) if np.iscomplexobj(z) else z.astype(float)
        if np.any(np.abs(z.real) > self.reliable_radius):
            bad = z[np.argmax(np.abs(z.real))]
            raise InterpolationError(
                f"evaluation point {bad} outside the reliable zone |t| <= {self.reliable_radius:g}"
            )
        if self.far_field is not None:
            R = np.full(z.shape, self.grid.half_width)
            tails = np.atleast_1d(self._tail(z, R[0] if R.size else 0.0))
        else:
            R, tails = self._choose_radius(z, tol)
        values = np.empty(z.shape, dtype=np.result_type(z, self.samples.values, float))
        terms = np.empty(z.shape, dtype=int)
        a = self.samples.values
        x = self.grid.nodes
        n = len(self.grid)
        rows = max(1, _CHUNK // n)
        aug = self.series_kind == "augmented"
        if aug:
            xt = self.grid.extra_node
            s_xt = self.S(xt)
            with np.errstate(divide="ignore"):
                w = a / (self.S.node_derivatives * (xt - x))
        for i0 in range(0, z.size, rows):
            zz = z[i0 : i0 + rows]
            L = self.S.cardinal(zz)
            keep = np.abs(x)[None, :] <= R[i0 : i0 + rows, None]
            terms[i0 : i0 + rows] = keep.sum(axis=1)
            acc = np.where(keep, L * a[None, :], 0.0).sum(axis=1)
            if aug:
                sz = self.S(zz)
                acc = acc - sz * np.where(keep, w[None, :], 0.0).sum(axis=1)
                acc = acc + self.samples.extra_value * sz / s_xt
                if self.far_field is not None:
                    acc = acc + sz * self.far_field.evaluate(zz, xt)
            values[i0 : i0 + rows] = acc
        report = TruncationReport(terms, np.asarray(tails, float), float(tol))
        if self.strict and not report.converged:
            raise InterpolationError(
                f"tolerance {tol:g} unattainable in the stored window; max tail {report.max_tail:.3g}"
            )
        return values, report

    def __call__(self, points, tol: float = 1e-9):
        return self.evaluate(points, tol)[0]


def interpolate_lp(grid, S, samples, eval_points, tol=1e-9, p: float = 2.0, strict=False,
                   outside_norm: float = 0.0):
    """sum_k a_k S(z)/(S'(x_k)(z - x_k)) for l^p data, 1 < p < inf.

    The tail bound counts stored samples beyond the truncation radius and,
    through ``outside_norm``, the l^p mass of samples beyond the window.
    """
    if not 1.0 < p < math.inf:
        raise InterpolationError("p must lie in (1, inf)")
    if not isinstance(samples, AugmentedSamples):
        samples = AugmentedSamples(np.asarray(samples))
    kind = "wsk" if grid.kind == "uniform" else "lp"
    it = Interpolant(grid, S, AugmentedSamples(samples.values), kind, p=p, strict=strict,
                     outside_norm=outside_norm)
    return it.evaluate(eval_points, tol)


def interpolate_uniform(samples, b: float, eval_points, tol=1e-9, strict=False,
                        outside_norm: float = 0.0):
    """Cardinal sinc series for samples a_k, k = -K..K, at nodes k/b."""
    a = np.asarray(samples)
    if a.size % 2 != 1:
        raise InterpolationError("uniform samples must cover a symmetric window -K..K")
    K = a.size // 2
    grid = uniform_grid(b, K)
    return interpolate_lp(grid, generating_function(grid), a, eval_points, tol, 2.0, strict, outside_norm)


def interpolate_bounded(grid, S, samples: AugmentedSamples, eval_points, tol=1e-9,
                        far_field: FarField | None = None, strict=False):
    """Augmented series for bounded data with the extra sample (x~, a~)."""
    it = Interpolant(grid, S, samples, "augmented", far_field=far_field, strict=strict)
    return it.evaluate(eval_points, tol)


def calibrate_extra_value(grid, S, values, target: float | None = None, tol: float = 1e-12):
    """Choose a~ for the extra node.

    With ``target`` given it is the known value f(x~).  Otherwise a~ is the
    classical series evaluated at x~, so that for square-summable data the
    augmented series coincides with the lp series.
    """
    if grid.extra_node is None:
        raise InterpolationError("grid has no extra node")
    if target is not None:
        return target
    vals, _ = interpolate_lp(grid.with_extra(None), S, values, [grid.extra_node], tol)
    return vals[0]


def lattice_evaluate_uniform(samples: AugmentedSamples, grid: SamplingGrid, half_span: float,
                             per_unit: int, offset: float = 0.0):
    """Augmented series on the lattice t_n = n/(b m), |t_n| <= half_span, by FFT.

    For nodes k/b the inner sum sum_k c_k/(z - x_k) at lattice points is a
    discrete convolution with the kernel 1/(n h + i y).  ``per_unit`` is m,
    the number of lattice points per node gap; ``offset`` is the height y.
    Returns ``(t, values, TruncationReport)``; the tail reflects the window
    edge since all stored terms are used.
    """
    if grid.kind != "uniform":
        raise InterpolationError("lattice evaluation needs a uniform grid")
    if grid.extra_node is None or samples.extra_value is None:
        raise InterpolationError("augmented series needs the extra node and value")
    m = int(per_unit)
    if m < 1:
        raise InterpolationError("per_unit must be a positive integer")
    b = grid.params["b"]
    K = grid.params["K"]
    h = 1.0 / (b * m)
    N = int(math.floor(half_span / h + 1e-9))
    if N * h > RELIABLE_FRACTION * grid.half_width:
        raise InterpolationError(
            f"lattice half-span {N * h:g} outside the reliable zone {RELIABLE_FRACTION * grid.half_width:g}"
        )
    n = np.arange(-N, N + 1)
    t = n * h
    k = grid.labels
    sgn = np.where(k % 2 == 0, 1.0, -1.0)
    a = samples.values
    c = a * sgn
    C = np.zeros(2 * K * m + 1, dtype=c.dtype)
    C[(k + K) * m] = c
    J = N + K * m
    j = np.arange(-J, J + 1)
    if offset == 0.0:
        kern = np.zeros(j.size)
        nz = j != 0
        kern[nz] = 1.0 / j[nz]
    else:
        kern = 1.0 / (j + 1j * offset / h)
    conv = fftconvolve(C, kern)[2 * K * m : 2 * K * m + 2 * N + 1] / h
    xt = grid.extra_node
    z = t + 1j * offset if offset != 0.0 else t
    sz = sinpi(b * z) / (np.pi * b)
    s_xt = sinpi(b * xt) / (np.pi * b)
    const = np.sum(c / (xt - k / b))
    vals = samples.extra_value * sz / s_xt + sz * (conv - const)
    if offset == 0.0:
        on = (n % m == 0) & (np.abs(n // m) <= K)
        vals = np.asarray(vals, dtype=np.result_type(vals, float))
        vals[on] = a[n[on] // m + K]
    scale = np.abs(sz) / 1.0
    tails = samples.norm_inf * scale * tail_bound(grid, z, grid.half_width, xt)
    report = TruncationReport(np.full(t.size, len(grid)), tails, math.inf, method="fft-lattice")
    return t, vals, report
