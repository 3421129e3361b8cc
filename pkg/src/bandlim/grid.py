"""Sampling sequences and their sine-type generating functions.

A bi-infinite sequence is stored as a finite window of nodes; every "sup over
k" statement is evaluated over that window.  Generating functions are either
closed form (uniform, union of two uniform sequences, the J0 product) or the
symmetric truncated product built from the nodes themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .specfun import bessel_j0, bessel_j0_zeros, bessel_j1, cospi, sinc, sinpi

__all__ = [
    "GridError",
    "SamplingGrid",
    "GeneratingFunction",
    "UniformGeneratingFunction",
    "UnionGeneratingFunction",
    "BesselGeneratingFunction",
    "ProductGeneratingFunction",
    "CallableGeneratingFunction",
    "SineTypeReport",
    "uniform_grid",
    "union_grid",
    "bessel_grid",
    "explicit_grid",
    "product_generating_function",
    "generating_function",
    "verify_sine_type",
    "lower_uniform_density",
    "MAX_BESSEL_EPSILON",
]

#: Default floor on dist(extra_node, X) as a fraction of the separation.
EXTRA_NODE_FLOOR = 0.1

_J0_FIRST_ZERO = 2.404825557695773
#: Largest admissible shift for the J0 product grid (half the first node gap).
MAX_BESSEL_EPSILON = _J0_FIRST_ZERO / np.pi


class GridError(ValueError):
    """Invalid grid construction or an unsatisfiable grid precondition."""


@dataclass(frozen=True, eq=False)
class SamplingGrid:
    """A window of a separated real sequence, optionally with an extra node.

    ``labels[i] = index_origin + i`` is the integer index of ``nodes[i]`` in
    the conceptually bi-infinite sequence.
    """

    nodes: np.ndarray
    extra_node: float | None = None
    index_origin: int = 0
    kind: str = "explicit"
    params: dict = field(default_factory=dict)
    extra_floor: float = EXTRA_NODE_FLOOR

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size == 0:
            raise GridError("a grid needs a non-empty 1-d array of nodes")
        if not np.all(np.isfinite(nodes)):
            raise GridError("grid nodes must be finite")
        gaps = np.diff(nodes)
        if np.any(gaps <= 0):
            i = int(np.argmin(gaps))
            raise GridError(
                f"nodes must be strictly increasing; gap {gaps[i]!r} after position {i}"
            )
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        if self.extra_node is not None:
            x = float(self.extra_node)
            object.__setattr__(self, "extra_node", x)
            d = np.abs(nodes - x)
            i = int(np.argmin(d))
            if d[i] == 0.0:
                raise GridError(
                    f"extra node {x!r} coincides with node index {self.index_origin + i}"
                )
            if nodes.size > 1 and d[i] < self.extra_floor * self.separation:
                raise GridError(
                    f"extra node {x!r} is {d[i]:.3g} from node index {self.index_origin + i}, "
                    f"below the floor {self.extra_floor} * separation"
                )

    def __len__(self):
        return self.nodes.size

    @property
    def labels(self) -> np.ndarray:
        return np.arange(self.index_origin, self.index_origin + self.nodes.size)

    @property
    def separation(self) -> float:
        """lambda(X): the smallest gap in the window (inf for a single node)."""
        if self.nodes.size < 2:
            return math.inf
        return float(np.min(np.diff(self.nodes)))

    @property
    def max_gap(self) -> float:
        if self.nodes.size < 2:
            return 0.0
        return float(np.max(np.diff(self.nodes)))

    @property
    def half_width(self) -> float:
        """Radius of the largest origin-centred interval the window covers."""
        return float(min(-self.nodes[0], self.nodes[-1]))

    def with_extra(self, extra_node: float | None) -> "SamplingGrid":
        return SamplingGrid(
            self.nodes, extra_node, self.index_origin, self.kind, dict(self.params), self.extra_floor
        )

    def position_of(self, label: int) -> int:
        pos = int(label) - self.index_origin
        if not 0 <= pos < self.nodes.size:
            raise IndexError(f"node index {label} outside the stored window")
        return pos


# ---------------------------------------------------------------------------
# generating functions


class GeneratingFunction:
    """Evaluator for S(z), S'(x_k) and the cardinal functions of a grid.

    Subclasses supply ``_eval`` and the node derivatives; closed forms also
    override :meth:`cardinal` with an expression that is exact at the nodes.
    """

    form = "closed-form"

    def __init__(self, grid: SamplingGrid, type_constant: float | None, deriv: np.ndarray):
        self.grid = grid
        self.type_constant = type_constant
        deriv = np.asarray(deriv, dtype=float)
        deriv.setflags(write=False)
        self._deriv = deriv
        self.near_node_radius = grid.separation / 100.0 if len(grid) > 1 else 1e-2

    def __call__(self, z):
        return self._eval(np.asarray(z))

    def _eval(self, z):  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def node_derivatives(self) -> np.ndarray:
        return self._deriv

    def deriv_at_node(self, label: int) -> float:
        return float(self._deriv[self.grid.position_of(label)])

    def second_derivative_at_nodes(self, positions=None, h: float | None = None) -> np.ndarray:
        """S'' at nodes by a central difference of S."""
        x = self.grid.nodes if positions is None else self.grid.nodes[positions]
        if h is None:
            h = min(1e-3, 0.05 * self.grid.separation)
        return np.real(self._eval(x + h) + self._eval(x - h) - 2 * self._eval(x)) / (h * h)

    def cardinal(self, z, positions=None) -> np.ndarray:
        """Matrix ``L[i, j] = S(z_i) / (S'(x_j) (z_i - x_j))`` over node positions.

        Inside ``near_node_radius`` of a node the removable singularity is
        replaced by the Taylor form S'(x) + S''(x)(z - x)/2.
        """
        z = np.atleast_1d(np.asarray(z))
        pos = np.arange(len(self.grid)) if positions is None else np.asarray(positions)
        x = self.grid.nodes[pos]
        d = self._deriv[pos]
        diff = z[:, None] - x[None, :]
        near = np.abs(diff) < self.near_node_radius
        sz = self._eval(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = sz[:, None] / (d[None, :] * diff)
        if np.any(near):
            ii, jj = np.nonzero(near)
            s2 = self.second_derivative_at_nodes(pos[jj])
            out[ii, jj] = (d[jj] + 0.5 * s2 * diff[ii, jj]) / d[jj]
        return out

    def __repr__(self):
        return f"{type(self).__name__}(kind={self.grid.kind!r}, n={len(self.grid)}, form={self.form!r})"


class UniformGeneratingFunction(GeneratingFunction):
    """S(z) = sin(pi b z)/(pi b) for x_k = k/b; S'(x_k) = (-1)^k."""

    def __init__(self, grid: SamplingGrid):
        self.b = float(grid.params["b"])
        labels = grid.labels
        super().__init__(grid, np.pi * self.b, np.where(labels % 2 == 0, 1.0, -1.0))

    def _eval(self, z):
        return sinpi(self.b * z) / (np.pi * self.b)

    def cardinal(self, z, positions=None):
        z = np.atleast_1d(np.asarray(z))
        labels = self.grid.labels
        k = labels if positions is None else labels[np.asarray(positions)]
        return sinc(self.b * z[:, None] - k[None, :])


class UnionGeneratingFunction(GeneratingFunction):
    """Union of {k/b} and {k/b + theta}:

    S(z) = sin(pi b z) sin(pi b (z - theta)) / (pi b sin(-pi b theta)),
    normalized so that S'(0) = 1.
    """

    def __init__(self, grid: SamplingGrid):
        self.b = float(grid.params["b"])
        self.theta = float(grid.params["theta"])
        self._family = np.asarray(grid.params["family"])
        self._k = np.asarray(grid.params["k"])
        self._den = np.sin(-np.pi * self.b * self.theta)
        deriv = np.where(self._family == 0, 1.0, -1.0)
        super().__init__(grid, 2 * np.pi * self.b, deriv)

    def _eval(self, z):
        b, th = self.b, self.theta
        return sinpi(b * z) * sinpi(b * (z - th)) / (np.pi * b * self._den)

    def cardinal(self, z, positions=None):
        z = np.atleast_1d(np.asarray(z))
        pos = np.arange(len(self.grid)) if positions is None else np.asarray(positions)
        b, th = self.b, self.theta
        fam = self._family[pos][None, :]
        k = self._k[pos][None, :]
        sign = np.where(k % 2 == 0, 1.0, -1.0)
        zz = z[:, None]
        first = sign * sinc(b * zz - k) * sinpi(b * (zz - th)) / self._den
        second = -sign * sinc(b * (zz - th) - k) * sinpi(b * zz) / self._den
        return np.where(fam == 0, first, second)


def _j0_taylor_quotient(u, u0, order: int = 14):
    """J0(u)/(u - u0) for a zero u0 of J0, stable as u -> u0.

    Derivatives at u0 follow from differentiating u y'' + y' + u y = 0:
    u y^(n+2) + (n+1) y^(n+1) + u y^(n) + n y^(n-1) = 0.
    """
    u = np.asarray(u)
    u0 = np.asarray(u0, dtype=float)
    delta = u - u0
    direct_ok = np.abs(delta) >= 0.5
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = bessel_j0(u) / delta
    # derivatives y^(n), n = 0..order+1, at u0
    ders = [np.zeros_like(u0), -bessel_j1(u0)]
    for n in range(order):
        prev = ders[n - 1] if n >= 1 else 0.0
        ders.append(-((n + 1) * ders[n + 1] + u0 * ders[n] + n * prev) / u0)
    taylor = np.zeros_like(delta)
    fact = 1.0
    for n in range(1, order + 2):
        fact *= n
        taylor = taylor + ders[n] * delta ** (n - 1) / fact
    return np.where(direct_ok, direct, taylor)


class BesselGeneratingFunction(GeneratingFunction):
    """S(z) = z J0(pi z/2) J0(pi (z + eps)/2), a sine-type function of type pi."""

    def __init__(self, grid: SamplingGrid):
        self.eps = float(grid.params["epsilon"])
        self._family = np.asarray(grid.params["family"])
        x = grid.nodes
        eps = self.eps
        half = np.pi / 2
        deriv = np.empty_like(x)
        fa = self._family == 1  # zeros of J0(pi z / 2)
        fb = self._family == 2  # zeros of J0(pi (z + eps) / 2)
        f0 = self._family == 0
        deriv[f0] = bessel_j0(half * eps)
        deriv[fa] = x[fa] * bessel_j0(half * (x[fa] + eps)) * half * (-bessel_j1(half * x[fa]))
        deriv[fb] = x[fb] * bessel_j0(half * x[fb]) * half * (-bessel_j1(half * (x[fb] + eps)))
        super().__init__(grid, np.pi, deriv)
        self._u0 = np.where(fb, half * (x + eps), half * x)

    def _eval(self, z):
        half = np.pi / 2
        return z * bessel_j0(half * z) * bessel_j0(half * (z + self.eps))

    def cardinal(self, z, positions=None):
        z = np.atleast_1d(np.asarray(z, dtype=float))
        pos = np.arange(len(self.grid)) if positions is None else np.asarray(positions)
        half = np.pi / 2
        fam = self._family[pos][None, :]
        d = self._deriv[pos][None, :]
        u0 = self._u0[pos][None, :]
        zz = z[:, None]
        ja = bessel_j0(half * z)[:, None]
        jb = bessel_j0(half * (z + self.eps))[:, None]
        out = np.empty((z.size, pos.size))
        m0 = np.broadcast_to(fam == 0, out.shape)
        ma = np.broadcast_to(fam == 1, out.shape)
        mb = np.broadcast_to(fam == 2, out.shape)
        zb = np.broadcast_to(zz, out.shape)
        u0b = np.broadcast_to(u0, out.shape)
        db = np.broadcast_to(d, out.shape)
        jab = np.broadcast_to(ja, out.shape)
        jbb = np.broadcast_to(jb, out.shape)
        out[m0] = (jab * jbb)[m0] / db[m0]
        if np.any(ma):
            q = _j0_taylor_quotient(half * zb[ma], u0b[ma])
            out[ma] = zb[ma] * jbb[ma] * half * q / db[ma]
        if np.any(mb):
            q = _j0_taylor_quotient(half * (zb[mb] + self.eps), u0b[mb])
            out[mb] = zb[mb] * jab[mb] * half * q / db[mb]
        return out


class ProductGeneratingFunction(GeneratingFunction):
    """z^delta prod_{0<|x_k|<r} (1 - z/x_k) with symmetric pairing of factors."""

    form = "truncated-product"

    def __init__(self, grid: SamplingGrid, radius: float, type_constant: float | None = None):
        self.radius = float(radius)
        x = grid.nodes
        inside = np.abs(x) < radius
        self._has_zero = bool(np.any(x == 0.0))
        self._pos = x[inside & (x > 0)]
        self._neg = x[inside & (x < 0)][::-1]
        self._inside = inside
        # node derivative: product with the k-th factor removed, times -1/x_k;
        # accumulated in logs because the unpaired partial products overflow.
        # Near the radius the true magnitude can exceed the double range (inf).
        deriv = np.full(x.shape, np.nan)
        factors = x[inside]
        nz = factors[factors != 0.0]
        for i in np.nonzero(inside)[0]:
            xi = x[i]
            rest = nz[nz != xi]
            terms = 1.0 - xi / rest
            with np.errstate(over="ignore"):
                mag = np.exp(np.sum(np.log(np.abs(terms))))
            sign = -1.0 if np.count_nonzero(terms < 0) % 2 else 1.0
            if xi == 0.0:
                deriv[i] = sign * mag
            elif self._has_zero:
                deriv[i] = -sign * mag
            else:
                deriv[i] = -sign * mag / xi
        super().__init__(grid, type_constant, deriv)

    def _eval(self, z):
        z = np.asarray(z)
        scalar = z.ndim == 0
        zz = np.atleast_1d(z).astype(complex if np.iscomplexobj(z) else float)
        n = min(self._pos.size, self._neg.size)
        out = np.ones_like(zz)
        for j in range(n):
            # pair the factors for x_j and x_{-j} before accumulating
            out = out * ((1.0 - zz / self._pos[j]) * (1.0 - zz / self._neg[j]))
        for xp in self._pos[n:]:
            out = out * (1.0 - zz / xp)
        for xn in self._neg[n:]:
            out = out * (1.0 - zz / xn)
        if self._has_zero:
            out = out * zz
        return out[0] if scalar else out.reshape(z.shape)

    def cardinal(self, z, positions=None):
        z = np.atleast_1d(np.asarray(z))
        pos = np.arange(len(self.grid)) if positions is None else np.asarray(positions)
        if not np.all(self._inside[pos]):
            raise GridError("cardinal requested for nodes outside the product radius")
        x = self.grid.nodes[pos]
        d = self._deriv[pos]
        diff = z[:, None] - x[None, :]
        near = np.abs(diff) < self.near_node_radius
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._eval(z)[:, None] / (d[None, :] * diff)
        if np.any(near):
            factors = self.grid.nodes[self._inside]
            for i, j in zip(*np.nonzero(near)):
                xj = x[j]
                rest = factors[(factors != xj) & (factors != 0.0)]
                val = np.prod(1.0 - z[i] / rest)
                if self._has_zero and xj != 0.0:
                    val = val * z[i]
                if xj != 0.0:
                    val = -val / xj
                out[i, j] = val / d[j]
        return out


class CallableGeneratingFunction(GeneratingFunction):
    """A user-supplied S; vanishing at the nodes is checked on construction."""

    def __init__(self, grid, fn, deriv, type_constant=None, zero_tol: float = 1e-8):
        self._fn = fn
        vals = np.abs(np.asarray(fn(grid.nodes)))
        if np.any(vals > zero_tol):
            i = int(np.argmax(vals))
            raise GridError(
                f"S does not vanish at node index {grid.index_origin + i}: |S| = {vals[i]:.3g}"
            )
        deriv = np.asarray(deriv, dtype=float)
        if np.any(deriv == 0):
            raise GridError("S'(x_k) must be nonzero at every node")
        super().__init__(grid, type_constant, deriv)

    def _eval(self, z):
        return np.asarray(self._fn(z))


# ---------------------------------------------------------------------------
# constructors


def uniform_grid(b: float, K: int, extra: float | None = None) -> SamplingGrid:
    """Nodes k/b for -K <= k <= K."""
    if not b > 0:
        raise GridError(f"density b must be positive, got {b!r}")
    if K < 0:
        raise GridError("window K must be nonnegative")
    k = np.arange(-K, K + 1)
    return SamplingGrid(k / b, extra, -K, "uniform", {"b": float(b), "K": int(K)})


def union_grid(b: float, theta: float, K: int, extra: float | None = None) -> SamplingGrid:
    """{k/b} union {k/b + theta}, 0 < theta < 1/b, for -K <= k <= K."""
    if not b > 0:
        raise GridError(f"density b must be positive, got {b!r}")
    if not 0 < theta < 1.0 / b:
        raise GridError(f"theta must lie strictly between 0 and 1/b, got {theta!r}")
    k = np.arange(-K, K + 1)
    nodes = np.concatenate([k / b, k / b + theta])
    fam = np.concatenate([np.zeros(k.size, int), np.ones(k.size, int)])
    kk = np.concatenate([k, k])
    order = np.argsort(nodes, kind="stable")
    params = {"b": float(b), "theta": float(theta), "K": int(K), "family": fam[order], "k": kk[order]}
    return SamplingGrid(nodes[order], extra, -2 * K - 1, "union", params)


def bessel_grid(epsilon: float, K: int, extra: float | None = None) -> SamplingGrid:
    """Zeros of z J0(pi z/2) J0(pi (z + eps)/2) using the first K zeros of J0.

    Nodes: 0, +-2 j_m/pi and +-2 j_m/pi - eps.  The shift must stay below half
    the first gap 2 j_1/pi so that eps is the separation of the grid.
    """
    if not 0 < epsilon < MAX_BESSEL_EPSILON:
        gap = 2 * _J0_FIRST_ZERO / np.pi - epsilon
        raise GridError(
            f"epsilon={epsilon!r} not admissible: need 0 < eps < {MAX_BESSEL_EPSILON:.6f} "
            f"(gap between 0 and 2 j_1/pi - eps would be {gap:.6f})"
        )
    if K < 1:
        raise GridError("bessel grid needs K >= 1 zeros of J0")
    pz = 2.0 * bessel_j0_zeros(K) / np.pi
    nodes = np.concatenate([[0.0], pz, -pz, pz - epsilon, -pz - epsilon])
    fam = np.concatenate([[0], np.ones(2 * K, int), 2 * np.ones(2 * K, int)])
    order = np.argsort(nodes)
    nodes = nodes[order]
    fam = fam[order]
    gaps = np.diff(nodes)
    if np.min(gaps) < epsilon * (1 - 1e-12):
        i = int(np.argmin(gaps))
        raise GridError(f"grid not separated: gap {gaps[i]:.3g} < eps at position {i}")
    origin = -int(np.sum(nodes < 0))
    params = {"epsilon": float(epsilon), "K": int(K), "family": fam}
    return SamplingGrid(nodes, extra, origin, "bessel", params)


def explicit_grid(nodes, extra: float | None = None, index_origin: int | None = None) -> SamplingGrid:
    nodes = np.sort(np.asarray(nodes, dtype=float))
    if index_origin is None:
        index_origin = -int(np.sum(nodes < 0))
    return SamplingGrid(nodes, extra, index_origin, "explicit", {})


def product_generating_function(grid: SamplingGrid, radius: float) -> ProductGeneratingFunction:
    """Symmetric truncated product over the nodes with |x_k| < radius."""
    if not radius > 0:
        raise GridError("radius must be positive")
    if radius > grid.half_width:
        raise GridError(
            f"radius {radius} exceeds window coverage {grid.half_width}: insufficient nodes"
        )
    type_constant = None
    if grid.kind == "uniform":
        type_constant = np.pi * grid.params["b"]
    return ProductGeneratingFunction(grid, radius, type_constant)


def generating_function(grid: SamplingGrid) -> GeneratingFunction:
    """Closed-form S for the known grid kinds."""
    if grid.kind == "uniform":
        return UniformGeneratingFunction(grid)
    if grid.kind == "union":
        return UnionGeneratingFunction(grid)
    if grid.kind == "bessel":
        return BesselGeneratingFunction(grid)
    raise GridError(
        f"no closed form for grid kind {grid.kind!r}; use product_generating_function"
    )


# ---------------------------------------------------------------------------
# diagnostics


@dataclass
class SineTypeReport:
    epsilon: float
    c1: float
    c2: float
    grid_of_test_points: str
    passed: bool
    n_points: int = 0
    floor: float = 1e-6

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "c1": self.c1,
            "c2": self.c2,
            "grid_of_test_points": self.grid_of_test_points,
            "passed": self.passed,
            "n_points": self.n_points,
            "floor": self.floor,
        }


def verify_sine_type(
    S: GeneratingFunction,
    grid: SamplingGrid,
    epsilon: float,
    test_rect: tuple[float, float, float, float],
    step: float = 0.05,
    floor: float = 1e-6,
) -> SineTypeReport:
    """Empirical C1(eps), C2(eps) for exp(-type |Im z|) |S(z)| on a rectangle.

    Test points are a lattice over ``test_rect = (x0, x1, y0, y1)`` plus the
    real points nodes +- 1.01 eps, the closest admissible positions.  Only
    points with dist(z, X) > eps are kept.  This is a falsification check on
    a finite rectangle, not a proof.
    """
    if not epsilon > 0:
        raise GridError("epsilon must be positive")
    if S.type_constant is None:
        raise GridError("generating function has no declared type")
    x0, x1, y0, y1 = map(float, test_rect)
    if x0 < grid.nodes[0] or x1 > grid.nodes[-1]:
        raise GridError("test rectangle leaves the window's convex hull")
    xs = np.arange(x0, x1 + 0.5 * step, step)
    ys = np.arange(y0, y1 + 0.5 * step, step)
    zz = (xs[None, :] + 1j * ys[:, None]).ravel()
    inside = grid.nodes[(grid.nodes >= x0) & (grid.nodes <= x1)]
    probes = np.concatenate([inside - 1.01 * epsilon, inside + 1.01 * epsilon])
    probes = probes[(probes >= x0) & (probes <= x1)]
    if y0 <= 0 <= y1:
        zz = np.concatenate([zz, probes.astype(complex)])
    # distance to the nearest node through the sorted array
    re = zz.real
    j = np.clip(np.searchsorted(grid.nodes, re), 1, len(grid) - 1)
    dist_l = np.abs(zz - grid.nodes[j - 1])
    dist_r = np.abs(zz - grid.nodes[j])
    dist = np.minimum(dist_l, dist_r)
    if len(grid) == 1:
        dist = np.abs(zz - grid.nodes[0])
    keep = dist > epsilon
    if not np.any(keep):
        raise GridError("no test points satisfy dist(z, X) > epsilon")
    zk = zz[keep]
    vals = np.exp(-S.type_constant * np.abs(zk.imag)) * np.abs(S(zk))
    c1 = float(vals.min())
    c2 = float(vals.max())
    desc = f"[{x0},{x1}]x[{y0},{y1}] step {step} + node probes"
    return SineTypeReport(epsilon, c1, c2, desc, bool(c1 > floor and np.isfinite(c2)), int(zk.size), floor)


def lower_uniform_density(grid: SamplingGrid, r: float) -> float:
    """inf_a N(X, [a, a + r)) / r over intervals inside the stored window.

    N(a) is piecewise constant in a with breakpoints at x_i and x_i - r, so
    the infimum is taken over the breakpoints and the midpoints between them.
    """
    x = grid.nodes
    lo, hi = x[0], x[-1] - r
    if r <= 0 or hi < lo:
        raise GridError(f"r={r!r} must be positive and at most the window span")
    cand = np.concatenate([x, x - r])
    cand = np.unique(cand[(cand >= lo) & (cand <= hi)])
    cand = np.unique(np.concatenate([[lo, hi], cand]))
    mids = 0.5 * (cand[1:] + cand[:-1])
    a = np.concatenate([cand, mids])
    counts = np.searchsorted(x, a + r, side="left") - np.searchsorted(x, a, side="left")
    return float(counts.min() / r)
