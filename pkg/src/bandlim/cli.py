"""Command-line interface: ``bandlim <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings

import numpy as np

from . import analysis, examples, experiments, grid as gridmod, interp, specfun

_SERIES = {"wsk": "wsk", "lp": "lp", "aug": "augmented"}


def _parse_range(text: str):
    try:
        t0, t1, dt = (float(x) for x in text.split(":"))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected t0:t1:dt, got {text!r}") from e
    if not dt > 0 or t1 < t0:
        raise argparse.ArgumentTypeError("need t0 <= t1 and dt > 0")
    n = int(round((t1 - t0) / dt)) + 1
    return t0 + dt * np.arange(n)


def _floats(text: str):
    return [float(x) for x in text.split(",") if x.strip()]


def _write_csv(path, header, rows):
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])


def _write_json(path, obj):
    text = json.dumps(obj, indent=2, sort_keys=True, default=_json_default)
    if path in (None, "-"):
        print(text)
        return
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text + "\n")


def _json_default(x):
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(type(x))


def _value_rows(t, v):
    v = np.asarray(v)
    return [(float(a), float(np.real(b)), float(np.imag(b))) for a, b in zip(t, v)]


def _build_grid(kind, b, eps, theta, K, extra=None):
    if kind == "uniform":
        return gridmod.uniform_grid(b, K, extra)
    if kind == "union":
        return gridmod.union_grid(b, theta, K, extra)
    if kind == "bessel":
        return gridmod.bessel_grid(eps, K, extra)
    raise SystemExit(f"unknown grid kind {kind!r}")


def _parse_grid_spec(spec: str, extra=None):
    """``kind:key=value,...``, for example ``uniform:b=1,K=200`` or ``bessel:eps=0.1,K=50``."""
    kind, _, rest = spec.partition(":")
    kv = dict(item.split("=", 1) for item in rest.split(",") if item)
    K = int(kv.get("K", 100))
    return _build_grid(kind, float(kv.get("b", 1.0)), float(kv.get("eps", 0.1)),
                       float(kv.get("theta", 0.5)), K, extra)


def _read_series_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = [h.strip().lower() for h in rows[0]]
    data = np.array([[float(x) for x in r] for r in rows[1:] if r])
    return header, data


# -- commands ---------------------------------------------------------------


def cmd_grid(args):
    g = _build_grid(args.kind, args.b, args.eps, args.theta, args.window)
    if args.action == "verify-sine-type":
        S = gridmod.generating_function(g)
        rect = _floats(args.rect) if args.rect else [g.nodes[0] / 2, g.nodes[-1] / 2, -2.0, 2.0]
        rep = gridmod.verify_sine_type(S, g, args.eps_test or args.eps, tuple(rect), step=args.step,
                                       floor=args.floor)
        _write_json(args.out, rep.to_dict())
        return 0 if rep.passed else 1
    rows = [(int(k), float(x)) for k, x in zip(g.labels, g.nodes)]
    if args.emit:
        _write_csv(args.emit, ["index", "node"], rows)
    else:
        w = csv.writer(sys.stdout)
        w.writerow(["index", "node"])
        w.writerows((k, repr(x)) for k, x in rows)
    return 0


def cmd_interp(args):
    extra = args.xtilde if args.series == "aug" else None
    g = _parse_grid_spec(args.grid, extra)
    S = gridmod.generating_function(g)
    header, data = _read_series_csv(args.samples)
    a = np.zeros(len(g))
    for k, val in data[:, :2]:
        a[g.position_of(int(k))] = val
    t = args.eval
    if args.series == "aug":
        atilde = args.atilde
        if atilde is None:
            atilde = interp.calibrate_extra_value(g, S, a)
        v, rep = interp.interpolate_bounded(g, S, interp.AugmentedSamples(a, atilde), t, args.tol)
    else:
        v, rep = interp.interpolate_lp(g, S, a, t, args.tol)
    rows = [(float(tt), float(np.real(x)), float(np.imag(x)), int(n), float(tb))
            for tt, x, n, tb in zip(t, v, rep.terms_used, rep.tail_bound)]
    _write_csv(args.out, ["t", "re", "im", "terms_used", "tail_bound"], rows)
    print(json.dumps(rep.summary()))
    return 0


def _example_values(name, t, seed, alpha, window):
    if name == "g1":
        return examples.eval_g1(t)
    if name == "g3":
        return examples.eval_g3(t)
    if name in ("bm", "g2"):
        half = float(np.max(np.abs(t)))
        K = window or max(int(np.ceil(1.25 * half)), 10)
        if name == "bm":
            g, s = examples.boche_monich_samples(K)
        else:
            g, s = examples.g2_realization(alpha, seed, K)
        S = gridmod.generating_function(g)
        v, _ = interp.interpolate_bounded(g, S, s, t)
        return v
    raise SystemExit(f"unknown example {name!r}")


def cmd_example(args):
    t = args.eval
    v = _example_values(args.name, t, args.seed, args.alpha, args.window)
    _write_csv(args.out, ["t", "re", "im"], _value_rows(t, v))
    return 0


def _lattice_interpolant(g, s, half, per_unit):
    t, v, _ = interp.lattice_evaluate_uniform(s, g, half, per_unit)
    return t, v


def figure_data(name, seed=0, alpha=0.5):
    """(filename, header, rows) triples behind each figure."""
    out = []
    if name == "fig1":
        t = np.round(np.arange(-2000, 2001) * 0.01, 10)
        out.append(("fig1_g1.csv", ["t", "g1"], zip(t, examples.eval_g1(t))))
        g, s = examples.boche_monich_samples(2000)
        t, v = _lattice_interpolant(g, s, 50.0, 100)
        out.append(("fig1_bm.csv", ["t", "bm_interpolant"], zip(t, v)))
    elif name == "fig2":
        g, s = examples.g2_realization(alpha, seed, 6250)
        t, v = _lattice_interpolant(g, s, 5000.0, 20)
        near = np.abs(t) <= 100 + 1e-9
        out.append(("fig2_g2_100.csv", ["t", "g2"], zip(t[near], v[near])))
        out.append(("fig2_g2_5000.csv", ["t", "g2"], zip(t, v)))
    elif name == "fig3":
        t = np.round(np.arange(-10000, 10001) * 0.01, 10)
        out.append(("fig3_g3_100.csv", ["t", "g3"], zip(t, examples.eval_g3(t))))
        t = np.round(np.arange(0, 100001) * 0.05, 10)
        out.append(("fig3_absg3_5000.csv", ["t", "abs_g3"], zip(t, np.abs(examples.eval_g3(t)))))
    else:
        raise SystemExit(f"unknown figure {name!r}")
    return out


def cmd_figure(args):
    for fname, header, rows in figure_data(args.name, args.seed, args.alpha):
        path = os.path.join(args.out, fname)
        _write_csv(path, header, rows)
        print(path)
    return 0


def _load_sampled(path):
    header, data = _read_series_csv(path)
    t = data[:, 0]
    if "im" in header:
        v = data[:, header.index("re")] + 1j * data[:, header.index("im")]
    else:
        v = data[:, 1]
    dt = float(np.median(np.diff(t)))
    if np.max(np.abs(np.diff(t) - dt)) > 1e-6 * dt:
        raise SystemExit("input lattice must be uniform")
    return analysis.SampledFunction(float(t[0]), dt, v, {"source": path})


def cmd_analyze(args):
    if args.what == "carleson":
        A, lam = examples.g3_plus_exponentials(derivative=True)
        a0, a1 = _floats(args.a_range)
        a = np.round(np.arange(round(a0 / args.du), round(a1 / args.du) + 1) * args.du, 12)
        radii = _floats(args.radii) if args.radii else [1, 2, 4, 8, 16]
        est = analysis.carleson_functional(a_values=a, radii=radii, du=args.du, dv=args.dv,
                                           exponential_sum=(A, lam))
        _write_json(args.out, {"function": "g3_plus", **est.to_dict()})
        return 0
    if not args.input:
        raise SystemExit("--in is required")
    f = _load_sampled(args.input)
    prov = {"t0": f.t0, "dt": f.dt, "n": f.n, "source": args.input}
    if args.what == "avg":
        radii = _floats(args.radii)
        rep = {"averages": analysis.running_average(f, radii)}
    elif args.what == "bmo":
        scales = _floats(args.scales) if args.scales else None
        rep = analysis.bmo_seminorm(f, scales, args.offsets).to_dict()
    elif args.what == "hilbert":
        h = analysis.hilbert_numeric(f)
        if args.emit:
            _write_csv(args.emit, ["t", "re", "im"], _value_rows(h.t, h.values))
        rep = {"hilbert": {"t0": h.t0, "dt": h.dt, "n": h.n}, **h.provenance}
    elif args.what == "deriv":
        d = np.gradient(np.real(f.values), f.dt)[1:-1]
        rep = {"derivative_sup": float(np.max(np.abs(d))), "method": "central differences"}
    else:
        raise SystemExit(f"unknown analysis {args.what!r}")
    _write_json(args.out, {"lattice": prov, **rep})
    return 0


def cmd_experiment(args):
    name = args.name
    kw = {}
    if name in ("random-average", "one-sided", "bmo-line"):
        kw.update(seed=args.seed, alpha=args.alpha, workers=args.workers)
        if args.realizations is not None:
            kw["M"] = args.realizations
    if name in ("random-average", "one-sided", "g1-growth") and args.radii:
        kw["radii"] = _floats(args.radii)
    if name in ("random-average", "one-sided") and args.emit_curves:
        kw["emit_curves"] = args.emit_curves
    if name == "bmo-line" and args.radii:
        kw["r"] = _floats(args.radii)[0]
    if name == "g3-growth" and args.n_max:
        kw["n_max"] = args.n_max
    rep = experiments.EXPERIMENTS[name](**kw)
    _write_json(args.out, json.loads(rep.to_json()))
    for key, v in rep.verdicts.items():
        print(f"{'PASS' if v.passed else 'FAIL'} {name}:{key} value={v.value:.6g} threshold={v.threshold:.6g}")
    return 0 if rep.passed else 1


def cmd_selftest(args):
    rng = np.random.default_rng(args.seed)
    z = rng.uniform(1, 100, 1000) + 1j * rng.uniform(-10, 10, 1000)
    rec = np.max(np.abs(specfun.digamma(z + 1) - specfun.digamma(z) - 1 / z))
    x = rng.uniform(0.01, 0.99, 1000)
    with warnings.catch_warnings():
        # the reflection branch flags its own conditioning near the poles
        warnings.simplefilter("ignore", specfun.AccuracyWarning)
        refl = np.max(np.abs(specfun.digamma(1 - x) - specfun.digamma(x) - np.pi / np.tan(np.pi * x)))
    xs = np.linspace(0.5, 50, 2000)
    # balances the h^4 stencil error against J0 roundoff amplified by 1/h^2
    h = 2e-2
    f = specfun.bessel_j0
    d1 = (-f(xs + 2 * h) + 8 * f(xs + h) - 8 * f(xs - h) + f(xs - 2 * h)) / (12 * h)
    d2 = (-f(xs + 2 * h) + 16 * f(xs + h) - 30 * f(xs) + 16 * f(xs - h) - f(xs - 2 * h)) / (12 * h * h)
    ode = np.max(np.abs(d2 + d1 / xs + f(xs)))
    t = np.linspace(-3, 3, 60001)
    tents = sum(specfun.tent(t + n) for n in range(-5, 6))
    tent_gap = float(np.max(tents - np.abs(np.sin(np.pi * t))))
    res = {"digamma_recurrence": float(rec), "digamma_reflection": float(refl),
           "j0_ode_residual": float(ode), "tent_minus_sine_max": tent_gap}
    ok = rec < 1e-13 and refl < 1e-10 and ode < 1e-8 and tent_gap <= 1e-12
    for k, v in res.items():
        print(f"{k} {v:.3e}")
    return 0 if ok else 1


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bandlim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True,
                           metavar="{grid,interp,example,figure,analyze,experiment}")

    g = sub.add_parser("grid", help="emit grid nodes or check the sine-type bounds")
    g.add_argument("action", nargs="?", default="emit", choices=["emit", "verify-sine-type"])
    g.add_argument("--kind", default="uniform", choices=["uniform", "bessel", "union"])
    g.add_argument("--b", type=float, default=1.0)
    g.add_argument("--eps", type=float, default=0.1, help="bessel shift, or the distance for the check")
    g.add_argument("--eps-test", type=float, default=None, help="check distance when --eps is the bessel shift")
    g.add_argument("--theta", type=float, default=0.5)
    g.add_argument("--window", type=int, default=50)
    g.add_argument("--emit", default=None, help="CSV path (index,node); stdout when omitted")
    g.add_argument("--rect", default=None, help="x0,x1,y0,y1")
    g.add_argument("--step", type=float, default=0.05)
    g.add_argument("--floor", type=float, default=1e-6)
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_grid)

    i = sub.add_parser("interp", help="evaluate a sampling series")
    i.add_argument("--series", choices=list(_SERIES), default="aug")
    i.add_argument("--grid", default="uniform:b=1,K=200", help="kind:key=value,... e.g. bessel:eps=0.1,K=50")
    i.add_argument("--samples", required=True, help="CSV index,value")
    i.add_argument("--xtilde", type=float, default=0.5)
    i.add_argument("--atilde", type=float, default=None)
    i.add_argument("--eval", type=_parse_range, required=True, help="t0:t1:dt")
    i.add_argument("--tol", type=float, default=1e-9)
    i.add_argument("--out", required=True)
    i.set_defaults(func=cmd_interp)

    e = sub.add_parser("example", help="evaluate a reference function")
    e.add_argument("name", choices=["g1", "g3", "bm", "g2"])
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--alpha", type=float, default=0.5)
    e.add_argument("--window", type=int, default=None)
    e.add_argument("--eval", type=_parse_range, required=True)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_example)

    f = sub.add_parser("figure", help="emit the CSV data behind a figure")
    f.add_argument("name", choices=["fig1", "fig2", "fig3"])
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--alpha", type=float, default=0.5)
    f.add_argument("--out", default=".")
    f.set_defaults(func=cmd_figure)

    a = sub.add_parser("analyze", help="functionals of a sampled function")
    a.add_argument("what", choices=["avg", "bmo", "carleson", "hilbert", "deriv"])
    a.add_argument("--in", dest="input", default=None, help="CSV t,value or t,re,im")
    a.add_argument("--radii", default=None)
    a.add_argument("--scales", default=None)
    a.add_argument("--offsets", type=int, default=64)
    a.add_argument("--a-range", default="-20,20")
    a.add_argument("--du", type=float, default=1e-2)
    a.add_argument("--dv", type=float, default=1e-2)
    a.add_argument("--emit", default=None)
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_analyze)

    x = sub.add_parser("experiment", help="run a seeded experiment; exit 0 iff all verdicts pass")
    x.add_argument("name", choices=list(experiments.EXPERIMENTS))
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--alpha", type=float, default=0.5)
    x.add_argument("--realizations", type=int, default=None)
    x.add_argument("--radii", default=None)
    x.add_argument("--n-max", type=int, default=None)
    x.add_argument("--workers", type=int, default=None)
    x.add_argument("--out", default=None)
    x.add_argument("--emit-curves", default=None)
    x.set_defaults(func=cmd_experiment)

    s = sub.add_parser("specfun")
    s.add_argument("action", choices=["selftest"])
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return int(args.func(args) or 0)


if __name__ == "__main__":
    sys.exit(main())
