"""Command line interface.

Subcommands
-----------
sweep      CSV of slice stability margins over a radius/parameter interval
classify   window/threshold/inapplicable verdict, c0, curvature ordering
slice      full stability report of one slice
threshold  crossing radius and interval thresholds
verify     run the finite-difference and embedding cross-check suites
embed      profile CSV (t, f, h) of the flat rotational embedding

Exit codes: 0 ok / hypothesis satisfied, 1 parse or config error,
2 hypothesis violated or no embedding, 3 verdict within 1e-12 of the
boundary, 4 verification failure, 5 domain error.

Model parameters come from flags (--model, --m, --c, --q, --b) or a TOML
config (--config); flags win.  For the black-hole models --interval is a
radius interval; for space forms and profiles it is in the warped parameter
t.  The WARPSTAB_CAP environment variable caps unbounded domains.
"""

from __future__ import annotations

import argparse
import io
import math
import sys

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # py3.10
    import tomli as tomllib

from . import embedding as emb_mod
from . import oracle, stability, warping
from .csvout import g17, write_csv
from .curvature import radial_monotonicity_condition, curvature_state
from .errors import (EmbeddingError, HypothesisViolated, IntegrationError,
                     InvalidParameters, OutOfDomain, WarpstabError)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_HYPOTHESIS = 2
EXIT_BOUNDARY = 3
EXIT_VERIFY = 4
EXIT_DOMAIN = 5

MODEL_KINDS = ("dss", "rn", "space_form", "ellipsoid", "hyperboloid")


class _ParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on errors; route through our own code instead
    def error(self, message):
        raise _ParseError(message)


def _load_config(path: str) -> dict:
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except OSError as exc:
        raise _ParseError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise _ParseError(f"bad TOML in {path}: {exc}") from exc


def _merged_params(args) -> dict:
    """Config [model]/[run] tables overridden by any explicit flags."""
    cfg = {}
    if args.config:
        raw = _load_config(args.config)
        cfg.update(raw.get("model", {}))
        cfg.update(raw.get("run", {}))
    for key in ("model", "m", "c", "q", "b", "s_max", "interval", "n",
                "order", "tol", "out", "svg", "t", "r", "l_max", "suite",
                "step", "case"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key if key != "model" else "kind"] = val
    return cfg


def _build_model(cfg: dict):
    kind = cfg.get("kind")
    if kind is None:
        raise _ParseError("no model given (--model or [model] kind in config)")
    if kind == "dss":
        if "m" not in cfg:
            raise _ParseError("dss needs --m")
        return warping.DeSitterSchwarzschild(float(cfg["m"]),
                                             float(cfg.get("c", 0.0)))
    if kind == "rn":
        if "m" not in cfg or "q" not in cfg:
            raise _ParseError("rn needs --m and --q")
        return warping.ReissnerNordstrom(float(cfg["m"]), float(cfg["q"]))
    if kind == "space_form":
        return warping.SpaceForm(float(cfg.get("c", 0.0)))
    if kind == "ellipsoid":
        if "b" not in cfg:
            raise _ParseError("ellipsoid needs --b")
        return warping.ellipsoid_model(float(cfg["b"]))
    if kind == "hyperboloid":
        if "b" not in cfg:
            raise _ParseError("hyperboloid needs --b")
        return warping.hyperboloid_model(float(cfg["b"]),
                                         s_max=float(cfg.get("s_max", 5.0)))
    raise _ParseError(f"unknown model kind {kind!r}; pick one of {MODEL_KINDS}")


def _t_interval(model, cfg) -> tuple[float, float]:
    """Interval in t; a radius interval is converted for black-hole models."""
    iv = cfg.get("interval")
    radial = model.kind in ("dss", "rn")
    if iv is None:
        t0, t1 = model.t_domain()
        if model.kind == "space_form":
            span = t1 - t0
            return t0 + 1e-3 * span, t1 - 1e-3 * span
        return t0, t1
    lo, hi = float(iv[0]), float(iv[1])
    if not hi > lo:
        raise _ParseError(f"empty interval [{lo}, {hi}]")
    if radial:
        return model.t_of_r(lo), model.t_of_r(hi)
    return lo, hi


def _r_interval(model, cfg) -> tuple[float, float]:
    iv = cfg.get("interval")
    if iv is None:
        return model.r_lo * (1 + 1e-6), model.r_hi * (1 - 1e-9)
    return float(iv[0]), float(iv[1])


def _required_h2(model, t: float) -> float:
    st = curvature_state(model, t)
    if model.kind == "dss":
        return model.m / (2.0 * st.h**3) - model.c
    if model.kind == "rn":
        return (model.m - 2.0 * model.q**2 / st.h) / (2.0 * st.h**3)
    if model.kind == "space_form":
        return -model.c
    return -st.k_rad  # pointwise slice requirement for profile models


def _emit(lines, out=None):
    stream = out if out is not None else sys.stdout
    for line in lines:
        stream.write(line + "\n")


# ---------------------------------------------------------------------------
# subcommands


def cmd_sweep(cfg) -> int:
    model = _build_model(cfg)
    n = int(cfg.get("n", 200))
    if n < 2:
        raise _ParseError(f"need at least 2 sweep points, got {n}")
    radial = model.kind in ("dss", "rn")
    rows = []
    if radial:
        r_lo, r_hi = _r_interval(model, cfg)
        params = np.linspace(r_lo, r_hi, n)
    else:
        t_lo, t_hi = _t_interval(model, cfg)
        params = np.linspace(t_lo, t_hi, n)
    for p in params:
        if radial:
            h, hp, hpp = model.eval_r(p)
            t = None
        else:
            h, hp, hpp = model.eval(p)
        k_tan = (1.0 - hp * hp) / (h * h)
        k_rad = -hpp / h
        h2 = (hp / h) ** 2
        req = {
            "dss": (lambda: model.m / (2.0 * h**3) - model.c),
            "rn": (lambda: (model.m - 2.0 * model.q**2 / h) / (2.0 * h**3)),
            "space_form": (lambda: -model.c),
        }.get(model.kind, lambda: -k_rad)()
        rows.append((h, h2, req, h2 - req,
                     "true" if k_tan >= k_rad - 1e-12 else "false"))

    header = ["r", "H2_slice", "H2_required", "margin", "stable_slice"]
    out_path = cfg.get("out")
    if out_path:
        write_csv(out_path, header, rows)
    else:
        buf = io.StringIO()
        write_csv(buf, header, rows)
        sys.stdout.write(buf.getvalue())

    lines = [f"kind={model.kind}", f"rows={n}"]
    margins = [row[3] for row in rows]
    flips = [k for k in range(n - 1) if margins[k] * margins[k + 1] < 0]
    if model.kind in ("dss", "rn") and flips:
        lines.append(f"crossing_r={g17(stability.slice_threshold_radius(model))}")
    if out_path:
        lines.append(f"out={out_path}")
        _emit(lines)
    else:
        _emit(lines, out=sys.stderr)
    svg_path = cfg.get("svg")
    if svg_path:
        _write_sweep_svg(svg_path, [row[0] for row in rows], margins)
        _emit([f"svg={svg_path}"])
    return EXIT_OK


def _write_sweep_svg(path: str, xs, ys) -> None:
    """Minimal standalone SVG: the sweep margin as one polyline."""
    W, H, pad = 640, 360, 40
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if y1 == y0:
        y1 = y0 + 1.0
    sx = lambda x: pad + (W - 2 * pad) * (x - x0) / (x1 - x0)
    sy = lambda y: H - pad - (H - 2 * pad) * (y - y0) / (y1 - y0)
    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
    ]
    if y0 < 0 < y1:
        z = sy(0.0)
        parts.append(f'<line x1="{pad}" y1="{z:.2f}" x2="{W - pad}" '
                     f'y2="{z:.2f}" stroke="#999" stroke-dasharray="4"/>')
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1a6" '
                 f'stroke-width="1.5"/>')
    parts.append(f'<text x="{pad}" y="{H - 8}" font-size="12">margin = '
                 f'H2_slice - H2_required</text>')
    parts.append("</svg>")
    with open(path, "w") as f:
        f.write("\n".join(parts) + "\n")


def cmd_classify(cfg) -> int:
    model = _build_model(cfg)
    t_lo, t_hi = _t_interval(model, cfg)
    n = int(cfg.get("n", 512))
    lines = [f"kind={model.kind}",
             f"t_interval=[{g17(t_lo)},{g17(t_hi)}]"]

    ts = np.linspace(t_lo, t_hi, n)
    states = [curvature_state(model, t) for t in ts]
    kts = np.array([s.k_tan for s in states])
    krs = np.array([s.k_rad for s in states])

    diff = kts - krs
    order = ("tan_ge_rad" if np.all(diff >= -1e-12)
             else "rad_ge_tan" if np.all(diff <= 1e-12) else "mixed")
    lines.append(f"curvature_order={order}")

    checks = [stability.slice_monotonicity(model, t) for t in ts]
    lines.append(f"slice_H_monotone={str(all(checks)).lower()}")

    br = [radial_monotonicity_condition(model, t) for t in
          np.linspace(t_lo + 1e-3 * (t_hi - t_lo), t_hi - 1e-3 * (t_hi - t_lo), 64)]
    gap = max(b.lhs - b.rhs for b in br)
    lines.append(f"radial_monotonicity_holds={str(all(b.holds for b in br)).lower()}")
    lines.append(f"radial_monotonicity_max_gap={g17(gap)}")

    if model.kind in ("dss", "rn"):
        try:
            lines.append(
                f"threshold_radius={g17(stability.slice_threshold_radius(model))}")
        except HypothesisViolated:
            lines.append("threshold_radius=none")

    code = EXIT_OK
    if np.any(kts <= 1e-12):
        lines.append("regime=inapplicable")
        lines.append("reason=tangential curvature not positive on the interval")
        code = EXIT_HYPOTHESIS
    else:
        ratio = krs / kts
        lines.append(f"ratio_range=[{g17(ratio.min())},{g17(ratio.max())}]")
        eps = ratio - 1.0
        lines.append(f"eps_range=[{g17(eps.min())},{g17(eps.max())}]")
        in_window = [stability.eps_window_check(e) for e in
                     (eps.min(), eps.max())]
        edge_dist = min(
            abs(eps.min() - stability.EPS_WINDOW_LO),
            abs(eps.max() - stability.EPS_WINDOW_HI))
        if all(in_window):
            lines.append("regime=window")
            lines.append("c0=0")
        else:
            res = stability.c0(model, (t_lo, t_hi))
            lines.append("regime=threshold")
            lines.append(f"case={res.case_id}")
            lines.append(f"c0={g17(res.value)}")
            lines.append(f"c0_at_t={g17(res.t_at)}")
        if edge_dist <= 1e-12:
            code = EXIT_BOUNDARY
    _emit(lines)
    return code


def cmd_slice(cfg) -> int:
    model = _build_model(cfg)
    if cfg.get("t") is not None:
        t = float(cfg["t"])
    elif cfg.get("r") is not None:
        if model.kind not in ("dss", "rn"):
            raise _ParseError("--r only applies to the black-hole models")
        t = model.t_of_r(float(cfg["r"]))
    else:
        raise _ParseError("slice needs --t or --r")
    rep = stability.slice_report(model, t, l_max=int(cfg.get("l_max", 8)))
    ints = stability.slice_integral_checks(model, t,
                                           order=int(cfg.get("order", 16)))
    lines = [
        f"kind={model.kind}",
        f"t={g17(rep.t)}", f"r={g17(rep.r)}", f"H={g17(rep.H)}",
        f"H2={g17(rep.H * rep.H)}",
        f"lambda1={g17(rep.lambda1)}",
        "jacobi_mu=" + ",".join(g17(m) for m in rep.jacobi_mu),
        f"stable={str(rep.stable).lower()}",
        f"monotone={str(rep.monotone).lower()}",
        f"area={g17(ints.area)}",
        f"h2_plus_ktan_integral={g17(ints.h2_plus_ktan)}",
        f"h2x2_plus_ricci_integral={g17(ints.h2x2_plus_ricci)}",
        f"gauss_integral={g17(ints.gauss_total)}",
        f"equals_4pi={str(ints.equals_4pi).lower()}",
        f"below_8pi={str(ints.below_8pi).lower()}",
    ]
    boundary = False
    violated = not rep.stable
    for name, chk in rep.thresholds.items():
        lines.append(f"check[{name}]=required:{g17(chk.required)}"
                     f",actual:{g17(chk.actual)}"
                     f",satisfied:{str(chk.satisfied).lower()}"
                     f",boundary:{str(chk.boundary).lower()}")
        boundary = boundary or chk.boundary
        violated = violated or not chk.satisfied
    _emit(lines)
    if violated:
        return EXIT_HYPOTHESIS
    if boundary:
        return EXIT_BOUNDARY
    return EXIT_OK


def cmd_threshold(cfg) -> int:
    model = _build_model(cfg)
    t_lo, t_hi = _t_interval(model, cfg)
    lines = [f"kind={model.kind}",
             f"t_interval=[{g17(t_lo)},{g17(t_hi)}]"]
    code = EXIT_OK
    if model.kind in ("dss", "rn"):
        try:
            r_star = stability.slice_threshold_radius(model)
            r_closed = stability.slice_threshold_radius_closed(model)
            lines.append(f"threshold_radius={g17(r_star)}")
            lines.append(f"threshold_radius_closed={g17(r_closed)}")
        except HypothesisViolated as exc:
            lines.append(f"threshold_radius=none ({exc})")
            code = EXIT_HYPOTHESIS
    case = cfg.get("case", "i")
    try:
        sup = stability.stab_main_threshold(model, (t_lo, t_hi), case=case)
        lines.append(f"ordering_case={case}")
        lines.append(f"ordering_h2_min={g17(sup.value)}")
        lines.append(f"ordering_sup_at_t={g17(sup.t_at)}")
        lines.append(f"ordering_sup_attained={str(sup.attained).lower()}")
    except HypothesisViolated as exc:
        lines.append(f"ordering_case={case}")
        lines.append(f"ordering_h2_min=none ({exc})")
        code = EXIT_HYPOTHESIS
    try:
        gen = stability.general_threshold(model, (t_lo, t_hi))
        lines.append(f"shape_h2_min={g17(gen.mean_shape)}")
        lines.append(f"shape_vacuous={str(gen.mean_shape_vacuous).lower()}")
        lines.append(f"ricci_h2_min={g17(gen.ricci)}")
        lines.append(f"ricci_vacuous={str(gen.ricci_vacuous).lower()}")
    except EmbeddingError as exc:
        lines.append(f"shape_h2_min=none ({exc})")
    _emit(lines)
    return code


def _battery():
    """Built-in models with safe evaluation intervals (radial for bh kinds)."""
    return [
        ("space_form c=1", warping.SpaceForm(1.0), (0.3, math.pi - 0.3), None),
        ("space_form c=0", warping.SpaceForm(0.0, cap=30.0), (0.5, 5.0), None),
        ("space_form c=-1", warping.SpaceForm(-1.0, cap=30.0), (0.3, 3.0), None),
        ("dss m=1 c=0", warping.DeSitterSchwarzschild(1.0, 0.0, cap=30.0),
         None, (1.2, 5.0)),
        ("dss m=1 c=0.05", warping.DeSitterSchwarzschild(1.0, 0.05),
         None, (1.2, 3.6)),
        ("rn m=2 q=0.5", warping.ReissnerNordstrom(2.0, 0.5, cap=30.0),
         None, (2.0, 6.0)),
    ]


def _battery_t_interval(model, t_int, r_int):
    if t_int is not None:
        return t_int
    return model.t_of_r(r_int[0]), model.t_of_r(r_int[1])


def cmd_verify(cfg) -> int:
    suite = cfg.get("suite", "all")
    if suite not in ("curvature", "embedding", "integrals", "all"):
        raise _ParseError(f"unknown suite {suite!r}")
    tol = float(cfg.get("tol", 1e-6))
    step = float(cfg.get("step", 5e-3))
    ok = True
    lines = []

    if suite in ("curvature", "all"):
        for label, model, t_int, r_int in _battery():
            iv = _battery_t_interval(model, t_int, r_int)
            rep = oracle.verify_model(model, iv, tol=tol, step=step)
            worst = max(rep.errors.values())
            lines.append(f"curvature[{label}] max_err={worst:.3e} "
                         f"bianchi={rep.bianchi:.3e} "
                         f"passed={str(rep.passed).lower()}")
            ok = ok and rep.passed

    if suite in ("embedding", "all"):
        for label, model, t_int, r_int in _battery():
            if model.kind == "space_form" and model.c == 0.0:
                continue  # flat: k_tan vanishes, no shape operator
            iv = _battery_t_interval(model, t_int, r_int)
            emb = emb_mod.build_embedding(model, iv)
            res = emb.relation_residual()
            worst = 0.0
            ts = np.linspace(iv[0] + 0.05 * (iv[1] - iv[0]),
                             iv[1] - 0.05 * (iv[1] - iv[0]), 5)
            for t in ts:
                sf = emb_mod.second_form_closed(model, t)
                closed = np.diag([sf.a * (1 + sf.eps), sf.a, sf.a])
                for phi1 in (0.7, 1.9):
                    num = emb_mod.second_form_numeric(emb, t, phi1)
                    err = np.max(np.abs(num - closed)) / max(abs(sf.a), 1e-3)
                    worst = max(worst, float(err))
            good = res <= 1e-10 and worst <= max(tol, 1e-6)
            lines.append(f"embedding[{label}] kappa={emb.kappa} "
                         f"relation_residual={res:.3e} "
                         f"second_form_err={worst:.3e} "
                         f"passed={str(good).lower()}")
            ok = ok and good

    if suite in ("integrals", "all"):
        for label, model, t_int, r_int in _battery():
            iv = _battery_t_interval(model, t_int, r_int)
            good = True
            worst = 0.0
            for t in np.linspace(iv[0], iv[1], 5):
                res = stability.slice_integral_checks(model, t)
                worst = max(worst, abs(res.h2_plus_ktan - 4 * math.pi),
                            abs(res.gauss_total - 4 * math.pi))
                good = good and res.equals_4pi and res.below_8pi and res.gauss_4pi
            lines.append(f"integrals[{label}] max_dev={worst:.3e} "
                         f"passed={str(good).lower()}")
            ok = ok and good

    lines.append(f"verify={'PASS' if ok else 'FAIL'}")
    _emit(lines)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_embed(cfg) -> int:
    model = _build_model(cfg)
    t_lo, t_hi = _t_interval(model, cfg)
    emb = emb_mod.build_embedding(model, (t_lo, t_hi),
                                  n_grid=int(cfg.get("n", 257)))
    out_path = cfg.get("out")
    if out_path:
        emb.to_csv(out_path)
    else:
        buf = io.StringIO()
        emb.to_csv(buf)
        sys.stdout.write(buf.getvalue())
    lines = [f"kind={model.kind}", f"kappa={emb.kappa}",
             f"relation_residual={emb.relation_residual():.3e}"]
    if out_path:
        lines.append(f"out={out_path}")
        _emit(lines)
    else:
        _emit(lines, out=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------


def _make_parser() -> _Parser:
    p = _Parser(prog="warpstab",
                description="curvature and CMC-slice stability of 3-d "
                            "warped products")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="TOML config with [model]/[run] tables")
        sp.add_argument("--model", choices=MODEL_KINDS)
        sp.add_argument("--m", type=float, help="mass parameter")
        sp.add_argument("--c", type=float, help="curvature/cosmological parameter")
        sp.add_argument("--q", type=float, help="charge parameter")
        sp.add_argument("--b", type=float, help="profile axis ratio")
        sp.add_argument("--s-max", dest="s_max", type=float,
                        help="hyperboloid profile half-width")
        sp.add_argument("--interval", nargs=2, type=float, metavar=("A", "B"),
                        help="radius interval (dss/rn) or t interval (others)")
        sp.add_argument("--n", type=int, help="grid points")
        sp.add_argument("--order", type=int, help="sphere quadrature order")
        sp.add_argument("--tol", type=float, help="verification tolerance")
        sp.add_argument("--out", help="output CSV path (default stdout)")

    sp = sub.add_parser("sweep", help="slice stability margin CSV")
    common(sp)
    sp.add_argument("--svg", help="also write a margin plot as SVG")
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("classify", help="stability regime of an interval")
    common(sp)
    sp.set_defaults(fn=cmd_classify)

    sp = sub.add_parser("slice", help="stability report of one slice")
    common(sp)
    sp.add_argument("--t", type=float, help="slice parameter t")
    sp.add_argument("--r", type=float, help="slice radius (dss/rn)")
    sp.add_argument("--l-max", dest="l_max", type=int,
                    help="Jacobi modes to report (default 8)")
    sp.set_defaults(fn=cmd_slice)

    sp = sub.add_parser("threshold", help="crossing radius and H^2 thresholds")
    common(sp)
    sp.add_argument("--case", choices=("i", "ii"),
                    help="curvature ordering case (default i)")
    sp.set_defaults(fn=cmd_threshold)

    sp = sub.add_parser("verify", help="run cross-check suites")
    common(sp)
    sp.add_argument("--suite", choices=("curvature", "embedding",
                                        "integrals", "all"))
    sp.add_argument("--step", type=float, help="fd step (default 5e-3)")
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("embed", help="flat embedding profile CSV")
    common(sp)
    sp.set_defaults(fn=cmd_embed)

    return p


def main(argv=None) -> int:
    parser = _make_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _merged_params(args)
        return args.fn(cfg)
    except _ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (HypothesisViolated, EmbeddingError) as exc:
        print(f"hypothesis violated: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (IntegrationError, ArithmeticError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (OutOfDomain, InvalidParameters) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except WarpstabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
