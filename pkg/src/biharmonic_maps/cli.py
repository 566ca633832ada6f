"""Command-line interface: ``biharmonic-maps {verify,energy,stability,scan}``.

Exit codes: 0 when the claim is verified or an instability witness is
found, 1 when it is refuted or no witness is found, 2 on usage or I/O
errors.
"""

import argparse
import csv
import io
import json
import math
import os
import sys

from . import __version__
from .diffops import FDConfig
from .energy import (
    PUBLISHED_BIENERGY_FORMULA,
    bienergy_report,
    density_report,
    energy_report,
    sobolev_report,
)
from .errors import DomainError
from .maps import MapKind, MapSpec, critical_angle
from .quadrature import gauss_legendre
from .residuals import (
    ANALYTIC,
    BIHARMONIC,
    DEFAULT_TOLERANCE,
    FD,
    HARMONIC,
    certify,
)
from .stability import GAMMA, METHODS as SV_METHODS, QUAD, SFD, evaluate, instability_scan

THREADS_ENV = "BIHARMONIC_MAPS_THREADS"
PROVENANCE = {ANALYTIC: "closed-form", FD: "finite-difference", GAMMA: "closed-form", QUAD: "quadrature", SFD: "finite-difference"}

EXIT_OK, EXIT_REFUTED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isinf(x):
            return "divergent" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def _jsonable(x):
    if isinstance(x, float) and math.isinf(x):
        return "divergent" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _parse_range(text: str) -> list[int]:
    try:
        if ":" in text:
            a, b = text.split(":", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(text)
    except ValueError:
        raise UsageError(f"invalid range {text!r}; expected a:b") from None
    if hi < lo:
        raise UsageError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def _workers() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _spec(args) -> MapSpec:
    kind = MapKind.parse(args.map)
    if args.angle is not None and args.sin2 is not None:
        raise UsageError("give at most one of --angle and --sin2")
    if not kind.rotated:
        if args.angle is not None or args.sin2 is not None:
            raise UsageError(f"{kind} takes no angle")
        return MapSpec(kind, args.m)
    if args.angle is not None or args.sin2 is not None:
        return MapSpec(kind, args.m, sin2=args.sin2, angle=args.angle)
    if critical_angle(kind, args.m) is None:
        return None
    return MapSpec.critical(kind, args.m)


def _spec_config(spec: MapSpec | None, args) -> dict:
    cfg = {"map": str(MapKind.parse(args.map)), "m": args.m}
    if spec is not None and spec.rotated:
        cfg["angle"] = spec.angle
        cfg["sin2"] = spec.sin2
        cfg["critical"] = spec.is_critical
    return cfg


# ---------------------------------------------------------------- verify


def cmd_verify(args):
    spec = _spec(args)
    config = {"command": "verify", **_spec_config(spec, args)}
    if spec is None:
        config["note"] = f"no critical angle for {MapKind.parse(args.map)} at m={args.m}"
        return EXIT_REFUTED, config, []
    equation = args.equation
    if equation == "auto":
        equation = BIHARMONIC if spec.rotated else HARMONIC
    methods = [ANALYTIC, FD] if args.method == "both" else [args.method]
    fd_cfg = FDConfig(h=args.fd_h, order=args.fd_order, levels=args.fd_levels)
    tol = {ANALYTIC: args.tol_analytic, FD: args.tol_fd}
    config.update(
        equation=equation,
        methods=methods,
        samples=args.samples,
        seed=args.seed,
        tolerance={k: tol[k] for k in methods},
        fd={"h": fd_cfg.h, "order": fd_cfg.order, "levels": fd_cfg.levels,
            "outer_h": fd_cfg.outer_h, "outer_levels": fd_cfg.outer_levels},
    )
    results = []
    ok = True
    for method in methods:
        rep = certify(spec, equation, args.samples, args.seed, tol[method], method, fd_cfg, workers=_workers())
        power = 2 if equation == HARMONIC else 4
        row = {
            "quantity": f"{equation} residual, max |res| r^{power}",
            "equation": equation,
            "method": method,
            "provenance": PROVENANCE[method],
            "max_scaled": rep.max,
            "mean_scaled": rep.mean,
            "tolerance": rep.tolerance,
            "verdict": rep.verdict,
        }
        ok &= rep.verified
        if rep.properness is not None:
            row.update(
                properness_min_scaled_tension=rep.properness,
                properness_floor=rep.properness_floor,
                tension_closed_form=rep.extra["tension_closed_form"],
                proper=rep.proper,
            )
            ok &= bool(rep.proper)
        results.append(row)
    return (EXIT_OK if ok else EXIT_REFUTED), config, results


# ---------------------------------------------------------------- energy


def _energy_row(rep, published_formula=None):
    row = {
        "quantity": rep.quantity,
        "values": [
            {"provenance": "closed-form", "value": rep.closed_form},
            {"provenance": "quadrature", "value": rep.quadrature},
        ],
        "relative_gap": rep.relative_gap,
    }
    if rep.published is not None:
        row["published"] = {
            "formula": published_formula,
            "value": rep.published,
            "agrees_with_quadrature": rep.published_agrees,
            "status": "agrees with quadrature" if rep.published_agrees else "disagrees with quadrature",
        }
    return row


def cmd_energy(args):
    spec = _spec(args)
    config = {"command": "energy", **_spec_config(spec, args), "nodes": args.nodes, "tolerance": args.tol, "radius": args.radius}
    if spec is None:
        config["note"] = f"no critical angle for {MapKind.parse(args.map)} at m={args.m}"
        return EXIT_REFUTED, config, []
    rule = gauss_legendre(args.nodes)
    reports = [density_report(spec, args.radius), energy_report(spec, rule)]
    bien = bienergy_report(spec, rule)
    reports.append(bien)
    results = [_energy_row(r) for r in reports[:-1]]
    results.append(_energy_row(bien, PUBLISHED_BIENERGY_FORMULA.get(spec.kind)))
    if spec.rotated:
        sob = sobolev_report(spec, rule)
        reports += [sob.grad, sob.laplacian]
        results += [_energy_row(sob.grad), _energy_row(sob.laplacian)]
        results.append({"quantity": "W22-membership", "value": sob.member, "provenance": "closed-form"})
    ok = all(r.relative_gap <= args.tol for r in reports)
    return (EXIT_OK if ok else EXIT_REFUTED), config, results


# ---------------------------------------------------------------- stability


def cmd_stability(args):
    kind = MapKind.parse(args.map)
    methods = list(SV_METHODS) if args.method == "all" else [args.method]
    if GAMMA not in methods:
        methods.insert(0, GAMMA)
    config = {"command": "stability", "map": str(kind), "m": args.m, "p": args.p,
              "methods": methods, "s_step": args.s_step, "nodes": args.nodes}
    rep = evaluate(kind, args.m, args.p, methods, args.s_step, gauss_legendre(args.nodes))
    values = [{"method": GAMMA, "provenance": PROVENANCE[GAMMA], "value": rep.value_gamma}]
    if rep.value_quadrature is not None:
        values.append({"method": QUAD, "provenance": PROVENANCE[QUAD], "value": rep.value_quadrature})
    if rep.value_sfd is not None:
        values.append({"method": SFD, "provenance": PROVENANCE[SFD], "value": rep.value_sfd})
    gaps = {m: rep.gap(m) for m in (QUAD, SFD) if rep.gap(m) is not None}
    row = {"quantity": "second variation of the bienergy", "family": str(kind), "m": rep.m, "p": rep.p,
           "values": values, "relative_gaps": gaps, "sign": rep.sign}
    return (EXIT_OK if rep.sign == "negative" else EXIT_REFUTED), config, [row]


# ---------------------------------------------------------------- scan


def cmd_scan(args):
    kind = MapKind.parse(args.map)
    ms = _parse_range(args.m_range)
    grid = None
    if args.p_strategy == "grid":
        if args.p_step <= 0 or args.p_max < args.p_min:
            raise UsageError("grid strategy needs --p-min <= --p-max and --p-step > 0")
        n = int(math.floor((args.p_max - args.p_min) / args.p_step + 1e-9)) + 1
        grid = [args.p_min + i * args.p_step for i in range(n)]
    config = {"command": "scan", "map": str(kind), "m_range": [ms[0], ms[-1]], "p_strategy": args.p_strategy}
    if grid is not None:
        config.update(p_min=args.p_min, p_max=args.p_max, p_step=args.p_step)
    reports = instability_scan(kind, ms, args.p_strategy, grid)
    rows = [
        {"family": str(r.family), "m": r.m, "p": r.p, "value_gamma": r.value_gamma, "sign": r.sign,
         "provenance": "closed-form", "exploratory": r.exploratory}
        for r in reports
    ]
    witness = {m: any(r.sign == "negative" for r in reports if r.m == m) for m in ms}
    return (EXIT_OK if all(witness.values()) else EXIT_REFUTED), config, rows


# ---------------------------------------------------------------- output

SCAN_HEADER = ("family", "m", "p", "value_gamma", "sign")


def _csv(command, results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command == "scan":
        w.writerow(SCAN_HEADER)
        for r in results:
            w.writerow([_fmt(r[k]) if k != "m" else r["m"] for k in SCAN_HEADER])
        return buf.getvalue()
    if command == "verify":
        header = ("equation", "method", "provenance", "max_scaled", "mean_scaled", "tolerance", "verdict",
                  "properness_min_scaled_tension", "properness_floor", "proper")
        w.writerow(header)
        for r in results:
            w.writerow([_fmt(r.get(k)) for k in header])
        return buf.getvalue()
    if command == "energy":
        w.writerow(("quantity", "provenance", "value", "relative_gap"))
        for r in results:
            if "values" not in r:
                w.writerow((r["quantity"], r["provenance"], _fmt(r["value"]), ""))
                continue
            for v in r["values"]:
                w.writerow((r["quantity"], v["provenance"], _fmt(v["value"]), _fmt(r["relative_gap"])))
            if "published" in r:
                w.writerow((r["quantity"], "published", _fmt(r["published"]["value"]), r["published"]["status"]))
        return buf.getvalue()
    w.writerow(("family", "m", "p", "method", "provenance", "value", "sign"))
    for r in results:
        for v in r["values"]:
            w.writerow((r["family"], r["m"], _fmt(r["p"]), v["method"], v["provenance"], _fmt(v["value"]), r["sign"]))
    return buf.getvalue()


def _text(command, config, results, code) -> str:
    lines = [f"biharmonic-maps {__version__} :: {command}"]
    for k, v in config.items():
        if k != "command":
            lines.append(f"  {k}: {_fmt(v) if isinstance(v, float) else v}")
    if "note" in config:
        lines.append(f"NO CRITICAL ANGLE: {config['note']}")
    if command == "verify":
        for r in results:
            lines.append(
                f"{r['equation']:<10} {r['method']:<8} max scaled residual (x r^{2 if r['equation'] == HARMONIC else 4})"
                f" = {r['max_scaled']:.3e}  tol {r['tolerance']:.1e}  -> {r['verdict']}"
            )
            if "proper" in r:
                lines.append(
                    f"{'':<19} min scaled tension (x r^2) = {r['properness_min_scaled_tension']:.12g}"
                    f"  floor {r['properness_floor']:.6g}  -> {'proper' if r['proper'] else 'NOT proper'}"
                )
    elif command == "energy":
        for r in results:
            if "values" not in r:
                lines.append(f"{r['quantity']:<14} {_fmt(r['value'])}")
                continue
            c, q = (v["value"] for v in r["values"])
            lines.append(f"{r['quantity']:<14} closed-form {_fmt(c):>24}  quadrature {_fmt(q):>24}  gap {r['relative_gap']:.2e}")
            if "published" in r:
                p = r["published"]
                lines.append(f"{'':<14} published {p['formula']} = {_fmt(p['value'])}  ({p['status']})")
    elif command == "stability":
        for r in results:
            for v in r["values"]:
                lines.append(f"{v['method']:<11} ({v['provenance']:<17}) {_fmt(v['value'])}")
            for k, g in r["relative_gaps"].items():
                lines.append(f"gap gamma vs {k}: {g:.3e}")
            lines.append(f"sign: {r['sign']}")
    else:
        lines.append(" ".join(SCAN_HEADER))
        for r in results:
            lines.append(f"{r['family']} {r['m']} {_fmt(r['p'])} {_fmt(r['value_gamma'])} {r['sign']}")
    lines.append(f"exit code: {code}")
    return "\n".join(lines) + "\n"


def render(command, config, results, fmt, code) -> str:
    if fmt == "json":
        doc = {"version": __version__, "config": _jsonable(config), "results": _jsonable(results)}
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        return _csv(command, results)
    return _text(command, config, results, code)


# ---------------------------------------------------------------- parser


def _add_map_args(p, with_angle=True):
    p.add_argument("--map", required=True, help="equator, fmr, mn2, mn3, mn2-rot(ated), mn3-rot(ated)")
    p.add_argument("--m", type=int, required=True, help="domain dimension")
    if with_angle:
        p.add_argument("--angle", type=float, help="rotation angle in radians (default: critical angle)")
        p.add_argument("--sin2", type=float, help="sin^2 of the rotation angle, exact alternative to --angle")


def _add_output_args(p, default_format="text"):
    p.add_argument("--format", choices=("text", "json", "csv"), default=default_format)
    p.add_argument("--output", "-o", help="write the report to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biharmonic-maps", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="certify the harmonic/biharmonic equation at sample points")
    _add_map_args(v)
    v.add_argument("--equation", choices=("auto", HARMONIC, BIHARMONIC), default="auto")
    v.add_argument("--method", choices=(ANALYTIC, FD, "both"), default="both")
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol-analytic", type=float, default=DEFAULT_TOLERANCE[ANALYTIC])
    v.add_argument("--tol-fd", type=float, default=DEFAULT_TOLERANCE[FD])
    v.add_argument("--fd-h", type=float, default=FDConfig.h, help="relative step for 1st/2nd derivatives")
    v.add_argument("--fd-order", type=int, choices=(2, 4), default=FDConfig.order)
    v.add_argument("--fd-levels", type=int, choices=(1, 2, 3), default=FDConfig.levels)
    _add_output_args(v)
    v.set_defaults(handler=cmd_verify)

    e = sub.add_parser("energy", help="energies, bienergy and Sobolev integrals")
    _add_map_args(e)
    e.add_argument("--nodes", type=int, default=64, help="Gauss-Legendre nodes")
    e.add_argument("--tol", type=float, default=1e-10, help="closed form vs quadrature relative gap")
    e.add_argument("--radius", type=float, default=0.5, help="radius for the energy density line")
    _add_output_args(e)
    e.set_defaults(handler=cmd_energy)

    s = sub.add_parser("stability", help="second variation along the rotation family")
    _add_map_args(s, with_angle=False)
    s.add_argument("--p", type=float, required=True, help="profile exponent, V = (1-r^2)^p, p > 2")
    s.add_argument("--method", choices=SV_METHODS + ("all",), default="all")
    s.add_argument("--s-step", type=float, default=1e-3)
    s.add_argument("--nodes", type=int, default=64)
    _add_output_args(s)
    s.set_defaults(handler=cmd_stability)

    c = sub.add_parser("scan", help="sign table of the second variation over m")
    c.add_argument("--map", required=True)
    c.add_argument("--m-range", required=True, help="inclusive range a:b")
    c.add_argument("--p-strategy", choices=("p=m", "grid", "minimize"), default="p=m")
    c.add_argument("--p-min", type=float, default=2.5)
    c.add_argument("--p-max", type=float, default=20.0)
    c.add_argument("--p-step", type=float, default=0.5)
    _add_output_args(c, default_format="csv")
    c.set_defaults(handler=cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, config, results = args.handler(args)
    except (UsageError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(args.command, config, results, args.format, code)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"{parser.prog}: cannot write {args.output}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
