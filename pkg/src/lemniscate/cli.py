"""Command-line front end.

Subcommands:
    expand    coefficient tensors as JSON
    region    boundary polylines as CSV plus a JSON sidecar
    converge  remainder decay table as CSV
    verify    cross-method coefficient report

Exit codes: 0 ok, 1 verification failure, 2 parse error, 3 geometry error,
4 non-convergent quadrature. Diagnostics go to stderr; with --out given,
stdout stays silent.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

from .contours import Contour, QuadratureSettings, default_contour
from .errors import (
    DomainError,
    ExpressionSyntaxError,
    GeometryError,
    LemniscateError,
    QuadratureError,
)
from .functions import AnalyticFunction, Singularity, parse_function
from .laurent import (
    PoleProfile,
    eval_laurent,
    eval_taylor_laurent,
    expand_laurent_cauchy,
    expand_laurent_poles,
    expand_taylor_laurent_cauchy,
    expand_taylor_laurent_poles,
)
from .oracles import residue_coeffs_rational
from .points import PointSet
from .regions import (
    annulus_region,
    boundary_sample,
    lemniscate_region,
    taylor_laurent_region,
    write_boundary_csv,
)
from .taylor import coeff_cauchy, coeff_derivative, eval_expansion, expand_taylor


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _parse_complex(text: str) -> complex:
    cleaned = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(cleaned)
    except ValueError:
        raise CliError(f"cannot parse complex number {text!r}", 2)


def _parse_points(text: str) -> PointSet:
    pairs = []
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            raise CliError("empty focus entry", 2)
        if ":" in chunk:
            loc, _, mult = chunk.rpartition(":")
            try:
                m = int(mult)
            except ValueError:
                raise CliError(f"bad multiplicity in {chunk!r}", 2)
        else:
            loc, m = chunk, 1
        pairs.append((_parse_complex(loc), m))
    try:
        return PointSet.from_points(pairs)
    except ValueError as exc:
        raise CliError(str(exc), 2)


@dataclass
class RunConfig:
    function: str
    points: PointSet
    blocks: int = 6
    method: str = "derivative"
    mode: str = "taylor"
    split: Optional[int] = None
    delta: Optional[float] = None
    poles: list = field(default_factory=list)
    branch_points: list = field(default_factory=list)
    no_auto_singularities: bool = False
    tol: float = 1e-12
    out: Optional[str] = None
    resolution: int = 512
    clip: Optional[tuple] = None
    probes: list = field(default_factory=list)


def _build_function(cfg: RunConfig) -> AnalyticFunction:
    try:
        f = parse_function(cfg.function)
    except (ExpressionSyntaxError, DomainError) as exc:
        raise CliError(f"cannot parse function: {exc}", 2)
    overrides = [Singularity(loc, "pole", order) for loc, order in cfg.poles]
    overrides += [Singularity(loc, "branch-point") for loc in cfg.branch_points]
    if cfg.no_auto_singularities:
        f = f.with_singularities(overrides)
    elif overrides:
        kept = [
            s for s in f.singularities
            if all(abs(s.location - o.location) > 1e-9 * (1 + abs(o.location)) for o in overrides)
        ]
        f = f.with_singularities(tuple(kept) + tuple(overrides))
    return f


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(function=args.function, points=_parse_points(args.points))
    cfg.blocks = args.N
    cfg.method = getattr(args, "method", "derivative")
    cfg.mode = getattr(args, "mode", "taylor")
    cfg.split = getattr(args, "split", None)
    cfg.delta = getattr(args, "delta", None)
    cfg.tol = getattr(args, "tol", 1e-12)
    cfg.out = getattr(args, "out", None)
    cfg.resolution = getattr(args, "resolution", 512)
    cfg.no_auto_singularities = getattr(args, "no_auto_singularities", False)
    for text in getattr(args, "pole", None) or []:
        if ":" in text:
            loc, _, order = text.rpartition(":")
            cfg.poles.append((_parse_complex(loc), int(order)))
        else:
            cfg.poles.append((_parse_complex(text), 1))
    for text in getattr(args, "branch_point", None) or []:
        cfg.branch_points.append(_parse_complex(text))
    for text in getattr(args, "probe", None) or []:
        cfg.probes.append(_parse_complex(text))
    clip = getattr(args, "clip", None)
    if clip is not None:
        parts = [float(x) for x in clip.split(",")]
        if len(parts) != 4:
            raise CliError("--clip needs x0,x1,y0,y1", 2)
        cfg.clip = tuple(parts)
    if cfg.mode == "taylor-laurent" and cfg.split is None:
        raise CliError("taylor-laurent mode needs --split", 2)
    return cfg


def _cpair(z: complex):
    return [z.real, z.imag]


def _tensor_json(table):
    return [[[_cpair(v) for v in row] for row in block] for block in table]


def _finite_or_str(x):
    if x is None:
        return None
    return x if math.isfinite(x) else "inf"


def _region_info(cfg: RunConfig, f: AnalyticFunction):
    S = cfg.points
    if cfg.mode == "taylor":
        region = lemniscate_region(S, f.singularities)
        data = {"kind": "lemniscate", "r": _finite_or_str(region.r)}
    elif cfg.mode == "laurent":
        region = annulus_region(S, f.singularities, cfg.delta)
        data = {
            "kind": "annulus",
            "r1": _finite_or_str(region.r1),
            "r2": _finite_or_str(region.r2),
            "delta": region.delta,
        }
    else:
        region = taylor_laurent_region(S, cfg.split, f.singularities, cfg.delta)
        data = {
            "kind": "taylor-laurent",
            "r1": _finite_or_str(region.r1),
            "r2": _finite_or_str(region.r2),
            "delta": region.delta,
        }
    return region, data


def _max_tensor_diff(ta, tb) -> float:
    worst = 0.0
    for ba, bb in zip(ta, tb):
        for ra, rb in zip(ba, bb):
            for va, vb in zip(ra, rb):
                worst = max(worst, abs(va - vb))
    return worst


def _expansions(cfg: RunConfig, f: AnalyticFunction, method: str):
    S = cfg.points
    settings = QuadratureSettings(tol=cfg.tol)
    if cfg.mode == "taylor":
        return expand_taylor(f, S, cfg.blocks, method=method, settings=settings)
    if cfg.mode == "laurent":
        if method == "cauchy":
            gamma1, gamma2 = default_contour(S, f, "annulus-pair", delta=cfg.delta)
            return expand_laurent_cauchy(f, S, cfg.blocks, gamma1, gamma2, settings)
        return expand_laurent_poles(f, S, cfg.blocks, PoleProfile.infer(f, S))
    if method == "cauchy":
        gamma1, gamma2 = default_contour(S, f, "annulus-pair", delta=cfg.delta, split=cfg.split)
        return expand_taylor_laurent_cauchy(f, S, cfg.split, cfg.blocks, gamma1, gamma2, settings)
    return expand_taylor_laurent_poles(f, S, cfg.split, cfg.blocks, PoleProfile.infer(f, S))


def cmd_expand(args) -> int:
    cfg = _config_from_args(args)
    f = _build_function(cfg)
    methods = ["cauchy", "derivative"] if cfg.method == "both" else [cfg.method]
    results = {m: _expansions(cfg, f, m) for m in methods}
    primary = results.get("derivative") or results[methods[0]]
    _, region_data = _region_info(cfg, f)
    payload = {
        "mode": cfg.mode,
        "points": [[_cpair(z), m] for z, m in cfg.points],
        "N": cfg.blocks,
        "method": cfg.method,
        "tensors": {},
        "region": region_data,
    }
    payload["tensors"]["a"] = _tensor_json(primary.a)
    if cfg.mode == "laurent":
        payload["tensors"]["b"] = _tensor_json(primary.b)
    elif cfg.mode == "taylor-laurent":
        payload["tensors"]["b"] = _tensor_json(primary.b)
        payload["tensors"]["c"] = _tensor_json(primary.c)
        payload["split"] = cfg.split
    if len(results) == 2:
        diff = _max_tensor_diff(results["cauchy"].a, results["derivative"].a)
        if cfg.mode == "laurent":
            diff = max(diff, _max_tensor_diff(results["cauchy"].b, results["derivative"].b))
        elif cfg.mode == "taylor-laurent":
            diff = max(diff, _max_tensor_diff(results["cauchy"].b, results["derivative"].b))
            diff = max(diff, _max_tensor_diff(results["cauchy"].c, results["derivative"].c))
        payload["cross_check_max_abs_diff"] = diff
    text = json.dumps(payload, indent=2)
    if cfg.out:
        with open(cfg.out, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_region(args) -> int:
    cfg = _config_from_args(args)
    f = _build_function(cfg)
    region, region_data = _region_info(cfg, f)
    finite = [v for v in (region.r, region.r1, region.r2) if v is not None and math.isfinite(v) and v > 0]
    if not finite and cfg.clip is None:
        raise CliError("region is unbounded; pass --clip x0,x1,y0,y1", 3)
    polylines = [] if not finite else boundary_sample(region, cfg.resolution, cfg.clip)
    out = cfg.out or "region.csv"
    write_boundary_csv(polylines, out)
    sidecar = {
        "r": region_data.get("r"),
        "r1": region_data.get("r1"),
        "r2": region_data.get("r2"),
        "delta": region_data.get("delta"),
        "component_count": len(polylines),
    }
    sidecar_path = out.rsplit(".", 1)[0] + ".json"
    with open(sidecar_path, "w") as handle:
        json.dump(sidecar, handle, indent=2)
        handle.write("\n")
    if not cfg.out:
        print(json.dumps(sidecar, indent=2))
    return 0


def cmd_converge(args) -> int:
    import csv

    cfg = _config_from_args(args)
    f = _build_function(cfg)
    if not cfg.probes:
        raise CliError("converge needs at least one --probe", 2)
    region, _ = _region_info(cfg, f)
    S = cfg.points
    rows = []
    partials = []
    for N in range(1, cfg.blocks + 1):
        expansion = _expansions(
            RunConfig(**{**cfg.__dict__, "blocks": N}), f, cfg.method if cfg.method != "both" else "derivative"
        )
        partials.append(expansion)
    for z in cfg.probes:
        prod = float(S.abs_product(z))
        if region.kind == "lemniscate":
            ratio = 0.0 if prod == 0.0 else (prod / region.r if math.isfinite(region.r) else 0.0)
        elif region.kind == "annulus":
            outer = prod / region.r1 if math.isfinite(region.r1) else 0.0
            inner = region.r2 / prod if prod > 0 else math.inf
            ratio = max(outer, inner)
        else:
            Sq = S.restricted(range(region.split))
            Ss = S.restricted(range(region.split, S.p))
            outer = prod / region.r1 if math.isfinite(region.r1) else 0.0
            rq = float(Sq.abs_product(z)) / float(Ss.abs_product(z))
            ratio = max(outer, rq / region.r2)
        for N, expansion in enumerate(partials, start=1):
            if cfg.mode == "taylor":
                approx = eval_expansion(expansion, z)
            elif cfg.mode == "laurent":
                approx = eval_laurent(expansion, z)
            else:
                approx = eval_taylor_laurent(expansion, z)
            rows.append([z.real, z.imag, N, abs(f.eval(z) - approx), ratio])
    header = ["z_re", "z_im", "N", "abs_r_N", "predicted_ratio"]
    if cfg.out:
        with open(cfg.out, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            writer.writerows(rows)
    else:
        print(",".join(header))
        for row in rows:
            print(",".join(str(x) for x in row))
    return 0


def cmd_verify(args) -> int:
    battery_f = ["1/(3-z)", "1/((z-1)*(z+1)^2)", "(z^2+1)/(z-2)"]
    battery_s = ["1:1,-1:1", "0:2,1:1", "1:1,-1:1,i:1"]
    failures = 0
    for ftext in battery_f:
        f = parse_function(ftext)
        for stext in battery_s:
            S = _parse_points(stext)
            degenerate = any(
                any(abs(s.location - z) < 1e-9 * (1 + abs(z)) for s in f.singularities)
                for z in S.foci
            )
            if degenerate:
                ext = [
                    s.location for s in f.singularities
                    if all(abs(s.location - z) >= 1e-9 * (1 + abs(z)) for z in S.foci)
                ]
                c0 = S.centroid
                hi = min((abs(w - c0) for w in ext), default=math.inf)
                lo = max(abs(z - c0) for z in S.foci)
                radius = math.sqrt(lo * hi) if math.isfinite(hi) else lo + 1.0
                contour = Contour.circle(c0, radius)
            else:
                contour = default_contour(S, f, "enclose-all")
            worst = 0.0
            for n in range(0, 4):
                for j in range(S.p):
                    for l in range(S.mults[j]):
                        c = coeff_cauchy(f, S, n, j, l, contour)
                        d = coeff_derivative(f, S, n, j, l)
                        r = residue_coeffs_rational(f, S, n, j, l)
                        scale = 1.0 + max(abs(c), abs(d), abs(r))
                        worst = max(worst, abs(c - d) / scale, abs(c - r) / scale, abs(d - r) / scale)
            ok = worst < 1e-10
            failures += 0 if ok else 1
            tag = "PASS" if ok else "FAIL"
            print(f"{tag}  f={ftext}  S={stext}  max_rel_diff={worst:.3e}")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lemniscate")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--f", "--function", dest="function", required=True)
        p.add_argument("--points", required=True, help='foci as "z:mult,..." with i for the imaginary unit')
        p.add_argument("--N", type=int, default=6)
        p.add_argument("--mode", choices=["taylor", "laurent", "taylor-laurent"], default="taylor")
        p.add_argument("--method", choices=["cauchy", "derivative", "both"], default="derivative")
        p.add_argument("--split", type=int, default=None)
        p.add_argument("--delta", type=float, default=None)
        p.add_argument("--pole", action="append", help='extra pole "loc" or "loc:order"')
        p.add_argument("--branch-point", action="append", dest="branch_point")
        p.add_argument("--no-auto-singularities", action="store_true", dest="no_auto_singularities")
        p.add_argument("--tol", type=float, default=1e-12)
        p.add_argument("--out", default=None)

    p_expand = sub.add_parser("expand", help="write coefficient tensors as JSON")
    common(p_expand)
    p_expand.set_defaults(func=cmd_expand)

    p_region = sub.add_parser("region", help="write region boundary CSV and sidecar JSON")
    common(p_region)
    p_region.add_argument("--resolution", type=int, default=512)
    p_region.add_argument("--clip", default=None, help="x0,x1,y0,y1 sampling box")
    p_region.set_defaults(func=cmd_region)

    p_converge = sub.add_parser("converge", help="write remainder decay table as CSV")
    common(p_converge)
    p_converge.add_argument("--probe", action="append", help="probe point, repeatable")
    p_converge.set_defaults(func=cmd_converge)

    p_verify = sub.add_parser("verify", help="run the cross-method coefficient report")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ExpressionSyntaxError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return 3
    except QuadratureError as exc:
        print(f"quadrature error: {exc}", file=sys.stderr)
        return 4
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 3
    except LemniscateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
