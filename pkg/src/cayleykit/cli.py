"""Command-line front end.

Subcommands: ball, end-depth, dead-ends, delta, cpm, sci-fill, semistab,
fan, reduce, rough-equiv.  Machine-readable output (CSV and/or JSON,
optionally a rendered figure) plus a one-line human summary on stdout.
Every output embeds the run configuration and toolkit version.

Exit codes: 0 success (obstructions are definitive answers), 2 on
precondition or configuration errors, 3 when a budget was exhausted with
unknown outcomes (partial results are still written).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .cayley import (
    CayleyComplexBall,
    ball_to_json,
    ball_to_text,
    build_ball,
    GeodesicSegment,
)
from .errors import BudgetError, CayleyKitError, ParseError, PreconditionError
from .ends import dead_ends, end_depth_table, rough_equiv
from .filling import (
    SearchBudget,
    fill_outside,
    parse_loop_literal,
    sci_growth_table,
    semistability_probe,
)
from .growth import GrowthTable
from .hyperbolic import (
    build_fan,
    cp_table,
    estimate_delta,
    fan_to_dict,
    ray_constant,
    ray_through,
    verify_fan_filling,
)
from .presentation import parse_presentation
from .zoo import GroupModel, zoo_group

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3


def _load_model(args) -> GroupModel:
    if getattr(args, "file", None):
        text = Path(args.file).read_text()
        pres = parse_presentation(text)
        from .rewriting import knuth_bendix_complete
        from .zoo import RewritingSolver

        system = knuth_bendix_complete(pres)
        if not system.confluent:
            raise PreconditionError(
                f"presentation {pres.name!r} did not complete; no normal-form oracle"
            )
        model = GroupModel(
            name=pres.name, presentation=pres, solver=RewritingSolver(system)
        )
        return model
    return zoo_group(args.group)


def _outdir(args) -> Path:
    out = getattr(args, "out", None) or os.environ.get("CAYLEYKIT_OUTDIR", ".")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _config_dict(args) -> dict:
    skip = {"func"}
    return {
        k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None
    }


def _write_json(path: Path, payload: dict, args) -> None:
    payload = dict(payload)
    payload["config"] = _config_dict(args)
    payload["version"] = __version__
    path.write_text(json.dumps(payload, sort_keys=True, separators=(",", ":")) + "\n")


def _write_table(path: Path, table: GrowthTable, args) -> None:
    header = f"# cayleykit {__version__} config={json.dumps(_config_dict(args), sort_keys=True)}\n"
    path.write_text(header + table.to_csv())


def _maybe_figure(args, render) -> None:
    fig = getattr(args, "figure", None)
    if fig:
        render(str(fig))


# ---------------------------------------------------------------------------
# Subcommand handlers


def cmd_ball(args) -> int:
    model = _load_model(args)
    ball = build_ball(model, args.radius, max_vertices=args.max_vertices)
    out = _outdir(args)
    if args.format == "json":
        path = out / f"ball_{model.name.replace('(', '_').rstrip(')')}_{args.radius}.json"
        data = json.loads(ball_to_json(ball))
        _write_json(path, data, args)
    else:
        path = out / f"ball_{model.name.replace('(', '_').rstrip(')')}_{args.radius}.txt"
        path.write_text(ball_to_text(ball))
    _maybe_figure(args, lambda p: __import__("cayleykit.plots", fromlist=["plots"]).plot_sphere_growth(ball, p))
    print(f"ball {model.name} R={args.radius}: {ball.n} vertices -> {path}")
    return EXIT_OK


def cmd_end_depth(args) -> int:
    model = _load_model(args)
    table = end_depth_table(
        model, args.rmax, window_factor=args.window_factor, max_vertices=args.max_vertices
    )
    out = _outdir(args)
    stem = f"end_depth_{model.name.replace('(', '_').rstrip(')')}"
    _write_table(out / f"{stem}.csv", table, args)
    _write_json(out / f"{stem}.json", table.to_json_dict(), args)
    from .plots import plot_growth_table

    _maybe_figure(args, lambda p: plot_growth_table(table, p))
    vals = ", ".join(f"V0({s.r})={s.value}" for s in table.samples[1:])
    print(f"end-depth {model.name}: {vals} -> {out / (stem + '.csv')}")
    return EXIT_OK


def cmd_dead_ends(args) -> int:
    model = _load_model(args)
    ball = build_ball(model, args.radius, max_vertices=args.max_vertices)
    dead = dead_ends(ball)
    out = _outdir(args)
    stem = f"dead_ends_{model.name.replace('(', '_').rstrip(')')}_{args.radius}"
    fmt = model.alphabet.format_word
    payload = {
        "model": model.name,
        "radius": args.radius,
        "dead_ends": [
            {"vertex": v, "word": fmt(ball.words[v]), "dist": ball.dist[v], "depth": d}
            for v, d in dead
        ],
    }
    _write_json(out / f"{stem}.json", payload, args)
    from .plots import plot_dead_ends

    _maybe_figure(args, lambda p: plot_dead_ends(ball, dead, p))
    print(f"dead-ends {model.name} R={args.radius}: {len(dead)} found -> {out / (stem + '.json')}")
    return EXIT_OK


def cmd_delta(args) -> int:
    model = _load_model(args)
    ball = build_ball(model, args.radius, max_vertices=args.max_vertices)
    est = estimate_delta(ball, rho=args.rho, count=args.count, seed=args.seed)
    out = _outdir(args)
    stem = f"delta_{model.name.replace('(', '_').rstrip(')')}_{args.radius}"
    _write_json(
        out / f"{stem}.json",
        {"model": model.name, "radius": args.radius, "delta": est.value, "sample": est.sample, "triangles": est.triangles},
        args,
    )
    print(f"delta {model.name} R={args.radius}: delta={est.value} over {est.triangles} triangles ({est.sample})")
    return EXIT_OK


def cmd_cpm(args) -> int:
    model = _load_model(args)
    ball = build_ball(model, args.radius, max_vertices=args.max_vertices)
    report = cp_table(ball, M=args.M, c=args.c, R_prime=args.level)
    out = _outdir(args)
    stem = f"cpm_{model.name.replace('(', '_').rstrip(')')}_{args.level}"
    _write_json(
        out / f"{stem}.json",
        {
            "model": model.name,
            "radius": args.radius,
            "M": report.M,
            "c": report.c,
            "level": report.level,
            "L_hat": report.L_hat,
            "n_pairs": report.n_pairs,
            "n_failures": len(report.failures),
            "path_cap": report.path_cap,
            "pairs": [list(p) for p in report.pairs],
            "failures": [list(f) for f in report.failures],
        },
        args,
    )
    from .plots import plot_cp_report

    _maybe_figure(args, lambda p: plot_cp_report(report, p))
    print(
        f"cpm {model.name} level={args.level}: L={report.L_hat} over {len(report.pairs)} pairs,"
        f" {len(report.failures)} failures -> {out / (stem + '.json')}"
    )
    return EXIT_OK


def cmd_sci_fill(args) -> int:
    model = _load_model(args)
    budget = SearchBudget(max_states=args.budget)
    cx = CayleyComplexBall(build_ball(model, args.window, max_vertices=args.max_vertices))
    out = _outdir(args)
    if args.loop:
        loop = parse_loop_literal(cx.ball, args.loop)
        res = fill_outside(cx, loop, args.r, budget)
        stem = f"fill_{model.name.replace('(', '_').rstrip(')')}"
        payload = {
            "model": model.name,
            "r": args.r,
            "outcome": res.outcome,
            "obstruction": list(res.obstruction) if res.obstruction else None,
            "certificate": res.certificate,
        }
        _write_json(out / f"{stem}.json", payload, args)
        print(f"fill {model.name} r={args.r}: {res.outcome}"
              + (f" {res.obstruction}" if res.obstruction else ""))
        return EXIT_OK if res.outcome != "unknown" else EXIT_BUDGET
    table = sci_growth_table(
        model, args.r, window=args.window, seed=args.seed, budget=budget, cx=cx
    )
    stem = f"sci_{model.name.replace('(', '_').rstrip(')')}"
    _write_table(out / f"{stem}.csv", table, args)
    _write_json(out / f"{stem}.json", table.to_json_dict(), args)
    from .plots import plot_growth_table

    _maybe_figure(args, lambda p: plot_growth_table(table, p))
    parts = []
    unknown = False
    for s in table.samples:
        parts.append(f"r={s.r}: [{s.lo},{s.hi}]")
        if s.hi is None and str(s.r) not in table.meta.get("notes", {}):
            unknown = True
    print(f"sci-fill {model.name}: " + "; ".join(parts) + f" -> {out / (stem + '.csv')}")
    return EXIT_BUDGET if unknown else EXIT_OK


def cmd_semistab(args) -> int:
    model = _load_model(args)
    cx = CayleyComplexBall(build_ball(model, args.window, max_vertices=args.max_vertices))
    ball = cx.ball
    # canonical ray: through the least outer-sphere vertex reachable from generator 1
    ray = GeodesicSegment(ray_through(ball, 0, 0))
    budget = SearchBudget(max_states=args.budget)
    target = args.target if args.target is not None else args.window - 1
    if args.loop:
        loop = parse_loop_literal(ball, args.loop)
    else:
        # default probe: the first cell boundary based on the ray outside B(n)
        loop = None
        for cid, mind in enumerate(cx.cell_min_dist):
            cycle, clets = cx.cells[cid]
            if cycle[0] in ray.vertices and mind > args.n:
                from .filling import make_loop

                loop = make_loop(ball, cycle[0], clets)
                break
        if loop is None:
            raise PreconditionError("no ray-based probe cell found; pass --loop")
    probe = semistability_probe(cx, ray, loop, n=args.n, target_R=target, budget=budget)
    out = _outdir(args)
    stem = f"semistab_{model.name.replace('(', '_').rstrip(')')}"
    _write_json(
        out / f"{stem}.json",
        {
            "model": model.name,
            "n": args.n,
            "target_R": target,
            "success": probe.success,
            "achieved_R": probe.achieved_R,
            "moves": len(probe.certificate),
            "certificate": probe.certificate,
        },
        args,
    )
    print(
        f"semistab {model.name}: achieved R'={probe.achieved_R}"
        f" ({'success' if probe.success else 'stalled'}) -> {out / (stem + '.json')}"
    )
    return EXIT_OK if probe.success else EXIT_BUDGET


def cmd_fan(args) -> int:
    model = _load_model(args)
    cx = CayleyComplexBall(build_ball(model, args.radius, max_vertices=args.max_vertices))
    ball = cx.ball
    c = args.c if args.c is not None else ray_constant(ball, 2)
    delta = args.delta
    if delta is None:
        delta = estimate_delta(ball, count=300, seed=args.seed or 11).value
    M = args.M if args.M is not None else 6 * c + 2 * delta + 4
    L = args.L if args.L is not None else max(2 * c + 5, cp_table(ball, M, c, args.base_r).L_hat)
    p = min(ball.sphere_ids(args.base_r))
    ray0 = set(ray_through(ball, p, c))
    q = min(u for _, u in ball.neighbors(p) if u not in ray0)
    fan = build_fan(cx, p, q, N=args.N, M=M, c=c, L=L, delta=delta, n=args.n)
    report = verify_fan_filling(cx, fan, n=args.n, budget=SearchBudget(max_states=args.budget))
    out = _outdir(args)
    stem = f"fan_{model.name.replace('(', '_').rstrip(')')}_N{args.N}"
    payload = fan_to_dict(ball, fan)
    payload["verification"] = {
        "verdict": report.verdict,
        "n_cells": report.n_cells,
        "filled": report.filled,
        "unknown": report.unknown,
        "base_loop": report.base_loop,
        "cells": report.cells,
    }
    _write_json(out / f"{stem}.json", payload, args)
    print(
        f"fan {model.name} N={args.N}: {report.verdict}"
        f" ({report.filled}/{report.n_cells} cells filled) -> {out / (stem + '.json')}"
    )
    return EXIT_OK if report.all_filled else EXIT_BUDGET


def cmd_reduce(args) -> int:
    from .combiner import (
        HnnModel,
        bs12_hnn_model,
        britton_reduce,
        amalgam_pinch,
        load_combined_model,
        parse_amalgam_literal,
        parse_hnn_literal,
        trefoil_amalgam_model,
    )

    if args.file:
        m = load_combined_model(Path(args.file).read_text())
        out = _outdir(args)
        if isinstance(m, HnnModel):
            word = parse_hnn_literal(m, args.word)
            reduced = britton_reduce(m, word)
            fmt = m.group.alphabet.format_word
            payload = {
                "model": m.name,
                "input_t_weight": word.t_weight,
                "reduced_t_weight": reduced.t_weight,
                "reduced_word": fmt(reduced.to_word(m.stable_letter)),
                "trivial": reduced.to_word(m.stable_letter) == (),
            }
            summary = f"t-weight {word.t_weight} -> {reduced.t_weight}"
        else:
            word = parse_amalgam_literal(m, args.word)
            pinch = amalgam_pinch(m, word)
            payload = {
                "model": m.name,
                "syllable_length": word.length,
                "pinch_index": pinch,
            }
            summary = f"syllable length {word.length}, pinch at {pinch}"
        _write_json(out / f"reduce_{m.name}.json", payload, args)
        print(f"reduce {m.name}: {summary}")
        return EXIT_OK

    if args.model == "bs12":
        m = bs12_hnn_model()
        word = parse_hnn_literal(m, args.word)
        reduced = britton_reduce(m, word)
        fmt = m.group.alphabet.format_word
        payload = {
            "model": "bs12",
            "input_t_weight": word.t_weight,
            "reduced_t_weight": reduced.t_weight,
            "reduced_word": fmt(reduced.to_word(m.stable_letter)),
            "trivial": reduced.to_word(m.stable_letter) == (),
        }
        summary = f"t-weight {word.t_weight} -> {reduced.t_weight}, word: {payload['reduced_word'] or '1'}"
    elif args.model in ("trefoil", "trefoil_amalgam"):
        m = trefoil_amalgam_model()
        word = parse_amalgam_literal(m, args.word)
        pinch = amalgam_pinch(m, word)
        payload = {
            "model": "trefoil_amalgam",
            "syllable_length": word.length,
            "pinch_index": pinch,
        }
        summary = f"syllable length {word.length}, pinch at {pinch}"
    else:
        raise PreconditionError(f"unknown combined model {args.model!r}")
    out = _outdir(args)
    _write_json(out / f"reduce_{args.model}.json", payload, args)
    print(f"reduce {args.model}: {summary}")
    return EXIT_OK


def cmd_rough_equiv(args) -> int:
    f_table = GrowthTable.from_csv(Path(args.f).read_text(), kind=args.kind)
    g_table = GrowthTable.from_csv(Path(args.g).read_text(), kind=args.kind)
    witness = rough_equiv(f_table, g_table, grid_limit=args.grid)
    out = _outdir(args)
    payload = {
        "kind": args.kind,
        "witness": None
        if witness is None
        else {
            "c1": str(witness.c1),
            "c2": str(witness.c2),
            "c3": witness.c3,
            "C1": str(witness.C1),
            "C2": str(witness.C2),
            "C3": witness.C3,
            "verified_r": list(witness.verified_r),
        },
        "found": witness is not None,
    }
    _write_json(out / "rough_equiv.json", payload, args)
    if witness is None:
        print(f"rough-equiv: none within grid {args.grid}")
    else:
        w = witness
        print(
            f"rough-equiv: witness ({w.c1},{w.c2},{w.c3},{w.C1},{w.C2},{w.C3})"
            f" on r in {list(w.verified_r)}"
        )
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cayleykit",
        description="Word-metric balls of Cayley graphs and coarse invariants of finitely presented groups.",
    )
    parser.add_argument("--version", action="version", version=f"cayleykit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, group=True):
        if group:
            g = p.add_mutually_exclusive_group(required=True)
            g.add_argument("--group", help="zoo name, e.g. Zd:2, free:2, surface2, racg:pentagon, bs12, lamplighter, trefoil")
            g.add_argument("--file", help="presentation file")
        p.add_argument("--out", help="output directory (default $CAYLEYKIT_OUTDIR or .)")
        p.add_argument("--max-vertices", type=int, default=2_000_000)
        p.add_argument("--threads", type=int, default=1, help="worker parallelism cap (searches are serial and deterministic; values > 1 are accepted and capped)")

    p = sub.add_parser("ball", help="build a ball and export it")
    common(p)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--format", choices=["text", "json"], default="json")
    p.add_argument("--figure", help="write a sphere-growth figure (png)")
    p.set_defaults(func=cmd_ball)

    p = sub.add_parser("end-depth", help="V0 growth table")
    common(p)
    p.add_argument("--rmax", type=int, required=True)
    p.add_argument("--window-factor", type=str, default="2")
    p.add_argument("--figure")
    p.set_defaults(func=cmd_end_depth)

    p = sub.add_parser("dead-ends", help="dead ends with escape depths")
    common(p)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--figure")
    p.set_defaults(func=cmd_dead_ends)

    p = sub.add_parser("delta", help="slimness constant over triangles")
    common(p)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--rho", type=int, help="exhaustive up to this radius")
    p.add_argument("--count", type=int, help="sampled triangle count")
    p.add_argument("--seed", type=int, help="required for sampling")
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("cpm", help="complement-path table CP(M)")
    common(p)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("-M", type=int, required=True)
    p.add_argument("-c", type=int, required=True)
    p.add_argument("--level", type=int, required=True, help="sphere radius R'")
    p.add_argument("--figure")
    p.set_defaults(func=cmd_cpm)

    p = sub.add_parser("sci-fill", help="sci growth intervals or a single fill")
    common(p)
    p.add_argument("--r", type=int, required=True, help="inner radius (table up to this r)")
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=30_000)
    p.add_argument("--loop", help="loop literal: base=<nf>; word=<letters>")
    p.add_argument("--figure")
    p.set_defaults(func=cmd_sci_fill)

    p = sub.add_parser("semistab", help="semistability probe along the canonical ray")
    common(p)
    p.add_argument("--window", type=int, required=True)
    p.add_argument("-n", type=int, default=1)
    p.add_argument("--target", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=30_000)
    p.add_argument("--loop")
    p.set_defaults(func=cmd_semistab)

    p = sub.add_parser("fan", help="build and verify a ray fan")
    common(p)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--base-r", type=int, default=2)
    p.add_argument("-N", type=int, default=1)
    p.add_argument("-n", type=int, default=1)
    p.add_argument("-M", type=int)
    p.add_argument("-c", type=int)
    p.add_argument("-L", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", type=int, default=8_000)
    p.set_defaults(func=cmd_fan)

    p = sub.add_parser("reduce", help="Britton/amalgam normal form reduction")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--model", help="bs12 or trefoil")
    g.add_argument("--file", help="amalgam/HNN model file")
    p.add_argument("--word", required=True, help="syllable literal: g0 | t^2 | g1 | ...")
    p.add_argument("--out")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("rough-equiv", help="rough-equivalence witness for two tables")
    p.add_argument("--f", required=True, help="first growth table CSV")
    p.add_argument("--g", required=True, help="second growth table CSV")
    p.add_argument("--kind", default="end_depth")
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_rough_equiv)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ParseError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CayleyKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
