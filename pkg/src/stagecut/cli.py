"""Command-line entry point tying the pipeline together.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .analytics import (compare, cut_stats, generate_synthetic_project)
from .baselines import STRATEGIES, run_strategy
from .geometry import GeometryError, SceneError
from .optimizer import InfeasibleEditError
from .project import (ProjectError, cost_params_from_config, dump_potentials,
                      dump_rushes, emit_render_script_from_doc, export_edl,
                      load_edl, load_project, merge_config, parse_config_value,
                      prepare_scene, stats_from_export, write_project)
from .rushes import SubsetLimitError
from .service import serve

USAGE_EXIT = 1
DATA_EXIT = 2

DATA_ERRORS = (ProjectError, SubsetLimitError, InfeasibleEditError,
               GeometryError, SceneError, ValueError, OSError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):   # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def _parse_overrides(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        key, sep, raw = pair.partition("=")
        if not sep or not key:
            raise _UsageError(f"--set expects key=value, got {pair!r}")
        try:
            out[key] = parse_config_value(key, raw)
        except (ProjectError, ValueError) as e:
            raise _UsageError(str(e)) from e
    return out


def _parse_whitelist(spec: str | None):
    if spec is None:
        return None
    out = set()
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            out.add(frozenset(int(v) for v in token.split("+")))
        except ValueError as e:
            raise _UsageError(f"bad whitelist token {token!r}: {e}") from e
    if not out:
        raise _UsageError("empty subset whitelist")
    return out


class _UsageError(Exception):
    pass


def build_parser() -> _Parser:
    p = _Parser(prog="stagecut",
                description="Edit a static wide-angle stage recording from actor "
                            "tracks and viewer gaze.")
    p.add_argument("--version", action="version", version=f"stagecut {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_scene_flags(sp):
        sp.add_argument("manifest", help="project manifest (JSON)")
        sp.add_argument("--subset-whitelist", metavar="SPEC", default=None,
                        help="keep only these actor-id subsets, e.g. '0,1,0+1' "
                             "(master is always kept)")
        sp.add_argument("--set", metavar="KEY=VALUE", action="append", default=[],
                        help="override a config parameter")

    sp = sub.add_parser("demo", help="write a synthetic demo project")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--actors", type=int, default=3)
    sp.add_argument("--secs", type=float, default=60.0)
    sp.add_argument("--fps", type=float, default=24.0)
    sp.add_argument("--users", type=int, default=3)
    sp.add_argument("--lock-attention", type=int, default=None,
                    help="pin every attention epoch to this actor index")
    sp.add_argument("-o", "--out", required=True, help="output directory")

    sp = sub.add_parser("rushes", help="generate rushes and dump their trajectories")
    add_scene_flags(sp)
    sp.add_argument("-o", "--out", required=True)

    sp = sub.add_parser("potentials", help="dump the gaze-potential table")
    add_scene_flags(sp)
    sp.add_argument("-o", "--out", required=True)

    sp = sub.add_parser("edit", help="compute an edit decision list")
    add_scene_flags(sp)
    sp.add_argument("--strategy", choices=STRATEGIES, default="gazed")
    sp.add_argument("--seed", type=int, default=0, help="seed for the random strategy")
    sp.add_argument("--format", choices=("structured", "delimited"), default="structured")
    sp.add_argument("-o", "--out", required=True)
    sp.add_argument("--stats-out", default=None, help="also write stats as JSON")

    sp = sub.add_parser("analyze", help="describe one EDL or compare two")
    sp.add_argument("edl")
    sp.add_argument("edl2", nargs="?", default=None)

    sp = sub.add_parser("render-script", help="emit per-frame crop list + template")
    sp.add_argument("edl", help="structured EDL file")
    sp.add_argument("-o", "--out", required=True, help="output directory")
    sp.add_argument("--width", type=int, default=None)
    sp.add_argument("--height", type=int, default=None)

    sp = sub.add_parser("serve", help="serve the interactive editing API")
    add_scene_flags(sp)
    sp.add_argument("--bind", default="127.0.0.1:8765")
    sp.add_argument("--assets", default=None, help="UI bundle directory")
    sp.add_argument("--frames", default=None, help="directory of extracted frame images")

    return p


def _load_prepared(args):
    overrides = _parse_overrides(args.set)
    project = load_project(args.manifest, overrides)
    whitelist = _parse_whitelist(args.subset_whitelist)
    rushes, table = prepare_scene(project, whitelist)
    params = cost_params_from_config(project.config, project.dims.fps)
    return project, rushes, table, params


def _print_stats(name: str, stats) -> None:
    print(f"== {name}")
    print(f"  segments:        {stats.cut_count + 1}")
    print(f"  cuts:            {stats.cut_count}")
    print(f"  shot length (s): mean {stats.mean_shot_secs:.2f}  "
          f"min {stats.min_shot_secs:.2f}  max {stats.max_shot_secs:.2f}")
    if stats.shot_size_hist:
        hist = "  ".join(f"{k}:{v}" for k, v in sorted(stats.shot_size_hist.items()))
        print(f"  shot sizes:      {hist}")
    print(f"  jump cuts:       {stats.jump_cut_count}")
    if stats.cost:
        total = stats.cost.get("total")
        if total is not None:
            print(f"  objective:       {total:.6f}")
    if stats.short_segments:
        print(f"  short segments:  {stats.short_segments}")


def _cmd_demo(args) -> int:
    synth = generate_synthetic_project(args.seed, args.actors, args.secs,
                                       fps=args.fps, users=args.users,
                                       lock_attention=args.lock_attention)
    manifest = write_project(synth, args.out)
    print(manifest)
    return 0


def _cmd_rushes(args) -> int:
    project, rushes, table, params = _load_prepared(args)
    path = dump_rushes(rushes, args.out)
    print(path)
    return 0


def _cmd_potentials(args) -> int:
    project, rushes, table, params = _load_prepared(args)
    path = dump_potentials(table, rushes, args.out)
    print(path)
    return 0


def _cmd_edit(args) -> int:
    project, rushes, table, params = _load_prepared(args)
    edl = run_strategy(args.strategy, table, rushes, params,
                       seed=args.seed, speakers=project.speakers)
    stats = cut_stats(edl, project.dims.fps, params, rushes, table)
    export_edl(edl, stats, args.out, args.format,
               rushes=rushes, dims=project.dims, config=project.config)
    if args.stats_out:
        Path(args.stats_out).write_text(
            json.dumps(stats.as_dict(), indent=2) + "\n", encoding="utf-8")
    _print_stats(f"{args.strategy} -> {args.out}", stats)
    return 0


def _cmd_analyze(args) -> int:
    edl_a, doc_a = load_edl(args.edl)
    cfg = doc_a.get("config")
    scene = doc_a.get("scene")
    fps = scene["fps"] if scene else 24.0
    params = cost_params_from_config(merge_config(cfg) if cfg else merge_config(), fps)
    stats = stats_from_export(doc_a, params)
    _print_stats(args.edl, stats)
    if args.edl2:
        edl_b, _ = load_edl(args.edl2)
        agreement = compare(edl_a, edl_b)
        print(f"agreement: {agreement}")
    return 0


def _cmd_render_script(args) -> int:
    _, doc = load_edl(args.edl)
    out_dims = None
    if (args.width is None) != (args.height is None):
        raise _UsageError("--width and --height must be given together")
    if args.width is not None:
        out_dims = (args.width, args.height)
    crops, template = emit_render_script_from_doc(doc, args.out, out_dims)
    print(crops)
    print(template)
    return 0


def _cmd_serve(args) -> int:
    project, rushes, table, params = _load_prepared(args)
    serve(project, rushes, table, bind=args.bind,
          assets_dir=args.assets, frames_dir=args.frames)
    return 0


_COMMANDS = {
    "demo": _cmd_demo,
    "rushes": _cmd_rushes,
    "potentials": _cmd_potentials,
    "edit": _cmd_edit,
    "analyze": _cmd_analyze,
    "render-script": _cmd_render_script,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as e:
        print(f"stagecut: error: {e}", file=sys.stderr)
        return USAGE_EXIT
    except DATA_ERRORS as e:
        print(f"stagecut: {e}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
