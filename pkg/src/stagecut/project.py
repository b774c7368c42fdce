"""File formats: project ingestion, flat configuration, EDL export and
reload, render-script emission, and diagnostic dumps.

All delimited files are UTF-8 CSV with a header row; structured files are
JSON with a fixed field order so that identical inputs produce identical
bytes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from . import __version__ as ENGINE_VERSION
from .analytics import EditStats, SyntheticProject
from .baselines import SpeakerInterval
from .geometry import (ActorTrack, BBox, FilledTrack, Point, SceneDims,
                       ValidationReport, fill_track_gaps, iou,
                       map_gaze_to_master, validate_scene)
from .optimizer import CostParams, EditDecisionList, Segment
from .potentials import PotentialConfig, build_potential_table
from .rushes import FramingConfig, Rush, generate_rushes


class ProjectError(ValueError):
    """Unreadable or inconsistent project data; message carries file:line context."""


# flat configuration: every engine parameter with its default, in canonical order
CONFIG_DEFAULTS: dict[str, object] = {
    "lambda": 5.0,
    "alpha": 0.2,
    "beta": 0.4,
    "mu": 1.0,
    "nu": 1000.0,
    "gamma1": 100.0,
    "gamma2": 10.0,
    "l": 1.5,
    "m": 7.0,
    "establish_secs": 4.0,
    "age_cap_secs": None,       # resolves to 2 * m
    "g_floor": 1e-6,
    "ms_height_frac": 0.55,
    "mcu_height_frac": 0.40,
    "headroom_frac": 0.10,
    "fs_padding_frac": 0.05,
    "smooth_w1": 10.0,
    "smooth_w2": 400.0,
    "single_scale": "MS",
    "max_actors": 8,
    "eps_d": 1.0,
    "smoothing_window": 0.5,
    "empty_frame_policy": "carry_forward",
    "master_tiebreak": "tighter",
}

_STR_KEYS = {"single_scale", "empty_frame_policy", "master_tiebreak"}
_INT_KEYS = {"max_actors"}


def merge_config(*layers: dict | None) -> dict:
    """Defaults overlaid with file config and per-run overrides, in that order."""
    out = dict(CONFIG_DEFAULTS)
    for layer in layers:
        if not layer:
            continue
        for k, v in layer.items():
            if k not in CONFIG_DEFAULTS:
                raise ProjectError(f"unknown config key {k!r}")
            out[k] = v
    return out


def parse_config_value(key: str, raw: str):
    if key not in CONFIG_DEFAULTS:
        raise ProjectError(f"unknown config key {key!r}")
    if key in _STR_KEYS:
        return raw
    if key in _INT_KEYS:
        return int(raw)
    return float(raw)


def cost_params_from_config(cfg: dict, fps: float) -> CostParams:
    p = CostParams(
        lam=float(cfg["lambda"]), alpha=float(cfg["alpha"]), beta=float(cfg["beta"]),
        mu=float(cfg["mu"]), nu=float(cfg["nu"]),
        gamma1=float(cfg["gamma1"]), gamma2=float(cfg["gamma2"]),
        l=float(cfg["l"]), m=float(cfg["m"]), fps=fps,
        establish_secs=float(cfg["establish_secs"]),
        age_cap_secs=None if cfg["age_cap_secs"] is None else float(cfg["age_cap_secs"]),
        g_floor=float(cfg["g_floor"]),
    )
    p.validate()
    return p


def framing_from_config(cfg: dict) -> FramingConfig:
    f = FramingConfig(
        ms_height_frac=float(cfg["ms_height_frac"]),
        mcu_height_frac=float(cfg["mcu_height_frac"]),
        headroom_frac=float(cfg["headroom_frac"]),
        fs_padding_frac=float(cfg["fs_padding_frac"]),
        smooth_w1=float(cfg["smooth_w1"]),
        smooth_w2=float(cfg["smooth_w2"]),
        single_scale=str(cfg["single_scale"]),
        max_actors=int(cfg["max_actors"]),
    )
    f.validate()
    return f


def potential_from_config(cfg: dict) -> PotentialConfig:
    p = PotentialConfig(
        eps_d=float(cfg["eps_d"]),
        smoothing_window=float(cfg["smoothing_window"]),
        empty_frame_policy=str(cfg["empty_frame_policy"]),
        master_tiebreak=str(cfg["master_tiebreak"]),
    )
    p.validate()
    return p


def resolved_config(cfg: dict, fps: float) -> dict:
    """The flat config as actually applied, for echoing into every output."""
    params = cost_params_from_config(cfg, fps)
    out = {}
    for k in CONFIG_DEFAULTS:
        out[k] = params.age_cap if k == "age_cap_secs" else cfg[k]
    return out


@dataclass
class Project:
    """A fully loaded scene, immutable for the lifetime of a run."""

    dims: SceneDims
    display: tuple[float, float]
    tracks: list[ActorTrack]
    filled: list[FilledTrack]
    gaze_by_frame: list[list[Point]]
    speakers: list[SpeakerInterval] | None
    config: dict
    report: ValidationReport
    clamped_gaze: int
    gaze_samples_per_frame_user: float

    @property
    def n_actors(self) -> int:
        return len(self.tracks)


def _read_rows(path: Path, expected_header: list[str]) -> list[tuple[int, list[str]]]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ProjectError(f"{path}: {e}") from e
    rows: list[tuple[int, list[str]]] = []
    reader = csv.reader(text.splitlines())
    for lineno, row in enumerate(reader, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if lineno == 1:
            if [c.strip() for c in row] != expected_header:
                raise ProjectError(
                    f"{path.name}:1: expected header {','.join(expected_header)}")
            continue
        rows.append((lineno, [c.strip() for c in row]))
    return rows


def _load_tracks(path: Path, dims: SceneDims, report: ValidationReport) -> list[ActorTrack]:
    rows = _read_rows(path, ["frame", "actor_id", "x1", "y1", "x2", "y2"])
    per_actor: dict[int, dict[int, BBox]] = {}
    for lineno, row in rows:
        if len(row) != 6:
            raise ProjectError(f"{path.name}:{lineno}: expected 6 fields, got {len(row)}")
        try:
            frame = int(row[0])
            actor = int(row[1])
            x1, y1, x2, y2 = (float(v) for v in row[2:])
        except ValueError as e:
            raise ProjectError(f"{path.name}:{lineno}: {e}") from e
        if not (0 <= frame < dims.frame_count):
            report.warn("track-frame-out-of-range",
                        f"{path.name}:{lineno}: frame {frame} outside [0,{dims.frame_count})")
            continue
        cx1, cy1 = max(x1, 0.0), max(y1, 0.0)
        cx2, cy2 = min(x2, dims.width), min(y2, dims.height)
        if (cx1, cy1, cx2, cy2) != (x1, y1, x2, y2):
            report.warn("box-out-of-bounds",
                        f"{path.name}:{lineno}: box clamped to the master frame")
        if cx1 >= cx2 or cy1 >= cy2:
            report.warn("box-degenerate",
                        f"{path.name}:{lineno}: box empty after clamping, treated as a gap")
            continue
        per_actor.setdefault(actor, {})[frame] = BBox(cx1, cy1, cx2, cy2)

    tracks = []
    for idx, actor_id in enumerate(sorted(per_actor)):
        label = chr(ord("A") + idx) if idx < 26 else f"X{idx}"
        boxes = tuple(per_actor[actor_id].get(t) for t in range(dims.frame_count))
        tracks.append(ActorTrack(actor_id, label, boxes))
    return tracks


def _load_gaze(paths: list[Path], dims: SceneDims, display: tuple[float, float],
               report: ValidationReport) -> tuple[list[list[Point]], int, float]:
    """Map display-space samples to master pixels and aggregate one point per
    user per frame (nearest-frame assignment, then mean)."""
    sums: dict[tuple[int, int, int], tuple[float, float, int]] = {}
    clamped = 0
    assigned = 0
    user_keys: set[tuple[int, int]] = set()
    for file_idx, path in enumerate(paths):
        file_clamped = 0
        rows = _read_rows(path, ["time_ms", "user_id", "x", "y"])
        for lineno, row in rows:
            if len(row) != 4:
                raise ProjectError(f"{path.name}:{lineno}: expected 4 fields, got {len(row)}")
            try:
                time_ms = float(row[0])
                user = int(row[1])
                x, y = float(row[2]), float(row[3])
            except ValueError as e:
                raise ProjectError(f"{path.name}:{lineno}: {e}") from e
            frame = int(round(time_ms / 1000.0 * dims.fps))
            duration_ms = dims.frame_count / dims.fps * 1000.0
            if 0.0 <= time_ms <= duration_ms:
                frame = min(max(frame, 0), dims.frame_count - 1)
            elif not (0 <= frame < dims.frame_count):
                report.warn("gaze-time-out-of-range",
                            f"{path.name}:{lineno}: sample at {time_ms}ms has no frame")
                continue
            (px, py), was_clamped = map_gaze_to_master((x, y), display, dims.size)
            if was_clamped:
                file_clamped += 1
            key = (frame, file_idx, user)
            sx, sy, n = sums.get(key, (0.0, 0.0, 0))
            sums[key] = (sx + px, sy + py, n + 1)
            user_keys.add((file_idx, user))
            assigned += 1
        if file_clamped:
            report.warn("gaze-clamped", f"{path.name}: {file_clamped} samples clamped to master bounds")
        clamped += file_clamped

    by_frame: list[list[Point]] = [[] for _ in range(dims.frame_count)]
    for (frame, file_idx, user) in sorted(sums):
        sx, sy, n = sums[(frame, file_idx, user)]
        by_frame[frame].append((sx / n, sy / n))
    denominator = dims.frame_count * max(len(user_keys), 1)
    return by_frame, clamped, assigned / denominator


def _load_speakers(path: Path, dims: SceneDims, actor_ids: set[int]) -> list[SpeakerInterval]:
    rows = _read_rows(path, ["start_frame", "end_frame", "ids"])
    intervals: list[SpeakerInterval] = []
    for lineno, row in rows:
        if len(row) != 3:
            raise ProjectError(f"{path.name}:{lineno}: expected 3 fields, got {len(row)}")
        try:
            start, end = int(row[0]), int(row[1])
            ids = frozenset(int(tok) for tok in row[2].split("+") if tok != "")
        except ValueError as e:
            raise ProjectError(f"{path.name}:{lineno}: {e}") from e
        unknown = ids - actor_ids
        if unknown:
            raise ProjectError(f"{path.name}:{lineno}: unknown speaker ids {sorted(unknown)}")
        try:
            intervals.append(SpeakerInterval(start, min(end, dims.frame_count), ids))
        except ValueError as e:
            raise ProjectError(f"{path.name}:{lineno}: {e}") from e

    intervals.sort(key=lambda iv: iv.start_frame)
    for a, b in zip(intervals, intervals[1:]):
        if b.start_frame < a.end_frame:
            raise ProjectError(f"{path.name}: intervals overlap at frame {b.start_frame}")
    # normalize to full coverage: uncovered ranges are silence
    covered: list[SpeakerInterval] = []
    pos = 0
    for iv in intervals:
        if iv.start_frame > pos:
            covered.append(SpeakerInterval(pos, iv.start_frame, frozenset()))
        covered.append(iv)
        pos = iv.end_frame
    if pos < dims.frame_count:
        covered.append(SpeakerInterval(pos, dims.frame_count, frozenset()))
    return covered


def load_project(manifest_path: str | Path, overrides: dict | None = None) -> Project:
    """Load a manifest plus every file it references, validate, and fill gaps."""
    mpath = Path(manifest_path)
    try:
        manifest = json.loads(mpath.read_text(encoding="utf-8"))
    except OSError as e:
        raise ProjectError(f"{mpath}: {e}") from e
    except json.JSONDecodeError as e:
        raise ProjectError(f"{mpath}:{e.lineno}: {e.msg}") from e
    base = mpath.parent

    try:
        scene = manifest["scene"]
        dims = SceneDims(float(scene["width"]), float(scene["height"]),
                         float(scene["fps"]), int(scene["frames"]))
    except KeyError as e:
        raise ProjectError(f"{mpath.name}: manifest missing scene key {e}") from e
    disp = manifest.get("display", {"width": dims.width, "height": dims.height})
    display = (float(disp["width"]), float(disp["height"]))
    if display[0] <= 0 or display[1] <= 0:
        raise ProjectError(f"{mpath.name}: display dims must be positive")

    file_cfg: dict = {}
    cfg_ref = manifest.get("config")
    if isinstance(cfg_ref, str):
        cfg_path = base / cfg_ref
        try:
            file_cfg = json.loads(cfg_path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ProjectError(f"{cfg_path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ProjectError(f"{cfg_path}:{e.lineno}: {e.msg}") from e
    elif isinstance(cfg_ref, dict):
        file_cfg = cfg_ref
    config = merge_config(file_cfg, overrides)

    report = ValidationReport()
    if "tracks" not in manifest:
        raise ProjectError(f"{mpath.name}: manifest missing 'tracks'")
    tracks = _load_tracks(base / manifest["tracks"], dims, report)

    gaze_ref = manifest.get("gaze", [])
    gaze_paths = [base / p for p in ([gaze_ref] if isinstance(gaze_ref, str) else gaze_ref)]
    gaze_by_frame, clamped, per_frame_user = _load_gaze(gaze_paths, dims, display, report)

    # structural validation on raw tracks (gaps reported before filling)
    from .geometry import GazeSample
    flat_gaze = [GazeSample(0, t, p) for t, pts in enumerate(gaze_by_frame) for p in pts]
    scene_report = validate_scene(tracks, flat_gaze, dims)
    report.issues.extend(scene_report.issues)
    if report.fatal_issues:
        msgs = "; ".join(i.message for i in report.fatal_issues)
        raise ProjectError(f"{mpath.name}: fatal validation issues: {msgs}")

    filled = [fill_track_gaps(tr, dims, report) for tr in tracks]

    speakers = None
    if manifest.get("speakers"):
        speakers = _load_speakers(base / manifest["speakers"], dims,
                                  {tr.actor_id for tr in tracks})

    return Project(dims, display, tracks, filled, gaze_by_frame, speakers,
                   config, report, clamped, per_frame_user)


def prepare_scene(project: Project, whitelist: set[frozenset[int]] | None = None):
    """Generate the rush set and its gaze-potential table for a loaded project."""
    rushes = generate_rushes(project.filled, project.dims,
                             framing_from_config(project.config), whitelist)
    table = build_potential_table(rushes, project.gaze_by_frame, project.dims,
                                  potential_from_config(project.config))
    return rushes, table


# ---------------------------------------------------------------------------
# writers

def _dump_json(doc: dict, path: Path) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def write_project(synth: SyntheticProject, outdir: str | Path) -> Path:
    """Write a synthetic scene as a loadable project directory."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    dims = synth.dims

    with (out / "tracks.csv").open("w", encoding="utf-8", newline="") as f:
        f.write("frame,actor_id,x1,y1,x2,y2\n")
        for tr in synth.tracks:
            for t, b in enumerate(tr.boxes):
                if b is not None:
                    f.write(f"{t},{tr.actor_id},{float(b.x1)!r},{float(b.y1)!r},"
                            f"{float(b.x2)!r},{float(b.y2)!r}\n")

    with (out / "gaze.csv").open("w", encoding="utf-8", newline="") as f:
        f.write("time_ms,user_id,x,y\n")
        for time_ms, user, x, y in synth.gaze_rows:
            f.write(f"{float(time_ms)!r},{int(user)},{float(x)!r},{float(y)!r}\n")

    with (out / "speakers.csv").open("w", encoding="utf-8", newline="") as f:
        f.write("start_frame,end_frame,ids\n")
        for iv in synth.speakers:
            ids = "+".join(str(i) for i in sorted(iv.speakers))
            f.write(f"{iv.start_frame},{iv.end_frame},{ids}\n")

    # age_cap_secs stays null here so it keeps tracking 2*m under overrides;
    # outputs echo the resolved numeric value
    _dump_json(merge_config(), out / "config.json")
    _dump_json({
        "scene": {"width": dims.width, "height": dims.height,
                  "fps": dims.fps, "frames": dims.frame_count},
        "display": {"width": synth.display[0], "height": synth.display[1]},
        "tracks": "tracks.csv",
        "gaze": ["gaze.csv"],
        "speakers": "speakers.csv",
        "config": "config.json",
    }, out / "manifest.json")
    return out / "manifest.json"


def _segment_doc(seg: Segment, rushes: list[Rush]) -> dict:
    rush = rushes[seg.rush_id]
    windows = []
    for t in range(seg.start_frame, seg.end_frame):
        win = rush.windows[t]
        windows.append(None if win is None else
                       [win.cx - win.w / 2, win.cy - win.h / 2, win.w, win.h])
    return {
        "start_frame": seg.start_frame,
        "end_frame": seg.end_frame,
        "rush_id": seg.rush_id,
        "subset": list(rush.actor_ids),
        "scale": rush.scale,
        "windows": windows,
    }


def export_edl(edl: EditDecisionList, stats: EditStats | None, path: str | Path,
               fmt: str = "structured", *, rushes: list[Rush], dims: SceneDims,
               config: dict) -> Path:
    """Write an EDL. The structured form carries everything needed to
    re-analyze and re-render; the delimited form is a plain segment table."""
    path = Path(path)
    if fmt == "delimited":
        with path.open("w", encoding="utf-8", newline="") as f:
            f.write("start_frame,end_frame,rush_id,subset,scale\n")
            for seg in edl.segments:
                rush = rushes[seg.rush_id]
                subset = "+".join(str(i) for i in rush.actor_ids)
                f.write(f"{seg.start_frame},{seg.end_frame},{seg.rush_id},{subset},{rush.scale}\n")
        return path
    if fmt != "structured":
        raise ValueError(f"unknown EDL format {fmt!r}")

    doc = {
        "format": "stagecut-edl",
        "engine_version": ENGINE_VERSION,
        "strategy": edl.strategy,
        "scene": {"width": dims.width, "height": dims.height,
                  "fps": dims.fps, "frames": dims.frame_count},
        "config": resolved_config(config, dims.fps),
        "total_cost": edl.total_cost,
        "cost_breakdown": edl.breakdown,
        "segments": [_segment_doc(seg, rushes) for seg in edl.segments],
        "stats": stats.as_dict() if stats is not None else None,
    }
    _dump_json(doc, path)
    return path


def load_edl(path: str | Path) -> tuple[EditDecisionList, dict]:
    """Reload an exported EDL; returns the list plus the raw document
    (empty for the delimited form beyond the segment table)."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        segs = tuple(Segment(s["start_frame"], s["end_frame"], s["rush_id"])
                     for s in doc["segments"])
        edl = EditDecisionList(segs, doc.get("total_cost"),
                               dict(doc.get("cost_breakdown") or {}),
                               doc.get("strategy", ""))
        return edl, doc
    rows = _read_rows(path, ["start_frame", "end_frame", "rush_id", "subset", "scale"])
    segs = []
    meta = []
    for lineno, row in rows:
        if len(row) != 5:
            raise ProjectError(f"{path.name}:{lineno}: expected 5 fields, got {len(row)}")
        segs.append(Segment(int(row[0]), int(row[1]), int(row[2])))
        meta.append({"start_frame": int(row[0]), "end_frame": int(row[1]),
                     "rush_id": int(row[2]),
                     "subset": [int(v) for v in row[3].split("+") if v],
                     "scale": row[4], "windows": None})
    return EditDecisionList(tuple(segs)), {"segments": meta}


def _even(v: float) -> int:
    return int(round(v / 2.0)) * 2


def emit_render_script(edl: EditDecisionList, rushes: list[Rush], dims: SceneDims,
                       outdir: str | Path,
                       out_dims: tuple[int, int] | None = None) -> tuple[Path, Path]:
    """Emit the per-frame crop list and a documented command template for an
    external cropper. Crop rectangles are even-integer pixels at the master
    aspect ratio (aspect preserved before rounding)."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    W, H = int(dims.width), int(dims.height)
    ow, oh = out_dims if out_dims is not None else (W, H)

    crops = out / "crops.csv"
    with crops.open("w", encoding="utf-8", newline="") as f:
        f.write("frame,x,y,w,h\n")
        for seg in edl.segments:
            rush = rushes[seg.rush_id]
            for t in range(seg.start_frame, seg.end_frame):
                win = rush.windows[t]
                if win is None:
                    raise ValueError(f"rush {seg.rush_id} has no window at frame {t}")
                w = min(_even(win.w), W)
                h = min(_even(win.h), H)
                x = min(max(_even(win.cx - win.w / 2), 0), W - w)
                y = min(max(_even(win.cy - win.h / 2), 0), H - h)
                f.write(f"{t},{x},{y},{w},{h}\n")

    template = out / "render_template.txt"
    template.write_text(f"""# How to render this edit with an external cropper
#
# crops.csv lists one crop rectangle per frame:
#     frame,x,y,w,h        (master-frame pixels, even integers)
# The master recording is {W}x{H} at {dims.fps} fps, {dims.frame_count} frames.
# Target output size: {ow}x{oh}.
#
# Any tool that applies a per-frame crop works. A common recipe with ffmpeg:
#
# 1. Convert crops.csv into a sendcmd script (one command per frame, time =
#    frame / {dims.fps}):
#        <time> crop w <w>, crop h <h>, crop x <x>, crop y <y>;
#
# 2. Drive the crop filter with it and scale to the output size:
#        ffmpeg -i MASTER -vf "sendcmd=f=crops.cmd,crop,scale={ow}:{oh}" edited.mp4
#
# Every rectangle keeps the master aspect ratio, so the scale step never
# distorts the image.
""", encoding="utf-8")
    return crops, template


def emit_render_script_from_doc(doc: dict, outdir: str | Path,
                                out_dims: tuple[int, int] | None = None) -> tuple[Path, Path]:
    """Render-script emission from a reloaded structured EDL document."""
    scene = doc.get("scene")
    if not scene:
        raise ProjectError("EDL document has no scene block; re-export in structured form")
    dims = SceneDims(scene["width"], scene["height"], scene["fps"], scene["frames"])

    class _Win:
        __slots__ = ("cx", "cy", "w", "h")

        def __init__(self, rect):
            x, y, self.w, self.h = rect
            self.cx = x + self.w / 2
            self.cy = y + self.h / 2

    class _RushShim:
        def __init__(self, T):
            self.windows = [None] * T

    shims: dict[int, _RushShim] = {}
    segments = []
    for s in doc["segments"]:
        if s.get("windows") is None:
            raise ProjectError("EDL document has no per-frame windows; "
                               "re-export in structured form")
        shim = shims.setdefault(s["rush_id"], _RushShim(dims.frame_count))
        for i, rect in enumerate(s["windows"]):
            if rect is not None:
                shim.windows[s["start_frame"] + i] = _Win(rect)
        segments.append(Segment(s["start_frame"], s["end_frame"], s["rush_id"]))

    rushes = [shims.get(r, _RushShim(dims.frame_count))
              for r in range(max(shims) + 1)]
    edl = EditDecisionList(tuple(segments))
    return emit_render_script(edl, rushes, dims, outdir, out_dims)


def dump_rushes(rushes: list[Rush], path: str | Path) -> Path:
    path = Path(path)
    doc = {
        "engine_version": ENGINE_VERSION,
        "rushes": [{
            "rush_id": r.rush_id,
            "subset": list(r.actor_ids),
            "label": r.label,
            "scale": r.scale,
            "windows": [None if w is None else
                        [w.cx - w.w / 2, w.cy - w.h / 2, w.w, w.h]
                        for w in r.windows],
        } for r in rushes],
    }
    _dump_json(doc, path)
    return path


def dump_potentials(table, rushes: list[Rush], path: str | Path) -> Path:
    path = Path(path)
    doc = {
        "engine_version": ENGINE_VERSION,
        "frames": int(table.values.shape[0]),
        "rushes": [{
            "rush_id": r.rush_id,
            "label": r.label,
            "values": [float(v) for v in table.values[:, r.rush_id]],
        } for r in rushes],
    }
    _dump_json(doc, path)
    return path


def stats_from_export(doc: dict, params: CostParams) -> EditStats:
    """Rebuild EditStats from a structured EDL document (for re-analysis)."""
    segs = doc["segments"]
    fps = params.fps
    lengths = [(s["end_frame"] - s["start_frame"]) / fps for s in segs]
    L = params.min_cut_frames()
    short = [i for i, s in enumerate(segs[:-1])
             if s["end_frame"] - s["start_frame"] < L]
    hist: dict[str, int] = {}
    for s in segs:
        key = "master" if s["scale"] == "MASTER" else str(len(s["subset"]))
        hist[key] = hist.get(key, 0) + 1
    jump = 0
    for a, b in zip(segs, segs[1:]):
        wa = a.get("windows")
        wb = b.get("windows")
        if not wa or not wb or wa[-1] is None or wb[0] is None:
            continue
        ax, ay, aw, ah = wa[-1]
        bx, by, bw, bh = wb[0]
        if iou((ax, ay, ax + aw, ay + ah), (bx, by, bx + bw, by + bh)) >= params.beta:
            jump += 1
    mean = sum(lengths) / len(lengths) if lengths else 0.0
    return EditStats(
        cut_count=max(len(segs) - 1, 0),
        mean_shot_secs=mean,
        min_shot_secs=min(lengths) if lengths else 0.0,
        max_shot_secs=max(lengths) if lengths else 0.0,
        shot_size_hist=hist,
        jump_cut_count=jump,
        cost=dict(doc.get("cost_breakdown") or {}),
        short_segments=short,
    )
