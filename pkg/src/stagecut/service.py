"""Local HTTP service for interactive re-editing.

One project is loaded per process; every request recomputes from the same
immutable scene snapshot, so identical requests produce identical responses
and concurrent requests never interfere.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import FileResponse, JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from .analytics import cut_stats
from .baselines import STRATEGIES, run_strategy
from .optimizer import InfeasibleEditError
from .potentials import GazePotentialTable
from .project import (Project, cost_params_from_config, merge_config,
                      resolved_config)
from .rushes import Rush

# CostParams keys accepted as per-request overrides
COST_KEYS = ("lambda", "alpha", "beta", "mu", "nu", "gamma1", "gamma2",
             "l", "m", "establish_secs", "age_cap_secs", "g_floor")


def _bad_request(errors: dict[str, str]) -> JSONResponse:
    return JSONResponse({"errors": errors}, status_code=400)


def create_app(project: Project, rushes: list[Rush], table: GazePotentialTable,
               assets_dir: str | Path | None = None,
               frames_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="stagecut", docs_url=None, redoc_url=None)
    dims = project.dims
    base_params = cost_params_from_config(project.config, dims.fps)

    def rush_meta(r: Rush) -> dict:
        return {"rush_id": r.rush_id, "subset": list(r.actor_ids),
                "label": r.label, "scale": r.scale}

    @app.get("/api/project")
    def get_project() -> JSONResponse:
        return JSONResponse({
            "width": dims.width,
            "height": dims.height,
            "fps": dims.fps,
            "frames": dims.frame_count,
            "duration_secs": dims.frame_count / dims.fps,
            "establish_frames": base_params.establish_frames(),
            "actors": [{"id": tr.actor_id, "label": tr.label} for tr in project.tracks],
            "rushes": [rush_meta(r) for r in rushes],
            "has_speakers": project.speakers is not None,
            "has_frames": frames_dir is not None,
        })

    def _stride(request: Request) -> int | JSONResponse:
        raw = request.query_params.get("stride", "1")
        try:
            stride = int(raw)
        except ValueError:
            return _bad_request({"stride": f"not an integer: {raw!r}"})
        if stride < 1:
            return _bad_request({"stride": "must be >= 1"})
        return stride

    @app.get("/api/potentials")
    def get_potentials(request: Request):
        stride = _stride(request)
        if isinstance(stride, JSONResponse):
            return stride
        frames = list(range(0, dims.frame_count, stride))
        return JSONResponse({
            "stride": stride,
            "frames": frames,
            "rushes": [{
                "rush_id": r.rush_id,
                "label": r.label,
                "values": [float(table.values[t, r.rush_id]) for t in frames],
            } for r in rushes],
        })

    @app.get("/api/windows")
    def get_windows(request: Request):
        stride = _stride(request)
        if isinstance(stride, JSONResponse):
            return stride
        rush_param = request.query_params.get("rush")
        if rush_param is not None:
            try:
                wanted = [int(rush_param)]
            except ValueError:
                return _bad_request({"rush": f"not an integer: {rush_param!r}"})
            if not (0 <= wanted[0] < len(rushes)):
                return _bad_request({"rush": f"no rush {wanted[0]}"})
        else:
            wanted = [r.rush_id for r in rushes]
        frames = list(range(0, dims.frame_count, stride))
        out = []
        for rid in wanted:
            r = rushes[rid]
            wins = []
            for t in frames:
                w = r.windows[t]
                wins.append(None if w is None else
                            [w.cx - w.w / 2, w.cy - w.h / 2, w.w, w.h])
            out.append({"rush_id": rid, "windows": wins})
        return JSONResponse({"stride": stride, "frames": frames, "rushes": out})

    @app.get("/api/boxes")
    def get_boxes(request: Request):
        stride = _stride(request)
        if isinstance(stride, JSONResponse):
            return stride
        frames = list(range(0, dims.frame_count, stride))
        out = []
        for tr in project.filled:
            boxes = []
            for t in frames:
                b = tr.boxes[t]
                boxes.append(None if b is None or not tr.tracked[t]
                             else [b.x1, b.y1, b.x2, b.y2])
            out.append({"actor_id": tr.actor_id, "label": tr.label, "boxes": boxes})
        return JSONResponse({"stride": stride, "frames": frames, "actors": out})

    @app.post("/api/edit")
    async def post_edit(request: Request):
        try:
            body = await request.json()
        except Exception:
            return _bad_request({"body": "request body is not valid JSON"})
        if not isinstance(body, dict):
            return _bad_request({"body": "expected a JSON object"})

        strategy = body.get("strategy")
        if strategy not in STRATEGIES:
            return _bad_request({"strategy":
                                 f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}"})
        seed = body.get("seed", 0)
        if not isinstance(seed, int):
            return _bad_request({"seed": "must be an integer"})

        overrides = {}
        for key, value in body.items():
            if key in ("strategy", "seed"):
                continue
            if key not in COST_KEYS:
                return _bad_request({key: "not an editing parameter"})
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                return _bad_request({key: "must be a number"})
            overrides[key] = float(value)
        try:
            config = merge_config(project.config, overrides)
            params = cost_params_from_config(config, dims.fps)
        except ValueError as e:
            return _bad_request({"params": str(e)})

        if strategy == "speaker" and project.speakers is None:
            return _bad_request({"strategy": "project has no speaker annotations"})
        try:
            edl = run_strategy(strategy, table, rushes, params,
                               seed=seed, speakers=project.speakers)
        except InfeasibleEditError as e:
            return JSONResponse({"errors": {"optimizer": str(e)}, "frame": e.frame},
                                status_code=422)
        stats = cut_stats(edl, dims.fps, params, rushes, table)
        return JSONResponse({
            "strategy": strategy,
            "seed": seed,
            "config": resolved_config(config, dims.fps),
            "edl": {
                "strategy": edl.strategy,
                "segments": [{"start_frame": s.start_frame, "end_frame": s.end_frame,
                              "rush_id": s.rush_id} for s in edl.segments],
                "total_cost": stats.cost.get("total"),
                "cost_breakdown": stats.cost,
            },
            "stats": stats.as_dict(),
        })

    if frames_dir is not None:
        frames_path = Path(frames_dir)

        @app.get("/api/frame/{idx}")
        def get_frame(idx: int):
            for pattern in (f"{idx}.jpg", f"{idx}.png", f"{idx:05d}.jpg",
                            f"{idx:05d}.png", f"frame_{idx:05d}.jpg"):
                candidate = frames_path / pattern
                if candidate.is_file():
                    return FileResponse(candidate)
            return JSONResponse({"errors": {"frame": f"no image for frame {idx}"}},
                                status_code=404)

    if assets_dir is not None and Path(assets_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(assets_dir), html=True), name="ui")
    else:
        @app.get("/")
        def index() -> PlainTextResponse:
            return PlainTextResponse(
                "stagecut service is running; no UI bundle configured "
                "(pass --assets <dir with index.html>)\n")

    return app


def serve(project: Project, rushes: list[Rush], table: GazePotentialTable,
          bind: str = "127.0.0.1:8765", assets_dir: str | None = None,
          frames_dir: str | None = None) -> None:
    """Run the service until interrupted."""
    import uvicorn

    host, _, port = bind.partition(":")
    app = create_app(project, rushes, table, assets_dir, frames_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8765))
