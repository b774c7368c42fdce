import json
from pathlib import Path

import numpy as np
import pytest

from conftest import assemble_scene
from stagecut.analytics import cut_stats, generate_synthetic_project
from stagecut.optimizer import CostParams, EditDecisionList, Segment, optimize
from stagecut.project import (ProjectError, export_edl, load_edl,
                              load_project, merge_config, parse_config_value,
                              prepare_scene, resolved_config, write_project,
                              emit_render_script, emit_render_script_from_doc)


@pytest.fixture(scope="module")
def demo_dir(tmp_path_factory):
    synth = generate_synthetic_project(1, 3, 60.0)
    out = tmp_path_factory.mktemp("demo")
    write_project(synth, out)
    return out


@pytest.fixture(scope="module")
def loaded(demo_dir):
    return load_project(demo_dir / "manifest.json")


def _write_minimal_project(root: Path, track_rows: list[str] | None = None,
                           gaze_rows: list[str] | None = None) -> Path:
    (root / "tracks.csv").write_text("\n".join(
        ["frame,actor_id,x1,y1,x2,y2"] +
        (track_rows if track_rows is not None else
         [f"{t},1,100.0,100.0,300.0,600.0" for t in range(48)])) + "\n")
    (root / "gaze.csv").write_text("\n".join(
        ["time_ms,user_id,x,y"] +
        (gaze_rows if gaze_rows is not None else
         [f"{t * 1000 / 24},0,200.0,300.0" for t in range(48)])) + "\n")
    manifest = {
        "scene": {"width": 1920, "height": 1080, "fps": 24, "frames": 48},
        "tracks": "tracks.csv",
        "gaze": "gaze.csv",
    }
    mpath = root / "manifest.json"
    mpath.write_text(json.dumps(manifest))
    return mpath


class TestLoadProject:
    def test_minimal_project_loads_with_defaults(self, tmp_path):
        project = load_project(_write_minimal_project(tmp_path))
        assert project.n_actors == 1
        assert project.dims.frame_count == 48
        assert project.config == merge_config()
        assert project.speakers is None

    def test_malformed_row_names_file_and_line(self, tmp_path):
        rows = [f"{t},1,100.0,100.0,300.0,600.0" for t in range(15)]
        rows.append("15,1,100.0,100.0")          # line 17 including header
        with pytest.raises(ProjectError, match=r"tracks\.csv:17: expected 6 fields"):
            load_project(_write_minimal_project(tmp_path, track_rows=rows))

    def test_sixty_hertz_gives_two_and_a_half_samples_per_frame(self, loaded):
        assert loaded.gaze_samples_per_frame_user == pytest.approx(2.5, abs=0.01)

    def test_gaze_aggregated_one_point_per_user_per_frame(self, loaded):
        lengths = {len(pts) for pts in loaded.gaze_by_frame}
        assert lengths <= {3}      # three virtual users

    def test_out_of_bounds_box_clamped_with_warning(self, tmp_path):
        rows = [f"{t},1,-50.0,100.0,300.0,600.0" for t in range(48)]
        project = load_project(_write_minimal_project(tmp_path, track_rows=rows))
        assert any(i.code == "box-out-of-bounds" for i in project.report.warnings)
        assert project.tracks[0].boxes[0].x1 == 0.0

    def test_clamped_gaze_counted(self, tmp_path):
        rows = [f"{t * 1000 / 24},0,5000.0,300.0" for t in range(48)]
        project = load_project(_write_minimal_project(tmp_path, gaze_rows=rows))
        assert project.clamped_gaze == 48

    def test_duplicate_actor_ids_abort(self, tmp_path):
        rows = ["0,1,0.0,0.0,10.0,10.0", "0,1,20.0,20.0,30.0,30.0"]
        # duplicate ids inside one file merge into one track; simulate two
        # distinct tracks with one id via a crafted manifest instead
        root = tmp_path
        _write_minimal_project(root)
        # loader keys tracks by id, so duplicates cannot arise from one file;
        # the scene validator is exercised directly in test_geometry
        project = load_project(root / "manifest.json")
        assert project.n_actors == 1

    def test_speakers_load_and_cover_video(self, demo_dir, loaded):
        assert loaded.speakers is not None
        pos = 0
        for iv in loaded.speakers:
            assert iv.start_frame == pos
            pos = iv.end_frame
        assert pos == loaded.dims.frame_count

    def test_unknown_speaker_id_rejected(self, tmp_path):
        mpath = _write_minimal_project(tmp_path)
        (tmp_path / "speakers.csv").write_text(
            "start_frame,end_frame,ids\n0,48,9\n")
        manifest = json.loads(mpath.read_text())
        manifest["speakers"] = "speakers.csv"
        mpath.write_text(json.dumps(manifest))
        with pytest.raises(ProjectError, match="unknown speaker ids"):
            load_project(mpath)

    def test_unknown_config_key_rejected(self, tmp_path):
        mpath = _write_minimal_project(tmp_path)
        with pytest.raises(ProjectError, match="unknown config key"):
            load_project(mpath, overrides={"bogus": 1.0})


class TestConfig:
    def test_defaults_match_stated_values(self):
        resolved = resolved_config(merge_config(), fps=24.0)
        assert resolved == {
            "lambda": 5.0, "alpha": 0.2, "beta": 0.4, "mu": 1.0, "nu": 1000.0,
            "gamma1": 100.0, "gamma2": 10.0, "l": 1.5, "m": 7.0,
            "establish_secs": 4.0, "age_cap_secs": 14.0, "g_floor": 1e-6,
            "ms_height_frac": 0.55, "mcu_height_frac": 0.40,
            "headroom_frac": 0.10, "fs_padding_frac": 0.05,
            "smooth_w1": 10.0, "smooth_w2": 400.0, "single_scale": "MS",
            "max_actors": 8, "eps_d": 1.0, "smoothing_window": 0.5,
            "empty_frame_policy": "carry_forward", "master_tiebreak": "tighter",
        }

    def test_age_cap_follows_m_when_unset(self):
        cfg = merge_config({"m": 14.0})
        assert resolved_config(cfg, 24.0)["age_cap_secs"] == 28.0

    def test_explicit_age_cap_wins(self):
        cfg = merge_config({"m": 10.0, "age_cap_secs": 40.0})
        assert resolved_config(cfg, 24.0)["age_cap_secs"] == 40.0

    def test_parse_value_types(self):
        assert parse_config_value("m", "14") == 14.0
        assert parse_config_value("max_actors", "5") == 5
        assert parse_config_value("single_scale", "MCU") == "MCU"
        with pytest.raises(ProjectError):
            parse_config_value("zoom", "1")

    def test_config_round_trip_bytes(self, tmp_path):
        doc = resolved_config(merge_config(), fps=24.0)
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        a.write_text(json.dumps(doc, indent=2))
        b.write_text(json.dumps(json.loads(a.read_text()), indent=2))
        assert a.read_bytes() == b.read_bytes()


class TestEdlExport:
    def _edit(self, loaded):
        rushes, table = prepare_scene(loaded)
        params = CostParams(fps=loaded.dims.fps)
        edl = optimize(table, rushes, params)
        stats = cut_stats(edl, loaded.dims.fps, params, rushes, table)
        return rushes, table, params, edl, stats

    def test_structured_round_trip(self, loaded, tmp_path):
        rushes, table, params, edl, stats = self._edit(loaded)
        path = tmp_path / "out.edl.json"
        export_edl(edl, stats, path, "structured",
                   rushes=rushes, dims=loaded.dims, config=loaded.config)
        reloaded, doc = load_edl(path)
        assert reloaded.segments == edl.segments
        assert reloaded.total_cost == edl.total_cost
        assert reloaded.breakdown == edl.breakdown
        assert doc["config"]["m"] == 7.0
        assert doc["engine_version"]

    def test_export_is_byte_stable(self, loaded, tmp_path):
        rushes, table, params, edl, stats = self._edit(loaded)
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        for p in (a, b):
            export_edl(edl, stats, p, "structured",
                       rushes=rushes, dims=loaded.dims, config=loaded.config)
        assert a.read_bytes() == b.read_bytes()

    def test_delimited_row_count(self, loaded, tmp_path):
        rushes, table, params, edl, stats = self._edit(loaded)
        path = tmp_path / "out.edl.csv"
        export_edl(edl, stats, path, "delimited",
                   rushes=rushes, dims=loaded.dims, config=loaded.config)
        lines = path.read_text().strip().splitlines()
        assert len(lines) == len(edl.segments) + 1
        reloaded, _ = load_edl(path)
        assert reloaded.segments == edl.segments


class TestRenderScript:
    def test_crop_list_covers_every_frame_with_even_ints(self, loaded, tmp_path):
        rushes, table = prepare_scene(loaded)
        params = CostParams(fps=loaded.dims.fps)
        edl = optimize(table, rushes, params)
        crops, template = emit_render_script(edl, rushes, loaded.dims, tmp_path)
        lines = crops.read_text().strip().splitlines()[1:]
        assert len(lines) == loaded.dims.frame_count
        for line in lines:
            f, x, y, w, h = (int(v) for v in line.split(","))
            assert x % 2 == y % 2 == w % 2 == h % 2 == 0
            assert 0 <= x and x + w <= loaded.dims.width
            assert 0 <= y and y + h <= loaded.dims.height
        assert "crops.csv" in template.read_text()

    def test_master_only_edl_is_full_frame(self, loaded, tmp_path):
        rushes, table = prepare_scene(loaded)
        master = next(r for r in rushes if r.is_master)
        T = loaded.dims.frame_count
        edl = EditDecisionList((Segment(0, T, master.rush_id),))
        crops, _ = emit_render_script(edl, rushes, loaded.dims, tmp_path)
        rows = {tuple(map(int, line.split(",")))[1:]
                for line in crops.read_text().strip().splitlines()[1:]}
        assert rows == {(0, 0, 3840, 2160)}

    def test_render_script_from_exported_doc(self, loaded, tmp_path):
        rushes, table = prepare_scene(loaded)
        params = CostParams(fps=loaded.dims.fps)
        edl = optimize(table, rushes, params)
        path = tmp_path / "x.edl.json"
        export_edl(edl, None, path, "structured",
                   rushes=rushes, dims=loaded.dims, config=loaded.config)
        _, doc = load_edl(path)
        crops, _ = emit_render_script_from_doc(doc, tmp_path / "render")
        direct, _ = emit_render_script(edl, rushes, loaded.dims, tmp_path / "direct")
        assert crops.read_bytes() == direct.read_bytes()


class TestWriteProject:
    def test_same_seed_byte_identical_files(self, tmp_path):
        synth = generate_synthetic_project(7, 2, 5.0)
        a = tmp_path / "a"
        b = tmp_path / "b"
        write_project(synth, a)
        write_project(generate_synthetic_project(7, 2, 5.0), b)
        for name in ("manifest.json", "tracks.csv", "gaze.csv",
                     "speakers.csv", "config.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

    def test_written_project_loads_and_matches_in_memory_pipeline(self, tmp_path):
        synth = generate_synthetic_project(3, 2, 5.0)
        write_project(synth, tmp_path)
        project = load_project(tmp_path / "manifest.json")
        rushes_file, table_file = prepare_scene(project)
        rushes_mem, table_mem, _ = assemble_scene(synth)
        assert len(rushes_file) == len(rushes_mem)
        assert np.allclose(table_file.values, table_mem.values, atol=1e-9)
