import numpy as np
import pytest

from stagecut.analytics import (SyntheticProject, gaze_points_by_frame,
                                generate_synthetic_project)
from stagecut.geometry import CropWindow, ValidationReport, fill_track_gaps
from stagecut.optimizer import CostParams
from stagecut.potentials import GazePotentialTable, build_potential_table
from stagecut.rushes import Rush, generate_rushes


def random_dp_instance(rng: np.random.Generator, T: int, n_rushes: int = 4,
                       avail_p: float = 0.9, establish_frames: int = 0):
    """Small randomized (table, rushes, params) instance for oracle tests.

    The last rush is a master (full frame, always available); the rest get
    random windows with random availability gaps. D >= T so age capping is
    inactive and the exhaustive enumeration scores the identical objective.
    """
    W, H, fps = 1920.0, 1080.0, 24.0
    if n_rushes == 4:       # two actors: A, B, AB, master
        subsets = [(0,), (1,), (0, 1), ()]
    else:
        subsets = [(i,) for i in range(n_rushes - 1)] + [()]
    rushes = []
    for rid, subset in enumerate(subsets):
        is_master = subset == ()
        windows = []
        for t in range(T):
            if is_master:
                windows.append(CropWindow(W / 2, H / 2, W, H))
            elif rng.random() < avail_p:
                w = rng.uniform(200, 900)
                h = w * H / W
                cx = rng.uniform(w / 2, W - w / 2)
                cy = rng.uniform(h / 2, H - h / 2)
                windows.append(CropWindow(cx, cy, w, h))
            else:
                windows.append(None)
        label = "M" if is_master else "".join(chr(65 + i) for i in subset)
        scale = "MASTER" if is_master else ("MS" if len(subset) == 1 else "FS")
        rushes.append(Rush(rid, subset, subset, label, scale, tuple(windows)))

    vals = rng.uniform(0.0, 1.0, size=(T, n_rushes))
    for r in rushes:
        for t in range(T):
            if not r.available(t):
                vals[t, r.rush_id] = 0.0
    table = GazePotentialTable(vals, max(n_rushes - 1, 1), tuple(() for _ in range(T)))
    params = CostParams(
        lam=float(rng.choice([0.0, 1.0, 5.0, 20.0])),
        gamma1=float(rng.choice([10.0, 100.0])),
        gamma2=float(rng.choice([1.0, 10.0])),
        l=float(rng.uniform(0.05, 0.3)),
        m=float(rng.uniform(0.3, 0.6)),
        fps=fps,
        establish_secs=establish_frames / fps,
        age_cap_secs=max(1.0, T / fps + 0.5),
    )
    return table, rushes, params


def assemble_scene(synth: SyntheticProject, whitelist=None):
    """Synthetic scene -> (rushes, potential table, default params)."""
    report = ValidationReport()
    filled = [fill_track_gaps(tr, synth.dims, report) for tr in synth.tracks]
    rushes = generate_rushes(filled, synth.dims, whitelist=whitelist)
    table = build_potential_table(rushes, gaze_points_by_frame(synth), synth.dims)
    return rushes, table, CostParams(fps=synth.dims.fps)


@pytest.fixture(scope="session")
def corpus():
    """Ten seeded 60 s three-actor scenes with rushes and potentials prebuilt."""
    out = {}
    for seed in range(1, 11):
        synth = generate_synthetic_project(seed, 3, 60.0)
        rushes, table, params = assemble_scene(synth)
        out[seed] = (synth, rushes, table, params)
    return out


@pytest.fixture(scope="session")
def demo_scene():
    """One 60 s three-actor scene (seed 1) for quick structural tests."""
    synth = generate_synthetic_project(1, 3, 60.0)
    rushes, table, params = assemble_scene(synth)
    return synth, rushes, table, params
