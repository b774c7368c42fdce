"""Quantitative description of edit decision lists plus a synthetic scene
generator used by tests, demos and parameter sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .baselines import SpeakerInterval
from .geometry import BBox, ActorTrack, SceneDims, iou
from .optimizer import CostParams, EditDecisionList, score_assignment
from .potentials import GazePotentialTable
from .rushes import Rush


@dataclass
class EditStats:
    """Descriptive statistics of one EDL."""

    cut_count: int
    mean_shot_secs: float
    min_shot_secs: float
    max_shot_secs: float
    shot_size_hist: dict[str, int]
    jump_cut_count: int
    cost: dict[str, float] = field(default_factory=dict)
    short_segments: list[int] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "cut_count": self.cut_count,
            "mean_shot_secs": self.mean_shot_secs,
            "min_shot_secs": self.min_shot_secs,
            "max_shot_secs": self.max_shot_secs,
            "shot_size_hist": self.shot_size_hist,
            "jump_cut_count": self.jump_cut_count,
            "cost": self.cost,
            "short_segments": self.short_segments,
        }


def _hist_key(rush: Rush) -> str:
    return "master" if rush.is_master else str(len(rush.subset))


def cut_stats(edl: EditDecisionList, fps: float, params: CostParams,
              rushes: list[Rush] | None = None,
              potentials: GazePotentialTable | None = None) -> EditStats:
    """Shot-length and cut statistics; cost totals when the scene data is supplied.

    A cut whose adjoining windows overlap at IoU >= beta counts as a jump
    cut. Non-final segments shorter than the minimum cut interval are
    flagged, not rejected.
    """
    segs = edl.segments
    lengths = [seg.frames / fps for seg in segs]
    L = params.min_cut_frames()
    short = [i for i, seg in enumerate(segs[:-1]) if seg.frames < L]

    hist: dict[str, int] = {}
    jump_cuts = 0
    if rushes is not None:
        for seg in segs:
            key = _hist_key(rushes[seg.rush_id])
            hist[key] = hist.get(key, 0) + 1
        for prev, nxt in zip(segs, segs[1:]):
            t = nxt.start_frame
            win_p = rushes[prev.rush_id].windows[t - 1]
            win_q = rushes[nxt.rush_id].windows[t]
            if win_p is not None and win_q is not None and iou(win_p, win_q) >= params.beta:
                jump_cuts += 1

    cost: dict[str, float] = dict(edl.breakdown)
    if rushes is not None and potentials is not None:
        cost = score_assignment(edl.assignment(), potentials, rushes, params)

    return EditStats(
        cut_count=max(len(segs) - 1, 0),
        mean_shot_secs=float(np.mean(lengths)) if lengths else 0.0,
        min_shot_secs=min(lengths) if lengths else 0.0,
        max_shot_secs=max(lengths) if lengths else 0.0,
        shot_size_hist=hist,
        jump_cut_count=jump_cuts,
        cost=cost,
        short_segments=short,
    )


def compare(edl_a: EditDecisionList, edl_b: EditDecisionList) -> float:
    """Fraction of frames both EDLs assign to the same rush."""
    if edl_a.frame_count != edl_b.frame_count:
        raise ValueError(f"frame counts differ: {edl_a.frame_count} vs {edl_b.frame_count}")
    return float(np.mean(edl_a.assignment() == edl_b.assignment()))


def validate_edl(edl: EditDecisionList, rushes: list[Rush], params: CostParams,
                 expect_establishing: bool = True) -> list[str]:
    """Structural checks shared by the tests: partition, availability,
    the master establishing prefix and the minimum shot duration."""
    problems: list[str] = []
    T = len(rushes[0].windows)
    pos = 0
    for seg in edl.segments:
        if seg.start_frame != pos:
            problems.append(f"segment starts at {seg.start_frame}, expected {pos}")
        pos = seg.end_frame
    if pos != T:
        problems.append(f"segments end at {pos}, expected {T}")
    for a, b in zip(edl.segments, edl.segments[1:]):
        if a.rush_id == b.rush_id:
            problems.append(f"segments at {b.start_frame} repeat rush {b.rush_id}")
    for seg in edl.segments:
        rush = rushes[seg.rush_id]
        for t in range(seg.start_frame, seg.end_frame):
            if not rush.available(t):
                problems.append(f"rush {seg.rush_id} unavailable at frame {t}")
                break
    if expect_establishing:
        E = min(params.establish_frames(), T)
        master = next(r.rush_id for r in rushes if r.is_master)
        head = edl.assignment()[:E]
        if not np.all(head == master):
            problems.append("establishing prefix is not all master")
    L = params.min_cut_frames()
    for i, seg in enumerate(edl.segments[:-1]):
        if seg.frames < L:
            problems.append(f"segment {i} lasts {seg.frames} frames (< {L})")
    return problems


@dataclass(frozen=True)
class SyntheticProject:
    """In-memory scene: tracks, raw gaze rows and speaker intervals."""

    dims: SceneDims
    tracks: list[ActorTrack]
    gaze_rows: list[tuple[float, int, float, float]]    # time_ms, user_id, x, y
    speakers: list[SpeakerInterval]
    display: tuple[float, float]


def gaze_points_by_frame(synth: SyntheticProject) -> list[list[tuple[float, float]]]:
    """Aggregate raw gaze rows to one mean point per user per frame, the same
    reduction the project loader applies."""
    T = synth.dims.frame_count
    fps = synth.dims.fps
    sums: dict[tuple[int, int], tuple[float, float, int]] = {}
    for time_ms, user, x, y in synth.gaze_rows:
        frame = min(T - 1, max(0, int(round(time_ms / 1000.0 * fps))))
        sx, sy, n = sums.get((frame, user), (0.0, 0.0, 0))
        sums[(frame, user)] = (sx + x, sy + y, n + 1)
    out: list[list[tuple[float, float]]] = [[] for _ in range(T)]
    for (frame, user) in sorted(sums):
        sx, sy, n = sums[(frame, user)]
        out[frame].append((sx / n, sy / n))
    return out


def _wander(rng: np.random.Generator, T: int, fps: float, scale: float) -> np.ndarray:
    """Smooth pseudo-random drift built from a few random sinusoids."""
    t = np.arange(T)
    out = np.zeros(T)
    for _ in range(3):
        freq = rng.uniform(0.05, 0.35)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        out += rng.uniform(0.3, 1.0) * np.sin(2.0 * math.pi * freq * t / fps + phase)
    return out / 3.0 * scale


def generate_synthetic_project(seed: int, n_actors: int, duration_secs: float,
                               fps: float = 24.0,
                               size: tuple[float, float] = (3840.0, 2160.0),
                               users: int = 3,
                               lock_attention: int | None = None,
                               track_noise_frac: float = 0.003) -> SyntheticProject:
    """Deterministic stand-in scene: smoothly drifting actors with detector-like
    box jitter, epoch-switching viewer attention with Gaussian gaze jitter,
    and speakers aligned to attention.

    lock_attention pins every epoch's attention (and speech) to one actor,
    which makes the gaze-driven strategies nearly degenerate; useful for
    sanity checks.
    """
    if n_actors < 1:
        raise ValueError("need at least one actor")
    rng = np.random.default_rng(seed)
    W, H = size
    T = int(round(duration_secs * fps))
    dims = SceneDims(W, H, fps, T)

    tracks: list[ActorTrack] = []
    centers = np.zeros((n_actors, T, 2))
    noise = track_noise_frac * W
    for i in range(n_actors):
        anchor_x = W * (i + 1) / (n_actors + 1)
        anchor_y = H * 0.55
        box_h = H * rng.uniform(0.30, 0.38)
        box_w = box_h * rng.uniform(0.28, 0.34)
        cx = anchor_x + _wander(rng, T, fps, W * 0.05)
        cy = anchor_y + _wander(rng, T, fps, H * 0.03)
        cx = np.clip(cx, box_w / 2, W - box_w / 2)
        cy = np.clip(cy, box_h / 2, H - box_h / 2)
        centers[i, :, 0] = cx
        centers[i, :, 1] = cy
        # per-frame detector jitter on the reported boxes (the true centers
        # above stay clean for gaze targeting)
        jit = rng.normal(0.0, noise, size=(T, 4))
        boxes = []
        for t in range(T):
            x1 = min(max(cx[t] - box_w / 2 + jit[t, 0], 0.0), W - 2.0)
            y1 = min(max(cy[t] - box_h / 2 + jit[t, 1], 0.0), H - 2.0)
            x2 = max(min(cx[t] + box_w / 2 + jit[t, 2], W), x1 + 1.0)
            y2 = max(min(cy[t] + box_h / 2 + jit[t, 3], H), y1 + 1.0)
            boxes.append(BBox(float(x1), float(y1), float(x2), float(y2)))
        tracks.append(ActorTrack(i, chr(ord("A") + i), tuple(boxes)))

    # attention epochs of 1-4 s, biased toward one protagonist
    protagonist = int(rng.integers(n_actors))
    epochs: list[tuple[int, int, int]] = []   # start, end, target actor
    t0 = 0
    while t0 < T:
        t1 = min(T, t0 + int(round(rng.uniform(1.0, 4.0) * fps)))
        if lock_attention is not None:
            target = lock_attention
        elif rng.random() < 0.45:
            target = protagonist
        else:
            target = int(rng.integers(n_actors))
        epochs.append((t0, t1, target))
        t0 = t1

    target_of = np.zeros(T, dtype=int)
    for s, e, a in epochs:
        target_of[s:e] = a

    gaze_rows: list[tuple[float, int, float, float]] = []
    sigma = 0.02 * W
    n_samples = int(duration_secs * 60.0)
    for u in range(users):
        jitter = rng.normal(0.0, sigma, size=(n_samples, 2))
        for k in range(n_samples):
            time_ms = k * (1000.0 / 60.0)
            frame = min(T - 1, max(0, int(round(time_ms / 1000.0 * fps))))
            ax, ay = centers[target_of[frame], frame]
            x = min(max(ax + jitter[k, 0], 0.0), W)
            y = min(max(ay + jitter[k, 1], 0.0), H)
            gaze_rows.append((time_ms, u, float(x), float(y)))

    speakers: list[SpeakerInterval] = []
    for s, e, a in epochs:
        silent = lock_attention is None and rng.random() < 0.15
        speakers.append(SpeakerInterval(s, e, frozenset() if silent else frozenset({a})))

    return SyntheticProject(dims, tracks, gaze_rows, speakers, (W, H))
