"""Virtual rush generation: enumerate actor subsets and build smooth,
composed crop-window trajectories for each one.

A rush is one candidate shot stream: a per-frame crop window following one
actor (medium framing) or a group (full-shot framing), or the full master
frame. Trajectories are smoothed per channel with a penalized least-squares
fit solved as a banded linear system.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.linalg import solveh_banded

from .geometry import (BBox, CropWindow, FilledTrack, SceneDims,
                       full_frame_window, window_at)

SCALE_MS = "MS"
SCALE_MCU = "MCU"
SCALE_FS = "FS"
SCALE_MASTER = "MASTER"

REFERENCE_FPS = 24.0


class SubsetLimitError(ValueError):
    """Raised when the actor count would explode the subset enumeration."""


@dataclass(frozen=True)
class FramingConfig:
    """Numeric framing and smoothing knobs for rush generation."""

    ms_height_frac: float = 0.55
    mcu_height_frac: float = 0.40
    headroom_frac: float = 0.10
    fs_padding_frac: float = 0.05
    smooth_w1: float = 10.0
    smooth_w2: float = 400.0
    single_scale: str = SCALE_MS
    max_actors: int = 8

    def validate(self) -> None:
        for name in ("ms_height_frac", "mcu_height_frac", "headroom_frac", "fs_padding_frac"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ValueError(f"{name} must be in (0, 1), got {v}")
        if self.smooth_w1 < 0 or self.smooth_w2 < 0:
            raise ValueError("smoothing weights must be >= 0")
        if self.single_scale not in (SCALE_MS, SCALE_MCU):
            raise ValueError(f"single_scale must be MS or MCU, got {self.single_scale}")
        if self.max_actors < 1:
            raise ValueError("max_actors must be >= 1")


@dataclass(frozen=True)
class Rush:
    """One candidate shot: an actor subset plus its per-frame crop windows.

    windows[t] is None on frames where the rush is unavailable (some subset
    actor untracked there). The master rush has an empty subset and a
    full-frame window everywhere.
    """

    rush_id: int
    subset: tuple[int, ...]        # indices into the scene's track list
    actor_ids: tuple[int, ...]
    label: str
    scale: str
    windows: tuple[CropWindow | None, ...]

    def available(self, frame: int) -> bool:
        return self.windows[frame] is not None

    @property
    def is_master(self) -> bool:
        return self.scale == SCALE_MASTER


def enumerate_subsets(n: int, max_actors: int = 8) -> list[tuple[int, ...]]:
    """All 2^n - 1 non-empty actor-index subsets, ordered by size then lexicographically."""
    if n < 1:
        raise SubsetLimitError(f"need at least one actor, got {n}")
    if n > max_actors:
        raise SubsetLimitError(
            f"{n} actors would generate {2 ** n - 1} rushes (max {max_actors} actors); "
            "pass a subset whitelist (--subset-whitelist) to cap the rush set")
    out: list[tuple[int, ...]] = []
    for size in range(1, n + 1):
        out.extend(combinations(range(n), size))
    return out


def frame_single(box: BBox, scale: str, cfg: FramingConfig, dims: SceneDims) -> CropWindow:
    """Compose a medium framing around one actor box, clamped to the master frame.

    The head is taken to be the top edge of the box; the window keeps
    headroom above it and is horizontally centered on the box.
    """
    frac = cfg.ms_height_frac if scale == SCALE_MS else cfg.mcu_height_frac
    h = frac * box.height
    top = box.y1 - cfg.headroom_frac * h
    cx = (box.x1 + box.x2) / 2.0
    cy = top + h / 2.0
    return window_at(cx, cy, h * dims.aspect, dims)


def frame_group(boxes: list[BBox], cfg: FramingConfig, dims: SceneDims) -> CropWindow:
    """Smallest aspect-correct window containing all boxes plus padding."""
    if not boxes:
        raise ValueError("frame_group needs at least one box")
    x1 = min(b.x1 for b in boxes)
    y1 = min(b.y1 for b in boxes)
    x2 = max(b.x2 for b in boxes)
    y2 = max(b.y2 for b in boxes)
    pad_x = cfg.fs_padding_frac * (x2 - x1)
    pad_y = cfg.fs_padding_frac * (y2 - y1)
    pw = (x2 - x1) + 2 * pad_x
    ph = (y2 - y1) + 2 * pad_y
    w = max(pw, ph * dims.aspect)
    cx = (x1 + x2) / 2.0
    cy = (y1 + y2) / 2.0
    return window_at(cx, cy, w, dims)


def _second_diff_band(T: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Diagonals (main, first, second) of D2'D2 for T points."""
    d0 = np.zeros(T)
    d1 = np.zeros(max(T - 1, 0))
    d2 = np.ones(max(T - 2, 0))
    if T >= 3:
        d0[0] = d0[-1] = 1.0
        if T >= 4:
            d0[1] = d0[-2] = 5.0
            d0[2:-2] = 6.0
        else:
            d0[1] = 4.0
        d1[0] = d1[-1] = -2.0
        d1[1:-1] = -4.0
    return d0, d1, d2


def stabilize_trajectory(raw: np.ndarray, w1: float, w2: float) -> np.ndarray:
    """Smooth one trajectory channel over gaps.

    Minimizes sum((u - raw)^2 over known frames) + w1 * sum(first diffs^2)
    + w2 * sum(second diffs^2) exactly, with NaN frames carrying zero data
    weight. Returns a dense trajectory (gap frames are bridged smoothly).
    """
    y = np.asarray(raw, dtype=float)
    T = y.shape[0]
    mask = ~np.isnan(y)
    if not mask.any():
        raise ValueError("trajectory has no data at all")
    if mask.sum() == 1 or T == 1 or (w1 == 0.0 and w2 == 0.0):
        # Nothing to smooth against: hold the nearest known value.
        idx = np.where(mask)[0]
        out = np.empty(T)
        prev = y[idx[0]]
        for t in range(T):
            if mask[t]:
                prev = y[t]
            out[t] = prev
        # backfill the leading gap
        out[: idx[0]] = y[idx[0]]
        return out

    d0 = mask.astype(float).copy()
    d1 = np.zeros(T - 1)
    d2 = np.zeros(max(T - 2, 0))
    if w1 > 0:
        d0[0] += w1
        d0[-1] += w1
        d0[1:-1] += 2 * w1
        d1 -= w1
    if w2 > 0 and T >= 3:
        s0, s1, s2 = _second_diff_band(T)
        d0 += w2 * s0
        d1 += w2 * s1
        d2 += w2 * s2

    ab = np.zeros((3, T))
    ab[2] = d0
    ab[1, 1:] = d1
    if T >= 2:
        ab[0, 2:] = d2
    rhs = np.where(mask, y, 0.0)
    return solveh_banded(ab, rhs, lower=False)


def _raw_channels(subset: tuple[int, ...], tracks: list[FilledTrack], scale: str,
                  cfg: FramingConfig, dims: SceneDims,
                  fallback_to_tracked: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-frame raw (cx, cy, w) arrays with NaN gaps, plus availability mask."""
    T = dims.frame_count
    cx = np.full(T, np.nan)
    cy = np.full(T, np.nan)
    w = np.full(T, np.nan)
    avail = np.zeros(T, dtype=bool)
    for t in range(T):
        members = [tracks[i] for i in subset]
        if all(m.tracked[t] for m in members):
            boxes = [m.boxes[t] for m in members]
        elif fallback_to_tracked:
            boxes = [m.boxes[t] for m in members if m.tracked[t]]
        else:
            continue
        if boxes:
            if len(subset) == 1 and boxes and len(boxes) == 1 and scale in (SCALE_MS, SCALE_MCU):
                win = frame_single(boxes[0], scale, cfg, dims)
            else:
                win = frame_group(boxes, cfg, dims)
        else:
            win = full_frame_window(dims)
        cx[t], cy[t], w[t] = win.cx, win.cy, win.w
        avail[t] = True
    return cx, cy, w, avail


def generate_rushes(tracks: list[FilledTrack], dims: SceneDims,
                    cfg: FramingConfig | None = None,
                    whitelist: set[frozenset[int]] | None = None) -> list[Rush]:
    """Build the full rush set: one rush per enumerated subset plus the master.

    Singleton subsets get the configured medium framing; groups get a padded
    full-shot framing. Each trajectory channel is smoothed, then re-clamped
    inside the master frame. The full-actor-set rush falls back to the union
    of whoever is tracked so the widest shot stays selectable on every frame.
    """
    cfg = cfg or FramingConfig()
    cfg.validate()
    n = len(tracks)
    subsets = enumerate_subsets(n, max_actors=cfg.max_actors if whitelist is None else max(n, cfg.max_actors))
    if whitelist is not None:
        id_sets = {frozenset(tracks[i].actor_id for i in s): s for s in subsets}
        subsets = [s for ids, s in sorted(((k, v) for k, v in id_sets.items()),
                                          key=lambda kv: (len(kv[1]), kv[1])) if ids in whitelist]
    w2_eff = cfg.smooth_w2 * (dims.fps / REFERENCE_FPS) ** 2

    out: list[Rush] = []
    full_set = tuple(range(n))
    for rid, subset in enumerate(subsets):
        scale = cfg.single_scale if len(subset) == 1 else SCALE_FS
        fallback = subset == full_set
        cx, cy, w, avail = _raw_channels(subset, tracks, scale, cfg, dims, fallback)
        T = dims.frame_count
        windows: list[CropWindow | None] = [None] * T
        if avail.any():
            cx = stabilize_trajectory(cx, cfg.smooth_w1, w2_eff)
            cy = stabilize_trajectory(cy, cfg.smooth_w1, w2_eff)
            w = stabilize_trajectory(w, cfg.smooth_w1, w2_eff)
            for t in range(T):
                if avail[t]:
                    windows[t] = window_at(cx[t], cy[t], w[t], dims)
        label = "".join(tracks[i].label for i in subset)
        out.append(Rush(rid, subset, tuple(tracks[i].actor_id for i in subset),
                        label, scale, tuple(windows)))

    master = full_frame_window(dims)
    out.append(Rush(len(out), (), (), "MASTER", SCALE_MASTER,
                    tuple([master] * dims.frame_count)))
    return out


def master_rush(rushes: list[Rush]) -> Rush:
    for r in rushes:
        if r.is_master:
            return r
    raise ValueError("rush set has no master rush")


def full_set_rush(rushes: list[Rush], n: int) -> Rush:
    for r in rushes:
        if len(r.subset) == n and not r.is_master:
            return r
    raise ValueError("rush set has no full-actor-set rush (check the subset whitelist)")
