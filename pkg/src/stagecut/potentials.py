"""Per-frame, per-rush importance values derived from viewer gaze.

Single-actor shots get a normalized reciprocal-distance score against the
frame's gaze points; multi-actor shots are scored bottom-up by combining the
scores of their constituent shots in on-screen left-to-right order. The
combination rewards attention split across a group and collapses to zero
when one member draws no gaze.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .geometry import Point, SceneDims
from .rushes import Rush


@dataclass(frozen=True)
class PotentialConfig:
    eps_d: float = 1.0                      # pixel floor for gaze distance
    smoothing_window: float = 0.5           # seconds of centered moving average, 0 disables
    empty_frame_policy: str = "carry_forward"   # or "uniform"
    master_tiebreak: str = "tighter"        # prefer the smaller window on equal scores

    def validate(self) -> None:
        if self.eps_d <= 0:
            raise ValueError(f"eps_d must be > 0, got {self.eps_d}")
        if self.smoothing_window < 0:
            raise ValueError(f"smoothing_window must be >= 0, got {self.smoothing_window}")
        if self.empty_frame_policy not in ("carry_forward", "uniform"):
            raise ValueError(f"unknown empty_frame_policy {self.empty_frame_policy!r}")
        if self.master_tiebreak not in ("tighter", "wider"):
            raise ValueError(f"unknown master_tiebreak {self.master_tiebreak!r}")


@dataclass(frozen=True)
class GazePotentialTable:
    """Frame-by-rush importance matrix plus the per-frame screen order used to build it."""

    values: np.ndarray                      # (frames, rushes), non-negative
    n: int                                  # actor count
    screen_order: tuple[tuple[int, ...], ...]   # per frame, actor indices left to right

    @property
    def frame_count(self) -> int:
        return self.values.shape[0]


def distance_to_center(center: Point, gaze: Sequence[Point], eps_d: float = 1.0) -> float:
    """Summed Euclidean distance from every gaze point to a shot center, floored at eps_d."""
    if not gaze:
        raise ValueError("no gaze points for this frame")
    cx, cy = center
    d = 0.0
    for gx, gy in gaze:
        d += math.hypot(cx - gx, cy - gy)
    return max(d, eps_d)


def one_shot_potentials(centers: Sequence[Point], gaze: Sequence[Point],
                        eps_d: float = 1.0) -> list[float]:
    """Normalized reciprocal distances; sums to 1 over the given shot centers."""
    recips = [1.0 / distance_to_center(c, gaze, eps_d) for c in centers]
    total = sum(recips)
    return [r / total for r in recips]


def combine(ga: float, gb: float) -> float:
    """Score of the combined shot of two neighbours: ga + gb - |ga - gb|."""
    return ga + gb - abs(ga - gb)


def subset_potential(subset: Sequence[int], one_shot_values: Mapping[int, float],
                     screen_order: Sequence[int]) -> float:
    """Score of a multi-actor shot from its members' single-shot scores.

    Members are sorted left to right on screen; a k-member score combines
    the scores of the two (k-1)-member shots obtained by dropping the
    rightmost and the leftmost member.
    """
    pos = {a: i for i, a in enumerate(screen_order)}
    ordered = sorted(subset, key=lambda a: (pos.get(a, len(pos)), a))
    row = [float(one_shot_values[a]) for a in ordered]
    k = len(row)
    if k == 0:
        raise ValueError("empty subset has no potential")
    for length in range(2, k + 1):
        for i in range(0, k - length + 1):
            row[i] = combine(row[i], row[i + 1])
    return row[0]


def moving_average(values: np.ndarray, radius: int) -> np.ndarray:
    """Centered moving average per column, shrinking the window at the edges."""
    if radius <= 0:
        return values
    T = values.shape[0]
    padded = np.concatenate([np.zeros((1,) + values.shape[1:]), np.cumsum(values, axis=0)])
    lo = np.maximum(np.arange(T) - radius, 0)
    hi = np.minimum(np.arange(T) + radius, T - 1)
    sums = padded[hi + 1] - padded[lo]
    return sums / (hi - lo + 1)[:, None]


def build_potential_table(rushes: list[Rush], gaze_by_frame: Sequence[Sequence[Point]],
                          dims: SceneDims, cfg: PotentialConfig | None = None) -> GazePotentialTable:
    """Score every rush on every frame.

    Single-shot scores are normalized over the single shots available that
    frame; group scores follow the left-to-right combination hierarchy; the
    master rush scores as the group of all currently visible actors. Frames
    without gaze carry the previous frame's single-shot scores forward
    (or start uniform). Unavailable rushes score 0.
    """
    cfg = cfg or PotentialConfig()
    cfg.validate()
    T = dims.frame_count
    R = len(rushes)

    one_shot_rush: dict[int, Rush] = {}
    actors: set[int] = set()
    for r in rushes:
        actors.update(r.subset)
        if len(r.subset) == 1:
            one_shot_rush[r.subset[0]] = r
    missing = actors - set(one_shot_rush)
    if missing:
        raise ValueError(
            f"actors {sorted(missing)} appear in multi-actor rushes but have no 1-shot rush; "
            "gaze scoring needs every actor's 1-shot (adjust the subset whitelist)")
    n = len(actors)

    values = np.zeros((T, R))
    orders: list[tuple[int, ...]] = []
    prev_vals: dict[int, float] = {}

    for t in range(T):
        present = [a for a, r in one_shot_rush.items() if r.available(t)]
        centers = {a: (one_shot_rush[a].windows[t].cx, one_shot_rush[a].windows[t].cy)
                   for a in present}
        order = tuple(sorted(present, key=lambda a: (centers[a][0], a)))
        orders.append(order)

        gaze = gaze_by_frame[t] if t < len(gaze_by_frame) else []
        vals: dict[int, float]
        if present and gaze:
            scores = one_shot_potentials([centers[a] for a in order], gaze, cfg.eps_d)
            vals = dict(zip(order, scores))
        elif present:
            if cfg.empty_frame_policy == "carry_forward" and prev_vals:
                vals = {a: prev_vals.get(a, 0.0) for a in order}
            else:
                vals = {a: 1.0 / len(present) for a in order}
        else:
            vals = {}
        prev_vals = vals

        for r in rushes:
            if not r.available(t):
                continue
            if r.is_master:
                members = list(vals)
            else:
                members = [a for a in r.subset if a in vals]
            if not members:
                # nothing trackable on screen: the wide views stay neutral
                values[t, r.rush_id] = 1.0 if (r.is_master or len(r.subset) == n) else 0.0
            else:
                values[t, r.rush_id] = subset_potential(members, vals, order)

    radius = int(round(cfg.smoothing_window * dims.fps / 2.0))
    if radius > 0:
        values = moving_average(values, radius)
        for r in rushes:
            for t in range(T):
                if not r.available(t):
                    values[t, r.rush_id] = 0.0

    return GazePotentialTable(values, n, tuple(orders))
