"""Reference editing strategies that share the rush set with the optimizer:
random block selection, the always-wide shot, greedy gaze following, and
speaker following.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .optimizer import (CostParams, EditDecisionList, InfeasibleEditError,
                        optimize, segments_from_assignment)
from .potentials import GazePotentialTable
from .rushes import Rush, full_set_rush, master_rush

SILENCE_TO_WIDE_SECS = 10.0

STRATEGIES = ("gazed", "random", "wide", "greedy", "speaker")


@dataclass(frozen=True)
class SpeakerInterval:
    """Who is speaking over [start_frame, end_frame); empty set means silence."""

    start_frame: int
    end_frame: int
    speakers: frozenset[int]    # actor ids

    def __post_init__(self) -> None:
        if self.start_frame >= self.end_frame:
            raise ValueError(f"empty speaker interval [{self.start_frame},{self.end_frame})")


def _frame_count(rushes: list[Rush]) -> int:
    return len(rushes[0].windows)


def _assignment_shell(rushes: list[Rush], params: CostParams,
                      strategy: str) -> tuple[np.ndarray, int, int] | EditDecisionList:
    """Master establishing prefix; returns the whole-video EDL when T is too short."""
    T = _frame_count(rushes)
    E = min(params.establish_frames(), T)
    mid = master_rush(rushes).rush_id
    assignment = np.full(T, mid, dtype=np.int32)
    if E >= T:
        return EditDecisionList(segments_from_assignment(assignment), strategy=strategy)
    return assignment, E, mid


def edit_random(rushes: list[Rush], params: CostParams, seed: int) -> EditDecisionList:
    """Arbitrary rush every minimum-cut interval, deterministic per seed."""
    shell = _assignment_shell(rushes, params, "random")
    if isinstance(shell, EditDecisionList):
        return shell
    assignment, E, mid = shell
    T = len(assignment)
    L = params.min_cut_frames()
    rng = random.Random(seed)
    for s in range(E, T, L):
        e = min(s + L, T)
        candidates = [r.rush_id for r in rushes
                      if all(r.available(t) for t in range(s, e))]
        if not candidates:
            raise InfeasibleEditError(s)
        assignment[s:e] = candidates[rng.randrange(len(candidates))]
    return EditDecisionList(segments_from_assignment(assignment), strategy="random")


def edit_wide(rushes: list[Rush]) -> EditDecisionList:
    """The full-actor-set shot for the whole video; no establishing segment, no cuts."""
    actors = set()
    for r in rushes:
        actors.update(r.subset)
    wide = full_set_rush(rushes, len(actors))
    T = _frame_count(rushes)
    for t in range(T):
        if not wide.available(t):
            raise InfeasibleEditError(t)
    assignment = np.full(T, wide.rush_id, dtype=np.int32)
    return EditDecisionList(segments_from_assignment(assignment), strategy="wide")


def _argmax_rush(values: np.ndarray, rushes: list[Rush], t: int) -> int | None:
    """Highest-scoring available rush; ties go to the smaller window, then lower id."""
    best: tuple[float, float, int] | None = None
    for r in rushes:
        win = r.windows[t]
        if win is None:
            continue
        key = (-values[t, r.rush_id], win.area, r.rush_id)
        if best is None or key < best:
            best = key
    return best[2] if best is not None else None


def edit_greedy_gaze(potentials: GazePotentialTable, rushes: list[Rush],
                     params: CostParams) -> EditDecisionList:
    """Jump to the highest-potential rush whenever the minimum shot length allows."""
    shell = _assignment_shell(rushes, params, "greedy")
    if isinstance(shell, EditDecisionList):
        return shell
    assignment, E, mid = shell
    T = len(assignment)
    L = params.min_cut_frames()
    current, age = mid, E
    for t in range(E, T):
        if not rushes[current].available(t):
            target = _argmax_rush(potentials.values, rushes, t)
            if target is None:
                raise InfeasibleEditError(t)
            current, age = target, 0
        elif age >= L:
            target = _argmax_rush(potentials.values, rushes, t)
            if target is not None and target != current:
                current, age = target, 0
        assignment[t] = current
        age += 1
    return EditDecisionList(segments_from_assignment(assignment), strategy="greedy")


def speakers_by_frame(intervals: list[SpeakerInterval], T: int) -> list[frozenset[int]]:
    """Expand sorted, non-overlapping intervals to a per-frame speaker set."""
    out: list[frozenset[int]] = [frozenset()] * T
    prev_end = 0
    for iv in sorted(intervals, key=lambda iv: iv.start_frame):
        if iv.start_frame < prev_end:
            raise ValueError(f"speaker intervals overlap at frame {iv.start_frame}")
        for t in range(max(iv.start_frame, 0), min(iv.end_frame, T)):
            out[t] = iv.speakers
        prev_end = iv.end_frame
    return out


def edit_speaker(intervals: list[SpeakerInterval], rushes: list[Rush],
                 params: CostParams) -> EditDecisionList:
    """Follow the speaker set: sole speaker's 1-shot, exact group shot for
    several, and the wide shot after prolonged silence."""
    shell = _assignment_shell(rushes, params, "speaker")
    if isinstance(shell, EditDecisionList):
        return shell
    assignment, E, mid = shell
    T = len(assignment)
    L = params.min_cut_frames()
    by_ids = {frozenset(r.actor_ids): r.rush_id for r in rushes if r.subset}
    actors = set()
    for r in rushes:
        actors.update(r.subset)
    wide = full_set_rush(rushes, len(actors)).rush_id
    silence_frames = int(round(SILENCE_TO_WIDE_SECS * params.fps))
    frame_speakers = speakers_by_frame(intervals, T)

    current, age = mid, E
    silent_run = 0
    for t in range(E, T):
        who = frame_speakers[t]
        if who:
            silent_run = 0
            if who not in by_ids:
                raise ValueError(f"no rush covers speaker set {sorted(who)} at frame {t}")
            desired = by_ids[who]
        else:
            desired = wide if silent_run >= silence_frames else current
            silent_run += 1

        if not rushes[current].available(t):
            fallback = desired if rushes[desired].available(t) else mid
            current, age = fallback, 0
        elif desired != current and age >= L and rushes[desired].available(t):
            current, age = desired, 0
        assignment[t] = current
        age += 1
    return EditDecisionList(segments_from_assignment(assignment), strategy="speaker")


def run_strategy(strategy: str, potentials: GazePotentialTable, rushes: list[Rush],
                 params: CostParams, seed: int = 0,
                 speakers: list[SpeakerInterval] | None = None) -> EditDecisionList:
    """Dispatch one editing strategy over a prepared scene."""
    if strategy == "gazed":
        return optimize(potentials, rushes, params)
    if strategy == "random":
        return edit_random(rushes, params, seed)
    if strategy == "wide":
        return edit_wide(rushes)
    if strategy == "greedy":
        return edit_greedy_gaze(potentials, rushes, params)
    if strategy == "speaker":
        if speakers is None:
            raise ValueError("speaker strategy needs speaker intervals (no speakers file loaded)")
        return edit_speaker(speakers, rushes, params)
    raise ValueError(f"unknown strategy {strategy!r} (choose from {', '.join(STRATEGIES)})")
