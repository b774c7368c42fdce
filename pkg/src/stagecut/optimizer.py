"""Energy-minimizing shot selection over the rush set.

Each frame must be assigned one rush. The objective charges every frame the
negative log of its rush's gaze score, plus edge costs between consecutive
frames: a flat transition cost per cut, an overlap cost that forbids
jump cuts between similar framings, and a rhythm cost that discourages both
rapid re-cuts and overlong shots. Because the rhythm cost depends on how
long the outgoing shot has been held, the dynamic program runs over
(rush, age) states rather than rushes alone, which keeps the recurrence
exact. Ties are broken toward fewer cuts, then smaller summed window area,
then lower rush id.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import iou
from .potentials import GazePotentialTable
from .rushes import Rush


class InfeasibleEditError(RuntimeError):
    """No rush is available on some frame."""

    def __init__(self, frame: int):
        super().__init__(f"no rush available at frame {frame}")
        self.frame = frame


@dataclass(frozen=True)
class CostParams:
    """Every editing-energy parameter, with engine defaults."""

    lam: float = 5.0            # cost of any cut
    alpha: float = 0.2          # overlap ratio below which cuts are free
    beta: float = 0.4           # overlap ratio above which cuts are jump cuts
    mu: float = 1.0             # slope scale of the linear overlap band
    nu: float = 1000.0          # jump-cut penalty
    gamma1: float = 100.0       # early-re-cut penalty scale
    gamma2: float = 10.0        # staying-pressure scale
    l: float = 1.5              # seconds before re-cutting stops being penalized
    m: float = 7.0              # seconds after which staying pressure ramps up
    fps: float = 24.0
    establish_secs: float = 4.0
    age_cap_secs: float | None = None   # None resolves to 2 * m
    g_floor: float = 1e-6       # potential floor inside the log

    @property
    def age_cap(self) -> float:
        return self.age_cap_secs if self.age_cap_secs is not None else 2.0 * self.m

    def validate(self) -> None:
        if not (0.0 <= self.alpha < self.beta <= 1.0):
            raise ValueError(f"need 0 <= alpha < beta <= 1, got alpha={self.alpha} beta={self.beta}")
        for name in ("lam", "mu", "nu", "gamma1", "gamma2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.l <= 0 or self.m <= 0:
            raise ValueError("rhythm parameters l and m must be > 0")
        if self.fps <= 0:
            raise ValueError("fps must be > 0")
        if self.establish_secs < 0:
            raise ValueError("establish_secs must be >= 0")
        if self.g_floor <= 0:
            raise ValueError("g_floor must be > 0")
        if self.age_cap < self.m:
            raise ValueError(f"age cap ({self.age_cap}s) must be >= m ({self.m}s)")
        if self.l >= self.m:
            warnings.warn(f"l ({self.l}s) >= m ({self.m}s): cutting is discouraged before "
                          "staying pressure even starts", stacklevel=2)

    def establish_frames(self) -> int:
        return int(math.ceil(self.establish_secs * self.fps - 1e-9))

    def min_cut_frames(self) -> int:
        return max(1, int(math.ceil(self.l * self.fps - 1e-9)))

    def age_cap_frames(self) -> int:
        # >= 2 keeps cut entries (age 1) and saturated stays distinct states
        return max(2, int(round(self.age_cap * self.fps)))

    def with_overrides(self, **kwargs) -> "CostParams":
        return replace(self, **kwargs)


@dataclass(frozen=True)
class DPState:
    """One editing-graph node: a rush plus how many frames it has been held."""

    rush: int
    age: int    # frames since the last cut, >= 1


@dataclass(frozen=True)
class Segment:
    start_frame: int
    end_frame: int      # exclusive
    rush_id: int

    @property
    def frames(self) -> int:
        return self.end_frame - self.start_frame


@dataclass(frozen=True)
class EditDecisionList:
    """Contiguous frame segments, each mapped to one rush."""

    segments: tuple[Segment, ...]
    total_cost: float | None = None
    breakdown: dict[str, float] = field(default_factory=dict, compare=False)
    strategy: str = ""

    @property
    def frame_count(self) -> int:
        return self.segments[-1].end_frame if self.segments else 0

    @property
    def cut_count(self) -> int:
        return max(len(self.segments) - 1, 0)

    def assignment(self) -> np.ndarray:
        out = np.empty(self.frame_count, dtype=np.int32)
        for seg in self.segments:
            out[seg.start_frame:seg.end_frame] = seg.rush_id
        return out


def segments_from_assignment(assignment: np.ndarray) -> tuple[Segment, ...]:
    segs: list[Segment] = []
    start = 0
    for t in range(1, len(assignment) + 1):
        if t == len(assignment) or assignment[t] != assignment[start]:
            segs.append(Segment(start, t, int(assignment[start])))
            start = t
    return tuple(segs)


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def unary_cost(g: float, g_floor: float = 1e-6) -> float:
    """Per-frame cost of showing a rush with gaze score g."""
    return -math.log(max(g, g_floor))


def transition_cost(p: int, q: int, lam: float) -> float:
    return 0.0 if p == q else lam


def overlap_cost_from_iou(gamma: float, params: CostParams) -> float:
    """Piecewise cut-overlap penalty: free, then linear, then prohibitive."""
    if gamma <= params.alpha:
        return 0.0
    if gamma < params.beta:
        return params.mu * gamma / params.alpha
    return params.nu

def overlap_cost(win_p, win_q, params: CostParams) -> float:
    """Overlap penalty between the outgoing and incoming windows at a cut."""
    return overlap_cost_from_iou(iou(win_p, win_q), params)


def rhythm_cost(p: int, q: int, tau: float, params: CostParams) -> float:
    """Cutting-rhythm penalty given the outgoing shot's age tau in seconds."""
    if p != q:
        return params.gamma1 * _sigmoid(params.l - tau)
    return params.gamma2 * _sigmoid(tau - params.m)


def edge_cost(state: DPState, rush_q: int, frame: int, rushes: list[Rush],
              params: CostParams) -> float:
    """Total edge cost for moving from state at frame-1 to rush_q at frame."""
    win_q = rushes[rush_q].windows[frame]
    if win_q is None:
        return math.inf
    tau = state.age / params.fps
    if state.rush == rush_q:
        return rhythm_cost(state.rush, rush_q, tau, params)
    win_p = rushes[state.rush].windows[frame - 1]
    return (params.lam + overlap_cost(win_p, win_q, params)
            + rhythm_cost(state.rush, rush_q, tau, params))


def _rect_tensor(rushes: list[Rush], T: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-frame rects (T,R,4) with NaN gaps, areas (T,R), availability (T,R)."""
    R = len(rushes)
    rects = np.full((T, R, 4), np.nan)
    areas = np.zeros((T, R))
    avail = np.zeros((T, R), dtype=bool)
    for r in rushes:
        for t, win in enumerate(r.windows):
            if win is not None:
                rects[t, r.rush_id] = win.as_rect()
                areas[t, r.rush_id] = win.area
                avail[t, r.rush_id] = True
    return rects, areas, avail


def _iou_matrix(ra: np.ndarray, rb: np.ndarray) -> np.ndarray:
    """(R,4) x (R,4) -> (R,R) IoU; NaN rows come out 0."""
    iw = (np.minimum(ra[:, None, 2], rb[None, :, 2])
          - np.maximum(ra[:, None, 0], rb[None, :, 0])).clip(min=0.0)
    ih = (np.minimum(ra[:, None, 3], rb[None, :, 3])
          - np.maximum(ra[:, None, 1], rb[None, :, 1])).clip(min=0.0)
    inter = iw * ih
    area_a = ((ra[:, 2] - ra[:, 0]) * (ra[:, 3] - ra[:, 1]))[:, None]
    area_b = ((rb[:, 2] - rb[:, 0]) * (rb[:, 3] - rb[:, 1]))[None, :]
    with np.errstate(invalid="ignore"):
        out = inter / (area_a + area_b - inter)
    return np.nan_to_num(out, nan=0.0)


def _overlap_matrix(gamma: np.ndarray, params: CostParams) -> np.ndarray:
    return np.where(gamma <= params.alpha, 0.0,
                    np.where(gamma < params.beta, params.mu * gamma / params.alpha, params.nu))


def _lexi_best(cost: np.ndarray, cuts: np.ndarray, area: np.ndarray) -> int | None:
    """Index minimizing (cost, cuts, area, index); None if everything is inf."""
    m = cost.min()
    if not np.isfinite(m):
        return None
    idx = np.flatnonzero(cost == m)
    if len(idx) > 1:
        idx = idx[cuts[idx] == cuts[idx].min()]
        if len(idx) > 1:
            idx = idx[area[idx] == area[idx].min()]
    return int(idx[0])


def _unary_matrix(potentials: GazePotentialTable, avail: np.ndarray,
                  params: CostParams) -> np.ndarray:
    u = -np.log(np.maximum(potentials.values, params.g_floor))
    return np.where(avail, u, np.inf)


def optimize(potentials: GazePotentialTable, rushes: list[Rush],
             params: CostParams) -> EditDecisionList:
    """Exact minimum-cost shot sequence via DP over (rush, age) states.

    The first establish_secs are pinned to the master rush as an
    establishing view and excluded from the objective; the edge leaving that
    segment is charged, so the opening cut obeys the overlap and rhythm
    rules like any other.
    """
    params.validate()
    T = potentials.frame_count
    R = len(rushes)
    if any(len(r.windows) != T for r in rushes):
        raise ValueError("rushes and potential table disagree on frame count")
    E = params.establish_frames()
    D = params.age_cap_frames()
    fps = params.fps

    master = next((r.rush_id for r in rushes if r.is_master), None)
    if E > 0 and master is None:
        raise ValueError("establishing segment requires a master rush")
    if E >= T:
        segs = (Segment(0, T, master),)
        return EditDecisionList(segs, 0.0, _empty_breakdown(), strategy="gazed")

    rects, areas, avail = _rect_tensor(rushes, T)
    U = _unary_matrix(potentials, avail, params)

    ages = np.arange(1, D + 1)
    tau = ages / fps
    with np.errstate(over="ignore"):
        rc_vec = params.gamma1 / (1.0 + np.exp(-(params.l - tau)))
        rs_vec = params.gamma2 / (1.0 + np.exp(-(tau - params.m)))

    INF = np.inf
    cost = np.full((R, D), INF)
    cuts = np.zeros((R, D), dtype=np.int64)
    area = np.zeros((R, D))

    start = E if E > 0 else 0
    if np.isinf(U[start]).all():
        raise InfeasibleEditError(start)
    if E > 0:
        d_est = min(E, D)           # master's age entering the first optimized frame
        tau_est = d_est / fps
        g0 = _iou_matrix(rects[E - 1, master:master + 1], rects[E])[0]
        o0 = _overlap_matrix(g0, params)
        for q in range(R):
            if not avail[E, q]:
                continue
            if q == master:
                a = min(E + 1, D)
                cost[q, a - 1] = rhythm_cost(q, q, tau_est, params) + U[E, q]
                cuts[q, a - 1] = 0
            else:
                cost[q, 0] = (params.lam + o0[q]
                              + rhythm_cost(master, q, tau_est, params) + U[E, q])
                cuts[q, 0] = 1
            area[q, int(min(E + 1, D)) - 1 if q == master else 0] = areas[E, q]
    else:
        for q in range(R):
            if avail[0, q]:
                cost[q, 0] = U[0, q]
                area[q, 0] = areas[0, q]

    # backpointers per frame: cut entries and the saturated-age stay choice
    bp_cut_rush = np.zeros((T, R), dtype=np.int32)
    bp_cut_age = np.zeros((T, R), dtype=np.int32)
    bp_sat_stay = np.zeros((T, R), dtype=bool)

    for t in range(start + 1, T):
        gamma = _iou_matrix(rects[t - 1], rects[t])
        O = _overlap_matrix(gamma, params)

        # best cut-out candidate per source rush, over all ages
        cand = cost + rc_vec[None, :]
        src_age = np.argmin(cand, axis=1)
        src_cost = cand[np.arange(R), src_age]
        ties = (cand == src_cost[:, None]).sum(axis=1)
        for p in np.flatnonzero((ties > 1) & np.isfinite(src_cost)):
            j = _lexi_best(cand[p], cuts[p], area[p])
            src_age[p] = j
            src_cost[p] = cand[p, j]
        src_cuts = cuts[np.arange(R), src_age]
        src_area = area[np.arange(R), src_age]

        new_cost = np.full((R, D), INF)
        new_cuts = np.zeros((R, D), dtype=np.int64)
        new_area = np.zeros((R, D))

        # stays: age a-1 at t-1 -> age a at t
        new_cost[:, 1:] = cost[:, :-1] + rs_vec[None, :-1]
        new_cuts[:, 1:] = cuts[:, :-1]
        new_area[:, 1:] = area[:, :-1]
        # saturation: staying at the age cap
        sat = cost[:, D - 1] + rs_vec[D - 1]
        for q in range(R):
            a, b = new_cost[q, D - 1], sat[q]
            take_sat = b < a or (b == a and np.isfinite(b) and (
                cuts[q, D - 1] < new_cuts[q, D - 1]
                or (cuts[q, D - 1] == new_cuts[q, D - 1] and area[q, D - 1] < new_area[q, D - 1])))
            if take_sat:
                new_cost[q, D - 1] = b
                new_cuts[q, D - 1] = cuts[q, D - 1]
                new_area[q, D - 1] = area[q, D - 1]
                bp_sat_stay[t, q] = True

        # cuts: any other rush at any age -> age 1
        for q in range(R):
            if not avail[t, q]:
                new_cost[q] = INF
                continue
            enter = src_cost + params.lam + O[:, q]
            enter[q] = INF
            p = _lexi_best(enter, src_cuts, src_area)
            if p is not None:
                new_cost[q, 0] = enter[p]
                new_cuts[q, 0] = src_cuts[p] + 1
                new_area[q, 0] = src_area[p]
                bp_cut_rush[t, q] = p
                bp_cut_age[t, q] = src_age[p] + 1
            new_cost[q] += U[t, q]
            new_area[q] += areas[t, q]
        unavailable = ~avail[t]
        new_cost[unavailable] = INF

        if not np.isfinite(new_cost).any():
            raise InfeasibleEditError(t)
        cost, cuts, area = new_cost, new_cuts, new_area

    flat = _lexi_best(cost.ravel(), cuts.ravel(), area.ravel())
    if flat is None:
        raise InfeasibleEditError(T - 1)
    q, a = divmod(flat, D)

    assignment = np.empty(T, dtype=np.int32)
    assignment[:start] = master if master is not None else 0
    t = T - 1
    while t >= start:
        assignment[t] = q
        if t == start:
            break
        if a == 0:
            q, a = int(bp_cut_rush[t, q]), int(bp_cut_age[t, q]) - 1
        elif a == D - 1 and bp_sat_stay[t, q]:
            pass    # stayed at the cap
        else:
            a -= 1
        t -= 1

    breakdown = score_assignment(assignment, potentials, rushes, params)
    return EditDecisionList(segments_from_assignment(assignment), breakdown["total"],
                            breakdown, strategy="gazed")


def _empty_breakdown() -> dict[str, float]:
    return {"unary": 0.0, "transition": 0.0, "overlap": 0.0,
            "rhythm_cut": 0.0, "rhythm_stay": 0.0, "total": 0.0}


def score_assignment(assignment: np.ndarray, potentials: GazePotentialTable,
                     rushes: list[Rush], params: CostParams,
                     age_cap_frames: int | None = None) -> dict[str, float]:
    """Re-score a frame assignment with the standalone cost terms.

    Uses the same conventions as the optimizer: the establishing prefix is
    excluded from the unary sum, edges are charged from the first optimized
    frame on, and shot ages saturate at the configured cap (pass None to
    keep the optimizer's cap, or math.inf via a huge cap for exact ages).
    """
    T = len(assignment)
    E = min(params.establish_frames(), T)
    D = age_cap_frames if age_cap_frames is not None else params.age_cap_frames()
    out = _empty_breakdown()

    age = 0
    for t in range(T):
        r = int(assignment[t])
        win = rushes[r].windows[t]
        if win is None:
            raise ValueError(f"assignment uses unavailable rush {r} at frame {t}")
        if t == 0:
            age = 1
        else:
            p = int(assignment[t - 1])
            tau = min(age, D) / params.fps
            if t >= E:      # edges are charged from the first optimized frame on
                if p == r:
                    out["rhythm_stay"] += rhythm_cost(p, r, tau, params)
                else:
                    out["transition"] += params.lam
                    out["overlap"] += overlap_cost(rushes[p].windows[t - 1], win, params)
                    out["rhythm_cut"] += rhythm_cost(p, r, tau, params)
            age = age + 1 if p == r else 1
        if t >= E:
            out["unary"] += unary_cost(potentials.values[t, r], params.g_floor)
    out["total"] = (out["unary"] + out["transition"] + out["overlap"]
                    + out["rhythm_cut"] + out["rhythm_stay"])
    return out


def brute_force_optimize(potentials: GazePotentialTable, rushes: list[Rush],
                         params: CostParams, limit: int = 10 ** 7) -> EditDecisionList:
    """Exhaustive-enumeration reference optimizer for small instances.

    Scores every feasible shot sequence with exact (uncapped) shot ages and
    returns the minimum, breaking ties like the DP. Refuses instances whose
    sequence count exceeds the limit.
    """
    params.validate()
    T = potentials.frame_count
    R = len(rushes)
    E = params.establish_frames()
    Topt = T - E
    if Topt <= 0:
        master = next(r.rush_id for r in rushes if r.is_master)
        return EditDecisionList((Segment(0, T, master),), 0.0, _empty_breakdown(),
                                strategy="brute")
    if R ** Topt > limit:
        raise ValueError(f"{R}^{Topt} sequences exceed the enumeration limit {limit}")

    master = next((r.rush_id for r in rushes if r.is_master), None)
    if E > 0 and master is None:
        raise ValueError("establishing segment requires a master rush")
    for t in range(E, T):
        if not any(r.available(t) for r in rushes):
            raise InfeasibleEditError(t)

    rects, areas, avail = _rect_tensor(rushes, T)
    U = _unary_matrix(potentials, avail, params)
    overlap = [_overlap_matrix(_iou_matrix(rects[t - 1], rects[t]), params)
               for t in range(T)]

    total = R ** Topt
    powers = R ** np.arange(Topt - 1, -1, -1, dtype=np.int64)
    chunk = 1 << 18
    best: tuple[float, int, float, np.ndarray] | None = None

    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        seqs = (idx[:, None] // powers[None, :]) % R
        feasible = np.ones(len(idx), dtype=bool)
        for j in range(Topt):
            feasible &= avail[E + j, seqs[:, j]]
        seqs = seqs[feasible]
        if len(seqs) == 0:
            continue
        N = len(seqs)

        cost = np.zeros(N)
        cut_counts = np.zeros(N, dtype=np.int64)
        area_sum = np.zeros(N)
        age = np.full(N, float(E if E > 0 else 1))
        for j in range(Topt):
            t = E + j
            r = seqs[:, j]
            cost += U[t, r]
            area_sum += areas[t, r]
            if j == 0 and E == 0:
                continue
            prev = seqs[:, j - 1] if j > 0 else np.full(N, master)
            tau = age / params.fps
            stay = prev == r
            with np.errstate(over="ignore"):
                r_stay = params.gamma2 / (1.0 + np.exp(-(tau - params.m)))
                r_cut = params.gamma1 / (1.0 + np.exp(-(params.l - tau)))
            cost += np.where(stay, r_stay, params.lam + overlap[t][prev, r] + r_cut)
            cut_counts += (~stay).astype(np.int64)
            age = np.where(stay, age + 1, 1.0)

        k = np.lexsort((area_sum, cut_counts, cost))[0]
        cand = (float(cost[k]), int(cut_counts[k]), float(area_sum[k]), seqs[k].copy())
        if best is None or cand[:3] < best[:3]:
            best = cand

    assert best is not None
    assignment = np.empty(T, dtype=np.int32)
    if E > 0:
        assignment[:E] = master
    assignment[E:] = best[3]

    breakdown = score_assignment(assignment, potentials, rushes, params,
                                 age_cap_frames=T + 1)
    return EditDecisionList(segments_from_assignment(assignment), breakdown["total"],
                            breakdown, strategy="brute")
