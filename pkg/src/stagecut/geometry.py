"""Scene-domain types and primitive geometry shared by the whole engine.

All coordinates are master-frame pixels with the origin at the top-left
corner, x growing right and y growing down. Every type here is treated as
immutable value data once a scene is loaded; the operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

Point = tuple[float, float]
Rect = tuple[float, float, float, float]  # x1, y1, x2, y2


class GeometryError(ValueError):
    """Degenerate or out-of-contract geometry."""


class SceneError(ValueError):
    """Fatal scene-level inconsistency (duplicate ids, empty scene, ...)."""


@dataclass(frozen=True)
class SceneDims:
    """Master-frame size in pixels plus frame rate and length."""

    width: float
    height: float
    fps: float
    frame_count: int

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise GeometryError(f"scene size must be positive, got {self.width}x{self.height}")
        if self.fps <= 0:
            raise GeometryError(f"fps must be positive, got {self.fps}")
        if self.frame_count <= 0:
            raise GeometryError(f"frame count must be positive, got {self.frame_count}")

    @property
    def aspect(self) -> float:
        return self.width / self.height

    @property
    def size(self) -> tuple[float, float]:
        return (self.width, self.height)


@dataclass(frozen=True)
class BBox:
    """Axis-aligned actor bounding box, corners (x1, y1) top-left and (x2, y2) bottom-right."""

    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self) -> None:
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise GeometryError(f"degenerate box ({self.x1}, {self.y1}, {self.x2}, {self.y2})")

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def center(self) -> Point:
        return ((self.x1 + self.x2) / 2.0, (self.y1 + self.y2) / 2.0)

    def as_rect(self) -> Rect:
        return (self.x1, self.y1, self.x2, self.y2)


@dataclass(frozen=True)
class CropWindow:
    """Virtual-camera crop, stored as center plus size at the master aspect ratio."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self) -> None:
        if self.w <= 0 or self.h <= 0:
            raise GeometryError(f"window size must be positive, got {self.w}x{self.h}")

    @property
    def area(self) -> float:
        return self.w * self.h

    def as_rect(self) -> Rect:
        return (self.cx - self.w / 2.0, self.cy - self.h / 2.0,
                self.cx + self.w / 2.0, self.cy + self.h / 2.0)


@dataclass(frozen=True)
class ActorTrack:
    """Identity-preserving per-frame boxes for one performer; None marks a gap."""

    actor_id: int
    label: str
    boxes: tuple[BBox | None, ...]


@dataclass(frozen=True)
class GazeSample:
    """One mapped gaze point of one viewer on one frame."""

    user_id: int
    frame: int
    p: Point


def as_rect(obj: BBox | CropWindow | Rect) -> Rect:
    if isinstance(obj, (BBox, CropWindow)):
        return obj.as_rect()
    return obj


def iou(a: BBox | CropWindow | Rect, b: BBox | CropWindow | Rect) -> float:
    """Intersection-over-union of two rectangles, in [0, 1]."""
    ax1, ay1, ax2, ay2 = as_rect(a)
    bx1, by1, bx2, by2 = as_rect(b)
    area_a = (ax2 - ax1) * (ay2 - ay1)
    area_b = (bx2 - bx1) * (by2 - by1)
    if area_a <= 0 or area_b <= 0:
        raise GeometryError("iou of a zero-area rectangle is undefined")
    iw = min(ax2, bx2) - max(ax1, bx1)
    ih = min(ay2, by2) - max(ay1, by1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (area_a + area_b - inter)


def clamp(v: float, lo: float, hi: float) -> float:
    return lo if v < lo else hi if v > hi else v


def window_at(cx: float, cy: float, w: float, dims: SceneDims) -> CropWindow:
    """Build a crop window of width w centered at (cx, cy), clamped inside the master frame.

    The height is always w / aspect, so the aspect ratio is exact by
    construction. Oversized windows are shrunk, never squashed; off-frame
    windows are shifted back inside.
    """
    w = clamp(w, 1.0, dims.width)
    h = w / dims.aspect
    cx = clamp(cx, w / 2.0, dims.width - w / 2.0)
    cy = clamp(cy, h / 2.0, dims.height - h / 2.0)
    return CropWindow(cx, cy, w, h)


def full_frame_window(dims: SceneDims) -> CropWindow:
    return CropWindow(dims.width / 2.0, dims.height / 2.0, dims.width, dims.height)


def map_gaze_to_master(p: Point, display: tuple[float, float],
                       master: tuple[float, float]) -> tuple[Point, bool]:
    """Map a display-space gaze point to master pixels.

    Each axis is scaled independently and the result is clamped to the
    master bounds. Returns the mapped point and whether clamping moved it,
    so loaders can report a per-file clamped-sample count.
    """
    dw, dh = display
    mw, mh = master
    if dw <= 0 or dh <= 0 or mw <= 0 or mh <= 0:
        raise GeometryError("display and master dims must be positive")
    x = p[0] * (mw / dw)
    y = p[1] * (mh / dh)
    cx = clamp(x, 0.0, mw)
    cy = clamp(y, 0.0, mh)
    return (cx, cy), (cx != x or cy != y)


@dataclass(frozen=True)
class Issue:
    """One validation finding; fatal issues abort loading."""

    level: str  # "fatal" | "warning"
    code: str
    message: str


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)
    fill_notes: list[str] = field(default_factory=list)

    def warn(self, code: str, message: str) -> None:
        self.issues.append(Issue("warning", code, message))

    def fatal(self, code: str, message: str) -> None:
        self.issues.append(Issue("fatal", code, message))

    @property
    def fatal_issues(self) -> list[Issue]:
        return [i for i in self.issues if i.level == "fatal"]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.level == "warning"]


@dataclass(frozen=True)
class FilledTrack:
    """A track with gaps filled and a per-frame flag for genuinely tracked frames.

    Interior gaps no longer than one second are linearly interpolated and
    still count as tracked. Longer and leading/trailing gaps are held at the
    nearest real box for trajectory continuity but count as untracked, which
    makes rushes over this actor unavailable there.
    """

    actor_id: int
    label: str
    boxes: tuple[BBox | None, ...]
    tracked: tuple[bool, ...]


def _lerp_box(a: BBox, b: BBox, t: float) -> BBox:
    return BBox(a.x1 + (b.x1 - a.x1) * t, a.y1 + (b.y1 - a.y1) * t,
                a.x2 + (b.x2 - a.x2) * t, a.y2 + (b.y2 - a.y2) * t)


def gap_runs(boxes) -> list[tuple[int, int]]:
    """Contiguous missing-frame runs as inclusive (start, end) pairs."""
    runs = []
    start = None
    for t, b in enumerate(boxes):
        if b is None and start is None:
            start = t
        elif b is not None and start is not None:
            runs.append((start, t - 1))
            start = None
    if start is not None:
        runs.append((start, len(boxes) - 1))
    return runs


def fill_track_gaps(track: ActorTrack, dims: SceneDims,
                    report: ValidationReport | None = None) -> FilledTrack:
    """Fill track gaps per the engine policy and flag tracked frames."""
    T = dims.frame_count
    boxes: list[BBox | None] = list(track.boxes[:T]) + [None] * (T - len(track.boxes))
    tracked = [b is not None for b in boxes]
    if not any(tracked):
        if report is not None:
            report.warn("empty-track", f"actor={track.actor_id} has no boxes at all")
        return FilledTrack(track.actor_id, track.label, tuple(boxes), tuple(tracked))

    max_lerp = int(round(dims.fps))  # one second of frames
    for start, end in gap_runs(boxes):
        length = end - start + 1
        prev = boxes[start - 1] if start > 0 else None
        nxt = boxes[end + 1] if end + 1 < T else None
        if prev is not None and nxt is not None and length <= max_lerp:
            for t in range(start, end + 1):
                frac = (t - start + 1) / (length + 1)
                boxes[t] = _lerp_box(prev, nxt, frac)
                tracked[t] = True
            note = f"gap actor={track.actor_id} frames=[{start},{end}] filled=lerp"
        else:
            for t in range(start, end + 1):
                if prev is None:
                    boxes[t] = nxt
                elif nxt is None:
                    boxes[t] = prev
                else:
                    boxes[t] = prev if (t - start) <= (end - t) else nxt
            note = f"gap actor={track.actor_id} frames=[{start},{end}] filled=hold"
        if report is not None:
            report.warn("track-gap", f"gap actor={track.actor_id} frames=[{start},{end}]")
            report.fill_notes.append(note)
    return FilledTrack(track.actor_id, track.label, tuple(boxes), tuple(tracked))


def validate_scene(tracks: list[ActorTrack], gaze: list[GazeSample],
                   dims: SceneDims) -> ValidationReport:
    """Check a loaded scene; fatal issues mean the scene must not be used."""
    report = ValidationReport()
    seen: set[int] = set()
    for tr in tracks:
        if tr.actor_id in seen:
            report.fatal("duplicate-actor-id", f"duplicate actor id {tr.actor_id}")
        seen.add(tr.actor_id)
    if not tracks:
        report.fatal("no-actors", "scene has zero actor tracks")

    for tr in tracks:
        for t, b in enumerate(tr.boxes):
            if b is None:
                continue
            if b.x1 < 0 or b.y1 < 0 or b.x2 > dims.width or b.y2 > dims.height:
                report.warn("box-out-of-bounds",
                            f"actor={tr.actor_id} frame={t} box outside master frame")
        for start, end in gap_runs(tr.boxes):
            report.warn("track-gap", f"gap actor={tr.actor_id} frames=[{start},{end}]")

    frames_with_gaze = {s.frame for s in gaze}
    empty = [t for t in range(dims.frame_count) if t not in frames_with_gaze]
    if empty and gaze:
        report.warn("frames-without-gaze",
                    f"{len(empty)} frames have zero gaze samples (first: {empty[0]})")
    elif not gaze:
        report.warn("no-gaze", "scene has no gaze samples at all")

    for s in gaze:
        if not (0 <= s.frame < dims.frame_count):
            report.warn("gaze-frame-out-of-range",
                        f"gaze sample user={s.user_id} frame={s.frame} outside [0,{dims.frame_count})")
    return report
