// Pure view-model layer: everything here is plain data in, plain data out,
// so the timeline logic is testable without a DOM or a running service.
//
// Frames are the source of truth throughout; pixels are derived for drawing
// and snapped back to exact frame boundaries on interaction.

import type {
  EditRequest, EditResponse, EditSegment, EditStats, PotentialsPayload,
  ProjectInfo, Strategy,
} from './types';

export interface Lane {
  rushId: number;
  label: string;
  scale: string;
  subsetSize: number;
}

export interface HeatmapLane {
  rushId: number;
  columns: number[];     // served potential values, one per heatmap column
  peak: number;          // per-lane max, used only to scale the color ramp
}

export interface TimelineViewModel {
  frames: number;
  lanes: Lane[];
  heatFrames: number[];          // frame index of each heatmap column
  heatmap: HeatmapLane[];
  segments: EditSegment[];       // active EDL path
  cutFrames: number[];           // first frame of every segment after a cut
  pinned: EditSegment[] | null;  // comparison slot
  playhead: number;
}

export function buildLanes(project: ProjectInfo): Lane[] {
  return project.rushes.map((r) => ({
    rushId: r.rush_id,
    label: r.scale === 'MASTER' ? 'MASTER' : `${r.label} · ${r.scale}`,
    scale: r.scale,
    subsetSize: r.subset.length,
  }));
}

export function buildHeatmap(potentials: PotentialsPayload): HeatmapLane[] {
  return potentials.rushes.map((r) => ({
    rushId: r.rush_id,
    columns: r.values,
    peak: r.values.reduce((a, b) => Math.max(a, b), 0) || 1,
  }));
}

export function cutFrames(segments: EditSegment[]): number[] {
  return segments.slice(1).map((s) => s.start_frame);
}

export function buildViewModel(
  project: ProjectInfo,
  potentials: PotentialsPayload,
  edit: EditResponse | null,
  pinned: EditResponse | null,
  playhead: number,
): TimelineViewModel {
  const segments = edit ? edit.edl.segments : [];
  return {
    frames: project.frames,
    lanes: buildLanes(project),
    heatFrames: potentials.frames,
    heatmap: buildHeatmap(potentials),
    segments,
    cutFrames: cutFrames(segments),
    pinned: pinned ? pinned.edl.segments : null,
    playhead: clampFrame(playhead, project.frames),
  };
}

export function clampFrame(frame: number, total: number): number {
  return Math.min(Math.max(Math.round(frame), 0), total - 1);
}

// --- frame <-> pixel -------------------------------------------------------

export function frameToPx(frame: number, totalFrames: number, width: number): number {
  return (frame / totalFrames) * width;
}

export function pxToFrame(px: number, totalFrames: number, width: number): number {
  return clampFrame((px / width) * totalFrames, totalFrames);
}

/** Snap a pixel position to the nearest exact segment boundary frame. */
export function snapPxToBoundary(
  px: number, segments: EditSegment[], totalFrames: number, width: number,
): number | null {
  let best: number | null = null;
  let bestDist = Infinity;
  for (const seg of segments) {
    for (const frame of [seg.start_frame, seg.end_frame]) {
      const dist = Math.abs(frameToPx(frame, totalFrames, width) - px);
      if (dist < bestDist) {
        bestDist = dist;
        best = frame;
      }
    }
  }
  return best;
}

/** Rush shown at a frame, or null outside every segment. */
export function rushAtFrame(segments: EditSegment[], frame: number): number | null {
  for (const seg of segments) {
    if (frame >= seg.start_frame && frame < seg.end_frame) return seg.rush_id;
  }
  return null;
}

// --- badges ----------------------------------------------------------------

export interface Badges {
  cuts: number;
  meanShotSecs: string;
  jumpCuts: number;
  objective: string;
}

/** Badge values come straight from the served stats payload. */
export function badgesFromStats(stats: EditStats): Badges {
  const total = stats.cost?.total;
  return {
    cuts: stats.cut_count,
    meanShotSecs: stats.mean_shot_secs.toFixed(2),
    jumpCuts: stats.jump_cut_count,
    objective: total === undefined || total === null ? '–' : total.toFixed(1),
  };
}

// --- request management ----------------------------------------------------

/**
 * Serializes edit requests: only one in flight, and responses that were
 * superseded while traveling are discarded.
 */
export class RequestSequencer {
  private counter = 0;
  private inFlight: number | null = null;

  begin(): number {
    this.counter += 1;
    this.inFlight = this.counter;
    return this.counter;
  }

  /** True when this response belongs to the newest request. */
  settle(id: number): boolean {
    if (id !== this.counter) return false;
    this.inFlight = null;
    return true;
  }

  get busy(): boolean {
    return this.inFlight !== null;
  }
}

// --- client-side parameter validation ---------------------------------------

export interface ParamValues {
  strategy: Strategy;
  m: number;
  l: number;
  lambda: number;
  seed: number;
}

export function validateParams(p: ParamValues): Record<string, string> {
  const errors: Record<string, string> = {};
  if (!(p.m > 0)) errors.m = 'target shot length must be positive';
  if (!(p.l > 0)) errors.l = 'minimum cut interval must be positive';
  if (p.l >= p.m) errors.l = 'minimum cut interval should stay below the target length';
  if (!(p.lambda >= 0)) errors.lambda = 'transition cost cannot be negative';
  if (!Number.isInteger(p.seed) || p.seed < 0) errors.seed = 'seed must be a non-negative integer';
  return errors;
}

export function toEditRequest(p: ParamValues): EditRequest {
  const body: EditRequest = { strategy: p.strategy, m: p.m, l: p.l, lambda: p.lambda };
  if (p.strategy === 'random') body.seed = p.seed;
  return body;
}
