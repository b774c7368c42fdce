// Canvas timeline: one lane per rush with its potential heatmap, the active
// edit path highlighted on top, cut markers, an optional pinned comparison
// path, and the playhead.

import type { TimelineViewModel } from './viewmodel';
import { frameToPx } from './viewmodel';

export const LANE_HEIGHT = 26;
export const LANE_GAP = 4;
export const LABEL_WIDTH = 110;
export const COMPARE_HEIGHT = 14;
export const RULER_HEIGHT = 18;

const LANE_BG = '#1d2228';
const HEAT_COLOR = '46, 160, 255';
const PATH_COLOR = '#ffb13d';
const PIN_COLOR = '#7bd88f';
const CUT_COLOR = 'rgba(255, 90, 90, 0.85)';
const PLAYHEAD_COLOR = '#ffffff';
const TEXT_COLOR = '#aab4bf';

export function timelineHeight(laneCount: number): number {
  return RULER_HEIGHT + laneCount * (LANE_HEIGHT + LANE_GAP) + COMPARE_HEIGHT + LANE_GAP;
}

function laneTop(index: number): number {
  return RULER_HEIGHT + index * (LANE_HEIGHT + LANE_GAP);
}

export function drawTimeline(canvas: HTMLCanvasElement, vm: TimelineViewModel, fps: number): void {
  const ctx = canvas.getContext('2d');
  if (!ctx) return;
  const width = canvas.width - LABEL_WIDTH;
  const px = (frame: number) => LABEL_WIDTH + frameToPx(frame, vm.frames, width);

  ctx.clearRect(0, 0, canvas.width, canvas.height);

  // second ruler
  ctx.fillStyle = TEXT_COLOR;
  ctx.font = '10px system-ui, sans-serif';
  ctx.textBaseline = 'top';
  const step = Math.max(5, Math.round(vm.frames / fps / 12 / 5) * 5);
  for (let s = 0; s * fps < vm.frames; s += step) {
    const x = px(s * fps);
    ctx.fillRect(x, RULER_HEIGHT - 5, 1, 5);
    ctx.fillText(`${s}s`, x + 2, 2);
  }

  const laneIndex = new Map<number, number>();
  vm.lanes.forEach((lane, i) => laneIndex.set(lane.rushId, i));

  // lanes with their potential heatmaps (values as served, scaled per lane)
  vm.lanes.forEach((lane, i) => {
    const top = laneTop(i);
    ctx.fillStyle = LANE_BG;
    ctx.fillRect(LABEL_WIDTH, top, width, LANE_HEIGHT);
    const heat = vm.heatmap.find((h) => h.rushId === lane.rushId);
    if (heat) {
      for (let c = 0; c < heat.columns.length; c += 1) {
        const alpha = heat.peak > 0 ? Math.min(heat.columns[c] / heat.peak, 1) : 0;
        if (alpha <= 0.01) continue;
        const x0 = px(vm.heatFrames[c]);
        const x1 = c + 1 < heat.columns.length ? px(vm.heatFrames[c + 1]) : LABEL_WIDTH + width;
        ctx.fillStyle = `rgba(${HEAT_COLOR}, ${0.12 + 0.55 * alpha})`;
        ctx.fillRect(x0, top, Math.max(x1 - x0, 1), LANE_HEIGHT);
      }
    }
    ctx.fillStyle = TEXT_COLOR;
    ctx.font = '11px system-ui, sans-serif';
    ctx.textBaseline = 'middle';
    ctx.fillText(lane.label, 6, top + LANE_HEIGHT / 2, LABEL_WIDTH - 12);
  });

  // active path: bright bars on the owning lane, frame-exact boundaries
  for (const seg of vm.segments) {
    const i = laneIndex.get(seg.rush_id);
    if (i === undefined) continue;
    const top = laneTop(i);
    const x0 = px(seg.start_frame);
    const x1 = px(seg.end_frame);
    ctx.fillStyle = PATH_COLOR;
    ctx.fillRect(x0, top + 3, Math.max(x1 - x0, 1), LANE_HEIGHT - 6);
  }

  // cut markers across all lanes
  const lanesBottom = laneTop(vm.lanes.length) - LANE_GAP;
  ctx.fillStyle = CUT_COLOR;
  for (const frame of vm.cutFrames) {
    ctx.fillRect(px(frame), RULER_HEIGHT, 1, lanesBottom - RULER_HEIGHT);
  }

  // pinned comparison strip under the lanes
  const compTop = lanesBottom + LANE_GAP;
  ctx.fillStyle = LANE_BG;
  ctx.fillRect(LABEL_WIDTH, compTop, width, COMPARE_HEIGHT);
  ctx.fillStyle = TEXT_COLOR;
  ctx.font = '10px system-ui, sans-serif';
  ctx.fillText('pinned', 6, compTop + COMPARE_HEIGHT / 2, LABEL_WIDTH - 12);
  if (vm.pinned) {
    for (const seg of vm.pinned) {
      const x0 = px(seg.start_frame);
      const x1 = px(seg.end_frame);
      ctx.fillStyle = PIN_COLOR;
      ctx.fillRect(x0, compTop + 2, Math.max(x1 - x0 - 1, 1), COMPARE_HEIGHT - 4);
    }
  }

  // playhead over everything
  ctx.fillStyle = PLAYHEAD_COLOR;
  ctx.fillRect(px(vm.playhead), 0, 1.5, compTop + COMPARE_HEIGHT);
}
