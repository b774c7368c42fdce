// Stage schematic: the master frame as a neutral background with actor boxes
// and rush windows drawn at the playhead. Works without any video assets;
// when the service exposes frame thumbnails they are drawn underneath.

import type { BoxesPayload, ProjectInfo, WindowsPayload, WindowRect } from './types';
import { rushAtFrame } from './viewmodel';
import type { EditSegment } from './types';

const RUSH_COLORS = ['#4fc3f7', '#ffd54f', '#aed581', '#f48fb1', '#ce93d8',
  '#80cbc4', '#ffab91', '#b0bec5'];

export function rushColor(rushId: number): string {
  return RUSH_COLORS[rushId % RUSH_COLORS.length];
}

function columnFor(frames: number[], frame: number): number {
  // frames is ascending and regularly strided; nearest column
  if (frames.length === 0) return 0;
  const stride = frames.length > 1 ? frames[1] - frames[0] : 1;
  return Math.min(Math.max(Math.round(frame / stride), 0), frames.length - 1);
}

export interface StageData {
  project: ProjectInfo;
  windows: WindowsPayload;
  boxes: BoxesPayload;
  thumbs: boolean;
}

export function drawStage(
  canvas: HTMLCanvasElement,
  data: StageData,
  segments: EditSegment[],
  playhead: number,
  thumb: HTMLImageElement | null,
): void {
  const ctx = canvas.getContext('2d');
  if (!ctx) return;
  const { project } = data;
  const sx = canvas.width / project.width;
  const sy = canvas.height / project.height;

  ctx.fillStyle = '#14181c';
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  if (thumb && thumb.complete && thumb.naturalWidth > 0) {
    ctx.globalAlpha = 0.6;
    ctx.drawImage(thumb, 0, 0, canvas.width, canvas.height);
    ctx.globalAlpha = 1;
  }

  const col = columnFor(data.windows.frames, playhead);

  // actor boxes
  ctx.lineWidth = 1;
  ctx.strokeStyle = '#8a939d';
  ctx.fillStyle = '#8a939d';
  ctx.font = '11px system-ui, sans-serif';
  for (const actor of data.boxes.actors) {
    const rect: WindowRect = actor.boxes[columnFor(data.boxes.frames, playhead)];
    if (!rect) continue;
    const [x1, y1, x2, y2] = rect;
    ctx.strokeRect(x1 * sx, y1 * sy, (x2 - x1) * sx, (y2 - y1) * sy);
    ctx.fillText(actor.label, x1 * sx + 2, y1 * sy - 3);
  }

  // rush windows at the playhead; the selected rush gets a heavy outline
  const selected = rushAtFrame(segments, playhead);
  for (const rush of data.windows.rushes) {
    const rect = rush.windows[col];
    if (!rect) continue;
    const [x, y, w, h] = rect;
    const isSelected = rush.rush_id === selected;
    ctx.lineWidth = isSelected ? 3 : 1;
    ctx.strokeStyle = rushColor(rush.rush_id);
    ctx.globalAlpha = isSelected ? 1.0 : 0.45;
    ctx.strokeRect(x * sx, y * sy, w * sx, h * sy);
  }
  ctx.globalAlpha = 1;
}
