// Studio bootstrap: load the project overview, wire the parameter controls,
// and keep the stage schematic and timeline in sync with the playhead and
// the latest edit response.

import { ApiError, fetchBoxes, fetchPotentials, fetchProject, fetchWindows, postEdit } from './api';
import type { EditResponse, ProjectInfo, Strategy } from './types';
import { drawStage, type StageData } from './stage';
import { drawTimeline, LABEL_WIDTH, timelineHeight } from './timeline';
import {
  badgesFromStats, buildViewModel, clampFrame, pxToFrame, RequestSequencer,
  toEditRequest, validateParams, type ParamValues,
} from './viewmodel';

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

interface StudioState {
  project: ProjectInfo;
  stage: StageData;
  potentials: Awaited<ReturnType<typeof fetchPotentials>>;
  current: EditResponse | null;
  pinned: EditResponse | null;
  playhead: number;
}

const seq = new RequestSequencer();
let state: StudioState | null = null;
// comparison lane: follows the previous edit until the user pins one
let pinnedByUser = false;

function params(): ParamValues {
  return {
    strategy: ($<HTMLSelectElement>('strategy')).value as Strategy,
    m: Number(($<HTMLInputElement>('param-m')).value),
    l: Number(($<HTMLInputElement>('param-l')).value),
    lambda: Number(($<HTMLInputElement>('param-lambda')).value),
    seed: Number(($<HTMLInputElement>('param-seed')).value),
  };
}

function setFieldError(message: string | null): void {
  const el = $('param-error');
  el.textContent = message ?? '';
  el.style.display = message ? 'block' : 'none';
}

function setBanner(message: string | null): void {
  const banner = $('banner');
  banner.style.display = message ? 'flex' : 'none';
  $('banner-text').textContent = message ?? '';
}

function setBusy(busy: boolean): void {
  for (const id of ['strategy', 'param-m', 'param-l', 'param-lambda', 'param-seed', 'pin']) {
    ($<HTMLInputElement>(id)).disabled = busy;
  }
  $('spinner').style.visibility = busy ? 'visible' : 'hidden';
}

function redraw(): void {
  if (!state) return;
  const vm = buildViewModel(state.project, state.potentials, state.current,
    state.pinned, state.playhead);
  const timeline = $<HTMLCanvasElement>('timeline');
  timeline.height = timelineHeight(vm.lanes.length);
  drawTimeline(timeline, vm, state.project.fps);
  drawStage($<HTMLCanvasElement>('stage'), state.stage, vm.segments,
    state.playhead, thumbImage());

  if (state.current) {
    const b = badgesFromStats(state.current.stats);
    $('badge-cuts').textContent = `${b.cuts} cuts`;
    $('badge-mean').textContent = `${b.meanShotSecs}s mean shot`;
    $('badge-jump').textContent = `${b.jumpCuts} jump cuts`;
    $('badge-cost').textContent = `objective ${b.objective}`;
  }
  $('playhead-label').textContent =
    `frame ${state.playhead} · ${(state.playhead / state.project.fps).toFixed(2)}s`;
}

let thumb: HTMLImageElement | null = null;

function thumbImage(): HTMLImageElement | null {
  if (!state || !state.project.has_frames) return null;
  const wanted = `api/frame/${state.playhead}`;
  if (!thumb || !thumb.src.endsWith(wanted)) {
    thumb = new Image();
    thumb.src = wanted;
    thumb.onload = redraw;
  }
  return thumb;
}

async function recompute(): Promise<void> {
  if (!state) return;
  const p = params();
  const errors = validateParams(p);
  if (Object.keys(errors).length > 0) {
    setFieldError(Object.entries(errors).map(([k, v]) => `${k}: ${v}`).join('; '));
    return;
  }
  setFieldError(null);
  const reqId = seq.begin();
  setBusy(true);
  try {
    const resp = await postEdit(toEditRequest(p));
    if (!seq.settle(reqId)) return;   // superseded while in flight
    if (!pinnedByUser) state.pinned = state.current;
    state.current = resp;
    redraw();
  } catch (err) {
    if (!seq.settle(reqId)) return;
    if (err instanceof ApiError) {
      const frame = err.frame !== undefined ? ` (frame ${err.frame})` : '';
      setFieldError(`${err.message}${frame}`);
    } else {
      setBanner(`edit request failed: ${String(err)}`);
    }
  } finally {
    if (!seq.busy) setBusy(false);
  }
}

function wireControls(): void {
  for (const id of ['param-m', 'param-l', 'param-lambda']) {
    const input = $<HTMLInputElement>(id);
    const label = $(`${id}-value`);
    const update = () => { label.textContent = input.value; };
    update();
    input.addEventListener('input', update);
    input.addEventListener('change', () => { void recompute(); });
  }
  $<HTMLSelectElement>('strategy').addEventListener('change', () => {
    $('seed-row').style.display = params().strategy === 'random' ? 'flex' : 'none';
    void recompute();
  });
  $<HTMLInputElement>('param-seed').addEventListener('change', () => { void recompute(); });
  $('pin').addEventListener('click', () => {
    if (state && state.current) {
      state.pinned = state.current;
      pinnedByUser = true;
      redraw();
    }
  });

  const timeline = $<HTMLCanvasElement>('timeline');
  const scrub = (ev: MouseEvent) => {
    if (!state) return;
    const rect = timeline.getBoundingClientRect();
    const x = (ev.clientX - rect.left) * (timeline.width / rect.width) - LABEL_WIDTH;
    state.playhead = clampFrame(
      pxToFrame(x, state.project.frames, timeline.width - LABEL_WIDTH),
      state.project.frames);
    redraw();
  };
  let dragging = false;
  timeline.addEventListener('mousedown', (ev) => { dragging = true; scrub(ev); });
  window.addEventListener('mousemove', (ev) => { if (dragging) scrub(ev); });
  window.addEventListener('mouseup', () => { dragging = false; });
}

async function loadView(): Promise<void> {
  setBanner(null);
  try {
    const project = await fetchProject();
    const heatStride = Math.max(1, Math.round(project.frames / 480));
    const overlayStride = 1;    // frame-accurate overlays
    const [potentials, windows, boxes] = await Promise.all([
      fetchPotentials(heatStride),
      fetchWindows(overlayStride),
      fetchBoxes(overlayStride),
    ]);
    state = {
      project,
      potentials,
      stage: { project, windows, boxes, thumbs: project.has_frames },
      current: null,
      pinned: null,
      playhead: 0,
    };
    $('project-label').textContent =
      `${project.actors.length} actors · ${project.rushes.length} rushes · `
      + `${project.duration_secs.toFixed(0)}s @ ${project.fps} fps`;
    redraw();
    await recompute();
  } catch (err) {
    setBanner(`could not reach the editing service: ${String(err)}`);
  }
}

$('retry').addEventListener('click', () => { void loadView(); });
wireControls();
void loadView();
