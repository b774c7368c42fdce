// Thin fetch client for the editing service. Every number the UI displays
// originates from these payloads; the client never computes scores itself.

import type {
  BoxesPayload, EditRequest, EditResponse, FieldErrors, PotentialsPayload,
  ProjectInfo, WindowsPayload,
} from './types';

export class ApiError extends Error {
  status: number;
  fields: Record<string, string>;
  frame?: number;

  constructor(status: number, fields: Record<string, string>, frame?: number) {
    super(Object.values(fields).join('; ') || `HTTP ${status}`);
    this.status = status;
    this.fields = fields;
    this.frame = frame;
  }
}

async function getJson<T>(url: string): Promise<T> {
  const resp = await fetch(url);
  if (!resp.ok) {
    throw new ApiError(resp.status, { request: `${url} failed (${resp.status})` });
  }
  return resp.json() as Promise<T>;
}

export function fetchProject(): Promise<ProjectInfo> {
  return getJson('api/project');
}

export function fetchPotentials(stride: number): Promise<PotentialsPayload> {
  return getJson(`api/potentials?stride=${stride}`);
}

export function fetchWindows(stride: number): Promise<WindowsPayload> {
  return getJson(`api/windows?stride=${stride}`);
}

export function fetchBoxes(stride: number): Promise<BoxesPayload> {
  return getJson(`api/boxes?stride=${stride}`);
}

export async function postEdit(request: EditRequest): Promise<EditResponse> {
  const resp = await fetch('api/edit', {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify(request),
  });
  if (!resp.ok) {
    let body: FieldErrors | null = null;
    try {
      body = await resp.json() as FieldErrors;
    } catch {
      // non-JSON error body; fall through to the generic message
    }
    throw new ApiError(resp.status, body?.errors ?? { request: `HTTP ${resp.status}` },
      body?.frame);
  }
  return resp.json() as Promise<EditResponse>;
}
