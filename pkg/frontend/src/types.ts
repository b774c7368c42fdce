// Payload shapes of the editing service API.

export interface ActorInfo {
  id: number;
  label: string;
}

export interface RushInfo {
  rush_id: number;
  subset: number[];
  label: string;
  scale: string;
}

export interface ProjectInfo {
  width: number;
  height: number;
  fps: number;
  frames: number;
  duration_secs: number;
  establish_frames: number;
  actors: ActorInfo[];
  rushes: RushInfo[];
  has_speakers: boolean;
  has_frames: boolean;
}

export interface PotentialsPayload {
  stride: number;
  frames: number[];
  rushes: { rush_id: number; label: string; values: number[] }[];
}

// window rect as [x, y, w, h] in master pixels, null where unavailable
export type WindowRect = [number, number, number, number] | null;

export interface WindowsPayload {
  stride: number;
  frames: number[];
  rushes: { rush_id: number; windows: WindowRect[] }[];
}

export interface BoxesPayload {
  stride: number;
  frames: number[];
  actors: { actor_id: number; label: string; boxes: WindowRect[] }[];
}

export interface EditSegment {
  start_frame: number;
  end_frame: number;
  rush_id: number;
}

export interface EditStats {
  cut_count: number;
  mean_shot_secs: number;
  min_shot_secs: number;
  max_shot_secs: number;
  shot_size_hist: Record<string, number>;
  jump_cut_count: number;
  cost: Record<string, number>;
  short_segments: number[];
}

export interface EditResponse {
  strategy: string;
  seed: number;
  config: Record<string, unknown>;
  edl: {
    strategy: string;
    segments: EditSegment[];
    total_cost: number | null;
    cost_breakdown: Record<string, number>;
  };
  stats: EditStats;
}

export type Strategy = 'gazed' | 'random' | 'wide' | 'greedy' | 'speaker';

export interface EditRequest {
  strategy: Strategy;
  seed?: number;
  // CostParams overrides, a subset of:
  lambda?: number;
  l?: number;
  m?: number;
  [key: string]: unknown;
}

export interface FieldErrors {
  errors: Record<string, string>;
  frame?: number;
}
