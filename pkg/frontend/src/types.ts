/**
 * Wire types for the counterfactual run service.
 *
 * These mirror the JSON bodies the service accepts and returns; the client
 * never derives numbers of its own, it displays what these carry.
 */

export interface ScenarioCreated {
  scenario_id: string;
}

export interface VideoCreated {
  video_id: string;
  frames: number;
  width: number;
  height: number;
}

/** Per-run overrides; backend and transport settings stay server-side. */
export interface RunConfigPatch {
  horizon?: number;
  samples?: number;
  seed?: number;
  epsilon?: number;
  threshold?: number;
  fps?: number;
  scale?: number;
}

/** Body of POST /runs. Exactly one of scenario_id / video_id is set. */
export interface RunRequestBody {
  scenario_id?: string;
  video_id?: string;
  intervention: string;
  config?: RunConfigPatch;
}

export interface RunCreated {
  run_id: string;
  status: string;
}

export interface SampleMetrics {
  psnr_mean: number;
  ssim_mean: number;
  frame_coherence: number;
  grounding_iou: number;
  intervention_success: number;
}

export interface SampleStatus {
  index: number;
  provenance: string;
  frames: number;
  consistency: number;
  metrics: SampleMetrics;
  twin_url: string;
  frames_url: string;
}

export interface FactualStatus {
  frames: number;
  twin_url: string;
  frames_url: string;
}

export interface ErrorInfo {
  code: string;
  message: string;
  stage: string | null;
}

export type RunState = 'pending' | 'running' | 'complete' | 'failed';

export interface RunStatus {
  run_id: string;
  status: RunState;
  stage: string | null;
  intervention: string | null;
  at_frame: number | null;
  horizon: number | null;
  fps: number | null;
  width: number | null;
  height: number | null;
  factual: FactualStatus | null;
  samples: SampleStatus[];
  warnings: string[];
  error: ErrorInfo | null;
}

export interface RunList {
  runs: string[];
}

export interface DeleteReply {
  deleted: string;
}

export interface ErrorReply {
  error: ErrorInfo;
}
