/**
 * Form state to run request composition.
 *
 * The composed body matches the POST /runs contract exactly; the body
 * schema has no backend field, so the routing flag produced for free-text
 * queries rides alongside the body for display, never inside it.
 */

import { checkIntervention } from './dsl.js';
import type { RunConfigPatch, RunRequestBody } from './types.js';

export interface RunFormState {
  scenarioId?: string;
  videoId?: string;
  intervention: string;
  horizon?: number;
  samples?: number;
  seed?: number;
  epsilon?: number;
  threshold?: number;
  fps?: number;
  scale?: number;
}

export type ComposedRun =
  | { ok: true; body: RunRequestBody; backend: 'deterministic' | 'llm' }
  | { ok: false; errors: string[] };

const PATCH_KEYS = [
  'horizon',
  'samples',
  'seed',
  'epsilon',
  'threshold',
  'fps',
  'scale',
] as const;

const INTEGER_KEYS = ['horizon', 'samples', 'seed', 'fps', 'scale'] as const;

function configErrors(form: RunFormState): string[] {
  const errors: string[] = [];
  for (const key of PATCH_KEYS) {
    const value = form[key];
    if (value === undefined) continue;
    if (typeof value !== 'number' || !Number.isFinite(value)) {
      errors.push(`${key} must be a number`);
      continue;
    }
    if ((INTEGER_KEYS as readonly string[]).includes(key) && !Number.isInteger(value)) {
      errors.push(`${key} must be an integer`);
    }
  }
  return errors;
}

function configPatch(form: RunFormState): RunConfigPatch | undefined {
  const patch: RunConfigPatch = {};
  let any = false;
  for (const key of PATCH_KEYS) {
    const value = form[key];
    if (value !== undefined) {
      patch[key] = value;
      any = true;
    }
  }
  return any ? patch : undefined;
}

/**
 * Validate form state and build the POST /runs body, or collect inline
 * errors. No request leaves the page unless this returns ok.
 */
export function composeRunRequest(form: RunFormState): ComposedRun {
  const errors: string[] = [];

  const hasScenario = typeof form.scenarioId === 'string' && form.scenarioId !== '';
  const hasVideo = typeof form.videoId === 'string' && form.videoId !== '';
  if (hasScenario === hasVideo) {
    errors.push('choose exactly one source: a scenario or an uploaded video');
  }

  let backend: 'deterministic' | 'llm' = 'deterministic';
  if (form.intervention.trim() === '') {
    errors.push('intervention text is required');
  } else {
    const check = checkIntervention(form.intervention);
    if (check.outcome === 'error') {
      errors.push(`intervention: ${check.message} (at offset ${check.offset})`);
    } else if (check.outcome === 'free-text') {
      backend = 'llm';
    }
  }

  errors.push(...configErrors(form));
  if (errors.length > 0) {
    return { ok: false, errors };
  }

  const body: RunRequestBody = { intervention: form.intervention };
  if (hasScenario) {
    body.scenario_id = form.scenarioId;
  } else {
    body.video_id = form.videoId;
  }
  const patch = configPatch(form);
  if (patch !== undefined) {
    body.config = patch;
  }
  return { ok: true, body, backend };
}
