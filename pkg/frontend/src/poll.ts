/**
 * Poll a run until it reaches a terminal state (complete / failed).
 *
 * Failed runs resolve rather than reject: the caller renders the per-stage
 * error from the status body.
 */

import type { ApiClient } from './api.js';
import type { RunStatus } from './types.js';

export interface PollOptions {
  /** First wait in ms; later waits grow by `factor` up to `maxIntervalMs`. */
  intervalMs?: number;
  maxIntervalMs?: number;
  factor?: number;
  onUpdate?: (status: RunStatus) => void;
  signal?: AbortSignal;
}

const DEFAULTS = { intervalMs: 250, maxIntervalMs: 4000, factor: 1.6 };

function wait(ms: number, signal?: AbortSignal): Promise<void> {
  return new Promise((resolve, reject) => {
    const id = setTimeout(() => resolve(), ms);
    signal?.addEventListener(
      'abort',
      () => {
        clearTimeout(id);
        reject(new DOMException('polling aborted', 'AbortError'));
      },
      { once: true },
    );
  });
}

export async function pollRun(
  client: ApiClient,
  runId: string,
  options: PollOptions = {},
): Promise<RunStatus> {
  const { intervalMs, maxIntervalMs, factor } = { ...DEFAULTS, ...options };
  let delay = intervalMs;
  for (;;) {
    const status = await client.getRun(runId);
    options.onUpdate?.(status);
    if (status.status === 'complete' || status.status === 'failed') {
      return status;
    }
    await wait(delay, options.signal);
    delay = Math.min(delay * factor, maxIntervalMs);
  }
}
