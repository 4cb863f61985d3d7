/**
 * Chain a what-if: re-upload a counterfactual sample's clip as a new
 * video source so the next intervention starts from that alternative.
 *
 * The upload stream is the plain concatenation of the sample's per-frame
 * P6 fetches, byte for byte, so the service sees exactly the clip it
 * rendered.
 */

import type { ApiClient } from './api.js';
import type { RunFormState } from './request.js';
import type { RunStatus } from './types.js';
import { concatFrames } from './ppm.js';

export interface ForkResult {
  videoId: string;
  form: RunFormState;
}

export async function forkSample(
  client: ApiClient,
  status: RunStatus,
  sampleIndex: number,
): Promise<ForkResult> {
  const sample = status.samples.find((s) => s.index === sampleIndex);
  if (sample === undefined) {
    throw new Error(`run ${status.run_id} has no sample ${sampleIndex}`);
  }
  const parts: Uint8Array[] = [];
  for (let t = 0; t < sample.frames; t++) {
    parts.push(await client.fetchFrame(sample.frames_url, t));
  }
  const created = await client.uploadVideo(concatFrames(parts));
  return {
    videoId: created.video_id,
    form: {
      videoId: created.video_id,
      intervention: status.intervention ?? '',
    },
  };
}
