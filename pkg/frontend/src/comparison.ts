/**
 * Side-by-side comparison of factual and counterfactual clips.
 *
 * One card per run: the factual strip on top, one strip per sample below,
 * and a single scrubber that keeps every strip on the same frame index.
 * Numbers on the badges come straight from the run status; nothing is
 * computed here beyond picking which decoded frame to paint.
 */

import type { DecodedFrame } from './ppm.js';
import { decodePpm } from './ppm.js';
import type { ApiClient } from './api.js';
import type { RunStatus, SampleStatus } from './types.js';

export interface RunFrames {
  factual: DecodedFrame[];
  samples: DecodedFrame[][];
}

export interface ComparisonHandlers {
  onFork?: (sampleIndex: number) => void;
}

export interface ComparisonView {
  element: HTMLElement;
  frameCount: number;
  currentFrame: () => number;
  setFrame: (frame: number) => void;
}

/** Fetch and decode every frame of the factual clip and each sample clip. */
export async function loadRunFrames(client: ApiClient, status: RunStatus): Promise<RunFrames> {
  if (status.factual === null) {
    throw new Error(`run ${status.run_id} has no factual clip`);
  }
  const fetchClip = async (framesUrl: string, count: number) => {
    const frames: DecodedFrame[] = [];
    for (let t = 0; t < count; t++) {
      frames.push(decodePpm(await client.fetchFrame(framesUrl, t)));
    }
    return frames;
  };
  const factual = await fetchClip(status.factual.frames_url, status.factual.frames);
  const samples = await Promise.all(
    status.samples.map((s) => fetchClip(s.frames_url, s.frames)),
  );
  return { factual, samples };
}

function paint(canvas: HTMLCanvasElement, frame: DecodedFrame): void {
  const ctx = canvas.getContext('2d');
  if (ctx === null) return; // headless test environments have no 2d context
  const image = ctx.createImageData(frame.width, frame.height);
  image.data.set(frame.rgba);
  ctx.putImageData(image, 0, 0);
}

interface Strip {
  canvas: HTMLCanvasElement;
  frames: DecodedFrame[];
}

function buildStrip(
  label: string,
  frames: DecodedFrame[],
  sample: SampleStatus | null,
  handlers: ComparisonHandlers,
): { element: HTMLElement; strip: Strip } {
  const root = document.createElement('div');
  root.className = 'strip';
  root.dataset.role = sample === null ? 'factual' : 'sample';
  if (sample !== null) {
    root.dataset.index = String(sample.index);
  }

  const head = document.createElement('div');
  head.className = 'strip-head';
  const name = document.createElement('span');
  name.className = 'strip-label';
  name.textContent = label;
  head.appendChild(name);

  if (sample !== null) {
    for (const [metric, value] of [
      ['iou', sample.metrics.grounding_iou],
      ['success', sample.metrics.intervention_success],
    ] as const) {
      const badge = document.createElement('span');
      badge.className = 'badge';
      badge.dataset.metric = metric;
      badge.textContent = `${metric} ${value.toFixed(3)}`;
      head.appendChild(badge);
    }
    const fork = document.createElement('button');
    fork.className = 'fork';
    fork.type = 'button';
    fork.textContent = 'fork';
    fork.addEventListener('click', () => handlers.onFork?.(sample.index));
    head.appendChild(fork);
  }

  const canvas = document.createElement('canvas');
  canvas.width = frames[0]?.width ?? 0;
  canvas.height = frames[0]?.height ?? 0;
  canvas.dataset.frame = '0';
  root.appendChild(head);
  root.appendChild(canvas);
  return { element: root, strip: { canvas, frames } };
}

/**
 * Render a completed run. Strip lengths must equal the frame counts the
 * status reports; a mismatch means the caller fetched the wrong clip.
 */
export function renderComparison(
  status: RunStatus,
  frames: RunFrames,
  handlers: ComparisonHandlers = {},
): ComparisonView {
  if (status.status !== 'complete' || status.factual === null) {
    throw new Error(`run ${status.run_id} is not complete`);
  }
  if (frames.factual.length !== status.factual.frames) {
    throw new Error(
      `factual strip has ${frames.factual.length} frames, status says ${status.factual.frames}`,
    );
  }
  if (frames.samples.length !== status.samples.length) {
    throw new Error(
      `got ${frames.samples.length} sample strips for ${status.samples.length} samples`,
    );
  }
  status.samples.forEach((sample, i) => {
    if (frames.samples[i].length !== sample.frames) {
      throw new Error(
        `sample ${sample.index} strip has ${frames.samples[i].length} frames, status says ${sample.frames}`,
      );
    }
  });

  const root = document.createElement('section');
  root.className = 'run-card';
  root.dataset.runId = status.run_id;

  const title = document.createElement('header');
  title.className = 'run-title';
  title.textContent = `run ${status.run_id}: ${status.intervention ?? ''}`;
  root.appendChild(title);

  const strips: Strip[] = [];
  const factual = buildStrip('factual', frames.factual, null, handlers);
  strips.push(factual.strip);
  root.appendChild(factual.element);
  status.samples.forEach((sample, i) => {
    const built = buildStrip(`sample ${sample.index}`, frames.samples[i], sample, handlers);
    strips.push(built.strip);
    root.appendChild(built.element);
  });

  const frameCount = Math.max(frames.factual.length, ...frames.samples.map((s) => s.length));
  let current = 0;

  const controls = document.createElement('div');
  controls.className = 'scrub-row';
  const scrubber = document.createElement('input');
  scrubber.type = 'range';
  scrubber.className = 'scrubber';
  scrubber.min = '0';
  scrubber.max = String(Math.max(frameCount - 1, 0));
  scrubber.step = '1';
  scrubber.value = '0';
  const counter = document.createElement('span');
  counter.className = 'frame-counter';
  controls.appendChild(scrubber);
  controls.appendChild(counter);
  root.appendChild(controls);

  function setFrame(frame: number): void {
    current = Math.min(Math.max(frame, 0), frameCount - 1);
    for (const strip of strips) {
      const index = Math.min(current, strip.frames.length - 1);
      paint(strip.canvas, strip.frames[index]);
      strip.canvas.dataset.frame = String(index);
    }
    scrubber.value = String(current);
    counter.textContent = `frame ${current} / ${frameCount - 1}`;
  }

  scrubber.addEventListener('input', () => setFrame(parseInt(scrubber.value, 10)));
  setFrame(0);

  return {
    element: root,
    frameCount,
    currentFrame: () => current,
    setFrame,
  };
}

/**
 * Card for a run that is not (or not yet) renderable: pending and running
 * runs show their stage, failed runs show the stage error.
 */
export function renderRunState(status: RunStatus): HTMLElement {
  const root = document.createElement('section');
  root.className = 'run-card';
  root.dataset.runId = status.run_id;

  const title = document.createElement('header');
  title.className = 'run-title';
  title.textContent = `run ${status.run_id}: ${status.intervention ?? ''}`;
  root.appendChild(title);

  if (status.status === 'failed' && status.error !== null) {
    const card = document.createElement('div');
    card.className = 'error-card';
    const stage = document.createElement('span');
    stage.className = 'error-stage';
    stage.textContent = status.error.stage ?? 'run';
    const code = document.createElement('span');
    code.className = 'error-code';
    code.textContent = status.error.code;
    const message = document.createElement('p');
    message.className = 'error-message';
    message.textContent = status.error.message;
    card.appendChild(stage);
    card.appendChild(code);
    card.appendChild(message);
    root.appendChild(card);
  } else {
    const line = document.createElement('p');
    line.className = 'status-line';
    line.textContent = status.stage === null ? status.status : `${status.status}: ${status.stage}`;
    root.appendChild(line);
  }
  return root;
}
