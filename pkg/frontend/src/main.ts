/**
 * Page wiring: a source picker, an intervention form with live grammar
 * feedback, and one card per run. All state lives in the DOM and the
 * service; reloading the page and re-listing runs loses nothing.
 */

import { ApiError, createApiClient } from './api.js';
import type { ApiClient } from './api.js';
import { checkIntervention } from './dsl.js';
import { composeRunRequest } from './request.js';
import type { RunFormState } from './request.js';
import { loadRunFrames, renderComparison, renderRunState } from './comparison.js';
import { forkSample } from './fork.js';
import { pollRun } from './poll.js';
import type { RunStatus } from './types.js';

export { createApiClient };

interface Controls {
  scenarioSpec: HTMLTextAreaElement;
  scenarioButton: HTMLButtonElement;
  sourceLabel: HTMLElement;
  intervention: HTMLInputElement;
  hint: HTMLElement;
  errors: HTMLElement;
  horizon: HTMLInputElement;
  samples: HTMLInputElement;
  seed: HTMLInputElement;
  runButton: HTMLButtonElement;
  cards: HTMLElement;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className: string,
  parent: HTMLElement,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  node.className = className;
  parent.appendChild(node);
  return node;
}

function buildForm(root: HTMLElement): Controls {
  const form = el('div', 'explorer-form', root);

  const sourceRow = el('div', 'row', form);
  const scenarioSpec = el('textarea', 'scenario-spec', sourceRow);
  scenarioSpec.rows = 3;
  scenarioSpec.placeholder = 'seed = 5';
  scenarioSpec.value = 'seed = 5\n';
  const scenarioButton = el('button', 'create-scenario', sourceRow);
  scenarioButton.type = 'button';
  scenarioButton.textContent = 'create scenario';
  const sourceLabel = el('span', 'source-label', sourceRow);
  sourceLabel.textContent = 'no source yet';

  const queryRow = el('div', 'row', form);
  const intervention = el('input', 'intervention', queryRow);
  intervention.type = 'text';
  intervention.placeholder = 'REMOVE id=3 AT t=0';
  const hint = el('span', 'hint', queryRow);

  const configRow = el('div', 'row', form);
  const mkNumber = (label: string, placeholder: string) => {
    const wrap = el('label', 'config-field', configRow);
    wrap.append(`${label} `);
    const input = document.createElement('input');
    input.type = 'number';
    input.placeholder = placeholder;
    wrap.appendChild(input);
    return input;
  };
  const horizon = mkNumber('horizon', '16');
  const samples = mkNumber('samples', '3');
  const seed = mkNumber('seed', '0');

  const runRow = el('div', 'row', form);
  const runButton = el('button', 'start-run', runRow);
  runButton.type = 'button';
  runButton.textContent = 'run';
  const errors = el('div', 'form-errors', form);

  const cards = el('div', 'run-cards', root);
  return {
    scenarioSpec,
    scenarioButton,
    sourceLabel,
    intervention,
    hint,
    errors,
    horizon,
    samples,
    seed,
    runButton,
    cards,
  };
}

function numberOr(input: HTMLInputElement): number | undefined {
  return input.value.trim() === '' ? undefined : Number(input.value);
}

/** Live hint under the intervention box; mirrors what the service will do. */
export function describeIntervention(text: string): string {
  const check = checkIntervention(text);
  if (check.outcome === 'error') {
    return `grammar error at offset ${check.offset}: ${check.message}`;
  }
  if (check.outcome === 'free-text') {
    return 'free text: routed to the language backend';
  }
  return `command ok: ${check.command.kind}`;
}

export interface Explorer {
  controls: Controls;
  /** Compose and, if valid, submit the current form. */
  submit: () => Promise<RunStatus | null>;
  /** The form state the next submit will compose. */
  formState: () => RunFormState;
}

export function wireExplorer(root: HTMLElement, client: ApiClient): Explorer {
  const controls = buildForm(root);
  let scenarioId: string | undefined;
  let videoId: string | undefined;

  controls.intervention.addEventListener('input', () => {
    controls.hint.textContent =
      controls.intervention.value.trim() === ''
        ? ''
        : describeIntervention(controls.intervention.value);
  });

  controls.scenarioButton.addEventListener('click', async () => {
    try {
      const created = await client.createScenario(controls.scenarioSpec.value);
      scenarioId = created.scenario_id;
      videoId = undefined;
      controls.sourceLabel.textContent = `scenario ${created.scenario_id}`;
    } catch (err) {
      controls.errors.textContent =
        err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    }
  });

  const formState = (): RunFormState => ({
    scenarioId,
    videoId,
    intervention: controls.intervention.value,
    horizon: numberOr(controls.horizon),
    samples: numberOr(controls.samples),
    seed: numberOr(controls.seed),
  });

  async function showRun(status: RunStatus): Promise<void> {
    const placeholder = renderRunState(status);
    controls.cards.prepend(placeholder);
    const final = await pollRun(client, status.run_id, {
      onUpdate: (s) => {
        if (s.status !== 'complete') {
          placeholder.replaceWith(renderRunState(s));
        }
      },
    });
    if (final.status !== 'complete') {
      placeholder.replaceWith(renderRunState(final));
      return;
    }
    const frames = await loadRunFrames(client, final);
    const view = renderComparison(final, frames, {
      onFork: async (sampleIndex) => {
        const fork = await forkSample(client, final, sampleIndex);
        videoId = fork.videoId;
        scenarioId = undefined;
        controls.sourceLabel.textContent = `video ${fork.videoId} (fork of ${final.run_id} sample ${sampleIndex})`;
        controls.intervention.value = fork.form.intervention;
      },
    });
    placeholder.replaceWith(view.element);
  }

  async function submit(): Promise<RunStatus | null> {
    controls.errors.textContent = '';
    const composed = composeRunRequest(formState());
    if (!composed.ok) {
      controls.errors.textContent = composed.errors.join('; ');
      return null;
    }
    try {
      const created = await client.startRun(composed.body);
      const status = await client.getRun(created.run_id).catch(() => null);
      const initial: RunStatus =
        status ??
        ({
          run_id: created.run_id,
          status: created.status,
          stage: null,
          intervention: composed.body.intervention,
          at_frame: null,
          horizon: null,
          fps: null,
          width: null,
          height: null,
          factual: null,
          samples: [],
          warnings: [],
          error: null,
        } as RunStatus);
      void showRun(initial);
      return initial;
    } catch (err) {
      controls.errors.textContent =
        err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
      return null;
    }
  }

  controls.runButton.addEventListener('click', () => void submit());
  return { controls, submit, formState };
}
