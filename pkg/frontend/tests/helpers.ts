/** Fixture loading and client stubs shared by the test suites. */

import { readFileSync } from 'node:fs';
import { resolve } from 'node:path';

import type { ApiClient } from '../src/api.js';
import type {
  DeleteReply,
  RunCreated,
  RunList,
  RunRequestBody,
  RunStatus,
  ScenarioCreated,
  VideoCreated,
} from '../src/types.js';

export interface Exchange<Req = unknown, Res = unknown> {
  request?: Req;
  status: number;
  response: Res;
}

export interface FixtureManifest {
  scenario: Exchange<{ spec: string }, ScenarioCreated>;
  scenario_bad: Exchange<{ spec: string }, { error: { code: string } }>;
  run_remove: {
    request: RunRequestBody;
    created: Exchange<unknown, RunCreated>;
    status: RunStatus;
  };
  run_freetext: {
    request: RunRequestBody;
    created: Exchange<unknown, RunCreated>;
    status: RunStatus;
  };
  video_upload: { stream: string; status: number; response: VideoCreated };
  errors: Record<string, Exchange<unknown, { error: { code: string; message: string } }>>;
  run_list: Exchange<unknown, RunList>;
}

export type DslCase =
  | { text: string; outcome: 'free-text' }
  | { text: string; outcome: 'error'; message: string; offset: number }
  | {
      text: string;
      outcome: 'command';
      kind: string;
      target_id: number | null;
      at_frame: number;
      duration: number | null;
      velocity: number[] | null;
      attributes: string | null;
    };

export function fixturePath(...parts: string[]): string {
  return resolve('tests/fixtures', ...parts);
}

export function fixtureJson<T>(...parts: string[]): T {
  return JSON.parse(readFileSync(fixturePath(...parts), 'utf-8')) as T;
}

export function fixtureBytes(...parts: string[]): Uint8Array {
  return new Uint8Array(readFileSync(fixturePath(...parts)));
}

export function manifest(): FixtureManifest {
  return fixtureJson<FixtureManifest>('manifest.json');
}

/** Frame bytes for the recorded run, keyed the way the service serves them. */
export function frameFetcher(status: RunStatus): (framesUrl: string, frame: number) => Uint8Array {
  const factualUrl = status.factual?.frames_url;
  const sampleUrls = new Map(status.samples.map((s) => [s.frames_url, s.index]));
  return (framesUrl, frame) => {
    if (framesUrl === factualUrl) {
      return fixtureBytes('frames', `factual_${frame}.ppm`);
    }
    const index = sampleUrls.get(framesUrl);
    if (index === undefined) {
      throw new Error(`no fixture frames for ${framesUrl}`);
    }
    return fixtureBytes('frames', `sample_${index}_${frame}.ppm`);
  };
}

export interface StubCalls {
  startRun: RunRequestBody[];
  createScenario: string[];
  uploadVideo: Uint8Array[];
  getRun: string[];
  fetchFrame: Array<[string, number]>;
}

export interface StubBehavior {
  scenario?: ScenarioCreated;
  created?: RunCreated;
  /** Statuses returned by successive getRun calls; the last one repeats. */
  statuses?: RunStatus[];
  video?: VideoCreated;
  frames?: (framesUrl: string, frame: number) => Uint8Array;
}

/** In-memory ApiClient that replays recorded fixtures and logs calls. */
export function stubClient(behavior: StubBehavior): { client: ApiClient; calls: StubCalls } {
  const calls: StubCalls = {
    startRun: [],
    createScenario: [],
    uploadVideo: [],
    getRun: [],
    fetchFrame: [],
  };
  let statusAt = 0;
  const client: ApiClient = {
    async createScenario(spec) {
      calls.createScenario.push(spec);
      if (!behavior.scenario) throw new Error('no scenario stub');
      return behavior.scenario;
    },
    async uploadVideo(stream) {
      calls.uploadVideo.push(stream);
      if (!behavior.video) throw new Error('no video stub');
      return behavior.video;
    },
    async startRun(body) {
      calls.startRun.push(body);
      if (!behavior.created) throw new Error('no run stub');
      return behavior.created;
    },
    async listRuns(): Promise<RunList> {
      return { runs: [] };
    },
    async getRun(runId) {
      calls.getRun.push(runId);
      const statuses = behavior.statuses ?? [];
      if (statuses.length === 0) throw new Error('no status stub');
      const status = statuses[Math.min(statusAt, statuses.length - 1)];
      statusAt += 1;
      return status;
    },
    async getTwin() {
      return '';
    },
    async getFactualTwin() {
      return '';
    },
    async fetchFrame(framesUrl, frame) {
      calls.fetchFrame.push([framesUrl, frame]);
      if (!behavior.frames) throw new Error('no frame stub');
      return behavior.frames(framesUrl, frame);
    },
    async deleteRun(runId): Promise<DeleteReply> {
      return { deleted: runId };
    },
  };
  return { client, calls };
}
