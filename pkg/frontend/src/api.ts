/**
 * Typed client for the counterfactual run service.
 *
 * All JSON errors share {"error": {"code", "message", "stage"}}; non-2xx
 * replies become ApiError so callers can branch on the code.
 */

import type {
  DeleteReply,
  ErrorReply,
  RunCreated,
  RunList,
  RunRequestBody,
  RunStatus,
  ScenarioCreated,
  VideoCreated,
} from './types.js';

export class ApiError extends Error {
  status: number;
  code: string;
  stage: string | null;

  constructor(status: number, code: string, message: string, stage: string | null = null) {
    super(message);
    this.status = status;
    this.code = code;
    this.stage = stage;
  }
}

export interface ApiClient {
  createScenario(spec: string): Promise<ScenarioCreated>;
  uploadVideo(stream: Uint8Array): Promise<VideoCreated>;
  startRun(body: RunRequestBody): Promise<RunCreated>;
  listRuns(): Promise<RunList>;
  getRun(runId: string): Promise<RunStatus>;
  getTwin(runId: string, sample: number): Promise<string>;
  getFactualTwin(runId: string): Promise<string>;
  /** Raw P6 bytes of one frame, given a frames_url from a RunStatus. */
  fetchFrame(framesUrl: string, frame: number): Promise<Uint8Array>;
  deleteRun(runId: string): Promise<DeleteReply>;
}

async function toApiError(response: Response): Promise<ApiError> {
  let info: ErrorReply['error'] | null = null;
  try {
    const body = (await response.json()) as ErrorReply;
    info = body.error ?? null;
  } catch {
    // non-JSON error body; fall through to a generic error
  }
  if (info && typeof info.code === 'string') {
    return new ApiError(response.status, info.code, info.message, info.stage ?? null);
  }
  return new ApiError(response.status, 'HTTP_ERROR', `HTTP ${response.status}`);
}

export function createApiClient(baseUrl = '', token?: string): ApiClient {
  const authHeaders: Record<string, string> = token
    ? { authorization: `Bearer ${token}` }
    : {};

  async function request(path: string, init: RequestInit = {}): Promise<Response> {
    const response = await fetch(baseUrl + path, {
      ...init,
      headers: { ...authHeaders, ...(init.headers as Record<string, string> | undefined) },
    });
    if (!response.ok) {
      throw await toApiError(response);
    }
    return response;
  }

  async function requestJson<T>(path: string, init: RequestInit = {}): Promise<T> {
    const response = await request(path, init);
    return (await response.json()) as T;
  }

  return {
    createScenario(spec) {
      return requestJson<ScenarioCreated>('/scenarios', {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify({ spec }),
      });
    },

    uploadVideo(stream) {
      return requestJson<VideoCreated>('/videos', {
        method: 'POST',
        headers: { 'content-type': 'application/octet-stream' },
        body: stream as Uint8Array<ArrayBuffer>,
      });
    },

    startRun(body) {
      return requestJson<RunCreated>('/runs', {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify(body),
      });
    },

    listRuns() {
      return requestJson<RunList>('/runs');
    },

    getRun(runId) {
      return requestJson<RunStatus>(`/runs/${runId}`);
    },

    async getTwin(runId, sample) {
      const response = await request(`/runs/${runId}/twins/${sample}`);
      return response.text();
    },

    async getFactualTwin(runId) {
      const response = await request(`/runs/${runId}/factual/twin`);
      return response.text();
    },

    async fetchFrame(framesUrl, frame) {
      const response = await request(`${framesUrl}/${frame}`);
      return new Uint8Array(await response.arrayBuffer());
    },

    deleteRun(runId) {
      return requestJson<DeleteReply>(`/runs/${runId}`, { method: 'DELETE' });
    },
  };
}
