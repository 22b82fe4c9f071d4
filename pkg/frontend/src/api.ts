/**
 * Typed client for the review-service API.
 *
 * PUT results are discriminated so callers can react to stale-revision
 * conflicts (refetch + retry) separately from transport failures
 * (queue the edit, never drop it silently).
 */

import type {
  ContextResponse,
  EditBody,
  FrameEntryJson,
  FrameLabelResponse,
  LabelRecordJson,
  QueueItemJson,
  SequenceSummaryJson,
  StatsJson,
} from './types.js';

export type PutResult =
  | { kind: 'ok'; record: LabelRecordJson }
  | { kind: 'conflict'; currentRevision: number; detail: string }
  | { kind: 'rejected'; status: number; detail: string }
  | { kind: 'network'; error: string };

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private baseUrl: string,
    private token: string | null = null,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/$/, '');
  }

  private headers(json = false): Record<string, string> {
    const h: Record<string, string> = {};
    if (json) h['Content-Type'] = 'application/json';
    if (this.token !== null) h['X-Annotate-Token'] = this.token;
    return h;
  }

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchImpl(this.baseUrl + path, { headers: this.headers() });
    if (!resp.ok) {
      throw new Error(`GET ${path} failed: ${resp.status}`);
    }
    return (await resp.json()) as T;
  }

  sequences(): Promise<SequenceSummaryJson[]> {
    return this.getJson('/sequences');
  }

  sequenceFrames(sequenceId: string, status?: string): Promise<FrameEntryJson[]> {
    const q = status ? `?status=${encodeURIComponent(status)}` : '';
    return this.getJson(`/sequences/${encodeURIComponent(sequenceId)}/frames${q}`);
  }

  label(frameId: string): Promise<FrameLabelResponse> {
    return this.getJson(`/frames/${encodeURIComponent(frameId)}/label`);
  }

  context(frameId: string, n: number): Promise<ContextResponse> {
    return this.getJson(`/frames/${encodeURIComponent(frameId)}/context?n=${n}`);
  }

  queue(includeDone = false): Promise<QueueItemJson[]> {
    return this.getJson(`/queue${includeDone ? '?all=true' : ''}`);
  }

  stats(background?: string): Promise<StatsJson> {
    const q = background ? `?background=${encodeURIComponent(background)}` : '';
    return this.getJson(`/stats${q}`);
  }

  imageUrl(frameId: string): string {
    return `${this.baseUrl}/frames/${encodeURIComponent(frameId)}/image`;
  }

  maskUrl(frameId: string): string {
    return `${this.baseUrl}/frames/${encodeURIComponent(frameId)}/mask`;
  }

  async putLabel(frameId: string, body: EditBody): Promise<PutResult> {
    let resp: Response;
    try {
      resp = await this.fetchImpl(
        `${this.baseUrl}/frames/${encodeURIComponent(frameId)}/label`,
        { method: 'PUT', headers: this.headers(true), body: JSON.stringify(body) },
      );
    } catch (err) {
      return { kind: 'network', error: String(err) };
    }
    if (resp.status === 409) {
      const payload = (await resp.json()) as { detail: string; current_revision: number };
      return {
        kind: 'conflict',
        currentRevision: payload.current_revision,
        detail: payload.detail,
      };
    }
    if (!resp.ok) {
      let detail = `HTTP ${resp.status}`;
      try {
        detail = ((await resp.json()) as { detail?: string }).detail ?? detail;
      } catch {
        // non-JSON error body; keep the status line
      }
      return { kind: 'rejected', status: resp.status, detail };
    }
    return { kind: 'ok', record: (await resp.json()) as LabelRecordJson };
  }
}
