/**
 * The review session: wires the API client to the view state.
 *
 * Every action is optimistic: the UI advances immediately and the PUT
 * settles in the background. A stale-revision conflict refetches the
 * record, restores the server truth, and surfaces a banner; a transport
 * failure queues the edit for retry and keeps a visible count so nothing
 * is dropped silently. Rejected edits roll the view back to the frame.
 */

import type { ApiClient } from './api.js';
import type {
  BboxPx,
  Difficulty,
  EditAction,
  EditBody,
  FrameLabelResponse,
  LabelRecordJson,
} from './types.js';
import * as state from './state.js';
import type { ViewState } from './state.js';

export interface Banner {
  level: 'info' | 'warn' | 'error';
  text: string;
}

export interface ControllerHooks {
  onState?: (s: ViewState) => void;
  onRecord?: (frameId: string, response: FrameLabelResponse) => void;
  onBanner?: (banner: Banner | null) => void;
  onStatsDirty?: () => void;
}

interface PendingEdit {
  frameId: string;
  body: EditBody;
}

export class ReviewController {
  state: ViewState = state.initialState();
  /** server responses by frame id; the single source of displayed truth */
  cache = new Map<string, FrameLabelResponse>();
  pendingEdits: PendingEdit[] = [];

  constructor(
    private api: ApiClient,
    public editor: string,
    private hooks: ControllerHooks = {},
  ) {}

  private emitState(): void {
    this.hooks.onState?.(this.state);
  }

  private banner(b: Banner | null): void {
    this.hooks.onBanner?.(b);
  }

  async loadSequence(sequenceId: string): Promise<void> {
    const [frames, queue] = await Promise.all([
      this.api.sequenceFrames(sequenceId),
      this.api.queue(),
    ]);
    this.state = state.setFrames(
      this.state,
      frames,
      queue.map((q) => q.frame),
    );
    if (this.state.cursor < 0 && state.visibleFrames(this.state).length > 0) {
      this.state = { ...this.state, cursor: 0 };
    }
    this.emitState();
    const current = state.currentFrame(this.state);
    if (current) await this.fetchRecord(current.frame);
  }

  async fetchRecord(frameId: string): Promise<FrameLabelResponse> {
    const response = await this.api.label(frameId);
    this.cache.set(frameId, response);
    this.hooks.onRecord?.(frameId, response);
    return response;
  }

  currentFrameId(): string | null {
    return state.currentFrame(this.state)?.frame ?? null;
  }

  currentRecord(): LabelRecordJson | null {
    const id = this.currentFrameId();
    if (id === null) return null;
    return this.cache.get(id)?.record ?? null;
  }

  async goto(delta: number): Promise<void> {
    this.state = state.step(this.state, delta);
    this.emitState();
    const id = this.currentFrameId();
    if (id !== null && !this.cache.has(id)) await this.fetchRecord(id);
  }

  async gotoFrame(frameId: string): Promise<void> {
    this.state = state.jumpTo(this.state, frameId);
    this.emitState();
    if (!this.cache.has(frameId)) await this.fetchRecord(frameId);
  }

  async gotoNextQueued(): Promise<void> {
    const next = state.nextQueued(this.state);
    if (next === null) {
      this.banner({ level: 'info', text: 'review queue is empty' });
      return;
    }
    await this.gotoFrame(next);
  }

  /** accept: confirm the label as-is (editor recorded) and advance */
  accept(): Promise<void> {
    return this.edit({ action: 'confirm' }, { advance: true });
  }

  /** commit a dragged box; frames without a record get a hand-placed one */
  commitBox(bbox: BboxPx): Promise<void> {
    const hasRecord = this.currentRecord() !== null;
    const action: EditAction = hasRecord ? 'adjust' : 'replace';
    return this.edit({ action, bbox }, { advance: true });
  }

  /** reject: no object visible in this frame */
  reject(): Promise<void> {
    return this.edit({ action: 'no_object' }, { advance: true });
  }

  /** tag difficulty without advancing (stay for further edits) */
  tagDifficulty(level: Difficulty): Promise<void> {
    return this.edit({ action: 'difficulty', difficulty: level }, { advance: false });
  }

  private async edit(
    partial: { action: EditAction; bbox?: BboxPx; difficulty?: Difficulty },
    opts: { advance: boolean },
  ): Promise<void> {
    const frameId = this.currentFrameId();
    if (frameId === null) return;
    const cached = this.cache.get(frameId);
    const body: EditBody = {
      ...partial,
      editor: this.editor,
      revision: cached?.record?.revision ?? null,
    };
    if (opts.advance) {
      this.state = state.step(this.state, 1);
      this.emitState();
      const nextId = this.currentFrameId();
      if (nextId !== null && !this.cache.has(nextId)) void this.fetchRecord(nextId);
    }
    await this.send(frameId, body, opts.advance);
  }

  private async send(frameId: string, body: EditBody, advanced: boolean): Promise<void> {
    const result = await this.api.putLabel(frameId, body);
    switch (result.kind) {
      case 'ok': {
        const cached = this.cache.get(frameId);
        this.cache.set(frameId, {
          frame: frameId,
          record: result.record,
          frame_info: cached?.frame_info ?? null,
          queue: null,
        });
        this.state = state.applyRecordUpdate(
          this.state,
          frameId,
          result.record.status,
          result.record.difficulty,
          result.record.revision,
        );
        this.emitState();
        this.hooks.onRecord?.(frameId, this.cache.get(frameId)!);
        this.hooks.onStatsDirty?.();
        return;
      }
      case 'conflict': {
        await this.fetchRecord(frameId);
        this.banner({
          level: 'warn',
          text: `frame ${frameId} changed in another session; showing the latest label`,
        });
        if (advanced) {
          this.state = state.jumpTo(this.state, frameId);
          this.emitState();
        }
        return;
      }
      case 'rejected': {
        await this.fetchRecord(frameId);
        this.banner({ level: 'error', text: `edit rejected: ${result.detail}` });
        if (advanced) {
          this.state = state.jumpTo(this.state, frameId);
          this.emitState();
        }
        return;
      }
      case 'network': {
        this.pendingEdits.push({ frameId, body });
        this.banner({
          level: 'warn',
          text: `offline: ${this.pendingEdits.length} edit(s) queued, will retry`,
        });
        return;
      }
    }
  }

  /** Retry queued edits in order; stops at the first edit still failing. */
  async retryPending(): Promise<void> {
    while (this.pendingEdits.length > 0) {
      const { frameId, body } = this.pendingEdits[0];
      const result = await this.api.putLabel(frameId, body);
      if (result.kind === 'network') return;
      this.pendingEdits.shift();
      if (result.kind === 'ok') {
        const cached = this.cache.get(frameId);
        this.cache.set(frameId, {
          frame: frameId,
          record: result.record,
          frame_info: cached?.frame_info ?? null,
          queue: null,
        });
        this.state = state.applyRecordUpdate(
          this.state,
          frameId,
          result.record.status,
          result.record.difficulty,
          result.record.revision,
        );
        this.hooks.onStatsDirty?.();
      } else if (result.kind === 'conflict' || result.kind === 'rejected') {
        await this.fetchRecord(frameId);
        this.banner({
          level: 'warn',
          text: `queued edit on ${frameId} superseded (${result.kind}); label refetched`,
        });
      }
    }
    this.emitState();
    this.banner(this.pendingEdits.length === 0 ? null : {
      level: 'warn',
      text: `offline: ${this.pendingEdits.length} edit(s) queued, will retry`,
    });
  }
}
