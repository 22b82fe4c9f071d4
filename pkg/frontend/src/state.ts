/**
 * View state: the frame listing, the active filter, the current frame,
 * and the display toggles. Pure update helpers so the navigation rules
 * are unit-testable without a DOM.
 *
 * Invariant: the current frame is always a member of the filtered set;
 * filter changes re-anchor to the nearest surviving frame.
 */

import type { Difficulty, FrameEntryJson, Status } from './types.js';
import type { Viewport } from './boxes.js';

export interface Filter {
  status: Status | 'pending' | null;
  difficulty: Difficulty | null;
  queueOnly: boolean;
}

export interface Overlays {
  box: boolean;
  score: boolean;
  mask: boolean;
}

export interface ViewState {
  frames: FrameEntryJson[];
  queuedFrames: Set<string>;
  filter: Filter;
  /** index into visibleFrames(); -1 when the filtered set is empty */
  cursor: number;
  viewport: Viewport;
  overlays: Overlays;
}

export function initialState(): ViewState {
  return {
    frames: [],
    queuedFrames: new Set(),
    filter: { status: null, difficulty: null, queueOnly: false },
    cursor: -1,
    viewport: { zoom: 1, panX: 0, panY: 0 },
    overlays: { box: true, score: false, mask: false },
  };
}

export function matchesFilter(state: ViewState, entry: FrameEntryJson): boolean {
  const f = state.filter;
  if (f.status !== null && entry.status !== f.status) return false;
  if (f.difficulty !== null && entry.difficulty !== f.difficulty) return false;
  if (f.queueOnly && !state.queuedFrames.has(entry.frame)) return false;
  return true;
}

export function visibleFrames(state: ViewState): FrameEntryJson[] {
  return state.frames.filter((e) => matchesFilter(state, e));
}

export function currentFrame(state: ViewState): FrameEntryJson | null {
  const visible = visibleFrames(state);
  if (state.cursor < 0 || state.cursor >= visible.length) return null;
  return visible[state.cursor];
}

export function setFrames(
  state: ViewState,
  frames: FrameEntryJson[],
  queued: Iterable<string>,
): ViewState {
  const next = { ...state, frames, queuedFrames: new Set(queued) };
  const visible = visibleFrames(next);
  next.cursor = visible.length > 0 ? Math.min(Math.max(state.cursor, 0), visible.length - 1) : -1;
  return next;
}

/** Change the filter, re-anchoring the cursor to the nearest visible frame. */
export function setFilter(state: ViewState, filter: Filter): ViewState {
  const current = currentFrame(state);
  const next = { ...state, filter };
  const visible = visibleFrames(next);
  if (visible.length === 0) {
    next.cursor = -1;
    return next;
  }
  if (current !== null) {
    const exact = visible.findIndex((e) => e.frame === current.frame);
    if (exact >= 0) {
      next.cursor = exact;
      return next;
    }
    // nearest by frame index
    let best = 0;
    let bestDist = Infinity;
    visible.forEach((e, i) => {
      const d = Math.abs(e.frame_index - current.frame_index);
      if (d < bestDist) {
        bestDist = d;
        best = i;
      }
    });
    next.cursor = best;
    return next;
  }
  next.cursor = 0;
  return next;
}

export function step(state: ViewState, delta: number): ViewState {
  const visible = visibleFrames(state);
  if (visible.length === 0) return state;
  const cursor = Math.min(Math.max(state.cursor + delta, 0), visible.length - 1);
  return { ...state, cursor };
}

export function jumpTo(state: ViewState, frameId: string): ViewState {
  const visible = visibleFrames(state);
  const idx = visible.findIndex((e) => e.frame === frameId);
  if (idx < 0) return state;
  return { ...state, cursor: idx };
}

/** First pending queue frame after the cursor, wrapping around. */
export function nextQueued(state: ViewState): string | null {
  const visible = visibleFrames(state);
  if (visible.length === 0) return null;
  for (let offset = 1; offset <= visible.length; offset++) {
    const entry = visible[(state.cursor + offset) % visible.length];
    if (state.queuedFrames.has(entry.frame)) return entry.frame;
  }
  return null;
}

/** Patch one frame's listing entry after a successful edit. */
export function applyRecordUpdate(
  state: ViewState,
  frameId: string,
  status: Status,
  difficulty: Difficulty | null,
  revision: number,
): ViewState {
  const frames = state.frames.map((e) =>
    e.frame === frameId ? { ...e, status, difficulty, revision } : e,
  );
  const queuedFrames = new Set(state.queuedFrames);
  queuedFrames.delete(frameId);
  return { ...state, frames, queuedFrames };
}

export function toggleOverlay(state: ViewState, key: keyof Overlays): ViewState {
  return { ...state, overlays: { ...state.overlays, [key]: !state.overlays[key] } };
}
