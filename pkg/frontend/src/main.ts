/** Bootstrap: wire the API client, controller, canvas, and dashboard. */

import { ApiClient } from './api.js';
import { CanvasView } from './canvas.js';
import { renderStats, renderStatsError } from './dashboard.js';
import { KEY_HELP, actionForKey } from './keyboard.js';
import { ReviewController } from './review.js';
import * as state from './state.js';
import type { FrameLabelResponse } from './types.js';

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node as T;
}

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(
  params.get('api') ?? window.location.origin,
  params.get('token'),
);
const editor = params.get('editor') ?? 'annotator';

const canvas = new CanvasView(el<HTMLCanvasElement>('frame-canvas'));
const bannerEl = el<HTMLDivElement>('banner');
const frameLabelEl = el<HTMLDivElement>('frame-label');
const statsEl = el<HTMLDivElement>('stats');
const queueEl = el<HTMLDivElement>('queue');
const contextEl = el<HTMLDivElement>('context-strip');
const filterEl = el<HTMLSelectElement>('filter-status');
const queueOnlyEl = el<HTMLInputElement>('filter-queue-only');
const helpEl = el<HTMLDivElement>('key-help');

helpEl.innerHTML = KEY_HELP.map(
  ([key, what]) => `<div class="key-row"><kbd>${key}</kbd><span>${what}</span></div>`,
).join('');

let contextVisible = false;
let statsTimer: number | null = null;

const controller = new ReviewController(api, editor, {
  onState: () => {
    void showCurrent();
  },
  onRecord: (frameId, response) => {
    if (frameId === controller.currentFrameId()) renderRecord(response);
  },
  onBanner: (banner) => {
    if (banner === null) {
      bannerEl.className = 'banner hidden';
      bannerEl.textContent = '';
    } else {
      bannerEl.className = `banner ${banner.level}`;
      bannerEl.textContent = banner.text;
    }
  },
  onStatsDirty: () => scheduleStats(),
});

function loadImage(url: string): Promise<HTMLImageElement | null> {
  return new Promise((resolve) => {
    const img = new Image();
    img.onload = () => resolve(img);
    img.onerror = () => resolve(null);
    img.src = url;
  });
}

async function showCurrent(): Promise<void> {
  const frameId = controller.currentFrameId();
  if (frameId === null) {
    frameLabelEl.textContent = 'no frames match the filter';
    canvas.setFrame(null, null);
    return;
  }
  const cached = controller.cache.get(frameId) ?? (await controller.fetchRecord(frameId));
  renderRecord(cached);
  const image = await loadImage(api.imageUrl(frameId));
  if (controller.currentFrameId() !== frameId) return; // user moved on
  canvas.setFrame(image, cached.record);
  canvas.showBox = controller.state.overlays.box;
  canvas.showScore = controller.state.overlays.score;
  canvas.showMask = controller.state.overlays.mask;
  if (controller.state.overlays.mask) {
    canvas.setMask(await loadImage(api.maskUrl(frameId)));
  } else {
    canvas.setMask(null);
  }
  if (contextVisible) void renderContext(frameId);
}

function renderRecord(response: FrameLabelResponse): void {
  const rec = response.record;
  const queued = response.queue?.state === 'pending' ? ` — queued (${response.queue.reason})` : '';
  if (rec === null) {
    frameLabelEl.textContent = `${response.frame}: unlabeled${queued} — drag to place a box`;
  } else {
    frameLabelEl.textContent =
      `${rec.frame}: ${rec.status}` +
      (rec.difficulty ? ` [${rec.difficulty}]` : '') +
      ` rev ${rec.revision}${queued}`;
  }
}

async function renderContext(frameId: string): Promise<void> {
  const ctx = await api.context(frameId, 2);
  contextEl.classList.remove('hidden');
  contextEl.innerHTML = ctx.frames
    .map((f) => {
      const cls = f.frame === frameId ? 'ctx-frame current' : 'ctx-frame';
      const status = f.record?.status ?? 'pending';
      return `<figure class="${cls}" data-frame="${f.frame}">
        <img src="${api.imageUrl(f.frame)}" alt="${f.frame}">
        <figcaption>${f.frame.split(':')[1]} ${status}</figcaption>
      </figure>`;
    })
    .join('');
  for (const fig of contextEl.querySelectorAll<HTMLElement>('.ctx-frame')) {
    fig.addEventListener('click', () => {
      const target = fig.dataset['frame'];
      if (target) void controller.gotoFrame(target);
    });
  }
}

function scheduleStats(): void {
  if (statsTimer !== null) return;
  statsTimer = window.setTimeout(() => {
    statsTimer = null;
    void refreshStats();
  }, 250);
}

async function refreshStats(): Promise<void> {
  try {
    const [stats, queueAll, queuePending] = await Promise.all([
      api.stats(),
      api.queue(true),
      api.queue(false),
    ]);
    statsEl.innerHTML = renderStats(stats, queueAll);
    queueEl.innerHTML =
      queuePending.length === 0
        ? '<p class="empty">queue empty</p>'
        : queuePending
            .map(
              (q) =>
                `<div class="queue-row" data-frame="${q.frame}"><span>${q.frame}</span><i>${q.reason}</i></div>`,
            )
            .join('');
    for (const rowEl of queueEl.querySelectorAll<HTMLElement>('.queue-row')) {
      rowEl.addEventListener('click', () => {
        const target = rowEl.dataset['frame'];
        if (target) void controller.gotoFrame(target);
      });
    }
  } catch {
    statsEl.insertAdjacentHTML('afterbegin', renderStatsError());
  }
}

document.addEventListener('keydown', (e) => {
  if (e.target instanceof HTMLInputElement || e.target instanceof HTMLSelectElement) return;
  const action = actionForKey(e);
  if (action === null) return;
  e.preventDefault();
  switch (action.kind) {
    case 'accept': {
      const pending = canvas.pendingBox();
      if (pending !== null) void controller.commitBox(pending);
      else void controller.accept();
      break;
    }
    case 'commit-adjust': {
      const pending = canvas.pendingBox();
      if (pending !== null) void controller.commitBox(pending);
      break;
    }
    case 'cancel-adjust':
      canvas.discardEdit();
      break;
    case 'reject':
      void controller.reject();
      break;
    case 'difficulty':
      void controller.tagDifficulty(action.level);
      break;
    case 'prev':
      void controller.goto(-1);
      break;
    case 'next':
      void controller.goto(1);
      break;
    case 'next-queued':
      void controller.gotoNextQueued();
      break;
    case 'toggle-context':
      contextVisible = !contextVisible;
      if (!contextVisible) contextEl.classList.add('hidden');
      else {
        const id = controller.currentFrameId();
        if (id !== null) void renderContext(id);
      }
      break;
    case 'toggle-overlay':
      controller.state = state.toggleOverlay(controller.state, action.overlay);
      void showCurrent();
      break;
    case 'zoom':
      canvas.zoomStep(action.direction);
      break;
    case 'zoom-reset':
      canvas.resetView();
      break;
  }
});

filterEl.addEventListener('change', () => {
  const value = filterEl.value;
  controller.state = state.setFilter(controller.state, {
    ...controller.state.filter,
    status: value === '' ? null : (value as never),
  });
  void showCurrent();
});

queueOnlyEl.addEventListener('change', () => {
  controller.state = state.setFilter(controller.state, {
    ...controller.state.filter,
    queueOnly: queueOnlyEl.checked,
  });
  void showCurrent();
});

window.setInterval(() => void controller.retryPending(), 5000);

async function start(): Promise<void> {
  const sequences = await api.sequences();
  if (sequences.length === 0) {
    frameLabelEl.textContent = 'store is empty';
    statsEl.innerHTML = renderStats(
      {
        total: 0,
        by_status: {},
        by_difficulty: {},
        by_background: {},
        labeled: 0,
        labeled_percentages: {},
        queue_pending: 0,
      },
      [],
    );
    return;
  }
  await controller.loadSequence(sequences[0].sequence_id);
  await refreshStats();
  await showCurrent();
}

void start();
