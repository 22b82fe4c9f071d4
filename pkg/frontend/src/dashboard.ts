/**
 * Progress dashboard: per-status and per-difficulty counts, the
 * auto/adjusted/manual percentage split, per-background breakdown, and
 * the review-queue burn-down, all from GET /stats and GET /queue.
 */

import type { QueueItemJson, StatsJson } from './types.js';

function pct(v: number): string {
  return `${(v * 100).toFixed(1)}%`;
}

function row(label: string, value: string): string {
  return `<div class="stat-row"><span>${label}</span><b>${value}</b></div>`;
}

export function renderStats(stats: StatsJson, queueAll: QueueItemJson[]): string {
  if (stats.total === 0) {
    return '<p class="empty">no frames in the store yet — run the pipeline first</p>';
  }
  const parts: string[] = [];
  parts.push('<h3>labels</h3>');
  const p = stats.labeled_percentages;
  parts.push(row('auto', `${stats.by_status['auto'] ?? 0} (${pct(p['auto'] ?? 0)})`));
  parts.push(row('adjusted', `${stats.by_status['adjusted'] ?? 0} (${pct(p['adjusted'] ?? 0)})`));
  parts.push(row('manual', `${stats.by_status['manual'] ?? 0} (${pct(p['manual'] ?? 0)})`));
  parts.push(row('no object', String(stats.by_status['no_object'] ?? 0)));
  parts.push(row('burn-in', String(stats.by_status['burn_in_excluded'] ?? 0)));

  parts.push('<h3>difficulty</h3>');
  for (const level of ['easy', 'medium', 'hard', 'untagged']) {
    parts.push(row(level, String(stats.by_difficulty[level] ?? 0)));
  }

  const done = queueAll.filter((q) => q.state === 'done').length;
  const pending = queueAll.length - done;
  parts.push('<h3>review queue</h3>');
  parts.push(row('pending', String(pending)));
  parts.push(row('done', String(done)));
  if (queueAll.length > 0) {
    const frac = done / queueAll.length;
    parts.push(
      `<div class="burndown"><div class="burndown-fill" style="width:${pct(frac)}"></div></div>`,
    );
  }

  const backgrounds = Object.entries(stats.by_background).filter(([k]) => k !== '');
  if (backgrounds.length > 0) {
    parts.push('<h3>backgrounds</h3>');
    for (const [bg, count] of backgrounds.sort()) {
      parts.push(row(bg, String(count)));
    }
  }
  return parts.join('\n');
}

export function renderStatsError(): string {
  return '<p class="stale-badge">stats unavailable — showing stale data</p>';
}
