/**
 * HTML string renderers. Pure functions of state, no DOM access, so the
 * whole visual layer is testable as plain string assertions.
 */

import { RunStatusView, TargetView } from './api.js';
import { GROUP_LABELS, UiState, changedTargets } from './state.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderBanner(offline: boolean): string {
  if (!offline) return '';
  return '<div class="banner" role="alert">backend unreachable; showing last known data</div>';
}

export function renderTargets(rows: TargetView[], offline: boolean): string {
  if (rows.length === 0 && !offline) {
    return '<p class="empty">no targets yet</p>';
  }
  const body = rows
    .map((t) => {
      const cls = t.status === 'Available' ? 'available' : 'missing';
      return (
        `<tr><td>${escapeHtml(t.name)}</td><td>${escapeHtml(t.address)}</td>` +
        `<td>${t.vcpus}</td><td>${t.memory_mib}</td>` +
        `<td><span class="badge ${cls}">${escapeHtml(t.status)}</span></td></tr>`
      );
    })
    .join('');
  return (
    '<table><thead><tr><th>target</th><th>address</th><th>vcpus</th>' +
    '<th>memory MiB</th><th>data</th></tr></thead>' +
    `<tbody>${body}</tbody></table>`
  );
}

/**
 * Ranking table in exactly the order the API returned; rows whose rank moved
 * since the previous response get the `changed` class.
 */
export function renderRanking(state: UiState): string {
  if (state.rankingMessage) {
    return `<p class="inline-error">${escapeHtml(state.rankingMessage)}</p>`;
  }
  if (state.rankingView.length === 0) {
    return '<p class="empty">adjust the sliders to rank the fleet</p>';
  }
  const moved = changedTargets(state.previousRanking, state.rankingView);
  const body = state.rankingView
    .map((row) => {
      const cls = moved.has(row.target) ? ' class="changed"' : '';
      return (
        `<tr${cls}><td>${row.rank}</td><td>${escapeHtml(row.target)}</td>` +
        `<td>${row.score.toFixed(4)}</td></tr>`
      );
    })
    .join('');
  return (
    '<table><thead><tr><th>rank</th><th>target</th><th>score</th></tr></thead>' +
    `<tbody>${body}</tbody></table>`
  );
}

export function renderRunStatus(view: RunStatusView | null, message: string | null): string {
  const note = message ? `<p class="inline-error">${escapeHtml(message)}</p>` : '';
  if (!view) {
    return note || '<p class="empty">no run yet</p>';
  }
  const rows = view.targets
    .map((t) => {
      const duration = t.duration_s !== undefined ? `${t.duration_s.toFixed(3)}s` : '';
      const cls = t.state.toLowerCase().replace(/[^a-z]/g, '');
      return (
        `<tr><td>${escapeHtml(t.name)}</td>` +
        `<td><span class="state ${cls}">${escapeHtml(t.state)}</span></td>` +
        `<td>${duration}</td></tr>`
      );
    })
    .join('');
  const headline = view.finished
    ? view.error
      ? `run ${escapeHtml(view.run_id)} failed: ${escapeHtml(view.error.message)}`
      : `run ${escapeHtml(view.run_id)} finished in ${view.elapsed_s.toFixed(1)}s`
    : `run ${escapeHtml(view.run_id)} in progress (${view.elapsed_s.toFixed(1)}s)`;
  return (
    note +
    `<p class="headline">${headline}</p>` +
    '<table><thead><tr><th>target</th><th>state</th><th>duration</th></tr></thead>' +
    `<tbody>${rows}</tbody></table>`
  );
}

export function renderWeightLabels(weights: number[]): string[] {
  return weights.map((w, i) => `${GROUP_LABELS[i]}: ${w.toFixed(1)}`);
}
