/**
 * Single-page state and its pure transitions.
 *
 * The UI never computes scores or ranks; rankingView always holds the most
 * recent successful /api/rankings response verbatim. Transitions return new
 * state objects so renders stay comparable.
 */

import { ApiError, RankingRow, RunStatusView, TargetView } from './api.js';

export const WEIGHT_MIN = 0;
export const WEIGHT_MAX = 5;
export const WEIGHT_STEP = 0.5;
export const MEM_SIZES = [100, 500, 1000];

export const GROUP_LABELS = [
  'memory & process',
  'local communication',
  'computation',
  'storage',
];

export type Method = 'native' | 'hybrid';
export type Weights = [number, number, number, number];

export interface UiState {
  weights: Weights;
  method: Method;
  memMb: number;
  targetsView: TargetView[];
  rankingView: RankingRow[];
  previousRanking: RankingRow[];
  runView: RunStatusView | null;
  offline: boolean;
  rankingMessage: string | null;
  runMessage: string | null;
}

export function initialState(): UiState {
  return {
    weights: [1, 1, 1, 1],
    method: 'native',
    memMb: MEM_SIZES[0],
    targetsView: [],
    rankingView: [],
    previousRanking: [],
    runView: null,
    offline: false,
    rankingMessage: null,
    runMessage: null,
  };
}

/** Clamp to [0,5] and snap onto the 0.5 slider grid. */
export function clampWeight(value: number): number {
  if (!Number.isFinite(value)) return WEIGHT_MIN;
  const snapped = Math.round(value / WEIGHT_STEP) * WEIGHT_STEP;
  return Math.min(WEIGHT_MAX, Math.max(WEIGHT_MIN, snapped));
}

export function setWeight(state: UiState, index: number, value: number): UiState {
  const weights = [...state.weights] as Weights;
  weights[index] = clampWeight(value);
  return { ...state, weights };
}

/** Submit is only allowed with at least one nonzero weight. */
export function canSubmit(state: UiState): boolean {
  return state.weights.some((w) => w > 0);
}

export function applyRanking(state: UiState, rows: RankingRow[]): UiState {
  return {
    ...state,
    previousRanking: state.rankingView,
    rankingView: rows,
    rankingMessage: null,
  };
}

export function applyTargets(state: UiState, rows: TargetView[]): UiState {
  return { ...state, targetsView: rows, offline: false };
}

export function applyRunStatus(state: UiState, view: RunStatusView): UiState {
  return { ...state, runView: view, offline: false, runMessage: null };
}

/** Fetch failure: raise the banner but keep whatever data we already had. */
export function markOffline(state: UiState): UiState {
  return { ...state, offline: true };
}

export function rankingFailed(state: UiState, err: unknown): UiState {
  return { ...state, rankingMessage: rankingErrorMessage(err) };
}

export function runLaunchFailed(state: UiState, err: unknown): UiState {
  return { ...state, runMessage: runErrorMessage(err) };
}

export function rankingErrorMessage(err: unknown): string {
  if (err instanceof ApiError && err.status === 422) {
    return 'need historic data for hybrid';
  }
  if (err instanceof ApiError) return err.message;
  return 'ranking request failed';
}

export function runErrorMessage(err: unknown): string {
  if (err instanceof ApiError && err.status === 409) {
    return 'run already in progress';
  }
  if (err instanceof ApiError) return err.message;
  return 'could not start the run';
}

/** Targets whose rank moved between two ranking responses. */
export function changedTargets(previous: RankingRow[], next: RankingRow[]): Set<string> {
  const before = new Map(previous.map((r) => [r.target, r.rank]));
  const changed = new Set<string>();
  for (const row of next) {
    const old = before.get(row.target);
    if (old !== undefined && old !== row.rank) changed.add(row.target);
  }
  return changed;
}

export function weightsBody(weights: Weights): { g1: number; g2: number; g3: number; g4: number } {
  return { g1: weights[0], g2: weights[1], g3: weights[2], g4: weights[3] };
}

/** A run keeps the status pane polling until the backend marks it finished. */
export function runActive(state: UiState): boolean {
  return state.runView !== null && !state.runView.finished;
}
