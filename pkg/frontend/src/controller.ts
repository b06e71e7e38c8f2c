/**
 * Request orchestration between the API client and the state transitions.
 * No DOM access here either; app.ts owns the document.
 */

import { ApiClient, RankingRow } from './api.js';
import {
  UiState,
  applyRanking,
  applyRunStatus,
  applyTargets,
  canSubmit,
  markOffline,
  rankingFailed,
  runActive,
  runLaunchFailed,
  weightsBody,
} from './state.js';

export type StateSink = (next: UiState) => void;

/**
 * One in-flight rankings request at a time, newest wins: submitting again
 * aborts the previous request, and a response is dropped unless it belongs
 * to the latest submission.
 */
export class RankingRequester {
  private generation = 0;
  private inFlight: AbortController | null = null;

  constructor(private api: ApiClient) {}

  async submit(state: UiState, sink: StateSink): Promise<void> {
    if (!canSubmit(state)) return;
    this.generation += 1;
    const mine = this.generation;
    this.inFlight?.abort();
    const controller = new AbortController();
    this.inFlight = controller;
    let rows: RankingRow[];
    try {
      rows = await this.api.rankings(
        {
          weights: weightsBody(state.weights),
          method: state.method,
          mem_mb: state.memMb,
        },
        controller.signal,
      );
    } catch (err) {
      if (mine !== this.generation) return; // a newer request took over
      if (err instanceof DOMException && err.name === 'AbortError') return;
      sink(rankingFailed(state, err));
      return;
    }
    if (mine !== this.generation) return;
    sink(applyRanking(state, rows));
  }
}

/**
 * Polls targets (and the active run, when there is one) on an interval.
 * Fetch failures raise the offline banner; data already shown is retained
 * and the next good poll clears the banner.
 */
export class StatusPoller {
  constructor(
    private api: ApiClient,
    private read: () => UiState,
    private sink: StateSink,
  ) {}

  async tick(): Promise<void> {
    let state = this.read();
    try {
      const targets = await this.api.targets();
      state = applyTargets(this.read(), targets);
      this.sink(state);
    } catch {
      this.sink(markOffline(this.read()));
      return;
    }
    const run = this.read().runView;
    if (run && !run.finished) {
      try {
        const view = await this.api.runStatus(run.run_id);
        this.sink(applyRunStatus(this.read(), view));
      } catch {
        this.sink(markOffline(this.read()));
      }
    }
  }
}

export async function launchRun(
  api: ApiClient,
  state: UiState,
  sink: StateSink,
  memMb: number,
  cpuCores: number,
): Promise<void> {
  if (runActive(state)) {
    return; // the backend would 409 anyway; skip the doomed request
  }
  try {
    const { run_id } = await api.launchRun(memMb, cpuCores);
    const view = await api.runStatus(run_id);
    sink(applyRunStatus(state, view));
  } catch (err) {
    sink(runLaunchFailed(state, err));
  }
}
