import { describe, expect, it } from 'vitest';

import { ApiClient, ApiError, RankingRow, RunStatusView, TargetView } from '../src/api.js';
import { RankingRequester, StatusPoller, launchRun } from '../src/controller.js';
import { UiState, applyRunStatus, initialState, setWeight } from '../src/state.js';

interface PendingRanking {
  resolve: (rows: RankingRow[]) => void;
  reject: (err: unknown) => void;
  aborted: boolean;
}

/** A rankings endpoint whose responses the test releases by hand. */
function manualRankingsApi() {
  const pending: PendingRanking[] = [];
  const api = {
    rankings: (_req: unknown, signal?: AbortSignal) =>
      new Promise<RankingRow[]>((resolve, reject) => {
        const entry: PendingRanking = { resolve, reject, aborted: false };
        signal?.addEventListener('abort', () => {
          entry.aborted = true;
          reject(new DOMException('aborted', 'AbortError'));
        });
        pending.push(entry);
      }),
  } as unknown as ApiClient;
  return { api, pending };
}

function collector() {
  const states: UiState[] = [];
  return { states, sink: (s: UiState) => states.push(s) };
}

const row = (target: string, rank: number): RankingRow => ({ target, score: 0, rank });

describe('RankingRequester', () => {
  it('ignores a stale response once a newer request exists', async () => {
    const { api, pending } = manualRankingsApi();
    const { states, sink } = collector();
    const requester = new RankingRequester(api);

    const first = requester.submit(initialState(), sink);
    const second = requester.submit(setWeight(initialState(), 0, 5), sink);
    expect(pending).toHaveLength(2);
    expect(pending[0].aborted).toBe(true);

    pending[1].resolve([row('winner', 1)]);
    await Promise.all([first, second]);

    expect(states).toHaveLength(1);
    expect(states[0].rankingView).toEqual([row('winner', 1)]);
  });

  it('applies the latest response normally', async () => {
    const { api, pending } = manualRankingsApi();
    const { states, sink } = collector();
    const submit = new RankingRequester(api).submit(initialState(), sink);
    pending[0].resolve([row('a', 1), row('b', 2)]);
    await submit;
    expect(states[0].rankingView.map((r) => r.target)).toEqual(['a', 'b']);
    expect(states[0].rankingMessage).toBeNull();
  });

  it('sends nothing when every weight is zero', async () => {
    const { api, pending } = manualRankingsApi();
    let state = initialState();
    for (const i of [0, 1, 2, 3]) state = setWeight(state, i, 0);
    await new RankingRequester(api).submit(state, () => {
      throw new Error('no state change expected');
    });
    expect(pending).toHaveLength(0);
  });

  it('surfaces the 422 hybrid message inline', async () => {
    const { api, pending } = manualRankingsApi();
    const { states, sink } = collector();
    const submit = new RankingRequester(api).submit(
      { ...initialState(), method: 'hybrid' },
      sink,
    );
    pending[0].reject(new ApiError(422, 'InsufficientData', 'Historic slice is empty'));
    await submit;
    expect(states[0].rankingMessage).toBe('need historic data for hybrid');
    expect(states[0].rankingView).toEqual([]);
  });
});

describe('StatusPoller', () => {
  const someTargets: TargetView[] = [
    { name: 'a', address: 'x', vcpus: 2, memory_mib: 2048, status: 'Available' },
  ];

  function pollerWith(api: Partial<Record<'targets' | 'runStatus', () => Promise<unknown>>>) {
    let state = initialState();
    const read = () => state;
    const sink = (next: UiState) => {
      state = next;
    };
    const poller = new StatusPoller(api as unknown as ApiClient, read, sink);
    return { poller, read, set: (next: UiState) => (state = next) };
  }

  it('marks offline on failure and keeps stale data, then recovers', async () => {
    let fail = true;
    const { poller, read, set } = pollerWith({
      targets: () => (fail ? Promise.reject(new TypeError('down')) : Promise.resolve(someTargets)),
    });
    set({ ...read(), targetsView: someTargets });

    await poller.tick();
    expect(read().offline).toBe(true);
    expect(read().targetsView).toHaveLength(1);

    fail = false;
    await poller.tick();
    expect(read().offline).toBe(false);
  });

  it('follows an active run until it finishes', async () => {
    const running: RunStatusView = {
      run_id: 'r-9',
      started: 't',
      elapsed_s: 1,
      finished: false,
      targets: [{ name: 'a', state: 'Running' }],
    };
    const finished: RunStatusView = { ...running, finished: true, elapsed_s: 2 };
    let current = running;
    const { poller, read, set } = pollerWith({
      targets: () => Promise.resolve(someTargets),
      runStatus: () => Promise.resolve(current),
    });
    set(applyRunStatus(read(), running));

    await poller.tick();
    expect(read().runView?.finished).toBe(false);

    current = finished;
    await poller.tick();
    expect(read().runView?.finished).toBe(true);
  });

  it('leaves the run view alone when no run was launched', async () => {
    const { poller, read } = pollerWith({
      targets: () => Promise.resolve(someTargets),
      runStatus: () => Promise.reject(new Error('must not be called')),
    });
    await poller.tick();
    expect(read().runView).toBeNull();
  });
});

describe('launchRun', () => {
  const view: RunStatusView = {
    run_id: 'r-1',
    started: 't',
    elapsed_s: 0,
    finished: false,
    targets: [{ name: 'a', state: 'Pending' }],
  };

  it('starts a run and shows its first status snapshot', async () => {
    const api = {
      launchRun: () => Promise.resolve({ run_id: 'r-1' }),
      runStatus: () => Promise.resolve(view),
    } as unknown as ApiClient;
    const { states, sink } = collector();
    await launchRun(api, initialState(), sink, 100, 1);
    expect(states[0].runView?.run_id).toBe('r-1');
    expect(states[0].runMessage).toBeNull();
  });

  it('shows the 409 message when a run is already going', async () => {
    const api = {
      launchRun: () => Promise.reject(new ApiError(409, 'RunInFlight', 'run r-0 is still in progress')),
    } as unknown as ApiClient;
    const { states, sink } = collector();
    await launchRun(api, initialState(), sink, 100, 1);
    expect(states[0].runMessage).toBe('run already in progress');
  });

  it('skips the request entirely while a run is active locally', async () => {
    const api = {
      launchRun: () => Promise.reject(new Error('must not be called')),
    } as unknown as ApiClient;
    const active = applyRunStatus(initialState(), view);
    await launchRun(api, active, () => {
      throw new Error('no state change expected');
    }, 100, 1);
  });
});
