import { describe, expect, it } from 'vitest';

import { ApiError } from '../src/api.js';
import {
  canSubmit,
  changedTargets,
  clampWeight,
  initialState,
  markOffline,
  rankingErrorMessage,
  runActive,
  runErrorMessage,
  setWeight,
  applyRanking,
  applyTargets,
  weightsBody,
} from '../src/state.js';

const rows = (pairs: Array<[string, number]>) =>
  pairs.map(([target, rank]) => ({ target, score: 0, rank }));

describe('weights', () => {
  it('clamps to [0, 5]', () => {
    expect(clampWeight(-3)).toBe(0);
    expect(clampWeight(7.2)).toBe(5);
    expect(clampWeight(NaN)).toBe(0);
  });

  it('snaps onto the 0.5 grid', () => {
    expect(clampWeight(2.3)).toBe(2.5);
    expect(clampWeight(2.24)).toBe(2.0);
    expect(clampWeight(4.75)).toBe(5.0);
  });

  it('setWeight replaces one slot without touching others', () => {
    const next = setWeight(initialState(), 2, 4.5);
    expect(next.weights).toEqual([1, 1, 4.5, 1]);
  });

  it('all-zero weights disable submit', () => {
    let state = initialState();
    for (const i of [0, 1, 2, 3]) state = setWeight(state, i, 0);
    expect(canSubmit(state)).toBe(false);
    expect(canSubmit(setWeight(state, 3, 0.5))).toBe(true);
  });

  it('maps slider order onto the g1..g4 request keys', () => {
    expect(weightsBody([4, 3, 5, 0])).toEqual({ g1: 4, g2: 3, g3: 5, g4: 0 });
  });
});

describe('ranking state', () => {
  it('keeps the previous table for change highlighting', () => {
    let state = applyRanking(initialState(), rows([['a', 1], ['b', 2]]));
    state = applyRanking(state, rows([['b', 1], ['a', 2]]));
    expect(state.previousRanking.map((r) => r.target)).toEqual(['a', 'b']);
    expect(state.rankingView.map((r) => r.target)).toEqual(['b', 'a']);
  });

  it('flags only targets whose rank moved', () => {
    const moved = changedTargets(
      rows([['a', 1], ['b', 2], ['c', 3]]),
      rows([['b', 1], ['a', 2], ['c', 3]]),
    );
    expect(moved).toEqual(new Set(['a', 'b']));
  });

  it('first response flags nothing', () => {
    expect(changedTargets([], rows([['a', 1]])).size).toBe(0);
  });

  it('a successful response clears the inline message', () => {
    const failed = { ...initialState(), rankingMessage: 'boom' };
    expect(applyRanking(failed, rows([['a', 1]])).rankingMessage).toBeNull();
  });
});

describe('error messages', () => {
  it('422 becomes the hybrid guidance line', () => {
    const err = new ApiError(422, 'InsufficientData', 'Historic slice is empty');
    expect(rankingErrorMessage(err)).toBe('need historic data for hybrid');
  });

  it('other API errors surface their own message', () => {
    const err = new ApiError(400, 'OutOfRange', 'weight g1 above 5');
    expect(rankingErrorMessage(err)).toBe('weight g1 above 5');
  });

  it('409 becomes the run-in-progress line', () => {
    const err = new ApiError(409, 'RunInFlight', 'run xyz is still in progress');
    expect(runErrorMessage(err)).toBe('run already in progress');
  });

  it('network-level failures get a generic line', () => {
    expect(rankingErrorMessage(new TypeError('fetch failed'))).toBe('ranking request failed');
    expect(runErrorMessage(new TypeError('fetch failed'))).toBe('could not start the run');
  });
});

describe('offline handling', () => {
  it('keeps stale data while offline', () => {
    const populated = applyTargets(initialState(), [
      { name: 'a', address: 'x', vcpus: 2, memory_mib: 1024, status: 'Available' },
    ]);
    const offline = markOffline(populated);
    expect(offline.offline).toBe(true);
    expect(offline.targetsView).toHaveLength(1);
    expect(applyTargets(offline, offline.targetsView).offline).toBe(false);
  });
});

describe('run activity', () => {
  it('only an unfinished run counts as active', () => {
    const state = initialState();
    expect(runActive(state)).toBe(false);
    const view = { run_id: 'r', started: 't', elapsed_s: 1, finished: false, targets: [] };
    expect(runActive({ ...state, runView: view })).toBe(true);
    expect(runActive({ ...state, runView: { ...view, finished: true } })).toBe(false);
  });
});
