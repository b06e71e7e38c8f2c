import { describe, expect, it } from 'vitest';

import { escapeHtml, renderBanner, renderRanking, renderRunStatus, renderTargets } from '../src/render.js';
import { applyRanking, initialState } from '../src/state.js';

const target = (name: string, status: string) => ({
  name,
  address: '198.51.100.1',
  vcpus: 4,
  memory_mib: 8192,
  status,
});

describe('targets table', () => {
  it('badges Available and Missing', () => {
    const html = renderTargets([target('a', 'Available'), target('b', 'Missing')], false);
    expect(html).toContain('badge available');
    expect(html).toContain('badge missing');
    expect(html).toContain('<td>a</td>');
  });

  it('escapes hostile names', () => {
    const html = renderTargets([target('<img src=x>', 'Missing')], false);
    expect(html).not.toContain('<img');
    expect(html).toContain('&lt;img src=x&gt;');
  });
});

describe('offline banner', () => {
  it('renders only while offline and keeps the stale table', () => {
    expect(renderBanner(false)).toBe('');
    expect(renderBanner(true)).toContain('last known data');
    // stale rows still render alongside the banner
    expect(renderTargets([target('a', 'Available')], true)).toContain('<td>a</td>');
  });
});

describe('ranking table', () => {
  const rows = [
    { target: 'fast', score: 2.5, rank: 1 },
    { target: 'slow', score: -2.5, rank: 2 },
  ];

  it('renders rows in API order with 4-decimal scores', () => {
    const html = renderRanking(applyRanking(initialState(), rows));
    expect(html.indexOf('fast')).toBeLessThan(html.indexOf('slow'));
    expect(html).toContain('2.5000');
    expect(html).toContain('-2.5000');
  });

  it('highlights rows whose rank moved since the previous response', () => {
    let state = applyRanking(initialState(), rows);
    state = applyRanking(state, [
      { target: 'slow', score: 2.0, rank: 1 },
      { target: 'fast', score: 1.0, rank: 2 },
    ]);
    const html = renderRanking(state);
    expect(html.match(/class="changed"/g)).toHaveLength(2);
  });

  it('identical responses highlight nothing', () => {
    let state = applyRanking(initialState(), rows);
    state = applyRanking(state, rows);
    expect(renderRanking(state)).not.toContain('changed');
  });

  it('shows the inline message instead of a table', () => {
    const state = { ...initialState(), rankingMessage: 'need historic data for hybrid' };
    const html = renderRanking(state);
    expect(html).toContain('need historic data for hybrid');
    expect(html).not.toContain('<table>');
  });
});

describe('run status pane', () => {
  it('renders per-target states and durations', () => {
    const html = renderRunStatus(
      {
        run_id: 'r-1',
        started: '2026-03-01T08:00:00Z',
        elapsed_s: 3.21,
        finished: false,
        targets: [
          { name: 'a', state: 'Succeeded', duration_s: 1.234 },
          { name: 'b', state: 'Running' },
          { name: 'c', state: 'Pending' },
        ],
      },
      null,
    );
    expect(html).toContain('in progress');
    expect(html).toContain('1.234s');
    expect(html).toContain('state running');
    expect(html).toContain('state pending');
  });

  it('reports a finished run with its error if any', () => {
    const base = {
      run_id: 'r-2',
      started: 't',
      elapsed_s: 9.5,
      finished: true,
      targets: [],
    };
    expect(renderRunStatus(base, null)).toContain('finished in 9.5s');
    expect(
      renderRunStatus({ ...base, error: { code: 'AllTargetsFailed', message: 'all 3 failed' } }, null),
    ).toContain('failed: all 3 failed');
  });

  it('shows the launch rejection message', () => {
    expect(renderRunStatus(null, 'run already in progress')).toContain('run already in progress');
  });
});

describe('escapeHtml', () => {
  it('covers the four specials', () => {
    expect(escapeHtml('<a href="x">&</a>')).toBe('&lt;a href=&quot;x&quot;&gt;&amp;&lt;/a&gt;');
  });
});
