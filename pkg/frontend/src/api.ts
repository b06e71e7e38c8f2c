/**
 * Typed client for the benchmarking API.
 *
 * Every failure body is {code, message}; non-2xx responses become ApiError
 * so callers can branch on status without re-parsing. The fetch function is
 * injectable for tests.
 */

export interface TargetView {
  name: string;
  address: string;
  vcpus: number;
  memory_mib: number;
  status: string;
}

export interface RankingRow {
  target: string;
  score: number;
  rank: number;
}

export interface RunTargetView {
  name: string;
  state: string;
  duration_s?: number;
}

export interface RunStatusView {
  run_id: string;
  started: string;
  elapsed_s: number;
  finished: boolean;
  targets: RunTargetView[];
  error?: { code: string; message: string };
}

export interface RankingRequest {
  weights: { g1: number; g2: number; g3: number; g4: number };
  method: 'native' | 'hybrid';
  mem_mb: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private fetchImpl: FetchLike = (...args) => fetch(...args),
    private base = '',
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      let code = 'HttpError';
      let message = `${response.status}`;
      try {
        const body = await response.json();
        if (body && typeof body.code === 'string') code = body.code;
        if (body && typeof body.message === 'string') message = body.message;
      } catch {
        // non-JSON error body; keep the status fallback
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  targets(): Promise<TargetView[]> {
    return this.request('/api/targets');
  }

  rankings(req: RankingRequest, signal?: AbortSignal): Promise<RankingRow[]> {
    return this.request('/api/rankings', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(req),
      signal,
    });
  }

  launchRun(memMb: number, cpuCores: number): Promise<{ run_id: string }> {
    return this.request('/api/runs', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ mem_mb: memMb, cpu_cores: cpuCores }),
    });
  }

  runStatus(runId: string): Promise<RunStatusView> {
    return this.request(`/api/runs/${encodeURIComponent(runId)}`);
  }
}
