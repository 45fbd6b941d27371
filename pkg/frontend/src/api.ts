// Typed client for the game service HTTP API. The client never computes
// scores itself: every number it shows came from the server.

export interface ProblemInfo {
  problem_id: string;
  lower: number[];
  upper: number[];
}

export interface ClickEventData {
  click_index: number;
  x: number[];
  score: number;
  cum_score: number;
  ts: number;
}

export interface CurrentProblem {
  problem_id: string;
  problem_index: number;
  lower: number[];
  upper: number[];
  clicks: ClickEventData[];
  clicks_used: number;
  remaining_shots: number;
  target_score?: number; // present in mode 2 only
}

export interface ProblemSummary {
  problem_id: string;
  clicks_used: number;
  best_score: number | null; // the player's own best so far, server-computed
}

export interface SessionSnapshot {
  session_id: string;
  player_id: string;
  mode: number;
  budget: number;
  problem_ids: string[];
  status: 'active' | 'finished';
  current: CurrentProblem | null;
  problems: ProblemSummary[];
}

export interface ClickResponse {
  session_id: string;
  problem_id: string;
  click: ClickEventData;
  remaining_shots: number;
  problem_done: boolean;
  status: 'active' | 'finished';
  next_problem_id?: string;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = 'ApiError';
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let resp: Response;
  try {
    resp = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, `network failure: ${String(err)}`);
  }
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = (await resp.json()) as { detail?: unknown };
      if (body.detail !== undefined) detail = JSON.stringify(body.detail);
    } catch {
      // keep statusText
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class GameApi {
  constructor(private readonly baseUrl: string = '') {}

  createSession(playerId: string, mode: number): Promise<SessionSnapshot> {
    return request<SessionSnapshot>(`${this.baseUrl}/sessions`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ player_id: playerId, mode }),
    });
  }

  getSession(sessionId: string): Promise<SessionSnapshot> {
    return request<SessionSnapshot>(`${this.baseUrl}/sessions/${sessionId}`);
  }

  submitClick(sessionId: string, x1: number, x2: number): Promise<ClickResponse> {
    return request<ClickResponse>(`${this.baseUrl}/sessions/${sessionId}/clicks`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ x1, x2 }),
    });
  }

  listProblems(): Promise<ProblemInfo[]> {
    return request<ProblemInfo[]>(`${this.baseUrl}/problems`);
  }
}
