// Typed client for the agent service API. The base URL is configurable so
// the page can be served from anywhere (enable CORS on the service).

export interface UtteranceResult {
  session_id: string;
  turn_index: number;
  text: string;
  state_top: string;
  state_sub: string | null;
  component: string;
  suggestion: string | null;
  latency_ms: number;
}

export interface RatingResult {
  session_id: string;
  turn_count: number;
  rating: number | null;
  feedback: string | null;
}

export interface LogTurn {
  turn_index: number;
  user_text: string;
  response_text: string;
  component: string;
  suggestion: string | null;
}

export interface SessionLog {
  session_id: string;
  turns: LogTurn[];
  rating: number | null;
  feedback: string | null;
  finalized: boolean;
}

export class ApiError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!response.ok) {
    throw new ApiError(`${init?.method ?? "GET"} ${url} -> ${response.status}`, response.status);
  }
  return (await response.json()) as T;
}

export class AgentApi {
  constructor(readonly baseUrl: string) {}

  createSession(): Promise<{ session_id: string }> {
    return request(`${this.baseUrl}/sessions`, { method: "POST" });
  }

  sendUtterance(sessionId: string, text: string): Promise<UtteranceResult> {
    return request(`${this.baseUrl}/sessions/${sessionId}/utterances`, {
      method: "POST",
      body: JSON.stringify({ text }),
    });
  }

  rateSession(sessionId: string, rating: number, feedback?: string): Promise<RatingResult> {
    return request(`${this.baseUrl}/sessions/${sessionId}/rating`, {
      method: "POST",
      body: JSON.stringify({ rating, feedback: feedback || null }),
    });
  }

  fetchLog(sessionId: string): Promise<SessionLog> {
    return request(`${this.baseUrl}/sessions/${sessionId}/log`);
  }

  health(): Promise<{ status: string }> {
    return request(`${this.baseUrl}/health`);
  }
}
