import type {
  ComparePayload,
  EvidencePayload,
  HealthPayload,
  InsightEnvelope,
  LineupPayload,
  PlayersPayload,
} from "./types";

/** Minimal response surface so tests can substitute a fixture server for
 * the real fetch. */
export interface ResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<ResponseLike>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

function errorMessage(body: unknown, status: number): string {
  if (typeof body === "object" && body !== null && "error" in body) {
    const msg = (body as { error: unknown }).error;
    if (typeof msg === "string") return msg;
  }
  return `request failed (${status})`;
}

/** Typed client for the service's /v1 endpoints. All numbers shown in the
 * UI originate from these responses. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path);
    const body = await res.json();
    if (!res.ok) throw new ApiError(res.status, errorMessage(body, res.status));
    return body as T;
  }

  private async post<T>(path: string, payload: unknown): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    const body = await res.json();
    if (!res.ok) throw new ApiError(res.status, errorMessage(body, res.status));
    return body as T;
  }

  health(): Promise<HealthPayload> {
    return this.get("/v1/health");
  }

  players(): Promise<PlayersPayload> {
    return this.get("/v1/players");
  }

  insight(playerId: string, week: number): Promise<InsightEnvelope> {
    return this.get(`/v1/players/${encodeURIComponent(playerId)}/insight?week=${week}`);
  }

  evidence(playerId: string, week: number): Promise<EvidencePayload> {
    return this.get(`/v1/players/${encodeURIComponent(playerId)}/evidence?week=${week}`);
  }

  compare(a: string, b: string, week: number): Promise<ComparePayload> {
    const qs = `a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}&week=${week}`;
    return this.get(`/v1/compare?${qs}`);
  }

  projectLineup(playerIds: string[], week: number): Promise<LineupPayload> {
    return this.post("/v1/lineup/project", { player_ids: playerIds, week });
  }
}
