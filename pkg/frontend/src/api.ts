/** Typed client for the service API. All state of record lives server-side;
 * every mutation round-trips and views re-render from fresh payloads. */

import type {
  ActionDoc,
  Alert,
  ApiError,
  ComparePayload,
  Envelope,
  GoalProgress,
  RankEntry,
  SummaryPayload,
} from "./types.js";

export class ApiFailure extends Error {
  constructor(
    public status: number,
    public body: ApiError | null,
  ) {
    super(body?.message ?? `request failed with ${status}`);
  }
}

export class ApiClient {
  constructor(
    private base: string,
    private token: string,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
      body: body !== undefined ? JSON.stringify(body) : undefined,
    });
    if (!response.ok) {
      let parsed: ApiError | null = null;
      try {
        parsed = (await response.json()) as ApiError;
      } catch {
        parsed = null;
      }
      throw new ApiFailure(response.status, parsed);
    }
    const envelope = (await response.json()) as Envelope<T>;
    return envelope.data;
  }

  compare(ids: string[], start: string, end: string, metric = "answered"): Promise<ComparePayload> {
    const params = new URLSearchParams({ ids: ids.join(","), start, end, metric });
    return this.request("GET", `/dashboard/compare?${params}`);
  }

  summary(participant: string, start: string, end: string): Promise<SummaryPayload> {
    const params = new URLSearchParams({ participant, start, end });
    return this.request("GET", `/dashboard/summary?${params}`);
  }

  rank(start: string, end: string, order: "most" | "least", limit?: number): Promise<RankEntry[]> {
    const params = new URLSearchParams({ start, end, order });
    if (limit !== undefined) params.set("limit", String(limit));
    return this.request("GET", `/dashboard/rank?${params}`);
  }

  alerts(participant?: string): Promise<Alert[]> {
    const params = new URLSearchParams();
    if (participant) params.set("participant", participant);
    const suffix = params.size ? `?${params}` : "";
    return this.request("GET", `/alerts${suffix}`);
  }

  tasks(participant: string, now?: string): Promise<ActionDoc[]> {
    const params = new URLSearchParams();
    if (now) params.set("now", now);
    const suffix = params.size ? `?${params}` : "";
    return this.request("GET", `/participants/${participant}/tasks${suffix}`);
  }

  schedule(participant: string): Promise<ActionDoc[]> {
    // read-only; GET tasks would mark actions as delivered
    return this.request("GET", `/participants/${participant}/schedule`);
  }

  replan(action: string, op: "snooze" | "move" | "skip", extra: Record<string, unknown> = {}): Promise<{ action: ActionDoc }> {
    return this.request("POST", "/replan", { action, op, ...extra });
  }

  goals(participant?: string): Promise<GoalProgress[]> {
    const params = new URLSearchParams();
    if (participant) params.set("participant", participant);
    const suffix = params.size ? `?${params}` : "";
    return this.request("GET", `/goals${suffix}`);
  }

  setGoal(goal: Record<string, unknown>): Promise<{ goal: unknown }> {
    return this.request("POST", "/goals", { goal });
  }

  removeGoal(id: string): Promise<{ removed: string }> {
    return this.request("DELETE", `/goals/${id}`);
  }
}
