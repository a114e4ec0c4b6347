/** Payload shapes of the service API (schema version 1). */

export type Role = "researcher" | "participant";

export interface Envelope<T> {
  schema_version: string;
  data: T;
}

export interface ApiError {
  schema_version: string;
  error: string;
  message: string;
  details?: Record<string, unknown>;
}

export interface ComparePayload {
  metric: string;
  start: string;
  end: string;
  series: Record<string, number[]>;
}

export interface DaySummary {
  day: string;
  sent: number;
  answered: number;
  expired: number;
  skipped: number;
  sensors: Record<string, number>;
}

export interface SummaryPayload {
  participant: string;
  start: string;
  end: string;
  days: DaySummary[];
  mean_delay_minutes: number | null;
  completion_rate: number;
  totals: { sent: number; answered: number; expired: number; skipped: number; sensors: number };
}

export interface RankEntry {
  participant: string;
  contribution: number;
}

export interface Alert {
  id: string;
  severity: "info" | "warning" | "critical";
  participant: string | null;
  rule: string;
  message: string;
  raised_at: string;
  resolved_at: string | null;
}

export interface ActionState {
  kind: "Pending" | "Notified" | "Snoozed" | "Answered" | "Expired" | "Skipped";
  at?: string;
}

export interface ActionDoc {
  id: string;
  plan: string;
  participant: string;
  template: string;
  kind: "question" | "sensor";
  due_time: string;
  validity_minutes: number;
  priority: number;
  state: ActionState;
  question_kind?: string;
  sensor_kind?: string;
}

export interface Goal {
  id: string;
  participant: string;
  metric: "answers_per_day" | "sensor_coverage" | "response_delay";
  target: number;
  window_days: number;
}

export interface GoalProgress {
  goal: Goal;
  progress: number;
  on_track: boolean;
}
