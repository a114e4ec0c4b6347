/** Overview: cohort totals plus sent/answered time series. */

import { ApiClient } from "../api.js";
import { renderLineChart } from "../chart.js";
import { el, table } from "../dom.js";
import { ViewState } from "../state.js";
import type { SummaryPayload } from "../types.js";

function sumSeries(summaries: SummaryPayload[], field: "sent" | "answered"): number[] {
  const days = Math.max(0, ...summaries.map((s) => s.days.length));
  const out = new Array(days).fill(0);
  for (const summary of summaries) {
    summary.days.forEach((d, i) => {
      out[i] += d[field];
    });
  }
  return out;
}

export function renderOverview(summaries: SummaryPayload[]): HTMLElement {
  const root = el("section", { class: "view view-overview" });
  root.append(el("h2", {}, ["Experiment progress"]));

  const sent = sumSeries(summaries, "sent");
  const answered = sumSeries(summaries, "answered");
  root.append(
    renderLineChart([
      { label: "sent", points: sent },
      { label: "answered", points: answered, highlight: true },
    ]),
  );

  const rows = summaries.map((s) => [
    s.participant,
    String(s.totals.sent),
    String(s.totals.answered),
    String(s.totals.expired),
    `${(s.completion_rate * 100).toFixed(0)}%`,
    s.mean_delay_minutes === null ? "-" : `${s.mean_delay_minutes.toFixed(1)} min`,
    String(s.totals.sensors),
  ]);
  root.append(
    table(
      ["participant", "sent", "answered", "expired", "completion", "mean delay", "sensor records"],
      rows,
    ),
  );
  return root;
}

export async function loadOverview(api: ApiClient, state: ViewState): Promise<HTMLElement> {
  // participants see their own progress; cross-participant numbers only
  // reach them through the anonymized compare view
  const ids =
    state.role === "participant" && state.participant ? [state.participant] : state.selected;
  const summaries = await Promise.all(
    ids.map((participant) => api.summary(participant, state.start, state.end)),
  );
  return renderOverview(summaries);
}
