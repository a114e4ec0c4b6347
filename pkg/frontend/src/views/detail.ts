/** Participant detail: one participant's per-day counts and delays. */

import { ApiClient } from "../api.js";
import { renderLineChart } from "../chart.js";
import { el, table } from "../dom.js";
import { ViewState } from "../state.js";
import type { SummaryPayload } from "../types.js";

export function renderDetail(summary: SummaryPayload): HTMLElement {
  const root = el("section", { class: "view view-detail" });
  root.append(el("h2", {}, [`${summary.participant}: ${summary.start} to ${summary.end}`]));
  root.append(
    renderLineChart([
      { label: "sent", points: summary.days.map((d) => d.sent) },
      { label: "answered", points: summary.days.map((d) => d.answered), highlight: true },
      { label: "expired", points: summary.days.map((d) => d.expired) },
    ]),
  );
  const rows = summary.days.map((d) => [
    d.day,
    String(d.sent),
    String(d.answered),
    String(d.expired),
    String(d.skipped),
    Object.entries(d.sensors)
      .map(([kind, count]) => `${kind}: ${count}`)
      .join(", ") || "-",
  ]);
  root.append(table(["day", "sent", "answered", "expired", "skipped", "sensors"], rows));
  return root;
}

export async function loadDetail(api: ApiClient, state: ViewState): Promise<HTMLElement> {
  const participant = state.participant ?? state.selected[0];
  const summary = await api.summary(participant, state.start, state.end);
  return renderDetail(summary);
}
