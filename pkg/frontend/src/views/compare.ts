/** Compare view: one highlighted participant against others, day by day.
 * The chart and the table below it both read the payload verbatim. */

import { ApiClient } from "../api.js";
import { renderLineChart } from "../chart.js";
import { el, table } from "../dom.js";
import { anonymizeSeries, ViewState } from "../state.js";
import type { ComparePayload } from "../types.js";

export function renderCompare(payload: ComparePayload, state: ViewState): HTMLElement {
  const root = el("section", { class: "view view-compare" });
  root.append(el("h2", {}, [`Answers per day (${payload.start} to ${payload.end})`]));

  const lines = anonymizeSeries(payload.series, state).map((s) => ({
    label: s.label,
    points: s.points,
    highlight: s.own,
  }));
  root.append(renderLineChart(lines));

  const days = Math.max(0, ...lines.map((l) => l.points.length));
  const headers = ["series", ...Array.from({ length: days }, (_, i) => `d${i}`)];
  const rows = lines.map((l) => [l.label, ...l.points.map(String)]);
  const grid = table(headers, rows, "data compare-grid");
  grid.setAttribute("data-metric", payload.metric);
  root.append(grid);
  return root;
}

export async function loadCompare(api: ApiClient, state: ViewState): Promise<HTMLElement> {
  const payload = await api.compare(state.selected, state.start, state.end);
  return renderCompare(payload, state);
}
