/** Alerts view: open and resolved data-quality alerts. */

import { ApiClient } from "../api.js";
import { el, table } from "../dom.js";
import { ViewState } from "../state.js";
import type { Alert } from "../types.js";

export function renderAlerts(alerts: Alert[]): HTMLElement {
  const root = el("section", { class: "view view-alerts" });
  root.append(el("h2", {}, ["Alerts"]));
  if (!alerts.length) {
    root.append(el("p", { class: "empty" }, ["No alerts."]));
    return root;
  }
  const rows = alerts.map((a) => [
    el("span", { class: `severity severity-${a.severity}` }, [a.severity]),
    a.rule,
    a.participant ?? "-",
    a.message,
    a.raised_at,
    a.resolved_at ? `resolved ${a.resolved_at}` : "open",
  ]);
  root.append(table(["severity", "rule", "participant", "message", "raised", "status"], rows));
  return root;
}

export async function loadAlerts(api: ApiClient, state: ViewState): Promise<HTMLElement> {
  const alerts = await api.alerts(state.role === "participant" ? state.participant ?? undefined : undefined);
  return renderAlerts(alerts);
}
