/** Rank view (researcher): least / most contributors. */

import { ApiClient } from "../api.js";
import { el, table } from "../dom.js";
import { ViewState } from "../state.js";
import type { RankEntry } from "../types.js";

export function renderRank(
  entries: RankEntry[],
  order: "most" | "least",
  onToggle: (order: "most" | "least") => void,
): HTMLElement {
  const root = el("section", { class: "view view-rank" });
  root.append(el("h2", {}, [`Contributions (${order} first)`]));
  const toggle = el("button", { class: "toggle-order" }, [
    order === "most" ? "show least" : "show most",
  ]);
  toggle.addEventListener("click", () => onToggle(order === "most" ? "least" : "most"));
  root.append(toggle);
  root.append(
    table(
      ["#", "participant", "contribution"],
      entries.map((e, i) => [String(i + 1), e.participant, e.contribution.toFixed(2)]),
      "data rank-grid",
    ),
  );
  return root;
}

export async function loadRank(
  api: ApiClient,
  state: ViewState,
  rerender: (node: HTMLElement) => void,
  order: "most" | "least" = "most",
): Promise<HTMLElement> {
  const onToggle = (next: "most" | "least") => {
    void loadRank(api, state, rerender, next).then(rerender);
  };
  const entries = await api.rank(state.start, state.end, order);
  return renderRank(entries, order, onToggle);
}
