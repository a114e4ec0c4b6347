/** Goals view (participant): personal targets with progress bars. */

import { ApiClient } from "../api.js";
import { el, errorBox } from "../dom.js";
import { ViewState } from "../state.js";
import type { GoalProgress } from "../types.js";

const METRIC_LABELS: Record<string, string> = {
  answers_per_day: "answers per day",
  sensor_coverage: "sensor records per day",
  response_delay: "response delay (min)",
};

export function renderGoals(
  goals: GoalProgress[],
  onCreate: (metric: string, target: number) => void,
  onRemove: (id: string) => void,
): HTMLElement {
  const root = el("section", { class: "view view-goals" });
  root.append(el("h2", {}, ["Personal goals"]));

  for (const { goal, progress, on_track } of goals) {
    const bar = el("div", { class: "bar" });
    const fill = el("div", {
      class: `bar-fill ${on_track ? "on-track" : "off-track"}`,
      style: `width: ${Math.round(progress * 100)}%`,
      "data-goal": goal.id,
      "data-progress": progress.toFixed(3),
    });
    bar.append(fill);
    const remove = el("button", { class: "remove", "data-goal": goal.id }, ["remove"]);
    remove.addEventListener("click", () => onRemove(goal.id));
    root.append(
      el("div", { class: "goal-row", "data-goal": goal.id }, [
        el("span", { class: "goal-label" }, [
          `${METRIC_LABELS[goal.metric] ?? goal.metric}: target ${goal.target} (trailing ${goal.window_days}d)`,
        ]),
        bar,
        el("span", { class: `flag ${on_track ? "on-track" : "off-track"}` }, [
          on_track ? "on track" : "off track",
        ]),
        remove,
      ]),
    );
  }

  const metric = el("select", { class: "goal-metric" });
  for (const [value, label] of Object.entries(METRIC_LABELS)) {
    metric.append(el("option", { value }, [label]));
  }
  const target = el("input", { class: "goal-target", type: "number", min: "1", value: "5" });
  const create = el("button", { class: "create-goal" }, ["add goal"]);
  create.addEventListener("click", () => onCreate(metric.value, Number(target.value)));
  root.append(el("div", { class: "goal-form" }, [metric, target, create]));
  return root;
}

export async function loadGoals(
  api: ApiClient,
  state: ViewState,
  rerender: (node: HTMLElement) => void,
): Promise<HTMLElement> {
  const participant = state.participant;
  if (!participant) {
    return errorBox("No participant signed in.");
  }

  const refetch = async () => {
    const fresh = await api.goals(participant);
    rerender(renderGoals(fresh, onCreate, onRemove));
  };

  const onCreate = (metric: string, target: number) => {
    const id = `g-${participant}-${metric}-${Date.now()}`;
    void api
      .setGoal({ id, participant, metric, target, window_days: 7 })
      .then(refetch)
      .catch((err: unknown) => rerender(errorBox(err instanceof Error ? err.message : String(err))));
  };
  const onRemove = (id: string) => {
    void api.removeGoal(id).then(refetch);
  };

  const goals = await api.goals(participant);
  return renderGoals(goals, onCreate, onRemove);
}
