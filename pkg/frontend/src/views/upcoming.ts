/** Upcoming view (participant): due and future actions with snooze / move /
 * skip controls. Every mutation posts a replan and re-renders from a fresh
 * schedule fetch; a 409 means the view was stale, so it refetches too. */

import { ApiClient, ApiFailure } from "../api.js";
import { el, errorBox, table } from "../dom.js";
import { ViewState } from "../state.js";
import type { ActionDoc } from "../types.js";

export const SNOOZE_MINUTES = 30;

function describeState(action: ActionDoc): string {
  if (action.state.kind === "Snoozed" && action.state.at) {
    return `snoozed until ${action.state.at}`;
  }
  if (action.state.kind === "Notified") {
    return "delivered, awaiting answer";
  }
  return action.state.kind.toLowerCase();
}

export function renderUpcoming(
  actions: ActionDoc[],
  onReplan: (action: string, op: "snooze" | "skip" | "move", newTime?: string) => void,
): HTMLElement {
  const root = el("section", { class: "view view-upcoming" });
  root.append(el("h2", {}, ["Upcoming questions"]));
  if (!actions.length) {
    root.append(el("p", { class: "empty" }, ["Nothing scheduled."]));
    return root;
  }
  const rows = actions.map((action) => {
    const snooze = el("button", { class: "snooze", "data-action": action.id }, [
      `snooze ${SNOOZE_MINUTES} min`,
    ]);
    snooze.addEventListener("click", () => onReplan(action.id, "snooze"));
    const skip = el("button", { class: "skip", "data-action": action.id }, ["skip"]);
    skip.addEventListener("click", () => onReplan(action.id, "skip"));
    const moveTime = el("input", { class: "move-time", type: "time", "data-action": action.id });
    const move = el("button", { class: "move", "data-action": action.id }, ["move"]);
    move.addEventListener("click", () => {
      if (!moveTime.value) return;
      const newTime = `${action.due_time.slice(0, 10)}T${moveTime.value}:00Z`;
      onReplan(action.id, "move", newTime);
    });
    const controls = el("span", { class: "controls" }, [snooze, " ", skip, " ", moveTime, move]);
    const due = el("span", { class: "due", "data-action": action.id }, [action.due_time]);
    return [action.question_kind ?? action.kind, due, describeState(action), controls];
  });
  root.append(table(["question", "due", "state", ""], rows, "data upcoming-grid"));
  return root;
}

export async function loadUpcoming(
  api: ApiClient,
  state: ViewState,
  rerender: (node: HTMLElement) => void,
): Promise<HTMLElement> {
  const participant = state.participant;
  if (!participant) {
    return errorBox("No participant signed in.");
  }

  const refetch = async () => {
    const fresh = await api.schedule(participant);
    rerender(renderUpcoming(fresh, onReplan));
  };

  const onReplan = (action: string, op: "snooze" | "skip" | "move", newTime?: string) => {
    const body =
      op === "snooze"
        ? { snooze_minutes: SNOOZE_MINUTES }
        : op === "move"
          ? { new_time: newTime }
          : {};
    api
      .replan(action, op, body)
      .then(refetch)
      .catch((err: unknown) => {
        if (err instanceof ApiFailure && err.status === 409) {
          // stale view: the action settled elsewhere; refresh to reality
          void refetch();
          return;
        }
        rerender(errorBox(err instanceof Error ? err.message : String(err)));
      });
  };

  const actions = await api.schedule(participant);
  return renderUpcoming(actions, onReplan);
}
