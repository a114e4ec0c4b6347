/** View state and role gating.
 *
 * The server is the authority on authorization; this mirror only decides
 * what to render. Participants see their own data plus anonymized cohort
 * comparisons; researchers see everything except the personal goal editor.
 */

import type { Role } from "./types.js";

export type ViewName = "overview" | "detail" | "compare" | "rank" | "alerts" | "goals" | "upcoming";

export interface ViewState {
  role: Role;
  participant: string | null; // the signed-in participant, when role is participant
  token: string;
  start: string;
  end: string;
  view: ViewName;
  selected: string[]; // participants in scope for compare/detail
}

const RESEARCHER_VIEWS: ViewName[] = ["overview", "detail", "compare", "rank", "alerts"];
const PARTICIPANT_VIEWS: ViewName[] = ["overview", "compare", "alerts", "goals", "upcoming"];

export function allowedViews(role: Role): ViewName[] {
  return role === "researcher" ? RESEARCHER_VIEWS : PARTICIPANT_VIEWS;
}

export function canSee(role: Role, view: ViewName): boolean {
  return allowedViews(role).includes(view);
}

/** Participants see other series anonymized; their own line keeps its id. */
export function anonymizeSeries(
  series: Record<string, number[]>,
  state: Pick<ViewState, "role" | "participant">,
): { label: string; own: boolean; points: number[] }[] {
  const ids = Object.keys(series).sort();
  let counter = 0;
  return ids.map((id) => {
    const own = state.role === "participant" && id === state.participant;
    let label: string;
    if (state.role === "researcher") {
      label = id;
    } else if (own) {
      label = "you";
    } else {
      counter += 1;
      label = `P${counter}`;
    }
    return { label, own, points: series[id] };
  });
}
