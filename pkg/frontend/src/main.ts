/** App shell: sign-in, navigation, polling refresh.
 *
 * The UI renders exclusively from API payloads; reloading reproduces the
 * same views for a frozen data directory. Role gating here mirrors the
 * server's, which stays the authority.
 */

import { ApiClient, ApiFailure } from "./api.js";
import { deniedBox, el, errorBox } from "./dom.js";
import { allowedViews, canSee, ViewName, ViewState } from "./state.js";
import { loadAlerts } from "./views/alerts.js";
import { loadCompare } from "./views/compare.js";
import { loadDetail } from "./views/detail.js";
import { loadGoals } from "./views/goals.js";
import { loadOverview } from "./views/overview.js";
import { loadRank } from "./views/rank.js";
import { loadUpcoming } from "./views/upcoming.js";

const POLL_SECONDS = 10;

type Loader = (
  api: ApiClient,
  state: ViewState,
  rerender: (node: HTMLElement) => void,
) => Promise<HTMLElement>;

const LOADERS: Record<ViewName, Loader> = {
  overview: loadOverview,
  detail: loadDetail,
  compare: loadCompare,
  rank: loadRank,
  alerts: loadAlerts,
  goals: loadGoals,
  upcoming: loadUpcoming,
};

export async function renderView(
  container: HTMLElement,
  api: ApiClient,
  state: ViewState,
): Promise<void> {
  const mount = (node: HTMLElement) => {
    container.replaceChildren(node);
  };
  if (!canSee(state.role, state.view)) {
    mount(deniedBox(state.view));
    return;
  }
  try {
    mount(await LOADERS[state.view](api, state, mount));
  } catch (err) {
    if (err instanceof ApiFailure && err.status === 401) {
      mount(deniedBox(state.view));
      return;
    }
    mount(errorBox(err instanceof Error ? err.message : String(err)));
  }
}

function navBar(state: ViewState, onNavigate: (view: ViewName) => void): HTMLElement {
  const nav = el("nav", { class: "tabs" });
  for (const view of allowedViews(state.role)) {
    const tab = el(
      "button",
      { class: view === state.view ? "tab active" : "tab", "data-view": view },
      [view],
    );
    tab.addEventListener("click", () => onNavigate(view));
    nav.append(tab);
  }
  return nav;
}

export function startApp(root: HTMLElement, state: ViewState): void {
  const api = new ApiClient("", state.token);
  const container = el("main", { class: "content" });
  let nav = navBar(state, navigate);
  root.replaceChildren(nav, container);

  function navigate(view: ViewName): void {
    state.view = view;
    const fresh = navBar(state, navigate);
    nav.replaceWith(fresh);
    nav = fresh;
    void renderView(container, api, state);
  }

  void renderView(container, api, state);
  window.setInterval(() => void renderView(container, api, state), POLL_SECONDS * 1000);
}

function readForm(): ViewState | null {
  const role = (document.querySelector<HTMLSelectElement>("#login-role")?.value ?? "") as
    | "researcher"
    | "participant";
  const token = document.querySelector<HTMLInputElement>("#login-token")?.value ?? "";
  const participant = document.querySelector<HTMLInputElement>("#login-participant")?.value ?? "";
  const participants = document.querySelector<HTMLInputElement>("#login-cohort")?.value ?? "";
  const start = document.querySelector<HTMLInputElement>("#login-start")?.value ?? "";
  const end = document.querySelector<HTMLInputElement>("#login-end")?.value ?? "";
  if (!token || !start || !end) return null;
  const selected = participants
    .split(",")
    .map((p) => p.trim())
    .filter(Boolean);
  return {
    role,
    token,
    participant: role === "participant" ? participant : null,
    start,
    end,
    view: "overview",
    selected: selected.length ? selected : participant ? [participant] : [],
  };
}

export function bootstrap(): void {
  const form = document.querySelector<HTMLFormElement>("#login");
  const root = document.querySelector<HTMLElement>("#app");
  if (!form || !root) return;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const state = readForm();
    if (!state) return;
    form.remove();
    startApp(root, state);
  });
}

if (typeof document !== "undefined" && document.querySelector("#login")) {
  bootstrap();
}
