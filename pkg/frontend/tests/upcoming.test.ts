// Snooze round-trip: clicking snooze posts the replan and the view
// re-renders from a fresh schedule fetch showing the pushed-back time.

import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { loadUpcoming, SNOOZE_MINUTES } from "../src/views/upcoming.js";
import type { ActionDoc } from "../src/types.js";
import type { ViewState } from "../src/state.js";

const ACTION: ActionDoc = {
  id: "act-1",
  plan: "plan-1",
  participant: "p001",
  template: "q-diary",
  kind: "question",
  due_time: "2026-01-12T10:00:00Z",
  validity_minutes: 60,
  priority: 1,
  state: { kind: "Pending" },
  question_kind: "what",
};

const SNOOZED: ActionDoc = {
  ...ACTION,
  state: { kind: "Snoozed", at: "2026-01-12T10:30:00Z" },
};

const WOKEN: ActionDoc = {
  ...ACTION,
  due_time: "2026-01-12T10:30:00Z",
  state: { kind: "Pending" },
};

function ok(data: unknown): Response {
  return new Response(JSON.stringify({ schema_version: "1", data }), {
    status: 200,
    headers: { "Content-Type": "application/json" },
  });
}

const state: ViewState = {
  role: "participant",
  participant: "p001",
  token: "tok",
  start: "2026-01-05",
  end: "2026-01-19",
  view: "upcoming",
  selected: ["p001"],
};

describe("upcoming view snooze", () => {
  beforeEach(() => {
    document.body.innerHTML = "<main id='m'></main>";
  });

  it("posts the replan and reflects the new time after refetch", async () => {
    const calls: { url: string; init?: RequestInit }[] = [];
    let scheduleServed = 0;
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string, init?: RequestInit) => {
        calls.push({ url, init });
        if (url.endsWith("/replan")) {
          return ok({ action: SNOOZED });
        }
        scheduleServed += 1;
        return ok(scheduleServed === 1 ? [ACTION] : [SNOOZED]);
      }),
    );

    const container = document.querySelector<HTMLElement>("#m")!;
    const mount = (node: HTMLElement) => container.replaceChildren(node);
    mount(await loadUpcoming(new ApiClient("", "tok"), state, mount));

    expect(container.querySelector(".due")!.textContent).toBe("2026-01-12T10:00:00Z");

    container.querySelector<HTMLButtonElement>("button.snooze")!.click();
    await vi.waitFor(() => {
      expect(container.textContent).toContain("snoozed until 2026-01-12T10:30:00Z");
    });

    const replan = calls.find((c) => c.url.endsWith("/replan"))!;
    expect(replan.init?.method).toBe("POST");
    expect(JSON.parse(String(replan.init?.body))).toEqual({
      action: "act-1",
      op: "snooze",
      snooze_minutes: SNOOZE_MINUTES,
    });
    expect((replan.init?.headers as Record<string, string>).Authorization).toBe("Bearer tok");
    expect(scheduleServed).toBe(2); // initial load + refetch after the mutation
  });

  it("shows the pushed-back due time once the snooze elapses server-side", async () => {
    let scheduleServed = 0;
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string) => {
        if (url.endsWith("/replan")) return ok({ action: SNOOZED });
        scheduleServed += 1;
        return ok(scheduleServed === 1 ? [ACTION] : [WOKEN]);
      }),
    );
    const container = document.querySelector<HTMLElement>("#m")!;
    const mount = (node: HTMLElement) => container.replaceChildren(node);
    mount(await loadUpcoming(new ApiClient("", "tok"), state, mount));
    container.querySelector<HTMLButtonElement>("button.snooze")!.click();
    await vi.waitFor(() => {
      expect(container.querySelector(".due")!.textContent).toBe("2026-01-12T10:30:00Z");
    });
  });

  it("move posts the chosen time", async () => {
    const MOVED: ActionDoc = { ...ACTION, due_time: "2026-01-12T18:30:00Z" };
    const bodies: unknown[] = [];
    let scheduleServed = 0;
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string, init?: RequestInit) => {
        if (url.endsWith("/replan")) {
          bodies.push(JSON.parse(String(init?.body)));
          return ok({ action: MOVED });
        }
        scheduleServed += 1;
        return ok(scheduleServed === 1 ? [ACTION] : [MOVED]);
      }),
    );
    const container = document.querySelector<HTMLElement>("#m")!;
    const mount = (node: HTMLElement) => container.replaceChildren(node);
    mount(await loadUpcoming(new ApiClient("", "tok"), state, mount));
    container.querySelector<HTMLInputElement>("input.move-time")!.value = "18:30";
    container.querySelector<HTMLButtonElement>("button.move")!.click();
    await vi.waitFor(() => {
      expect(container.querySelector(".due")!.textContent).toBe("2026-01-12T18:30:00Z");
    });
    expect(bodies[0]).toEqual({ action: "act-1", op: "move", new_time: "2026-01-12T18:30:00Z" });
  });

  it("a stale 409 triggers a refetch instead of an error", async () => {
    let scheduleServed = 0;
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string) => {
        if (url.endsWith("/replan")) {
          return new Response(
            JSON.stringify({ schema_version: "1", error: "ReplanRejected", message: "already settled" }),
            { status: 409 },
          );
        }
        scheduleServed += 1;
        return ok(scheduleServed === 1 ? [ACTION] : []);
      }),
    );
    const container = document.querySelector<HTMLElement>("#m")!;
    const mount = (node: HTMLElement) => container.replaceChildren(node);
    mount(await loadUpcoming(new ApiClient("", "tok"), state, mount));
    container.querySelector<HTMLButtonElement>("button.snooze")!.click();
    await vi.waitFor(() => {
      expect(container.textContent).toContain("Nothing scheduled");
    });
    expect(container.querySelector(".error-box")).toBeNull();
  });
});
