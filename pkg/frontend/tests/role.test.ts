// Role gating: client-side mirrors of the server rules block cross-role
// views, and a server 401 lands on the denied box too.

import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderView } from "../src/main.js";
import { allowedViews, canSee } from "../src/state.js";
import type { ViewState } from "../src/state.js";

function state(role: "researcher" | "participant", view: ViewState["view"]): ViewState {
  return {
    role,
    participant: role === "participant" ? "p001" : null,
    token: "tok",
    start: "2026-01-05",
    end: "2026-01-19",
    view,
    selected: ["p001"],
  };
}

describe("role gating", () => {
  beforeEach(() => {
    document.body.innerHTML = "<main id='m'></main>";
  });

  it("participant views exclude researcher-only screens and vice versa", () => {
    expect(allowedViews("participant")).not.toContain("rank");
    expect(allowedViews("participant")).not.toContain("detail");
    expect(allowedViews("researcher")).not.toContain("goals");
    expect(allowedViews("researcher")).not.toContain("upcoming");
    expect(canSee("participant", "goals")).toBe(true);
    expect(canSee("researcher", "rank")).toBe(true);
  });

  it("participant opening the rank view gets the denied box without a request", async () => {
    const spy = vi.fn();
    vi.stubGlobal("fetch", spy);
    const container = document.querySelector<HTMLElement>("#m")!;
    await renderView(container, new ApiClient("", "tok"), state("participant", "rank"));
    expect(container.querySelector("[data-denied='rank']")).not.toBeNull();
    expect(spy).not.toHaveBeenCalled();
  });

  it("researcher opening the goals view gets the denied box", async () => {
    const container = document.querySelector<HTMLElement>("#m")!;
    await renderView(container, new ApiClient("", "tok"), state("researcher", "goals"));
    expect(container.querySelector("[data-denied='goals']")).not.toBeNull();
  });

  it("a server 401 renders the denied box (server stays the authority)", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(
        async () =>
          new Response(
            JSON.stringify({ schema_version: "1", error: "AuthError", message: "researcher role required" }),
            { status: 401 },
          ),
      ),
    );
    const container = document.querySelector<HTMLElement>("#m")!;
    await renderView(container, new ApiClient("", "wrong"), state("researcher", "rank"));
    expect(container.querySelector("[data-denied='rank']")).not.toBeNull();
  });
});
