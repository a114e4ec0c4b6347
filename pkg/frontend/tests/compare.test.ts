// Compare view renders the /dashboard/compare payload verbatim: every
// series, every day, pointwise - checked against a frozen payload captured
// from a real demo data directory (4 participants x 14 days).

import { describe, expect, it } from "vitest";

import { renderCompare } from "../src/views/compare.js";
import type { ComparePayload, Envelope } from "../src/types.js";
import type { ViewState } from "../src/state.js";
import fixture from "./fixtures/compare.json";

const payload = (fixture as Envelope<ComparePayload>).data;

const researcher: ViewState = {
  role: "researcher",
  participant: null,
  token: "t",
  start: payload.start,
  end: payload.end,
  view: "compare",
  selected: Object.keys(payload.series),
};

describe("compare view", () => {
  it("renders four series of fourteen days from the frozen demo payload", () => {
    expect(Object.keys(payload.series)).toHaveLength(4);
    for (const points of Object.values(payload.series)) {
      expect(points).toHaveLength(14);
    }
  });

  it("table cells equal the payload pointwise", () => {
    const view = renderCompare(payload, researcher);
    const rows = Array.from(view.querySelectorAll<HTMLTableRowElement>(".compare-grid tbody tr"));
    expect(rows).toHaveLength(4);
    const ids = Object.keys(payload.series).sort();
    rows.forEach((row, r) => {
      const cells = Array.from(row.cells).map((c) => c.textContent);
      expect(cells[0]).toBe(ids[r]);
      const want = payload.series[ids[r]];
      expect(cells.slice(1).map(Number)).toEqual(want);
    });
  });

  it("chart polylines carry the exact values", () => {
    const view = renderCompare(payload, researcher);
    const lines = Array.from(view.querySelectorAll("polyline"));
    expect(lines).toHaveLength(4);
    const ids = Object.keys(payload.series).sort();
    lines.forEach((line, i) => {
      expect(line.getAttribute("data-label")).toBe(ids[i]);
      const values = line.getAttribute("data-values")!.split(",").map(Number);
      expect(values).toEqual(payload.series[ids[i]]);
    });
  });

  it("participants see other series anonymized but numerically identical", () => {
    const me = Object.keys(payload.series).sort()[1];
    const participant: ViewState = { ...researcher, role: "participant", participant: me };
    const view = renderCompare(payload, participant);
    const labels = Array.from(view.querySelectorAll("polyline")).map((l) =>
      l.getAttribute("data-label"),
    );
    expect(labels).toContain("you");
    expect(labels.filter((l) => l?.startsWith("P"))).toHaveLength(3);
    for (const id of Object.keys(payload.series)) {
      if (id !== me) expect(labels).not.toContain(id);
    }
    const own = view.querySelector(`polyline[data-label="you"]`)!;
    expect(own.getAttribute("data-values")!.split(",").map(Number)).toEqual(payload.series[me]);
  });
});
