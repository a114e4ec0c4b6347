// The chart never recomputes values: polyline geometry derives from them,
// but the data attributes are the payload numbers themselves.

import { describe, expect, it } from "vitest";

import { renderLineChart } from "../src/chart.js";

describe("line chart", () => {
  it("one polyline per series with verbatim values", () => {
    const svg = renderLineChart([
      { label: "a", points: [0, 2, 5] },
      { label: "b", points: [1, 1, 1], highlight: true },
    ]);
    const lines = Array.from(svg.querySelectorAll("polyline"));
    expect(lines).toHaveLength(2);
    expect(lines[0].getAttribute("data-values")).toBe("0,2,5");
    expect(lines[1].getAttribute("data-values")).toBe("1,1,1");
    expect(lines[1].getAttribute("stroke-width")).toBe("3");
  });

  it("scales within the viewbox including the zero line", () => {
    const svg = renderLineChart([{ label: "a", points: [0, 10] }], {
      width: 100,
      height: 100,
      pad: 10,
    });
    const [line] = Array.from(svg.querySelectorAll("polyline"));
    const points = line
      .getAttribute("points")!
      .split(" ")
      .map((p) => p.split(",").map(Number));
    expect(points[0][1]).toBe(90); // zero sits on the x axis
    expect(points[1][1]).toBe(10); // max touches the top pad
  });
});
