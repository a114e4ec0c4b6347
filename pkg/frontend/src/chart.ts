/** Dependency-free SVG multi-line chart over day-indexed series.
 *
 * Values are drawn verbatim from the API payload; nothing is recomputed
 * client-side, so the chart and the CLI reports can never disagree. Each
 * polyline carries its values in a data attribute for exact inspection.
 */

export interface ChartSeries {
  label: string;
  points: number[];
  highlight?: boolean;
}

const PALETTE = ["#2e7d32", "#1565c0", "#c62828", "#ef6c00", "#6a1b9a", "#00838f", "#5d4037", "#37474f"];

export function seriesColor(index: number, highlight: boolean | undefined): string {
  return highlight ? PALETTE[0] : PALETTE[(index % (PALETTE.length - 1)) + 1];
}

export function renderLineChart(
  series: ChartSeries[],
  opts: { width?: number; height?: number; pad?: number } = {},
): SVGSVGElement {
  const width = opts.width ?? 640;
  const height = opts.height ?? 260;
  const pad = opts.pad ?? 32;

  const days = Math.max(1, ...series.map((s) => s.points.length));
  const top = Math.max(1, ...series.flatMap((s) => s.points));

  const x = (i: number) => pad + (i * (width - 2 * pad)) / Math.max(1, days - 1);
  const y = (v: number) => height - pad - (v * (height - 2 * pad)) / top;

  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", "chart");
  svg.setAttribute("role", "img");

  const axes = document.createElementNS(svg.namespaceURI, "path");
  axes.setAttribute(
    "d",
    `M ${pad} ${pad} L ${pad} ${height - pad} L ${width - pad} ${height - pad}`,
  );
  axes.setAttribute("class", "axes");
  axes.setAttribute("fill", "none");
  axes.setAttribute("stroke", "#999");
  svg.appendChild(axes);

  series.forEach((s, idx) => {
    const line = document.createElementNS(svg.namespaceURI, "polyline");
    line.setAttribute("points", s.points.map((v, i) => `${x(i).toFixed(1)},${y(v).toFixed(1)}`).join(" "));
    line.setAttribute("fill", "none");
    line.setAttribute("stroke", seriesColor(idx, s.highlight));
    line.setAttribute("stroke-width", s.highlight ? "3" : "1.5");
    line.setAttribute("data-label", s.label);
    line.setAttribute("data-values", s.points.join(","));
    svg.appendChild(line);
  });

  const yMax = document.createElementNS(svg.namespaceURI, "text");
  yMax.textContent = String(top);
  yMax.setAttribute("x", "4");
  yMax.setAttribute("y", String(pad));
  yMax.setAttribute("class", "tick");
  svg.appendChild(yMax);

  const xMax = document.createElementNS(svg.namespaceURI, "text");
  xMax.textContent = `day ${days - 1}`;
  xMax.setAttribute("x", String(width - pad - 24));
  xMax.setAttribute("y", String(height - 8));
  xMax.setAttribute("class", "tick");
  svg.appendChild(xMax);

  return svg;
}
