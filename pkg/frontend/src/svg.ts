import { scaleLinear, type ScaleLinear } from "d3-scale";
import { line as lineGenerator } from "d3-shape";

export interface XY {
  x: number;
  y: number;
}

export interface ChartSeries {
  label: string;
  points: XY[];
}

export interface RefLine {
  y: number;
  label: string;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  series: ChartSeries[];
  /** Dashed horizontal reference, included in the y domain. */
  refLine?: RefLine;
}

const WIDTH = 880;
const HEIGHT = 460;
const MARGIN = { top: 48, right: 196, bottom: 52, left: 68 };
const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

// Tableau palette, cycled when there are more series than colors.
const PALETTE = [
  "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
  "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
];

const REF_COLOR = "#d62728";
const MAX_MARKED_POINTS = 40;

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === hi) {
    const pad = lo === 0 ? 1 : Math.abs(lo) * 0.1;
    return [lo - pad, hi + pad];
  }
  return [lo, hi];
}

function tickFormatter(scale: ScaleLinear<number, number>): (v: number) => string {
  const [a, b] = scale.domain();
  const spec = Math.max(Math.abs(a), Math.abs(b)) >= 1e4 ? "~s" : "~g";
  return scale.tickFormat(6, spec);
}

function xAxis(scale: ScaleLinear<number, number>, label: string): string {
  const fmt = tickFormatter(scale);
  const y0 = MARGIN.top + PLOT_H;
  const parts: string[] = [];
  for (const t of scale.ticks(6)) {
    const x = scale(t);
    parts.push(`<line x1="${x}" y1="${MARGIN.top}" x2="${x}" y2="${y0}" stroke="#e0e0e0"/>`);
    parts.push(`<line x1="${x}" y1="${y0}" x2="${x}" y2="${y0 + 5}" stroke="#444"/>`);
    parts.push(
      `<text x="${x}" y="${y0 + 20}" text-anchor="middle" font-size="12">${escapeXml(fmt(t))}</text>`,
    );
  }
  parts.push(`<line x1="${MARGIN.left}" y1="${y0}" x2="${MARGIN.left + PLOT_W}" y2="${y0}" stroke="#444"/>`);
  parts.push(
    `<text x="${MARGIN.left + PLOT_W / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-size="13">${escapeXml(label)}</text>`,
  );
  return parts.join("\n");
}

function yAxis(scale: ScaleLinear<number, number>, label: string): string {
  const fmt = tickFormatter(scale);
  const x0 = MARGIN.left;
  const parts: string[] = [];
  for (const t of scale.ticks(6)) {
    const y = scale(t);
    parts.push(`<line x1="${x0}" y1="${y}" x2="${x0 + PLOT_W}" y2="${y}" stroke="#e0e0e0"/>`);
    parts.push(`<line x1="${x0 - 5}" y1="${y}" x2="${x0}" y2="${y}" stroke="#444"/>`);
    parts.push(
      `<text x="${x0 - 9}" y="${y + 4}" text-anchor="end" font-size="12">${escapeXml(fmt(t))}</text>`,
    );
  }
  parts.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${MARGIN.top + PLOT_H}" stroke="#444"/>`);
  const cy = MARGIN.top + PLOT_H / 2;
  parts.push(
    `<text x="16" y="${cy}" text-anchor="middle" font-size="13" transform="rotate(-90 16 ${cy})">${escapeXml(label)}</text>`,
  );
  return parts.join("\n");
}

function legend(series: ChartSeries[]): string {
  const x0 = MARGIN.left + PLOT_W + 18;
  const parts: string[] = [];
  series.forEach((s, i) => {
    const y = MARGIN.top + 8 + i * 17;
    const color = PALETTE[i % PALETTE.length];
    parts.push(`<line x1="${x0}" y1="${y}" x2="${x0 + 18}" y2="${y}" stroke="${color}" stroke-width="2.5"/>`);
    parts.push(
      `<text x="${x0 + 24}" y="${y + 4}" font-size="12">${escapeXml(s.label)}</text>`,
    );
  });
  return parts.join("\n");
}

/** Build one complete SVG document for a multi-line chart. */
export function renderChart(options: ChartOptions): string {
  if (options.series.length === 0 || options.series.every((s) => s.points.length === 0)) {
    throw new Error("chart needs at least one nonempty series");
  }
  const xs: number[] = [];
  const ys: number[] = [];
  for (const s of options.series) {
    for (const p of s.points) {
      xs.push(p.x);
      ys.push(p.y);
    }
  }
  if (options.refLine) {
    ys.push(options.refLine.y);
  }
  const xScale = scaleLinear().domain(extent(xs)).range([MARGIN.left, MARGIN.left + PLOT_W]).nice();
  const yScale = scaleLinear().domain(extent(ys)).range([MARGIN.top + PLOT_H, MARGIN.top]).nice();
  const toPath = lineGenerator<XY>()
    .x((p) => xScale(p.x))
    .y((p) => yScale(p.y));

  const body: string[] = [];
  body.push(xAxis(xScale, options.xLabel));
  body.push(yAxis(yScale, options.yLabel));

  if (options.refLine) {
    const y = yScale(options.refLine.y);
    body.push(
      `<line class="ref-line" x1="${MARGIN.left}" y1="${y}" x2="${MARGIN.left + PLOT_W}" y2="${y}" ` +
        `stroke="${REF_COLOR}" stroke-width="1.5" stroke-dasharray="6 4"/>`,
    );
    body.push(
      `<text x="${MARGIN.left + PLOT_W - 4}" y="${y - 5}" text-anchor="end" font-size="12" ` +
        `fill="${REF_COLOR}">${escapeXml(options.refLine.label)}</text>`,
    );
  }

  options.series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const points = [...s.points].sort((a, b) => a.x - b.x);
    const d = toPath(points) ?? "";
    body.push(
      `<path class="series-line" d="${d}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    if (points.length <= MAX_MARKED_POINTS) {
      for (const p of points) {
        body.push(
          `<circle class="series-dot" cx="${xScale(p.x)}" cy="${yScale(p.y)}" r="3" fill="${color}"/>`,
        );
      }
    }
  });

  body.push(legend(options.series));
  body.push(
    `<text x="${MARGIN.left}" y="26" font-size="16" font-weight="bold">${escapeXml(options.title)}</text>`,
  );

  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    ...body,
    "</svg>",
  ].join("\n");
}
