import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { ParseError } from "./csv.js";
import { loadCovConvergence, loadCoverage, loadTraces, type SeriesPoint } from "./data.js";
import { renderChart, type ChartSeries } from "./svg.js";

export const KINDS = ["traces", "variance", "ci_length", "coverage"] as const;
export type Kind = (typeof KINDS)[number];

export interface FigureSpec {
  inputCsv: string;
  kind: Kind;
  output: string;
}

const NOMINAL_COVERAGE = 0.95;

function tracesSvg(path: string): string {
  const points = loadTraces(path);
  const groups = new Map<string, ChartSeries>();
  for (const p of points) {
    const key = `${p.algo} coord ${p.coord}`;
    let series = groups.get(key);
    if (!series) {
      series = { label: key, points: [] };
      groups.set(key, series);
    }
    series.points.push({ x: p.k, y: p.value });
  }
  return renderChart({
    title: "Averaged iterate trajectories",
    xLabel: "step k",
    yLabel: "averaged coordinate",
    series: [...groups.values()],
  });
}

function seriesByName(points: SeriesPoint[], pick: (name: string) => boolean): ChartSeries[] {
  const groups = new Map<string, ChartSeries>();
  for (const p of points) {
    if (!pick(p.series)) continue;
    let series = groups.get(p.series);
    if (!series) {
      series = { label: p.series, points: [] };
      groups.set(p.series, series);
    }
    series.points.push({ x: p.n, y: p.value });
  }
  return [...groups.values()];
}

function varianceSvg(path: string): string {
  const series = seriesByName(loadCovConvergence(path), (name) => /^var_\d+$/.test(name));
  if (series.length === 0) {
    throw new ParseError(`${path}: no var_* series`);
  }
  return renderChart({
    title: "Long-run variance estimates",
    xLabel: "sample size n",
    yLabel: "estimated variance",
    series,
  });
}

function ciLengthSvg(path: string): string {
  const series = seriesByName(loadCovConvergence(path), (name) => name === "ci_length");
  if (series.length === 0) {
    throw new ParseError(`${path}: no ci_length series`);
  }
  return renderChart({
    title: "Projection confidence interval length",
    xLabel: "sample size n",
    yLabel: "interval length",
    series,
  });
}

function coverageSvg(path: string): string {
  const points = loadCoverage(path);
  const groups = new Map<string, ChartSeries>();
  for (const p of points) {
    let series = groups.get(p.mode);
    if (!series) {
      series = { label: p.mode, points: [] };
      groups.set(p.mode, series);
    }
    series.points.push({ x: p.n, y: p.coverage });
  }
  return renderChart({
    title: "Empirical coverage of 95% confidence intervals",
    xLabel: "sample size n",
    yLabel: "coverage rate",
    series: [...groups.values()],
    refLine: { y: NOMINAL_COVERAGE, label: String(NOMINAL_COVERAGE) },
  });
}

const BUILDERS: Record<Kind, (path: string) => string> = {
  traces: tracesSvg,
  variance: varianceSvg,
  ci_length: ciLengthSvg,
  coverage: coverageSvg,
};

/** Build the SVG text for one figure without touching the filesystem. */
export function buildSvg(kind: Kind, inputCsv: string): string {
  return BUILDERS[kind](inputCsv);
}

/** Render one figure to its output path, overwriting any previous file. */
export function render(spec: FigureSpec): string {
  const svg = buildSvg(spec.kind, spec.inputCsv);
  const dir = dirname(spec.output);
  if (dir !== "") {
    mkdirSync(dir, { recursive: true });
  }
  writeFileSync(spec.output, svg + "\n", "utf8");
  return spec.output;
}
