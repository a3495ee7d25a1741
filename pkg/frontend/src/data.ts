import { ParseError, num, readTable } from "./csv.js";

/** One decimated point of an averaged-iterate trajectory. */
export interface TracePoint {
  k: number;
  algo: string;
  coord: number;
  value: number;
}

/** One checkpoint value of a named series (variances, CI length, oracle error). */
export interface SeriesPoint {
  n: number;
  series: string;
  value: number;
}

/** One checkpoint coverage rate for one interval mode. */
export interface CoveragePoint {
  n: number;
  mode: string;
  coverage: number;
  se: number;
}

const TRACES_HEADER = ["k", "algo", "coord", "value"] as const;
const SERIES_HEADER = ["checkpoint_n", "series", "value"] as const;
const COVERAGE_HEADER = ["checkpoint_n", "mode", "coverage", "se"] as const;

// Inadmissible learning rates are flagged in-band by the experiment CLI.
const COVERAGE_WARNING_MODE = "warning_inadmissible_alpha";

export function loadTraces(path: string): TracePoint[] {
  return readTable(path, TRACES_HEADER).map((row, i) => ({
    k: num(path, i, "k", row[0], { integer: true }),
    algo: row[1].trim(),
    coord: num(path, i, "coord", row[2], { integer: true }),
    value: num(path, i, "value", row[3]),
  }));
}

export function loadCovConvergence(path: string): SeriesPoint[] {
  return readTable(path, SERIES_HEADER).map((row, i) => ({
    n: num(path, i, "checkpoint_n", row[0], { integer: true }),
    series: row[1].trim(),
    value: num(path, i, "value", row[2]),
  }));
}

/** Warning rows carry no rates and are dropped after parsing. */
export function loadCoverage(path: string): CoveragePoint[] {
  const points = readTable(path, COVERAGE_HEADER).map((row, i) => ({
    n: num(path, i, "checkpoint_n", row[0], { integer: true }),
    mode: row[1].trim(),
    coverage: num(path, i, "coverage", row[2], { allowNan: true }),
    se: num(path, i, "se", row[3], { allowNan: true }),
  }));
  const kept = points.filter((p) => p.mode !== COVERAGE_WARNING_MODE);
  if (kept.length === 0) {
    throw new ParseError(`${path}: only warning rows, no coverage data`);
  }
  for (const p of kept) {
    if (Number.isNaN(p.coverage) || Number.isNaN(p.se)) {
      throw new ParseError(
        `${path}: non-finite coverage value in mode "${p.mode}" at checkpoint ${p.n}`,
      );
    }
  }
  return kept;
}
