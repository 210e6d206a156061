/**
 * Array-in/record-out wrapper around the `mfdcca` command line tool.
 *
 * The wrapper contains no numeric logic: it serializes the input series to
 * CSV, drives `python -m mfdcca run`, and parses the files the CLI emits
 * (summary.json, fluctuations.csv, spectra.csv).  Whatever the CLI computes
 * is returned untouched, so results are identical to a direct CLI run by
 * construction.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export interface AnalyzeOptions {
  /** Smallest segment length (default 4). */
  scaleMin?: number;
  /** Largest segment length (default N/4). */
  scaleMax?: number;
  /** Number of log-spaced scales (default 30). */
  scaleCount?: number;
  qMin?: number;
  qMax?: number;
  qStep?: number;
  /** Detrending polynomial order (default 1). */
  order?: number;
  /** Restrict the estimator set (default: all cross estimators, or MFDFA). */
  algorithms?: string[];
  /** Python interpreter used to run the CLI (default: $MFDCCA_PYTHON or python3). */
  python?: string;
  /** Keep the working directory and report it in the result (debugging). */
  keepFiles?: boolean;
}

export interface SpectrumParams {
  H: number | null;
  alpha0: number | null;
  W: number | null;
  r: number | null;
}

export interface Coverage {
  pairsPct: number | null;
  captured: number | null;
  total: number | null;
  lowCoverage: boolean;
}

export interface SpectrumArrays {
  q: number[];
  h: number[];
  tau: number[];
  alpha: number[];
  f: number[];
}

export interface AlgorithmRecord {
  algorithm: string;
  scales: number[];
  qs: number[];
  /** Fluctuation matrix indexed [scale][q]; null where no value exists. */
  fluctuations: (number | null)[][];
  valid: boolean[][];
  reasons: string[][];
  spectrum: SpectrumArrays;
  params: SpectrumParams;
  coverage: Coverage;
}

export interface BoundResult {
  /** Estimators in summary-table order. */
  algorithms: string[];
  results: Record<string, AlgorithmRecord>;
  /** Working directory with the raw CLI output; set when keepFiles is true. */
  outputDir?: string;
}

function writeSeriesCsv(path: string, values: readonly number[]): void {
  if (values.length === 0) throw new Error("series is empty");
  for (const v of values) {
    if (!Number.isFinite(v)) throw new Error("series has a non-finite value");
  }
  // JS number formatting is shortest-round-trip, which Python parses exactly
  writeFileSync(path, "value\n" + values.map((v) => String(v)).join("\n") + "\n");
}

function parseCsv(text: string): string[][] {
  const rows = text.split("\n").filter((line) => line.length > 0);
  return rows.map((line) => line.split(","));
}

function runCli(python: string, args: string[]): void {
  const proc = spawnSync(python, ["-m", "mfdcca", ...args], {
    encoding: "utf-8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (proc.error) throw proc.error;
  if (proc.status !== 0) {
    const reason = (proc.stderr || "").trim().split("\n").pop() || "CLI failed";
    throw new Error(reason.replace(/^error:\s*/, ""));
  }
}

/** Generate a binomial cascade by delegating to the CLI; returns its values. */
export function binomialCascade(
  stages: number,
  p: number,
  options: { python?: string } = {},
): number[] {
  const python = options.python ?? process.env.MFDCCA_PYTHON ?? "python3";
  const dir = mkdtempSync(join(tmpdir(), "mfdcca-bin-"));
  try {
    const path = join(dir, "cascade.csv");
    runCli(python, ["binomial", "--stages", String(stages), "--p", String(p), "--out", path]);
    return readFileSync(path, "utf-8")
      .split("\n")
      .slice(1)
      .filter((line) => line.length > 0)
      .map(Number);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

export function analyze(
  x: readonly number[],
  y?: readonly number[],
  options: AnalyzeOptions = {},
): BoundResult {
  const python = options.python ?? process.env.MFDCCA_PYTHON ?? "python3";
  const dir = mkdtempSync(join(tmpdir(), "mfdcca-"));
  const outDir = join(dir, "out");
  try {
    const xPath = join(dir, "x.csv");
    writeSeriesCsv(xPath, x);
    const args = ["run", "--input", xPath, "--out", outDir, "--format", "csv,json"];
    if (y !== undefined) {
      const yPath = join(dir, "y.csv");
      writeSeriesCsv(yPath, y);
      args.push("--input2", yPath);
    }
    const flag = (name: string, value: number | undefined) => {
      if (value !== undefined) args.push(name, String(value));
    };
    flag("--scale-min", options.scaleMin);
    flag("--scale-max", options.scaleMax);
    flag("--scale-count", options.scaleCount);
    flag("--q-min", options.qMin);
    flag("--q-max", options.qMax);
    flag("--q-step", options.qStep);
    flag("--order", options.order);
    if (options.algorithms !== undefined) {
      args.push("--algorithms", options.algorithms.join(","));
    }
    runCli(python, args);
    const result = parseOutputs(outDir);
    if (options.keepFiles) result.outputDir = outDir;
    return result;
  } finally {
    if (!options.keepFiles) rmSync(dir, { recursive: true, force: true });
  }
}

function parseOutputs(outDir: string): BoundResult {
  const summary = JSON.parse(readFileSync(join(outDir, "summary.json"), "utf-8")) as {
    algorithms: {
      algorithm: string;
      pairs_pct: number | null;
      H: number | null;
      alpha0: number | null;
      W: number | null;
      r: number | null;
      captured: number | null;
      total: number | null;
      low_coverage: boolean;
    }[];
  };

  const records: Record<string, AlgorithmRecord> = {};
  const order: string[] = [];
  for (const row of summary.algorithms) {
    order.push(row.algorithm);
    records[row.algorithm] = {
      algorithm: row.algorithm,
      scales: [],
      qs: [],
      fluctuations: [],
      valid: [],
      reasons: [],
      spectrum: { q: [], h: [], tau: [], alpha: [], f: [] },
      params: { H: row.H, alpha0: row.alpha0, W: row.W, r: row.r },
      coverage: {
        pairsPct: row.pairs_pct,
        captured: row.captured,
        total: row.total,
        lowCoverage: row.low_coverage,
      },
    };
  }

  const fluct = parseCsv(readFileSync(join(outDir, "fluctuations.csv"), "utf-8"));
  const cells = new Map<string, Map<string, [number | null, boolean, string]>>();
  for (const [algorithm, scale, q, value, valid, reason] of fluct.slice(1)) {
    let perAlg = cells.get(algorithm);
    if (perAlg === undefined) {
      perAlg = new Map();
      cells.set(algorithm, perAlg);
    }
    perAlg.set(`${scale}|${q}`, [value === "" ? null : Number(value), valid === "true", reason]);
    const record = records[algorithm];
    if (record !== undefined) {
      const s = Number(scale);
      const qv = Number(q);
      if (!record.scales.includes(s)) record.scales.push(s);
      if (record.qs.length === 0 || !record.qs.includes(qv)) record.qs.push(qv);
    }
  }
  for (const record of Object.values(records)) {
    const perAlg = cells.get(record.algorithm);
    if (perAlg === undefined) continue;
    for (const s of record.scales) {
      const valueRow: (number | null)[] = [];
      const validRow: boolean[] = [];
      const reasonRow: string[] = [];
      for (const q of record.qs) {
        const cell = perAlg.get(`${s}|${q}`);
        valueRow.push(cell ? cell[0] : null);
        validRow.push(cell ? cell[1] : false);
        reasonRow.push(cell ? cell[2] : "");
      }
      record.fluctuations.push(valueRow);
      record.valid.push(validRow);
      record.reasons.push(reasonRow);
    }
  }

  const spectra = parseCsv(readFileSync(join(outDir, "spectra.csv"), "utf-8"));
  for (const [algorithm, q, h, tau, alpha, f] of spectra.slice(1)) {
    const record = records[algorithm];
    if (record === undefined) continue;
    record.spectrum.q.push(Number(q));
    record.spectrum.h.push(Number(h));
    record.spectrum.tau.push(Number(tau));
    record.spectrum.alpha.push(Number(alpha));
    record.spectrum.f.push(Number(f));
  }

  return { algorithms: order, results: records };
}
