import { existsSync, mkdirSync, readdirSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import {
  emaCurves,
  maxSaturationScatter,
  occupancyTimeline,
  saturationCurves,
  timeToSaturationScatter,
  type FigureKind,
} from "./charts.js";
import { readCsv, requireColumns } from "./csv.js";
import { svgToPng } from "./png.js";

export interface FigureSpec {
  kind: FigureKind;
  /** CSV inputs; curve kinds take one file per series, table kinds take one file. */
  inputs: string[];
  labels?: string[];
  /** Image path; .png rasterizes, anything else is written as SVG text. */
  output: string;
}

export interface BatchReport {
  written: string[];
  notices: string[];
  errors: { figure: string; message: string }[];
}

function renderSpec(spec: FigureSpec): string {
  switch (spec.kind) {
    case "saturation_curves":
      return saturationCurves(spec.inputs, spec.labels);
    case "occupancy_timeline":
      return occupancyTimeline(spec.inputs, spec.labels);
    case "ema_curves":
      return emaCurves(spec.inputs[0]);
    case "max_saturation_scatter":
      return maxSaturationScatter(spec.inputs[0]);
    case "time_to_saturation_scatter":
      return timeToSaturationScatter(spec.inputs[0]);
  }
}

/** Render one figure to spec.output; throws without writing on any error. */
export function plot(spec: FigureSpec): string {
  if (spec.inputs.length === 0) {
    throw new Error(`${spec.kind}: no input CSVs given`);
  }
  const svg = renderSpec(spec);
  mkdirSync(dirname(spec.output), { recursive: true });
  if (spec.output.endsWith(".png")) {
    writeFileSync(spec.output, svgToPng(svg));
  } else {
    writeFileSync(spec.output, svg, "utf8");
  }
  return spec.output;
}

function safeName(value: string): string {
  return value.replace(/[^A-Za-z0-9._-]+/g, "_");
}

function runSuffix(row: Record<string, string>, paramCols: string[]): string {
  const parts = [row.run];
  for (const col of paramCols) {
    parts.push(`${safeName(col)}=${safeName(row[col] ?? "")}`);
  }
  return parts.join("-");
}

/**
 * Render the standard figure set for a finished batch.
 *
 * The batch index supplies the run directories (occupancy timelines come
 * straight from them). Analysis tables are looked up in `tablesDir`,
 * default `<index dir>/tables`, the conventional `analyze --out` target;
 * table-driven figures are skipped with a notice when they are absent.
 * Per-figure failures are collected so one bad input cannot sink the rest.
 */
export function plotAll(
  indexPath: string,
  outDir: string,
  format: "svg" | "png" = "svg",
  tablesDir?: string,
): BatchReport {
  const index = readCsv(indexPath);
  requireColumns(index, ["run", "dir", "status"]);
  const tables = tablesDir ?? join(dirname(indexPath), "tables");
  const report: BatchReport = { written: [], notices: [], errors: [] };
  const paramCols = index.columns.filter(
    (c) => !["run", "dir", "status", "error"].includes(c),
  );

  const tryPlot = (spec: FigureSpec) => {
    try {
      report.written.push(plot(spec));
    } catch (err) {
      report.errors.push({
        figure: spec.output,
        message: err instanceof Error ? err.message : String(err),
      });
    }
  };

  for (const row of index.rows) {
    if (row.status !== "ok") {
      const detail = row.error ? `: ${row.error}` : "";
      report.notices.push(`skipped ${row.run} (status ${row.status}${detail})`);
      continue;
    }
    const suffix = runSuffix(row, paramCols);
    tryPlot({
      kind: "occupancy_timeline",
      inputs: [join(row.dir, "occupancy.csv")],
      labels: [row.run],
      output: join(outDir, `occupancy_timeline-${suffix}.${format}`),
    });

    const seriesDir = join(tables, row.run);
    if (!existsSync(seriesDir)) {
      report.notices.push(
        `no saturation series for ${row.run} (expected ${seriesDir}; ` +
        `run the analyze step first)`,
      );
      continue;
    }
    const seriesFiles = readdirSync(seriesDir)
      .filter((f) => f.startsWith("series_") && f.endsWith(".csv"))
      .sort();
    if (seriesFiles.length === 0) {
      report.notices.push(`no saturation series for ${row.run} in ${seriesDir}`);
      continue;
    }
    tryPlot({
      kind: "saturation_curves",
      inputs: seriesFiles.map((f) => join(seriesDir, f)),
      labels: seriesFiles.map((f) => f.slice("series_".length, -".csv".length)),
      output: join(outDir, `saturation_curves-${suffix}.${format}`),
    });
  }

  const satTable = join(tables, "table_saturation_times.csv");
  const emaTable = join(tables, "ema_series.csv");
  if (existsSync(satTable)) {
    tryPlot({
      kind: "max_saturation_scatter",
      inputs: [satTable],
      output: join(outDir, `max_saturation_scatter.${format}`),
    });
    tryPlot({
      kind: "time_to_saturation_scatter",
      inputs: [satTable],
      output: join(outDir, `time_to_saturation_scatter.${format}`),
    });
  } else {
    report.notices.push(`no ${satTable}; scatter figures skipped`);
  }
  if (existsSync(emaTable)) {
    tryPlot({
      kind: "ema_curves",
      inputs: [emaTable],
      output: join(outDir, `ema_curves.${format}`),
    });
  } else {
    report.notices.push(`no ${emaTable}; ema figure skipped`);
  }
  return report;
}
