import { basename } from "node:path";
import { num, readCsv, requireColumns, type CsvTable } from "./csv.js";
import { renderChart, type Series } from "./svg.js";

export type FigureKind =
  | "saturation_curves"
  | "ema_curves"
  | "occupancy_timeline"
  | "max_saturation_scatter"
  | "time_to_saturation_scatter";

export const FIGURE_KINDS: FigureKind[] = [
  "saturation_curves",
  "ema_curves",
  "occupancy_timeline",
  "max_saturation_scatter",
  "time_to_saturation_scatter",
];

function nonEmpty(table: CsvTable): CsvTable {
  if (table.rows.length === 0) {
    throw new Error(`no data rows in ${table.path}`);
  }
  return table;
}

function sortedByLabel(series: Series[]): Series[] {
  return [...series].sort((a, b) => (a.label < b.label ? -1 : a.label > b.label ? 1 : 0));
}

function xyRows(table: CsvTable, xCol: string, yCol: string): [number, number][] {
  const points: [number, number][] = [];
  for (const row of table.rows) {
    const x = num(row, xCol);
    const y = num(row, yCol);
    if (x !== null && y !== null) points.push([x, y]);
  }
  return points;
}

/** Group a table's rows into one point series per value of `keyCol`. */
function groupedPoints(
  table: CsvTable, keyCol: string, xCol: string, yCol: string,
): Series[] {
  const byKey = new Map<string, [number, number][]>();
  for (const row of table.rows) {
    const x = num(row, xCol);
    const y = num(row, yCol);
    if (x === null || y === null) continue;
    const key = row[keyCol];
    if (!byKey.has(key)) byKey.set(key, []);
    byKey.get(key)!.push([x, y]);
  }
  return sortedByLabel(
    [...byKey.entries()].map(([label, points]) => ({
      label, kind: "points" as const, points,
    })),
  );
}

function defaultLabel(path: string): string {
  return basename(path).replace(/\.csv$/, "");
}

/** One message's coverage over time per input file; 100% is the ceiling. */
export function saturationCurves(inputs: string[], labels?: string[]): string {
  const series: Series[] = inputs.map((path, i) => {
    const table = nonEmpty(readCsv(path));
    requireColumns(table, ["time", "saturation_pct"]);
    return {
      label: labels?.[i] ?? defaultLabel(path),
      kind: "line" as const,
      points: xyRows(table, "time", "saturation_pct"),
    };
  });
  return renderChart({
    title: "Message saturation over time",
    xLabel: "time (s)",
    yLabel: "nodes reached (%)",
    series: sortedByLabel(series),
    yDomain: [0, 102],
  });
}

/** Smoothed time-to-saturation against creation time, one line per run. */
export function emaCurves(input: string): string {
  const table = nonEmpty(readCsv(input));
  requireColumns(table, ["run", "creation_time", "ema"]);
  const grouped = groupedPoints(table, "run", "creation_time", "ema");
  return renderChart({
    title: "Smoothed time to saturation by creation time",
    xLabel: "message creation time (s)",
    yLabel: "time to saturation, smoothed (s)",
    series: grouped.map((s) => ({ ...s, kind: "line" as const })),
  });
}

/** Mean buffer occupancy over time per input file. */
export function occupancyTimeline(inputs: string[], labels?: string[]): string {
  const series: Series[] = inputs.map((path, i) => {
    const table = nonEmpty(readCsv(path));
    requireColumns(table, ["time", "mean_occupancy_pct"]);
    return {
      label: labels?.[i] ?? defaultLabel(path),
      kind: "line" as const,
      points: xyRows(table, "time", "mean_occupancy_pct"),
    };
  });
  return renderChart({
    title: "Mean buffer occupancy over time",
    xLabel: "time (s)",
    yLabel: "mean occupancy (%)",
    series: sortedByLabel(series),
    yDomain: [0, 102],
  });
}

/** Final coverage of every message against its creation time, per run. */
export function maxSaturationScatter(input: string): string {
  const table = nonEmpty(readCsv(input));
  requireColumns(table, ["run", "creation_time", "final_saturation_pct"]);
  return renderChart({
    title: "Final saturation by creation time",
    xLabel: "message creation time (s)",
    yLabel: "final saturation (%)",
    series: groupedPoints(table, "run", "creation_time", "final_saturation_pct"),
    yDomain: [0, 102],
  });
}

/** Time to full coverage against creation time; unsaturated messages are skipped. */
export function timeToSaturationScatter(input: string): string {
  const table = nonEmpty(readCsv(input));
  requireColumns(table, ["run", "creation_time", "time_to_saturation"]);
  return renderChart({
    title: "Time to saturation by creation time",
    xLabel: "message creation time (s)",
    yLabel: "time to saturation (s)",
    series: groupedPoints(table, "run", "creation_time", "time_to_saturation"),
  });
}
