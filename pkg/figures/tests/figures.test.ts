import { existsSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { basename, join } from "node:path";
import { describe, expect, it } from "vitest";
import { plot, plotAll } from "../src/figures.js";
import { makeBatch, tempDir, writeSeriesCsv } from "./fixtures.js";

describe("plot", () => {
  it("writes a single figure from a spec", () => {
    const root = tempDir("figplot-");
    const series = join(root, "series_M1.csv");
    writeSeriesCsv(series, [[0, 5], [100, 100]]);
    const output = join(root, "out", "curve.svg");
    expect(plot({ kind: "saturation_curves", inputs: [series], output })).toBe(output);
    expect(readFileSync(output, "utf8")).toContain("<svg");
  });

  it("writes nothing when the input is bad", () => {
    const root = tempDir("figplot-");
    const series = join(root, "series_E.csv");
    writeSeriesCsv(series, []);
    const output = join(root, "out", "curve.svg");
    expect(() => plot({ kind: "saturation_curves", inputs: [series], output }))
      .toThrow(/no data rows/);
    expect(existsSync(output)).toBe(false);
  });
});

describe("plotAll", () => {
  it("renders every figure kind for a finished batch", () => {
    const root = tempDir("figall-");
    const indexPath = makeBatch(root);
    const out = join(root, "figs");
    const report = plotAll(indexPath, out, "svg");

    expect(report.errors).toEqual([]);
    const names = report.written.map((p) => basename(p)).sort();
    expect(names).toEqual([
      "ema_curves.svg",
      "max_saturation_scatter.svg",
      "occupancy_timeline-run_000-seed=1-router=epidemic.svg",
      "occupancy_timeline-run_001-seed=2-router=wave.svg",
      "saturation_curves-run_000-seed=1-router=epidemic.svg",
      "saturation_curves-run_001-seed=2-router=wave.svg",
      "time_to_saturation_scatter.svg",
    ]);
    for (const path of report.written) {
      expect(existsSync(path)).toBe(true);
    }
    expect(report.notices.some((n) => n.includes("run_002"))).toBe(true);
  });

  it("reruns byte-identically on identical inputs", () => {
    const root = tempDir("figall-");
    const indexPath = makeBatch(root);
    const out = join(root, "figs");
    const first = plotAll(indexPath, out, "svg");
    const snapshots = new Map(
      first.written.map((p) => [p, readFileSync(p)]),
    );
    rmSync(out, { recursive: true });
    const second = plotAll(indexPath, out, "svg");
    expect(second.written.sort()).toEqual(first.written.sort());
    for (const path of second.written) {
      expect(readFileSync(path).equals(snapshots.get(path)!)).toBe(true);
    }
  });

  it("collects per-figure errors and keeps going", () => {
    const root = tempDir("figall-");
    const indexPath = makeBatch(root);
    const broken = join(root, "tables", "run_000", "series_M1.csv");
    writeFileSync(broken, "time,wrong_column\n0,1\n", "utf8");

    const report = plotAll(indexPath, join(root, "figs"), "svg");
    expect(report.errors).toHaveLength(1);
    expect(report.errors[0].message).toContain("saturation_pct");
    expect(report.errors[0].message).toContain(broken);
    // the other run's curves and the batch figures still rendered
    const names = report.written.map((p) => basename(p));
    expect(names.some((n) => n.startsWith("saturation_curves-run_001"))).toBe(true);
    expect(names).toContain("ema_curves.svg");
  });

  it("notices missing analysis tables instead of failing", () => {
    const root = tempDir("figall-");
    const indexPath = makeBatch(root);
    rmSync(join(root, "tables"), { recursive: true });
    const report = plotAll(indexPath, join(root, "figs"), "svg");
    expect(report.errors).toEqual([]);
    const names = report.written.map((p) => basename(p));
    expect(names.every((n) => n.startsWith("occupancy_timeline-"))).toBe(true);
    expect(report.notices.length).toBeGreaterThanOrEqual(3);
  });
});
