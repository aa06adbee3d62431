import { mkdirSync, mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export function tempDir(prefix: string): string {
  return mkdtempSync(join(tmpdir(), prefix));
}

export function writeSeriesCsv(path: string, points: [number, number][]): void {
  const lines = ["time,saturation_pct"];
  for (const [t, pct] of points) lines.push(`${t.toFixed(4)},${pct.toFixed(4)}`);
  writeFileSync(path, lines.join("\n") + "\n", "utf8");
}

export function writeOccupancyCsv(path: string, points: [number, number][]): void {
  const lines = ["time,mean_occupancy_pct"];
  for (const [t, pct] of points) lines.push(`${t.toFixed(4)},${pct.toFixed(6)}`);
  writeFileSync(path, lines.join("\n") + "\n", "utf8");
}

/**
 * Lay out a finished two-run batch plus one failed run, in the shape the
 * simulator's batch and analyze commands leave behind:
 *
 *   root/index.csv
 *   root/run_000/occupancy.csv      (run_001 likewise)
 *   root/tables/table_saturation_times.csv, ema_series.csv
 *   root/tables/run_000/series_M1.csv   (run_001 likewise)
 */
export function makeBatch(root: string): string {
  const indexPath = join(root, "index.csv");
  const rows = [
    "run,dir,seed,router,status,error",
    `run_000,${join(root, "run_000")},1,epidemic,ok,`,
    `run_001,${join(root, "run_001")},2,wave,ok,`,
    `run_002,${join(root, "run_002")},3,epidemic,error,"ConfigError: boom, with comma"`,
  ];
  writeFileSync(indexPath, rows.join("\n") + "\n", "utf8");

  for (const run of ["run_000", "run_001"]) {
    mkdirSync(join(root, run), { recursive: true });
    writeOccupancyCsv(join(root, run, "occupancy.csv"), [
      [0, 0], [10, 0.21], [20, 0.38], [30, 0.4128], [40, 0.4128],
    ]);
  }

  const tables = join(root, "tables");
  mkdirSync(join(tables, "run_000"), { recursive: true });
  mkdirSync(join(tables, "run_001"), { recursive: true });
  writeSeriesCsv(join(tables, "run_000", "series_M1.csv"), [
    [0, 1], [60, 24], [120, 61], [180, 88], [240, 100],
  ]);
  writeSeriesCsv(join(tables, "run_001", "series_M1.csv"), [
    [0, 1], [80, 19], [160, 52], [240, 83], [320, 100],
  ]);

  writeFileSync(
    join(tables, "table_saturation_times.csv"),
    [
      "run,seed,router,buffer,traffic,group1.count,group2.count,nodes_total," +
      "message_id,creation_time,time_to_saturation,final_saturation_pct," +
      "unique_receivers,redeliveries",
      "run_000,1,epidemic,500000,one,2,18,20,M1,0.0000,240.0000,100.0000,20,0",
      "run_001,2,wave,500000,one,2,18,20,M1,0.0000,320.0000,100.0000,20,0",
    ].join("\n") + "\n",
    "utf8",
  );
  writeFileSync(
    join(tables, "ema_series.csv"),
    [
      "run,message_id,creation_time,time_to_saturation,ema",
      "run_000,M1,0.0000,240.0000,240.0000",
      "run_001,M1,0.0000,320.0000,320.0000",
    ].join("\n") + "\n",
    "utf8",
  );
  return indexPath;
}
