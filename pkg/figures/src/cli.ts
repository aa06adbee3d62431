#!/usr/bin/env node
import { realpathSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { plotAll } from "./figures.js";

const USAGE =
  "usage: figures --index FILE --out DIR [--format svg|png] [--tables DIR]";

export function main(argv: string[]): number {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      console.error(USAGE);
      return 2;
    }
    args.set(flag.slice(2), value);
  }
  const index = args.get("index");
  const out = args.get("out");
  const format = args.get("format") ?? "svg";
  if (!index || !out || (format !== "svg" && format !== "png")) {
    console.error(USAGE);
    return 2;
  }

  let report;
  try {
    report = plotAll(index, out, format, args.get("tables"));
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
  for (const path of report.written) console.log(`wrote ${path}`);
  for (const notice of report.notices) console.log(`notice: ${notice}`);
  for (const { figure, message } of report.errors) {
    console.error(`failed ${figure}: ${message}`);
  }
  return report.errors.length > 0 ? 1 : 0;
}

function invokedDirectly(): boolean {
  if (!process.argv[1]) return false;
  try {
    return realpathSync(process.argv[1]) === fileURLToPath(import.meta.url);
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  process.exit(main(process.argv.slice(2)));
}

