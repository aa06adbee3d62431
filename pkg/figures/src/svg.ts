import { linearScale, padDomain, ticks, type Scale } from "./scale.js";

export interface Series {
  label: string;
  kind: "line" | "points";
  points: [number, number][];
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  /** Force an axis window instead of fitting the data. */
  xDomain?: [number, number];
  yDomain?: [number, number];
  width?: number;
  height?: number;
}

// fixed assignment by series order; callers sort series by label first
const PALETTE = [
  "#3465a4", "#cc4125", "#6aa84f", "#8e5ea2",
  "#e69138", "#45818e", "#a64d79", "#666666",
  "#b45f06", "#1c7c54",
];

const FONT = "DejaVu Sans, Helvetica, Arial, sans-serif";

/** Fixed-precision coordinate text so identical inputs give identical bytes. */
export function fmt(value: number): string {
  const rounded = value.toFixed(2);
  return rounded.includes(".") ? rounded.replace(/\.?0+$/, "") : rounded;
}

function tickLabel(value: number): string {
  if (Math.abs(value) >= 1000 && Number.isInteger(value)) return String(value);
  return fmt(value);
}

function fitDomain(values: number[], forced?: [number, number]): [number, number] {
  if (forced) return forced;
  if (values.length === 0) return [0, 1];
  return padDomain(Math.min(...values), Math.max(...values));
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderChart(spec: ChartSpec): string {
  const width = spec.width ?? 760;
  const height = spec.height ?? 460;
  const margin = { top: 40, right: 20, bottom: 52, left: 64 };
  const legendWidth = spec.series.length > 1
    ? Math.min(220, 30 + 7 * Math.max(...spec.series.map((s) => s.label.length)))
    : 0;

  const xs = spec.series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = spec.series.flatMap((s) => s.points.map((p) => p[1]));
  const xd = fitDomain(xs, spec.xDomain);
  const yd = fitDomain(ys, spec.yDomain);
  const plotRight = width - margin.right - legendWidth;
  const x = linearScale(xd, [margin.left, plotRight]);
  const y = linearScale(yd, [height - margin.bottom, margin.top]);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="${FONT}" font-size="12">`,
  );
  parts.push(`<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${fmt((margin.left + plotRight) / 2)}" y="22" text-anchor="middle" ` +
    `font-size="15">${esc(spec.title)}</text>`,
  );

  parts.push(...axes(x, y, spec, margin, height, plotRight));
  parts.push(...seriesMarks(spec.series, x, y));
  if (legendWidth > 0) {
    parts.push(...legend(spec.series, plotRight + 12, margin.top));
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function axes(
  x: Scale, y: Scale, spec: ChartSpec,
  margin: { top: number; bottom: number; left: number },
  height: number, plotRight: number,
): string[] {
  const parts: string[] = [];
  const bottom = height - margin.bottom;

  for (const t of ticks(x.domain[0], x.domain[1])) {
    const px = fmt(x(t));
    parts.push(
      `<line x1="${px}" y1="${fmt(margin.top)}" x2="${px}" y2="${fmt(bottom)}" ` +
      `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px}" y="${fmt(bottom + 18)}" text-anchor="middle">` +
      `${tickLabel(t)}</text>`,
    );
  }
  for (const t of ticks(y.domain[0], y.domain[1])) {
    const py = fmt(y(t));
    parts.push(
      `<line x1="${fmt(margin.left)}" y1="${py}" x2="${fmt(plotRight)}" y2="${py}" ` +
      `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(margin.left - 8)}" y="${fmt(y(t) + 4)}" text-anchor="end">` +
      `${tickLabel(t)}</text>`,
    );
  }

  parts.push(
    `<line x1="${fmt(margin.left)}" y1="${fmt(bottom)}" x2="${fmt(plotRight)}" ` +
    `y2="${fmt(bottom)}" stroke="#333333" stroke-width="1"/>`,
  );
  parts.push(
    `<line x1="${fmt(margin.left)}" y1="${fmt(margin.top)}" x2="${fmt(margin.left)}" ` +
    `y2="${fmt(bottom)}" stroke="#333333" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${fmt((margin.left + plotRight) / 2)}" y="${fmt(bottom + 40)}" ` +
    `text-anchor="middle">${esc(spec.xLabel)}</text>`,
  );
  const yMid = (margin.top + bottom) / 2;
  parts.push(
    `<text x="16" y="${fmt(yMid)}" text-anchor="middle" ` +
    `transform="rotate(-90 16 ${fmt(yMid)})">${esc(spec.yLabel)}</text>`,
  );
  return parts;
}

function seriesMarks(series: Series[], x: Scale, y: Scale): string[] {
  const parts: string[] = [];
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    if (s.kind === "line") {
      if (s.points.length === 0) return;
      const coords = s.points
        .map(([px, py]) => `${fmt(x(px))},${fmt(y(py))}`)
        .join(" ");
      parts.push(
        `<polyline points="${coords}" fill="none" stroke="${color}" ` +
        `stroke-width="1.5"/>`,
      );
    } else {
      for (const [px, py] of s.points) {
        parts.push(
          `<circle cx="${fmt(x(px))}" cy="${fmt(y(py))}" r="2.5" ` +
          `fill="${color}" fill-opacity="0.75"/>`,
        );
      }
    }
  });
  return parts;
}

function legend(series: Series[], xPos: number, yPos: number): string[] {
  const parts: string[] = [];
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const rowY = yPos + 18 * i;
    parts.push(
      `<rect x="${fmt(xPos)}" y="${fmt(rowY)}" width="12" height="12" ` +
      `fill="${color}"/>`,
    );
    parts.push(
      `<text x="${fmt(xPos + 18)}" y="${fmt(rowY + 10)}">${esc(s.label)}</text>`,
    );
  });
  return parts;
}
