export {
  emaCurves,
  FIGURE_KINDS,
  maxSaturationScatter,
  occupancyTimeline,
  saturationCurves,
  timeToSaturationScatter,
  type FigureKind,
} from "./charts.js";
export { MissingColumnError, readCsv, requireColumns } from "./csv.js";
export { plot, plotAll, type BatchReport, type FigureSpec } from "./figures.js";
export { svgToPng } from "./png.js";
export { renderChart, type ChartSpec, type Series } from "./svg.js";
