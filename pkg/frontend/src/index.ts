export { CASE_COLUMNS, RATE_COLUMNS, CsvError, parseCaseCsv, parseRateCsv } from "./csv";
export type { CaseFile, CaseRow, RateRow } from "./csv";
export { logLogSlope } from "./fit";
export { linearScale, logScale, niceTicks, formatTick } from "./scale";
export { SvgSurface, CanvasSurface, surfaceForPath } from "./surface";
export type { Surface } from "./surface";
export {
  FIGURE_KINDS,
  FIGURE_SIZE,
  renderRate,
  renderComponents,
  renderComparison,
  renderSlack,
} from "./figures";
export type { FigureKind, FigureSpec } from "./figures";
export { main, parseArgs, renderFigure } from "./cli";
