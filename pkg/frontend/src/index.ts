export { MissingColumnError, column, parseCsv, readTable, sampleColumns } from "./csv.js";
export type { Table } from "./csv.js";
export { renderTimeseries } from "./timeseries.js";
export { renderBloch3d } from "./bloch.js";
export { renderSemilogPair } from "./semilog.js";
export { FIGURES, presetSpec, render, renderToString } from "./render.js";
export type { Figure, PlotKind, PlotSpec } from "./render.js";
