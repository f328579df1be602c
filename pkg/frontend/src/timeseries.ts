import { Table, column, sampleColumns } from "./csv.js";
import { Frame, frameBox, legend, xAxis, yAxisLinear } from "./panel.js";
import { linearScale, pathFrom, svgDocument, tag } from "./svg.js";

export interface TimeseriesOptions {
  xLabel?: string;
  yLabel?: string;
  /** fixed y range (e.g. [0, 1] for fidelity); defaults to the data range */
  yDomain?: [number, number];
}

const WIDTH = 720;
const HEIGHT = 420;

/**
 * Single-axis sample bundle: every `sample_<k>` column in gray, the
 * `mean` column on top in black.
 */
export function renderTimeseries(table: Table, opts: TimeseriesOptions = {}): string {
  const t = column(table, "t");
  const mean = column(table, "mean");
  const samples = sampleColumns(table, "");

  let lo = Infinity;
  let hi = -Infinity;
  for (const name of [...samples, "mean"]) {
    for (const v of column(table, name)) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  const yDomain = opts.yDomain ?? [lo, hi === lo ? lo + 1 : hi];

  const f: Frame = { x0: 60, y0: 20, w: WIDTH - 80, h: HEIGHT - 80 };
  const sx = linearScale([t[0], t[t.length - 1]], [f.x0, f.x0 + f.w]);
  const sy = linearScale(yDomain, [f.y0 + f.h, f.y0]);

  const parts: string[] = [frameBox(f), xAxis(f, sx, opts.xLabel ?? "t"), yAxisLinear(f, sy, opts.yLabel ?? "value")];
  for (const name of samples) {
    const ys = column(table, name);
    parts.push(tag("path", {
      d: pathFrom(t.map((tv, i) => [sx(tv), sy(ys[i])])),
      fill: "none", stroke: "#999999", "stroke-width": 1,
    }));
  }
  parts.push(tag("path", {
    d: pathFrom(t.map((tv, i) => [sx(tv), sy(mean[i])])),
    fill: "none", stroke: "#000000", "stroke-width": 2,
  }));
  parts.push(legend(f, [
    { label: `samples (${samples.length})`, color: "#999999" },
    { label: "mean", color: "#000000" },
  ]));
  return svgDocument(WIDTH, HEIGHT, parts.join("\n"));
}
