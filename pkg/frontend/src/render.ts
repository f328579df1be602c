import { writeFileSync } from "fs";
import { join } from "path";
import { readTable } from "./csv.js";
import { renderBloch3d } from "./bloch.js";
import { renderSemilogPair } from "./semilog.js";
import { renderTimeseries } from "./timeseries.js";

export type PlotKind = "timeseries" | "bloch3d" | "semilog_pair";

export interface PlotSpec {
  input: string;
  kind: PlotKind;
  reference_slopes?: number[];
  output: string;
  x_label?: string;
  y_label?: string;
  y_domain?: [number, number];
}

export function renderToString(spec: PlotSpec): string {
  const table = readTable(spec.input);
  switch (spec.kind) {
    case "timeseries":
      return renderTimeseries(table, {
        xLabel: spec.x_label, yLabel: spec.y_label, yDomain: spec.y_domain,
      });
    case "bloch3d":
      return renderBloch3d(table);
    case "semilog_pair":
      return renderSemilogPair(table, {
        slopes: spec.reference_slopes, xLabel: spec.x_label, yLabel: spec.y_label,
      });
    default:
      throw new Error(`unknown plot kind: ${(spec as { kind: string }).kind}`);
  }
}

/** Render the spec; the output file is only written if rendering succeeds. */
export function render(spec: PlotSpec): string {
  const svg = renderToString(spec);
  writeFileSync(spec.output, svg);
  return spec.output;
}

export const FIGURES = ["fig1", "fig2", "fig3", "fig4"] as const;
export type Figure = (typeof FIGURES)[number];

export function presetSpec(figure: Figure, inDir: string, outDir: string): PlotSpec {
  const input = join(inDir, `${figure}.csv`);
  const output = join(outDir, `${figure}.svg`);
  switch (figure) {
    case "fig1":
      return { input, output, kind: "timeseries", y_label: "fidelity", y_domain: [0, 1] };
    case "fig2":
      return { input, output, kind: "bloch3d" };
    case "fig3":
      return { input, output, kind: "semilog_pair", reference_slopes: [-0.3, -0.15], y_label: "V0 / dB" };
    case "fig4":
      return { input, output, kind: "semilog_pair", reference_slopes: [-0.15], y_label: "V1" };
  }
}
