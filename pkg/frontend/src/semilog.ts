import { Table, column, sampleColumns } from "./csv.js";
import { Frame, LegendEntry, frameBox, legend, xAxis, yAxisLinear, yAxisLog } from "./panel.js";
import { Scale, linearScale, log10Scale, pathFrom, svgDocument, tag } from "./svg.js";

export interface SemilogOptions {
  /** reference decay rates; each draws a dashed exp(slope * t) line in both panels */
  slopes?: number[];
  xLabel?: string;
  yLabel?: string;
}

const WIDTH = 720;
const PANEL_H = 280;
const HEIGHT = 2 * PANEL_H + 140;
const REF_COLORS = ["#d62728", "#8c564b", "#7f3fbf"];
const FAMILY_COLORS: Array<[string, string]> = [
  ["#000000", "#aaaaaa"],
  ["#1f77b4", "#a6c8e8"],
  ["#2a7f3f", "#b3d9bd"],
];

interface Family {
  label: string;
  mean: number[];
  samples: number[][];
  meanColor: string;
  sampleColor: string;
}

function findFamilies(table: Table): Family[] {
  const fams: Family[] = [];
  for (const name of table.columns) {
    if (!name.endsWith("mean")) continue;
    const prefix = name.slice(0, -"mean".length);
    const i = fams.length % FAMILY_COLORS.length;
    fams.push({
      label: prefix === "" ? "mean" : prefix.replace(/_$/, "") + " mean",
      mean: column(table, name),
      samples: sampleColumns(table, prefix).map(c => column(table, c)),
      meanColor: FAMILY_COLORS[i][0],
      sampleColor: FAMILY_COLORS[i][1],
    });
  }
  if (fams.length === 0) {
    throw new Error(`no *mean columns to plot in ${table.path}`);
  }
  return fams;
}

function slopeLabel(s: number): string {
  return `exp(${Number(s.toPrecision(3))} t)`;
}

function drawSeries(f: Frame, sx: Scale, sy: Scale, t: number[], fams: Family[],
                    refs: Array<{ ys: number[]; color: string }>, logFloor?: number): string {
  const keep = (v: number) => (logFloor === undefined ? true : v > logFloor);
  const path = (ys: number[]) =>
    pathFrom(t.map((tv, i) => (keep(ys[i]) ? [sx(tv), sy(ys[i])] : null)));
  const parts: string[] = [];
  for (const fam of fams) {
    for (const s of fam.samples) {
      parts.push(tag("path", { d: path(s), fill: "none", stroke: fam.sampleColor, "stroke-width": 1 }));
    }
  }
  for (const r of refs) {
    parts.push(tag("path", {
      d: path(r.ys), fill: "none", stroke: r.color, "stroke-width": 1.5, "stroke-dasharray": "6 4",
    }));
  }
  for (const fam of fams) {
    parts.push(tag("path", { d: path(fam.mean), fill: "none", stroke: fam.meanColor, "stroke-width": 1.8 }));
  }
  return parts.join("\n");
}

/**
 * Two stacked panels over the same series: linear y above, log10 y below.
 * Values that are not positive are left out of the log panel.
 */
export function renderSemilogPair(table: Table, opts: SemilogOptions = {}): string {
  const t = column(table, "t");
  const fams = findFamilies(table);
  const slopes = opts.slopes ?? [];
  const refs = slopes.map((s, i) => ({
    slope: s,
    ys: t.map(tv => Math.exp(s * tv)),
    color: REF_COLORS[i % REF_COLORS.length],
  }));

  let hi = 0;
  let minPos = Infinity;
  const all = fams.flatMap(f => [f.mean, ...f.samples]).concat(refs.map(r => r.ys));
  for (const ys of all) {
    for (const v of ys) {
      if (v > hi) hi = v;
      if (v > 0 && v < minPos) minPos = v;
    }
  }
  if (hi <= 0) throw new Error(`no positive values to plot in ${table.path}`);

  const top: Frame = { x0: 70, y0: 20, w: WIDTH - 95, h: PANEL_H };
  const bot: Frame = { x0: 70, y0: PANEL_H + 90, w: WIDTH - 95, h: PANEL_H };
  const sx = linearScale([t[0], t[t.length - 1]], [top.x0, top.x0 + top.w]);
  const sxb = linearScale(sx.domain, [bot.x0, bot.x0 + bot.w]);
  const syLin = linearScale([0, hi], [top.y0 + top.h, top.y0]);

  let lo10 = Math.max(-8, Math.floor(Math.log10(Math.min(minPos, 1))));
  const hi10 = Math.ceil(Math.log10(hi));
  if (lo10 >= hi10) lo10 = hi10 - 1;
  const syLog = log10Scale([lo10, hi10], [bot.y0 + bot.h, bot.y0]);
  const floor = Math.pow(10, lo10);

  const yLabel = opts.yLabel ?? "value";
  const entries: LegendEntry[] = [
    ...fams.map(f => ({ label: f.label, color: f.meanColor })),
    ...refs.map(r => ({ label: slopeLabel(r.slope), color: r.color, dashed: true })),
  ];

  const body = [
    frameBox(top),
    xAxis(top, sx, opts.xLabel ?? "t"),
    yAxisLinear(top, syLin, yLabel),
    drawSeries(top, sx, syLin, t, fams, refs),
    legend(top, entries),
    frameBox(bot),
    xAxis(bot, sxb, opts.xLabel ?? "t"),
    yAxisLog(bot, syLog, `${yLabel} (log)`),
    drawSeries(bot, sxb, syLog, t, fams, refs, floor),
  ].join("\n");
  return svgDocument(WIDTH, HEIGHT, body);
}
