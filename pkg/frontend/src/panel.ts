import { Scale, fmt, linearTicks, tag, text, tickLabel } from "./svg.js";

export interface Frame {
  x0: number;
  y0: number;
  w: number;
  h: number;
}

export function frameBox(f: Frame): string {
  return tag("rect", {
    x: fmt(f.x0), y: fmt(f.y0), width: fmt(f.w), height: fmt(f.h),
    fill: "none", stroke: "#333", "stroke-width": 1,
  });
}

export function xAxis(f: Frame, sx: Scale, label: string): string {
  const parts: string[] = [];
  for (const v of linearTicks(sx.domain[0], sx.domain[1], 6)) {
    const px = sx(v);
    parts.push(tag("line", { x1: fmt(px), y1: fmt(f.y0 + f.h), x2: fmt(px), y2: fmt(f.y0 + f.h + 4), stroke: "#333" }));
    parts.push(text(px, f.y0 + f.h + 16, tickLabel(v), { "text-anchor": "middle" }));
  }
  parts.push(text(f.x0 + f.w / 2, f.y0 + f.h + 32, label, { "text-anchor": "middle", "font-style": "italic" }));
  return parts.join("");
}

export function yAxisLinear(f: Frame, sy: Scale, label: string): string {
  const parts: string[] = [];
  for (const v of linearTicks(sy.domain[0], sy.domain[1], 5)) {
    const py = sy(v);
    parts.push(tag("line", { x1: fmt(f.x0 - 4), y1: fmt(py), x2: fmt(f.x0), y2: fmt(py), stroke: "#333" }));
    parts.push(tag("line", { x1: fmt(f.x0), y1: fmt(py), x2: fmt(f.x0 + f.w), y2: fmt(py), stroke: "#eee" }));
    parts.push(text(f.x0 - 7, py + 3.5, tickLabel(v), { "text-anchor": "end" }));
  }
  parts.push(text(f.x0 - 44, f.y0 + f.h / 2, label, {
    "text-anchor": "middle",
    transform: `rotate(-90 ${fmt(f.x0 - 44)} ${fmt(f.y0 + f.h / 2)})`,
  }));
  return parts.join("");
}

/** Decade ticks for a log panel; sy takes raw (positive) values. */
export function yAxisLog(f: Frame, sy: Scale, label: string): string {
  const parts: string[] = [];
  const lo = Math.ceil(sy.domain[0]);
  const hi = Math.floor(sy.domain[1]);
  for (let e = lo; e <= hi; e++) {
    const py = sy(Math.pow(10, e));
    parts.push(tag("line", { x1: fmt(f.x0 - 4), y1: fmt(py), x2: fmt(f.x0), y2: fmt(py), stroke: "#333" }));
    parts.push(tag("line", { x1: fmt(f.x0), y1: fmt(py), x2: fmt(f.x0 + f.w), y2: fmt(py), stroke: "#eee" }));
    parts.push(text(f.x0 - 7, py + 3.5, e === 0 ? "1" : `1e${e}`, { "text-anchor": "end" }));
  }
  parts.push(text(f.x0 - 44, f.y0 + f.h / 2, label, {
    "text-anchor": "middle",
    transform: `rotate(-90 ${fmt(f.x0 - 44)} ${fmt(f.y0 + f.h / 2)})`,
  }));
  return parts.join("");
}

export interface LegendEntry {
  label: string;
  color: string;
  dashed?: boolean;
}

export function legend(f: Frame, entries: LegendEntry[]): string {
  const parts: string[] = [];
  let y = f.y0 + 14;
  const x = f.x0 + f.w - 150;
  for (const e of entries) {
    parts.push(tag("line", {
      x1: fmt(x), y1: fmt(y - 3.5), x2: fmt(x + 24), y2: fmt(y - 3.5),
      stroke: e.color, "stroke-width": 2,
      ...(e.dashed ? { "stroke-dasharray": "6 4" } : {}),
    }));
    parts.push(text(x + 30, y, e.label));
    y += 15;
  }
  return parts.join("");
}
