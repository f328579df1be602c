import { Table, column, requireColumns } from "./csv.js";
import { legend } from "./panel.js";
import { fmt, pathFrom, svgDocument, tag, text } from "./svg.js";

const WIDTH = 560;
const HEIGHT = 560;
const RADIUS = 200;
const CX = WIDTH / 2;
const CY = HEIGHT / 2 + 10;

// orthographic camera: azimuth/elevation in radians
const AZ = (35 * Math.PI) / 180;
const EL = (22 * Math.PI) / 180;
const RIGHT = [-Math.sin(AZ), Math.cos(AZ), 0];
const UP = [-Math.sin(EL) * Math.cos(AZ), -Math.sin(EL) * Math.sin(AZ), Math.cos(EL)];
const VIEW = [Math.cos(EL) * Math.cos(AZ), Math.cos(EL) * Math.sin(AZ), Math.sin(EL)];

function project(p: [number, number, number]): [number, number, number] {
  const sx = p[0] * RIGHT[0] + p[1] * RIGHT[1] + p[2] * RIGHT[2];
  const sy = p[0] * UP[0] + p[1] * UP[1] + p[2] * UP[2];
  const depth = p[0] * VIEW[0] + p[1] * VIEW[1] + p[2] * VIEW[2];
  return [CX + RADIUS * sx, CY - RADIUS * sy, depth];
}

function wirePath(points: Array<[number, number, number]>, front: boolean): string {
  // keep only the requested depth side, breaking the line at the seam
  const pts: Array<[number, number] | null> = points.map(p => {
    const [x, y, d] = project(p);
    return front === d >= 0 ? [x, y] : null;
  });
  return pathFrom(pts);
}

function circlePoints(make: (s: number) => [number, number, number], n = 120): Array<[number, number, number]> {
  const pts: Array<[number, number, number]> = [];
  for (let i = 0; i <= n; i++) pts.push(make((2 * Math.PI * i) / n));
  return pts;
}

function wireframe(): string {
  const parts: string[] = [];
  const circles: Array<Array<[number, number, number]>> = [];
  for (const z of [-0.6, 0, 0.6]) {
    const r = Math.sqrt(1 - z * z);
    circles.push(circlePoints(s => [r * Math.cos(s), r * Math.sin(s), z]));
  }
  for (const az of [0, Math.PI / 2]) {
    circles.push(circlePoints(s => [Math.cos(az) * Math.cos(s), Math.sin(az) * Math.cos(s), Math.sin(s)]));
  }
  for (const c of circles) {
    parts.push(tag("path", { d: wirePath(c, false), fill: "none", stroke: "#bbbbbb", "stroke-width": 0.7, opacity: 0.5 }));
    parts.push(tag("path", { d: wirePath(c, true), fill: "none", stroke: "#999999", "stroke-width": 0.7 }));
  }
  // silhouette of the unit sphere is the unit circle in any orthographic view
  parts.push(tag("circle", { cx: fmt(CX), cy: fmt(CY), r: fmt(RADIUS), fill: "none", stroke: "#555555", "stroke-width": 1.2 }));
  for (const [axis, label] of [[[1.25, 0, 0], "x"], [[0, 1.25, 0], "y"], [[0, 0, 1.25], "z"]] as
       Array<[[number, number, number], string]>) {
    const [x0, y0] = project([0, 0, 0]);
    const [x1, y1] = project(axis);
    parts.push(tag("line", { x1: fmt(x0), y1: fmt(y0), x2: fmt(x1), y2: fmt(y1), stroke: "#888888", "stroke-width": 0.8 }));
    parts.push(text(x1 + 4, y1 + 4, label, { "font-style": "italic" }));
  }
  return parts.join("\n");
}

function curve(xs: number[], ys: number[], zs: number[], color: string): string {
  const pts: Array<[number, number]> = xs.map((_, i) => {
    const [px, py] = project([xs[i], ys[i], zs[i]]);
    return [px, py];
  });
  const parts = [tag("path", { d: pathFrom(pts), fill: "none", stroke: color, "stroke-width": 1.4 })];
  const [sx, sy] = pts[0];
  const [ex, ey] = pts[pts.length - 1];
  parts.push(tag("circle", { cx: fmt(sx), cy: fmt(sy), r: 4, fill: "#ffffff", stroke: color, "stroke-width": 1.5 }));
  // end point drawn as a filled blue dot on both curves
  parts.push(tag("circle", { cx: fmt(ex), cy: fmt(ey), r: 4.5, fill: "#1f4fd8", stroke: "none" }));
  return parts.join("\n");
}

/** Two Bloch-vector paths (actual state and filter) on a unit sphere. */
export function renderBloch3d(table: Table): string {
  requireColumns(table, ["t", "x", "y", "z", "x_hat", "y_hat", "z_hat"]);
  const parts: string[] = [wireframe()];
  parts.push(curve(column(table, "x"), column(table, "y"), column(table, "z"), "#2a7f3f"));
  parts.push(curve(column(table, "x_hat"), column(table, "y_hat"), column(table, "z_hat"), "#d62728"));
  parts.push(legend({ x0: 16, y0: 10, w: 160, h: 0 }, [
    { label: "rho", color: "#2a7f3f" },
    { label: "rho_hat", color: "#d62728" },
    { label: "end point", color: "#1f4fd8" },
  ]));
  return svgDocument(WIDTH, HEIGHT, parts.join("\n"));
}
