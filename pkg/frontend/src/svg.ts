// Small SVG string builders. Everything is deterministic: fixed-precision
// coordinates, no timestamps, no ids — identical input gives identical bytes.

export function fmt(v: number): string {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export function attrs(a: Record<string, string | number>): string {
  return Object.entries(a)
    .map(([k, v]) => ` ${k}="${v}"`)
    .join("");
}

export function tag(name: string, a: Record<string, string | number>, body = ""): string {
  return body === "" ? `<${name}${attrs(a)}/>` : `<${name}${attrs(a)}>${body}</${name}>`;
}

export function text(x: number, y: number, s: string, extra: Record<string, string | number> = {}): string {
  return tag("text", { x: fmt(x), y: fmt(y), "font-family": "sans-serif", "font-size": 11, fill: "#333", ...extra }, s);
}

/** Polyline path; points with a non-finite coordinate break the line. */
export function pathFrom(points: Array<[number, number] | null>): string {
  let d = "";
  let pen = false;
  for (const p of points) {
    if (p === null || !Number.isFinite(p[0]) || !Number.isFinite(p[1])) {
      pen = false;
      continue;
    }
    d += `${pen ? "L" : "M"}${fmt(p[0])} ${fmt(p[1])}`;
    pen = true;
  }
  return d;
}

export function svgDocument(width: number, height: number, body: string): string {
  return `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">\n` +
    tag("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }) + "\n" +
    body + "\n</svg>\n";
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const k = d1 === d0 ? 0 : (r1 - r0) / (d1 - d0);
  const f = ((v: number) => r0 + (v - d0) * k) as Scale;
  f.domain = domain;
  return f;
}

/** domain in log10 units */
export function log10Scale(domain: [number, number], range: [number, number]): Scale {
  const lin = linearScale(domain, range);
  const f = ((v: number) => lin(Math.log10(v))) as Scale;
  f.domain = domain;
  return f;
}

export function linearTicks(lo: number, hi: number, n = 5): number[] {
  const span = hi - lo;
  if (!(span > 0)) return [lo];
  const step0 = span / n;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= step0) { step = m * mag; break; }
  }
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0);
  return String(Number(v.toPrecision(6)));
}
