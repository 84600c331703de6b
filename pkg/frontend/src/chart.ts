/**
 * Minimal dependency-free SVG line charts: polyline series with optional
 * per-series uncertainty bands, dashed overlay curves, shaded vertical
 * x-bands, axes with nice ticks, and a legend.  Output is a deterministic
 * SVG string (no timestamps, no randomness) so reruns are byte-identical.
 */

export interface SeriesData {
  x: number[];
  y: number[];
  label: string;
  color: string;
  width?: number;
  dash?: string;
  /** lower/upper envelope drawn as a translucent band behind the line */
  band?: { lo: number[]; hi: number[] };
}

export interface VerticalBand {
  from: number;
  to: number;
  color: string;
  label?: string;
}

export interface ChartSpec {
  title: string;
  subtitle?: string;
  xLabel: string;
  yLabel: string;
  series: SeriesData[];
  vbands?: VerticalBand[];
  width?: number;
  height?: number;
  yMin?: number;
  yMax?: number;
}

export const PALETTE = ["#4361ee", "#e63946", "#2d6a4f", "#f4a261", "#7b2cbf", "#118ab2"];

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export function niceTicks(min: number, max: number, count: number): number[] {
  if (max - min === 0) {
    min -= 0.5;
    max += 0.5;
  }
  const range = max - min;
  const rough = range / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rough)));
  const step = [1, 2, 2.5, 5, 10].map((m) => m * mag).find((s) => s >= rough) ?? rough;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / step) * step; v <= max + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1000 || abs < 0.001) return v.toExponential(0);
  return parseFloat(v.toPrecision(4)).toString();
}

export function buildChart(spec: ChartSpec): string {
  const W = spec.width ?? 640;
  const H = spec.height ?? 400;
  const ml = 64;
  const mr = 20;
  const mt = spec.subtitle ? 48 : 36;
  const mb = 46;
  const pw = W - ml - mr;
  const ph = H - mt - mb;

  const finitePoints = spec.series.flatMap((s) =>
    s.x.map((x, i) => [x, s.y[i]] as const).filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y))
  );
  if (finitePoints.length === 0) {
    throw new Error(`chart "${spec.title}": no finite data points`);
  }
  const xs = finitePoints.map(([x]) => x);
  const ys = finitePoints.map(([, y]) => y);
  const bandYs = spec.series.flatMap((s) => (s.band ? [...s.band.lo, ...s.band.hi] : []));
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const dataYMin = Math.min(...ys, ...bandYs.filter(Number.isFinite));
  const dataYMax = Math.max(...ys, ...bandYs.filter(Number.isFinite));
  const pad = (dataYMax - dataYMin || 1) * 0.06;
  const yMin = spec.yMin ?? dataYMin - pad;
  const yMax = spec.yMax ?? dataYMax + pad;

  const xOf = (v: number) => ml + ((v - xMin) / (xMax - xMin || 1)) * pw;
  const yOf = (v: number) => mt + ph - ((v - yMin) / (yMax - yMin || 1)) * ph;

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" width="${W}" height="${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#ffffff"/>\n`;
  s += `<text x="${ml}" y="18" font-size="13" font-weight="600" fill="#222">${esc(spec.title)}</text>\n`;
  if (spec.subtitle) {
    s += `<text x="${ml}" y="32" font-size="9" fill="#888">${esc(spec.subtitle)}</text>\n`;
  }
  s += `<defs><clipPath id="plot"><rect x="${ml}" y="${mt}" width="${pw}" height="${ph}"/></clipPath></defs>\n`;

  // shaded vertical bands (drawn first, under everything)
  for (const band of spec.vbands ?? []) {
    if (!Number.isFinite(band.from) || !Number.isFinite(band.to)) continue;
    const x0 = xOf(Math.max(xMin, Math.min(band.from, band.to)));
    const x1 = xOf(Math.min(xMax, Math.max(band.from, band.to)));
    const w = Math.max(x1 - x0, 1.2); // degenerate band still visible as a line
    s += `<rect class="vband" x="${x0.toFixed(2)}" y="${mt}" width="${w.toFixed(2)}" height="${ph}" fill="${band.color}" opacity="0.18"/>\n`;
  }

  // grid and ticks
  for (const v of niceTicks(yMin, yMax, 6)) {
    const y = yOf(v);
    s += `<line x1="${ml}" y1="${y.toFixed(2)}" x2="${ml + pw}" y2="${y.toFixed(2)}" stroke="#e8e8e8" stroke-width="0.6"/>\n`;
    s += `<text x="${ml - 6}" y="${(y + 3).toFixed(2)}" font-size="9" fill="#555" text-anchor="end">${esc(fmtTick(v))}</text>\n`;
  }
  for (const v of niceTicks(xMin, xMax, 8)) {
    const x = xOf(v);
    s += `<line x1="${x.toFixed(2)}" y1="${mt + ph}" x2="${x.toFixed(2)}" y2="${mt + ph + 4}" stroke="#555" stroke-width="0.8"/>\n`;
    s += `<text x="${x.toFixed(2)}" y="${mt + ph + 15}" font-size="9" fill="#555" text-anchor="middle">${esc(fmtTick(v))}</text>\n`;
  }
  s += `<rect x="${ml}" y="${mt}" width="${pw}" height="${ph}" fill="none" stroke="#999" stroke-width="0.8"/>\n`;
  s += `<text x="${ml + pw / 2}" y="${H - 8}" font-size="11" fill="#333" text-anchor="middle">${esc(spec.xLabel)}</text>\n`;
  s += `<text x="14" y="${mt + ph / 2}" font-size="11" fill="#333" text-anchor="middle" transform="rotate(-90 14 ${mt + ph / 2})">${esc(spec.yLabel)}</text>\n`;

  // uncertainty bands
  for (const series of spec.series) {
    if (!series.band) continue;
    const pts: string[] = [];
    const back: string[] = [];
    series.x.forEach((x, i) => {
      const lo = series.band!.lo[i];
      const hi = series.band!.hi[i];
      if (Number.isFinite(x) && Number.isFinite(lo) && Number.isFinite(hi)) {
        pts.push(`${xOf(x).toFixed(2)},${yOf(hi).toFixed(2)}`);
        back.unshift(`${xOf(x).toFixed(2)},${yOf(lo).toFixed(2)}`);
      }
    });
    if (pts.length >= 2) {
      s += `<polygon class="band" clip-path="url(#plot)" points="${pts.join(" ")} ${back.join(" ")}" fill="${series.color}" opacity="0.15"/>\n`;
    }
  }

  // series lines
  for (const series of spec.series) {
    const pts = series.x
      .map((x, i) => [x, series.y[i]] as const)
      .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y))
      .map(([x, y]) => `${xOf(x).toFixed(2)},${yOf(y).toFixed(2)}`);
    if (pts.length === 0) continue;
    const dash = series.dash ? ` stroke-dasharray="${series.dash}"` : "";
    if (pts.length === 1) {
      const [cx, cy] = pts[0].split(",");
      s += `<circle clip-path="url(#plot)" cx="${cx}" cy="${cy}" r="2.5" fill="${series.color}"/>\n`;
    } else {
      s += `<polyline clip-path="url(#plot)" points="${pts.join(" ")}" fill="none" stroke="${series.color}" stroke-width="${series.width ?? 1.6}"${dash}/>\n`;
    }
  }

  // legend
  let ly = mt + 8;
  const lx = ml + 10;
  for (const series of spec.series) {
    const dash = series.dash ? ` stroke-dasharray="${series.dash}"` : "";
    s += `<line x1="${lx}" y1="${ly}" x2="${lx + 18}" y2="${ly}" stroke="${series.color}" stroke-width="2"${dash}/>\n`;
    s += `<text x="${lx + 23}" y="${ly + 3}" font-size="9" fill="#333">${esc(series.label)}</text>\n`;
    ly += 13;
  }
  for (const band of spec.vbands ?? []) {
    if (!band.label) continue;
    s += `<rect x="${lx}" y="${ly - 6}" width="18" height="8" fill="${band.color}" opacity="0.25"/>\n`;
    s += `<text x="${lx + 23}" y="${ly + 3}" font-size="9" fill="#333">${esc(band.label)}</text>\n`;
    ly += 13;
  }

  s += "</svg>\n";
  return s;
}
