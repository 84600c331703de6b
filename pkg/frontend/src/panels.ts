/**
 * Panel specifications and rendering.
 *
 * A panel maps columns of one fairsel output file onto chart series:
 * per-algorithm curves, optional dashed overlays (bound curves, asymptotic
 * references), optional per-series uncertainty bands, and the shaded
 * improvement-region band read from the alpha_min/alpha_max columns.
 * Rendering is read-only over the data files and writes one SVG and one
 * PNG per panel.
 */

import { mkdirSync, writeFileSync, existsSync, readFileSync } from "fs";
import path from "path";
import { Resvg } from "@resvg/resvg-js";

import { buildChart, ChartSpec, PALETTE, SeriesData, VerticalBand } from "./chart.js";
import { asNumber, DataFile, readDataFile, Row } from "./data.js";

export interface SeriesSpec {
  /** column holding the y values */
  column: string;
  /** restrict to rows with this algorithm tag; omit for alpha-indexed columns */
  algorithm?: string;
  label?: string;
  color?: string;
  dash?: string;
  /** column holding a half-width to shade as y +- band */
  band?: string;
}

export interface PanelSpec {
  id: string;
  input: string;
  title?: string;
  x?: string;
  xLabel?: string;
  yLabel?: string;
  series: SeriesSpec[];
  /** dashed reference curves (deduplicated on x when algorithm is omitted) */
  overlays?: SeriesSpec[];
  /** shade [alpha_min, alpha_max] read from the data columns */
  shadeRegion?: boolean;
  yMin?: number;
  yMax?: number;
  width?: number;
  height?: number;
}

export interface RenderResult {
  id: string;
  svgPath: string;
  pngPath: string;
}

export interface ManifestOutcome {
  rendered: RenderResult[];
  failures: { id: string; error: string }[];
}

function requireColumn(data: DataFile, column: string): void {
  if (!data.columns.includes(column)) {
    throw new Error(`column "${column}" not present in ${data.source}`);
  }
}

function extractSeries(
  data: DataFile,
  spec: SeriesSpec,
  xColumn: string,
  index: number,
  dedupe: boolean
): SeriesData {
  requireColumn(data, xColumn);
  requireColumn(data, spec.column);
  if (spec.band) requireColumn(data, spec.band);

  let rows: Row[] = data.rows;
  if (spec.algorithm !== undefined) {
    requireColumn(data, "algorithm");
    rows = rows.filter((r) => r.algorithm === spec.algorithm);
  }
  const xs: number[] = [];
  const ys: number[] = [];
  const lo: number[] = [];
  const hi: number[] = [];
  const seen = new Set<number>();
  for (const row of rows) {
    const x = asNumber(row[xColumn]);
    const y = asNumber(row[spec.column]);
    if (x === null || y === null) continue;
    if (dedupe && spec.algorithm === undefined) {
      if (seen.has(x)) continue;
      seen.add(x);
    }
    xs.push(x);
    ys.push(y);
    if (spec.band) {
      const half = asNumber(row[spec.band]) ?? 0;
      lo.push(y - half);
      hi.push(y + half);
    }
  }
  const order = xs.map((_, i) => i).sort((a, b) => xs[a] - xs[b]);
  const sorted = (arr: number[]) => order.map((i) => arr[i]);
  return {
    x: sorted(xs),
    y: sorted(ys),
    label: spec.label ?? (spec.algorithm ? `${spec.algorithm} ${spec.column}` : spec.column),
    color: spec.color ?? PALETTE[index % PALETTE.length],
    dash: spec.dash,
    band: spec.band ? { lo: sorted(lo), hi: sorted(hi) } : undefined,
  };
}

function regionBand(data: DataFile): VerticalBand {
  requireColumn(data, "alpha_min");
  requireColumn(data, "alpha_max");
  const row = data.rows.find(
    (r) => asNumber(r.alpha_min) !== null && asNumber(r.alpha_max) !== null
  );
  if (!row) {
    throw new Error(`no finite alpha_min/alpha_max values in ${data.source}`);
  }
  return {
    from: asNumber(row.alpha_min)!,
    to: asNumber(row.alpha_max)!,
    color: "#40916c",
    label: "no-guarantee budget region",
  };
}

export function panelChart(panel: PanelSpec, data: DataFile): ChartSpec {
  const xColumn = panel.x ?? "alpha";
  const series: SeriesData[] = [];
  panel.series.forEach((spec, i) => {
    series.push(extractSeries(data, spec, xColumn, i, false));
  });
  (panel.overlays ?? []).forEach((spec, i) => {
    series.push(
      extractSeries(
        data,
        { dash: "6,3", ...spec },
        xColumn,
        panel.series.length + i,
        true
      )
    );
  });
  if (series.every((s) => s.x.length === 0)) {
    throw new Error(`panel "${panel.id}": no data points in ${data.source}`);
  }
  return {
    title: panel.title ?? panel.id,
    subtitle: data.meta ? `${data.meta.tool ?? "?"} ${data.meta.version ?? ""} ${data.meta.command ?? ""}`.trim() : undefined,
    xLabel: panel.xLabel ?? xColumn,
    yLabel: panel.yLabel ?? panel.series[0]?.column ?? "value",
    series,
    vbands: panel.shadeRegion ? [regionBand(data)] : undefined,
    yMin: panel.yMin,
    yMax: panel.yMax,
    width: panel.width,
    height: panel.height,
  };
}

export function renderPanel(panel: PanelSpec, dataDir: string, outDir: string): RenderResult {
  const inputPath = path.join(dataDir, panel.input);
  if (!existsSync(inputPath)) {
    throw new Error(`input file not found: ${inputPath}`);
  }
  const data = readDataFile(inputPath);
  const svg = buildChart(panelChart(panel, data));
  mkdirSync(outDir, { recursive: true });
  const svgPath = path.join(outDir, `${panel.id}.svg`);
  const pngPath = path.join(outDir, `${panel.id}.png`);
  writeFileSync(svgPath, svg, "utf-8");
  const png = new Resvg(svg, { fitTo: { mode: "original" } }).render().asPng();
  writeFileSync(pngPath, png);
  return { id: panel.id, svgPath, pngPath };
}

export interface Manifest {
  panels: PanelSpec[];
}

export function loadManifest(manifestPath: string): Manifest {
  const doc = JSON.parse(readFileSync(manifestPath, "utf-8")) as Manifest;
  if (!Array.isArray(doc.panels)) {
    throw new Error(`${manifestPath}: expected a "panels" array`);
  }
  const ids = new Set<string>();
  for (const panel of doc.panels) {
    if (!panel.id || !panel.input || !Array.isArray(panel.series)) {
      throw new Error(`${manifestPath}: every panel needs id, input and series`);
    }
    if (ids.has(panel.id)) {
      throw new Error(`${manifestPath}: duplicate panel id "${panel.id}"`);
    }
    ids.add(panel.id);
  }
  return doc;
}

export function renderAll(manifestPath: string, dataDir: string, outDir: string): ManifestOutcome {
  const manifest = loadManifest(manifestPath);
  const rendered: RenderResult[] = [];
  const failures: { id: string; error: string }[] = [];
  for (const panel of manifest.panels) {
    try {
      rendered.push(renderPanel(panel, dataDir, outDir));
    } catch (err) {
      failures.push({ id: panel.id, error: err instanceof Error ? err.message : String(err) });
    }
  }
  return { rendered, failures };
}
