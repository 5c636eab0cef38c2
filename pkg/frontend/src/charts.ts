/**
 * Histogram charts as plain SVG.  Buckets come from the sampler exactly as
 * computed server-side (integer dollars, round half up); the chart never
 * re-bins, so on-screen counts match CLI counts bit for bit.
 *
 * Geometry is computed separately from markup so tests can assert layout
 * without a DOM.
 */

import type { TargetResult } from "./types.js";
import { formatStat } from "./viewmodel.js";

export interface Bar {
  bucket: number;
  count: number;
  /** [0, 1] of the tallest bar across all series in the chart */
  height: number;
  series: number;
}

export interface HistogramGeometry {
  buckets: number[]; // contiguous covered range, ascending
  bars: Bar[];
  maxCount: number;
  seriesLabels: string[];
}

function bucketsOf(hist: Record<string, number>): Map<number, number> {
  const out = new Map<number, number>();
  for (const [key, count] of Object.entries(hist)) {
    out.set(Number(key), count);
  }
  return out;
}

/** Width of the occupied bucket range; the tightness measure used when
 * comparing scenario spreads. */
export function bucketSpread(result: TargetResult): number {
  const keys = Object.keys(result.histogram).map(Number);
  if (keys.length === 0) return 0;
  return Math.max(...keys) - Math.min(...keys) + 1;
}

export function histogramGeometry(series: TargetResult[],
                                  labels: string[]): HistogramGeometry {
  const maps = series.map((s) => bucketsOf(s.histogram));
  const all = maps.flatMap((m) => [...m.keys()]);
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const buckets: number[] = [];
  for (let b = lo; b <= hi; b++) buckets.push(b);
  const maxCount = Math.max(...maps.flatMap((m) => [...m.values()]));
  const bars: Bar[] = [];
  maps.forEach((m, seriesIdx) => {
    for (const bucket of buckets) {
      const count = m.get(bucket) ?? 0;
      if (count > 0) {
        bars.push({ bucket, count, height: count / maxCount, series: seriesIdx });
      }
    }
  });
  return { buckets, bars, maxCount, seriesLabels: labels };
}

const SERIES_FILL = ["rgba(31,119,180,0.65)", "rgba(214,39,40,0.55)"];

export interface ChartOptions {
  width?: number;
  height?: number;
  title?: string;
}

/** Renders one target's histogram(s) -- pass two series for an overlay
 * comparison -- with mean/sigma labels at full displayed precision. */
export function histogramSvg(series: TargetResult[], labels: string[],
                             options: ChartOptions = {}): string {
  const width = options.width ?? 420;
  const height = options.height ?? 180;
  const margin = { top: 28, right: 8, bottom: 22, left: 8 };
  const geom = histogramGeometry(series, labels);
  const plotW = width - margin.left - margin.right;
  const plotH = height - margin.top - margin.bottom;
  const slot = plotW / geom.buckets.length;
  const barW = Math.max(2, (slot - 2) / series.length);
  const index = new Map(geom.buckets.map((b, i) => [b, i]));

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" ` +
    `class="histogram" role="img">`);
  if (options.title) {
    parts.push(`<text x="${margin.left}" y="14" class="chart-title">` +
      `${options.title}</text>`);
  }
  for (const bar of geom.bars) {
    const x = margin.left + (index.get(bar.bucket) ?? 0) * slot + bar.series * barW;
    const h = bar.height * plotH;
    const y = margin.top + (plotH - h);
    parts.push(`<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" ` +
      `width="${barW.toFixed(2)}" height="${h.toFixed(2)}" ` +
      `fill="${SERIES_FILL[bar.series % SERIES_FILL.length]}" ` +
      `data-bucket="${bar.bucket}" data-count="${bar.count}" ` +
      `data-series="${bar.series}"/>`);
  }
  // x-axis bucket labels at a readable density
  const step = Math.max(1, Math.ceil(geom.buckets.length / 12));
  geom.buckets.forEach((bucket, i) => {
    if (i % step === 0) {
      const x = margin.left + i * slot + slot / 2;
      parts.push(`<text x="${x.toFixed(2)}" y="${height - 6}" ` +
        `class="axis-label" text-anchor="middle">${bucket}</text>`);
    }
  });
  // per-series statistics labels
  series.forEach((s, i) => {
    parts.push(`<text x="${width - margin.right}" y="${14 + i * 12}" ` +
      `class="stat-label series-${i}" text-anchor="end">` +
      `${labels[i]}: mean ${formatStat(s.mean)}  sigma ${formatStat(s.stddev)}</text>`);
  });
  parts.push("</svg>");
  return parts.join("");
}
