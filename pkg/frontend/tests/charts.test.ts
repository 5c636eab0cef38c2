import { describe, expect, it } from "vitest";

import { bucketSpread, histogramGeometry, histogramSvg } from "../src/charts.js";
import type { TargetResult } from "../src/types.js";

function result(mean: number, stddev: number,
                histogram: Record<string, number>): TargetResult {
  return { target: "WTI.3", n: 100, seed: 1, mean, stddev, histogram, samples: [] };
}

const wide = result(21.2, 3.3, { "16": 5, "18": 20, "20": 30, "22": 25, "26": 15, "31": 5 });
const tight = result(24.9, 0.3, { "24": 40, "25": 60 });

describe("histogramGeometry", () => {
  it("covers the union bucket range of all series", () => {
    const geom = histogramGeometry([wide, tight], ["base", "constrained"]);
    expect(geom.buckets[0]).toBe(16);
    expect(geom.buckets[geom.buckets.length - 1]).toBe(31);
    expect(geom.buckets.length).toBe(16);
  });

  it("scales bars against the tallest count across series", () => {
    const geom = histogramGeometry([wide, tight], ["a", "b"]);
    expect(geom.maxCount).toBe(60);
    const tallest = geom.bars.find((b) => b.count === 60)!;
    expect(tallest.height).toBe(1);
    const half = geom.bars.find((b) => b.count === 30)!;
    expect(half.height).toBeCloseTo(0.5, 12);
  });

  it("emits one bar per occupied bucket per series", () => {
    const geom = histogramGeometry([wide, tight], ["a", "b"]);
    expect(geom.bars.filter((b) => b.series === 0).length).toBe(6);
    expect(geom.bars.filter((b) => b.series === 1).length).toBe(2);
  });
});

describe("bucketSpread", () => {
  it("measures the occupied range width", () => {
    expect(bucketSpread(wide)).toBe(16); // 16..31
    expect(bucketSpread(tight)).toBe(2); // 24..25
  });

  it("shows the constrained case visibly tighter than the base case", () => {
    expect(bucketSpread(tight)).toBeLessThan(bucketSpread(wide) / 4);
  });
});

describe("histogramSvg", () => {
  it("renders both series with counts attached", () => {
    const svg = histogramSvg([wide, tight], ["base", "constrained"]);
    expect(svg).toContain('data-series="0"');
    expect(svg).toContain('data-series="1"');
    expect(svg).toContain('data-count="60"');
    const rects = svg.match(/<rect /g) ?? [];
    expect(rects.length).toBe(8);
  });

  it("labels each series with full-precision statistics", () => {
    const svg = histogramSvg([tight], ["constrained"]);
    expect(svg).toContain("mean 24.9");
    expect(svg).toContain("sigma 0.3");
  });

  it("is deterministic for identical inputs", () => {
    const a = histogramSvg([wide, tight], ["base", "constrained"]);
    const b = histogramSvg([wide, tight], ["base", "constrained"]);
    expect(a).toBe(b);
  });
});
