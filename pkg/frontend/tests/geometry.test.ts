import { describe, expect, it } from "vitest";

import {
  MIN_BOARD_PX,
  cellCenter,
  cellName,
  defaultLayout,
  hitTest,
  parity,
  sectorPath,
} from "../src/geometry.js";

describe("annular geometry", () => {
  it("hit-tests the center of every cell back to itself", () => {
    for (const size of [MIN_BOARD_PX, 560, 1200]) {
      const layout = defaultLayout(size);
      for (let ring = 1; ring <= 4; ring++) {
        for (let file = 0; file < 16; file++) {
          const { x, y } = cellCenter(layout, ring, file);
          expect(hitTest(layout, x, y)).toEqual({ ring, file });
        }
      }
    }
  });

  it("file 0 sits at 12 o'clock, files increase clockwise", () => {
    const layout = defaultLayout(560);
    const top = cellCenter(layout, 2, 0);
    expect(Math.abs(top.x - layout.cx)).toBeLessThan(1e-6);
    expect(top.y).toBeLessThan(layout.cy); // straight up
    const one = cellCenter(layout, 2, 1);
    expect(one.x).toBeGreaterThan(layout.cx); // clockwise = to the right first
    const fifteen = cellCenter(layout, 2, 15);
    expect(fifteen.x).toBeLessThan(layout.cx);
  });

  it("ring 1 is innermost", () => {
    const layout = defaultLayout(560);
    const inner = cellCenter(layout, 1, 4);
    const outer = cellCenter(layout, 4, 4);
    const dist = (p: { x: number; y: number }) =>
      Math.hypot(p.x - layout.cx, p.y - layout.cy);
    expect(dist(inner)).toBeLessThan(dist(outer));
  });

  it("misses the hole and the outside", () => {
    const layout = defaultLayout(560);
    expect(hitTest(layout, layout.cx, layout.cy)).toBeNull();
    expect(hitTest(layout, 1, 1)).toBeNull();
  });

  it("alternates shading around each ring and across rings", () => {
    for (let ring = 1; ring <= 4; ring++) {
      for (let file = 0; file < 16; file++) {
        expect(parity(ring, file)).toBe((ring + file) % 2);
        expect(parity(ring, file)).not.toBe(parity(ring, (file + 1) % 16));
      }
      expect(parity(ring, 0)).not.toBe(parity(ring + 1, 0));
    }
  });

  it("produces closed sector paths", () => {
    const layout = defaultLayout(560);
    const d = sectorPath(layout, 3, 7);
    expect(d.startsWith("M ")).toBe(true);
    expect(d).toContain("A ");
    expect(d.trim().endsWith("Z")).toBe(true);
  });

  it("names cells in coordinate text format", () => {
    expect(cellName(1, 0)).toBe("a1");
    expect(cellName(4, 15)).toBe("p4");
  });
});
