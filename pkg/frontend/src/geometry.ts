/** Annular board math: ring 1 innermost, file 0 centered at 12 o'clock,
 * files increase clockwise.  Every cell stays hit-testable down to the
 * documented minimum board size of 320x320 CSS pixels. */

export const FILES = "abcdefghijklmnop";
export const SECTOR_DEG = 360 / 16;
export const MIN_BOARD_PX = 320;

export interface Layout {
  cx: number;
  cy: number;
  holeRadius: number;
  outerRadius: number;
}

export function defaultLayout(size: number): Layout {
  const half = size / 2;
  return {
    cx: half,
    cy: half,
    holeRadius: half * 0.28,
    outerRadius: half * 0.96,
  };
}

export function cellName(ring: number, file: number): string {
  return `${FILES[file]}${ring}`;
}

export function parseCellName(name: string): { ring: number; file: number } {
  return { ring: Number(name[1]), file: FILES.indexOf(name[0]) };
}

export function parity(ring: number, file: number): number {
  return (ring + file) % 2;
}

function bandWidth(layout: Layout): number {
  return (layout.outerRadius - layout.holeRadius) / 4;
}

/** Point at `radius` from center, `deg` clockwise from 12 o'clock. */
function polar(layout: Layout, deg: number, radius: number): { x: number; y: number } {
  const rad = (deg * Math.PI) / 180;
  return {
    x: layout.cx + radius * Math.sin(rad),
    y: layout.cy - radius * Math.cos(rad),
  };
}

export function cellCenter(layout: Layout, ring: number, file: number) {
  const band = bandWidth(layout);
  const radius = layout.holeRadius + (ring - 0.5) * band;
  return polar(layout, file * SECTOR_DEG, radius);
}

/** SVG path of one annular sector (file sectors centered on their angle). */
export function sectorPath(layout: Layout, ring: number, file: number): string {
  const band = bandWidth(layout);
  const r0 = layout.holeRadius + (ring - 1) * band;
  const r1 = r0 + band;
  const a0 = file * SECTOR_DEG - SECTOR_DEG / 2;
  const a1 = a0 + SECTOR_DEG;
  const p0 = polar(layout, a0, r0);
  const p1 = polar(layout, a0, r1);
  const p2 = polar(layout, a1, r1);
  const p3 = polar(layout, a1, r0);
  const fmt = (v: number) => v.toFixed(2);
  return (
    `M ${fmt(p0.x)} ${fmt(p0.y)} ` +
    `L ${fmt(p1.x)} ${fmt(p1.y)} ` +
    `A ${fmt(r1)} ${fmt(r1)} 0 0 1 ${fmt(p2.x)} ${fmt(p2.y)} ` +
    `L ${fmt(p3.x)} ${fmt(p3.y)} ` +
    `A ${fmt(r0)} ${fmt(r0)} 0 0 0 ${fmt(p0.x)} ${fmt(p0.y)} Z`
  );
}

/** Map a point to its cell, or null outside the four bands. */
export function hitTest(
  layout: Layout,
  x: number,
  y: number,
): { ring: number; file: number } | null {
  const dx = x - layout.cx;
  const dy = y - layout.cy;
  const radius = Math.hypot(dx, dy);
  if (radius < layout.holeRadius || radius > layout.outerRadius) {
    return null;
  }
  const band = bandWidth(layout);
  let ring = 1 + Math.floor((radius - layout.holeRadius) / band);
  if (ring > 4) ring = 4;
  let deg = (Math.atan2(dx, -dy) * 180) / Math.PI;
  if (deg < 0) deg += 360;
  const file = Math.round(deg / SECTOR_DEG) % 16;
  return { ring, file };
}
