/** SVG rendering as pure string building, so tests need no DOM. */

import { Layout, cellCenter, sectorPath } from "./geometry.js";
import { Cell, ViewModel } from "./model.js";

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function cellClasses(vm: ViewModel, cell: Cell): string {
  const classes = ["cell", cell.shade === 0 ? "shade-even" : "shade-odd"];
  if (vm.selected === cell.name) classes.push("selected");
  if (vm.targets.includes(cell.name)) classes.push("target");
  return classes.join(" ");
}

export function renderBoardSvg(vm: ViewModel, layout: Layout, size: number): string {
  const parts: string[] = [
    `<svg viewBox="0 0 ${size} ${size}" xmlns="http://www.w3.org/2000/svg">`,
  ];
  for (const cell of vm.cells) {
    parts.push(
      `<path d="${sectorPath(layout, cell.ring, cell.file)}" ` +
        `class="${cellClasses(vm, cell)}" data-cell="${cell.name}"/>`,
    );
  }
  for (const cell of vm.cells) {
    if (!cell.piece) continue;
    const { x, y } = cellCenter(layout, cell.ring, cell.file);
    const fontSize = (layout.outerRadius - layout.holeRadius) / 4 * 0.62;
    parts.push(
      `<text x="${x.toFixed(1)}" y="${(y + fontSize * 0.35).toFixed(1)}" ` +
        `class="piece ${cell.piece.color}" text-anchor="middle" ` +
        `font-size="${fontSize.toFixed(1)}">${cell.piece.glyph}</text>`,
    );
    if (cell.piece.arrow) {
      parts.push(
        `<text x="${(x + fontSize * 0.55).toFixed(1)}" y="${(y - fontSize * 0.35).toFixed(1)}" ` +
          `class="pawn-arrow" text-anchor="middle" ` +
          `font-size="${(fontSize * 0.45).toFixed(1)}">${cell.piece.arrow}</text>`,
      );
    }
  }
  parts.push("</svg>");
  return parts.join("\n");
}

export function renderStatusPanel(vm: ViewModel): string {
  const lines: string[] = [];
  if (vm.banner) {
    lines.push(`<div class="banner terminal">${escapeXml(vm.banner)}</div>`);
  } else {
    const mover = vm.sideToMove === "w" ? "White" : "Black";
    lines.push(`<div class="banner">${mover} to move</div>`);
  }
  for (const event of vm.events) {
    lines.push(`<div class="event">${escapeXml(event)}</div>`);
  }
  if (vm.toast) {
    lines.push(`<div class="toast">${escapeXml(vm.toast)}</div>`);
  }
  // Debug overlay: the authoritative server position, verbatim.
  lines.push(`<div class="debug-cfen">${escapeXml(vm.cfen)}</div>`);
  return lines.join("\n");
}

export function renderMoveLog(vm: ViewModel): string {
  const rows: string[] = [];
  for (let i = 0; i < vm.moveLog.length; i += 2) {
    const num = i / 2 + 1;
    const white = vm.moveLog[i] ?? "";
    const black = vm.moveLog[i + 1] ?? "";
    rows.push(`<li>${num}. ${white} ${black}</li>`);
  }
  return `<ol class="move-log">${rows.join("")}</ol>`;
}
