/** View model: everything derives from the last pushed state frame.
 *
 * The client holds no rules: legal targets come from the bridge's move
 * list, events are read off board diffs between consecutive frames, and
 * the authoritative cFEN is kept for the debug overlay.
 */

import { StateFrame, Status } from "./protocol.js";
import { cellName, parity } from "./geometry.js";

export interface PieceGlyph {
  color: "w" | "b";
  kind: "K" | "Q" | "R" | "B" | "N" | "P";
  dir: "cw" | "ccw" | null;
  glyph: string;
  arrow: string | null;
}

export interface Cell {
  ring: number;
  file: number;
  name: string;
  shade: number; // checkerboard parity of the square
  piece: PieceGlyph | null;
}

const GLYPHS: Record<string, string> = {
  wK: "♔", wQ: "♕", wR: "♖", wB: "♗", wN: "♘", wP: "♙",
  bK: "♚", bQ: "♛", bR: "♜", bB: "♝", bN: "♞", bP: "♟",
};

function glyphFor(letter: string): PieceGlyph {
  const color = letter === letter.toUpperCase() ? "w" : "b";
  const upper = letter.toUpperCase();
  const kind = (upper === "S" ? "P" : upper) as PieceGlyph["kind"];
  const dir = upper === "P" ? "cw" : upper === "S" ? "ccw" : null;
  return {
    color,
    kind,
    dir,
    glyph: GLYPHS[color + kind],
    arrow: dir === "cw" ? "↻" : dir === "ccw" ? "↺" : null,
  };
}

/** Parse the board field of a cFEN into per-square glyphs.
 * Digit runs are greedy: "16" empties a whole ring. */
export function parseBoard(boardField: string): (PieceGlyph | null)[][] {
  const rings = boardField.split("/");
  if (rings.length !== 4) {
    throw new Error(`expected 4 ring strings, got ${rings.length}`);
  }
  return rings.map((ringText, ringIdx) => {
    const cells: (PieceGlyph | null)[] = [];
    let i = 0;
    while (i < ringText.length) {
      const ch = ringText[i];
      if (ch >= "0" && ch <= "9") {
        let j = i;
        while (j < ringText.length && ringText[j] >= "0" && ringText[j] <= "9") j++;
        const run = Number(ringText.slice(i, j));
        for (let k = 0; k < run; k++) cells.push(null);
        i = j;
      } else {
        cells.push(glyphFor(ch));
        i++;
      }
    }
    if (cells.length !== 16) {
      throw new Error(`ring ${ringIdx + 1} has ${cells.length} squares`);
    }
    return cells;
  });
}

export interface ViewModel {
  cfen: string;
  cells: Cell[];
  sideToMove: "w" | "b";
  status: Status;
  legalMoves: string[];
  selected: string | null;
  targets: string[];
  shake: boolean;
  moveLog: string[];
  banner: string | null;
  events: string[];
  results: Status[]; // finished games this session, for the score panel
  toast: string | null;
}

export function emptyViewModel(): ViewModel {
  return {
    cfen: "",
    cells: [],
    sideToMove: "w",
    status: { result: "ongoing", reason: null, ongoing: true },
    legalMoves: [],
    selected: null,
    targets: [],
    shake: false,
    moveLog: [],
    banner: null,
    events: [],
    results: [],
    toast: null,
  };
}

function cellsOf(boardField: string): Cell[] {
  const grid = parseBoard(boardField);
  const cells: Cell[] = [];
  for (let ring = 1; ring <= 4; ring++) {
    for (let file = 0; file < 16; file++) {
      cells.push({
        ring,
        file,
        name: cellName(ring, file),
        shade: parity(ring, file),
        piece: grid[ring - 1][file],
      });
    }
  }
  return cells;
}

function pieceMap(cells: Cell[]): Map<string, PieceGlyph> {
  const map = new Map<string, PieceGlyph>();
  for (const cell of cells) {
    if (cell.piece) map.set(cell.name, cell.piece);
  }
  return map;
}

export const ANNIHILATION_NOTE =
  "Facing friendly pawns are both removed; the removal costs no turn.";

/** Fold a pushed state frame into the view; detects rule events by
 * diffing the previous board (the mover's pawns that vanished). */
export function applyStateFrame(vm: ViewModel, frame: StateFrame): ViewModel {
  const cells = cellsOf(frame.board);
  const events: string[] = [];
  if (vm.cells.length) {
    const before = pieceMap(vm.cells);
    const after = pieceMap(cells);
    const mover = vm.sideToMove;
    const vanished: string[] = [];
    before.forEach((piece, name) => {
      if (piece.color === mover && piece.kind === "P" && !after.has(name)) {
        vanished.push(name);
      }
    });
    if (vanished.length >= 2) {
      events.push(`Annihilation on ${vanished.sort().join(" and ")}: ${ANNIHILATION_NOTE}`);
    }
  }
  let banner: string | null = null;
  const results = vm.results.slice();
  if (!frame.status.ongoing) {
    banner = statusBanner(frame.status);
    results.push(frame.status);
  }
  return {
    ...vm,
    cfen: frame.cfen,
    cells,
    sideToMove: frame.sideToMove,
    status: frame.status,
    legalMoves: frame.legalMoves,
    selected: null,
    targets: [],
    shake: false,
    banner,
    events,
    results,
    toast: null,
  };
}

export function recordMove(vm: ViewModel, move: string): ViewModel {
  return { ...vm, moveLog: [...vm.moveLog, move] };
}

export function statusBanner(status: Status): string {
  if (status.ongoing) return "";
  if (status.result === "1/2-1/2") {
    const reasons: Record<string, string> = {
      "two-bare-kings": "Draw: both kings are bare",
      repetition: "Draw by threefold repetition",
      "stalemate-draw": "Draw by stalemate",
      "no-capture": "Draw: no capture within the agreed move count",
      "ply-cap": "Draw: game length cap reached",
      insufficient: "Draw: insufficient force",
    };
    return reasons[status.reason ?? ""] ?? `Draw (${status.reason})`;
  }
  const winner = status.result === "1-0" ? "White" : "Black";
  const hows: Record<string, string> = {
    mate: `${winner} wins by mate`,
    "stalemate-win": `${winner} wins by stalemate`,
    "bare-king": `Win by bare king: ${winner} took the last piece`,
  };
  return hows[status.reason ?? ""] ?? `${winner} wins (${status.reason})`;
}

/** Targets the bridge allows from a selected origin square. */
export function targetsFrom(legalMoves: string[], origin: string): string[] {
  const out: string[] = [];
  for (const move of legalMoves) {
    if (move.startsWith(origin)) {
      const target = move.slice(2, 4);
      if (!out.includes(target)) out.push(target);
    }
  }
  return out;
}

export interface ClickOutcome {
  vm: ViewModel;
  submit: string | null; // move text to send, if the click completes one
  needsPromotion: string[] | null; // promotion move texts to choose from
}

/** First click selects an own piece; the second submits the move. */
export function clickSquare(vm: ViewModel, name: string): ClickOutcome {
  if (!vm.status.ongoing) {
    return { vm, submit: null, needsPromotion: null };
  }
  const piece = vm.cells.find((c) => c.name === name)?.piece ?? null;
  if (vm.selected === null) {
    if (piece && piece.color === vm.sideToMove) {
      const targets = targetsFrom(vm.legalMoves, name);
      return { vm: { ...vm, selected: name, targets, shake: false }, submit: null, needsPromotion: null };
    }
    return { vm, submit: null, needsPromotion: null };
  }
  if (name === vm.selected) {
    return { vm: { ...vm, selected: null, targets: [], shake: false }, submit: null, needsPromotion: null };
  }
  if (vm.targets.includes(name)) {
    const plain = vm.selected + name;
    const promos = vm.legalMoves.filter((m) => m.startsWith(plain + "="));
    if (promos.length > 0) {
      return { vm, submit: null, needsPromotion: promos };
    }
    return { vm: { ...vm, selected: null, targets: [] }, submit: plain, needsPromotion: null };
  }
  if (piece && piece.color === vm.sideToMove) {
    const targets = targetsFrom(vm.legalMoves, name);
    return { vm: { ...vm, selected: name, targets, shake: false }, submit: null, needsPromotion: null };
  }
  return {
    vm: { ...vm, selected: null, targets: [], shake: true },
    submit: null,
    needsPromotion: null,
  };
}

/** Session score panel; a mate win pays 1.5 in bonus mode. */
export function scoreFor(
  results: Status[],
  mateBonus: boolean,
): { white: number; black: number } {
  let white = 0;
  let black = 0;
  for (const status of results) {
    if (status.result === "1/2-1/2") {
      white += 0.5;
      black += 0.5;
    } else if (status.result === "1-0") {
      white += mateBonus && status.reason === "mate" ? 1.5 : 1.0;
    } else if (status.result === "0-1") {
      black += mateBonus && status.reason === "mate" ? 1.5 : 1.0;
    }
  }
  return { white, black };
}
