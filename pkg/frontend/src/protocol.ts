/** Bridge protocol: line frames to and from the engine.
 *
 * The bridge pushes `state <cfen...> <status> <legal moves...>` after every
 * applied move; the client never evaluates rules itself.  Status tokens
 * join result and reason with ';' ("1-0;bare-king"), or are "ongoing".
 */

export interface Status {
  result: string; // "1-0" | "0-1" | "1/2-1/2" | "ongoing"
  reason: string | null;
  ongoing: boolean;
}

export interface StateFrame {
  kind: "state";
  /** Full cFEN as the server printed it (authoritative). */
  cfen: string;
  board: string;
  sideToMove: "w" | "b";
  ep: string;
  noCaptureClock: number;
  fullmove: number;
  status: Status;
  legalMoves: string[];
}

export type Frame =
  | StateFrame
  | { kind: "ok"; detail: string }
  | { kind: "error"; message: string }
  | { kind: "bestmove"; move: string }
  | { kind: "info"; text: string }
  | { kind: "raw"; text: string };

export function parseStatus(token: string): Status {
  if (token === "ongoing") {
    return { result: "ongoing", reason: null, ongoing: true };
  }
  const sep = token.indexOf(";");
  if (sep < 0) {
    return { result: token, reason: null, ongoing: false };
  }
  return {
    result: token.slice(0, sep),
    reason: token.slice(sep + 1),
    ongoing: false,
  };
}

export function parseFrame(line: string): Frame {
  const parts = line.trim().split(/\s+/);
  if (parts.length === 0 || parts[0] === "") {
    return { kind: "raw", text: line };
  }
  switch (parts[0]) {
    case "state": {
      if (parts.length < 7) {
        return { kind: "error", message: `malformed state frame: ${line}` };
      }
      const [board, stm, ep, clock, fullmove] = parts.slice(1, 6);
      return {
        kind: "state",
        cfen: parts.slice(1, 6).join(" "),
        board,
        sideToMove: stm as "w" | "b",
        ep,
        noCaptureClock: Number(clock),
        fullmove: Number(fullmove),
        status: parseStatus(parts[6]),
        legalMoves: parts.slice(7),
      };
    }
    case "ok":
      return { kind: "ok", detail: parts.slice(1).join(" ") };
    case "error":
      return { kind: "error", message: parts.slice(1).join(" ") };
    case "bestmove":
      return { kind: "bestmove", move: parts[1] ?? "" };
    case "info":
      return { kind: "info", text: line };
    default:
      return { kind: "raw", text: line };
  }
}

export interface Bridge {
  send(command: string): void;
  onFrame(handler: (frame: Frame) => void): void;
  start(): void;
}

/** Replays a recorded transcript ("> cmd" / "< frame" lines): the client
 * runs against it exactly as against the live WebSocket bridge. */
export class FakeBridge implements Bridge {
  private script: { cmd: string | null; frames: string[] }[] = [];
  private handlers: ((frame: Frame) => void)[] = [];
  private cursor = 0;

  constructor(transcript: string) {
    let current: { cmd: string | null; frames: string[] } = {
      cmd: null,
      frames: [],
    };
    this.script.push(current);
    for (const raw of transcript.split("\n")) {
      const line = raw.trim();
      if (!line) continue;
      if (line.startsWith("> ")) {
        current = { cmd: line.slice(2), frames: [] };
        this.script.push(current);
      } else if (line.startsWith("< ")) {
        current.frames.push(line.slice(2));
      }
    }
  }

  onFrame(handler: (frame: Frame) => void): void {
    this.handlers.push(handler);
  }

  start(): void {
    for (const frame of this.script[0].frames) {
      this.emit(frame);
    }
    this.cursor = 1;
  }

  send(command: string): void {
    const step = this.script[this.cursor];
    if (!step || step.cmd !== command) {
      throw new Error(
        `transcript mismatch: sent ${JSON.stringify(command)}, expected ` +
          `${JSON.stringify(step?.cmd ?? "<end>")}`,
      );
    }
    this.cursor += 1;
    for (const frame of step.frames) {
      this.emit(frame);
    }
  }

  get exhausted(): boolean {
    return this.cursor >= this.script.length;
  }

  private emit(line: string): void {
    const frame = parseFrame(line);
    for (const handler of this.handlers) {
      handler(frame);
    }
  }
}

/** Live bridge over a WebSocket (browser only). */
export class WebSocketBridge implements Bridge {
  private handlers: ((frame: Frame) => void)[] = [];
  private socket: WebSocket;
  onClose: (() => void) | null = null;

  constructor(url: string) {
    this.socket = new WebSocket(url);
    this.socket.onmessage = (event) => {
      const frame = parseFrame(String(event.data));
      for (const handler of this.handlers) {
        handler(frame);
      }
    };
    this.socket.onclose = () => this.onClose?.();
  }

  onFrame(handler: (frame: Frame) => void): void {
    this.handlers.push(handler);
  }

  start(): void {
    // The server pushes the initial state frame on connect.
  }

  send(command: string): void {
    this.socket.send(command);
  }
}
