import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { FakeBridge, Frame, parseFrame, parseStatus } from "../src/protocol.js";

function fixture(name: string): string {
  return readFileSync(new URL(`../fixtures/${name}`, import.meta.url), "utf-8");
}

describe("frame parsing", () => {
  it("parses a state frame into its parts", () => {
    const line =
      "state 2SQKP4skqp2/2SBBP4sbbp2/2SNNP4snnp2/2SRRP4srrp2 w - 0 1 ongoing c1b1 f1g1";
    const frame = parseFrame(line);
    expect(frame.kind).toBe("state");
    if (frame.kind !== "state") return;
    expect(frame.board.split("/").length).toBe(4);
    expect(frame.sideToMove).toBe("w");
    expect(frame.noCaptureClock).toBe(0);
    expect(frame.fullmove).toBe(1);
    expect(frame.status.ongoing).toBe(true);
    expect(frame.legalMoves).toEqual(["c1b1", "f1g1"]);
    expect(frame.cfen).toBe(
      "2SQKP4skqp2/2SBBP4sbbp2/2SNNP4snnp2/2SRRP4srrp2 w - 0 1",
    );
  });

  it("parses status tokens", () => {
    expect(parseStatus("ongoing").ongoing).toBe(true);
    const bare = parseStatus("1-0;bare-king");
    expect(bare).toEqual({ result: "1-0", reason: "bare-king", ongoing: false });
    const rep = parseStatus("1/2-1/2;repetition");
    expect(rep.result).toBe("1/2-1/2");
    expect(rep.reason).toBe("repetition");
  });

  it("parses ok/error/bestmove frames", () => {
    expect(parseFrame("ok c1b1")).toEqual({ kind: "ok", detail: "c1b1" });
    expect(parseFrame("error illegal move 'zz'").kind).toBe("error");
    expect(parseFrame("bestmove k1j1")).toEqual({ kind: "bestmove", move: "k1j1" });
  });
});

describe("fake bridge transcript playback", () => {
  it("replays a recorded opening and pushes state after every move", () => {
    const bridge = new FakeBridge(fixture("transcript_regular.txt"));
    const frames: Frame[] = [];
    bridge.onFrame((f) => frames.push(f));
    bridge.start();
    expect(frames[0].kind).toBe("state");

    bridge.send("variant byzantine-regular");
    bridge.send("position start");
    bridge.send("move c1b1");
    const afterMove = frames[frames.length - 1];
    expect(afterMove.kind).toBe("state");
    if (afterMove.kind === "state") {
      expect(afterMove.board.startsWith("1S1QKP")).toBe(true);
      expect(afterMove.sideToMove).toBe("b");
    }
    bridge.send("move n1o1");
    bridge.send("move d3b4");
    expect(bridge.exhausted).toBe(true);
  });

  it("rejects out-of-script commands", () => {
    const bridge = new FakeBridge(fixture("transcript_regular.txt"));
    bridge.start();
    expect(() => bridge.send("perft 2")).toThrow(/transcript mismatch/);
  });

  it("surfaces engine error frames and leaves state unchanged", () => {
    const bridge = new FakeBridge(fixture("transcript_error.txt"));
    const frames: Frame[] = [];
    bridge.onFrame((f) => frames.push(f));
    bridge.start();
    bridge.send("variant byzantine-regular");
    bridge.send("position start");
    const statesBefore = frames.filter((f) => f.kind === "state").length;
    bridge.send("move a1p4");
    expect(frames[frames.length - 1].kind).toBe("error");
    expect(frames.filter((f) => f.kind === "state").length).toBe(statesBefore);
  });
});
