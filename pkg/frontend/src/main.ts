/** Browser entry point: wires the bridge, board, and controls together.
 *
 * All rules stay server-side; this file only routes clicks to `move`
 * commands and repaints from pushed state frames.
 */

import { Bridge, Frame, WebSocketBridge } from "./protocol.js";
import { MIN_BOARD_PX, defaultLayout, cellName, hitTest } from "./geometry.js";
import {
  ViewModel,
  applyStateFrame,
  clickSquare,
  emptyViewModel,
  recordMove,
  scoreFor,
} from "./model.js";
import { renderBoardSvg, renderMoveLog, renderStatusPanel } from "./render.js";

const SIZE = Math.max(MIN_BOARD_PX, 560);

interface App {
  vm: ViewModel;
  bridge: Bridge | null;
  mateBonus: boolean;
  engineDepth: number;
  humanSide: "w" | "b";
  thinking: boolean;
}

const app: App = {
  vm: emptyViewModel(),
  bridge: null,
  mateBonus: false,
  engineDepth: 4,
  humanSide: "w",
  thinking: false,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function paint(): void {
  const layout = defaultLayout(SIZE);
  el("board").innerHTML = renderBoardSvg(app.vm, layout, SIZE);
  el("status").innerHTML = renderStatusPanel(app.vm);
  el("log").innerHTML = renderMoveLog(app.vm);
  const score = scoreFor(app.vm.results, app.mateBonus);
  el("score").textContent =
    `White ${score.white} : ${score.black} Black` +
    (app.mateBonus ? " (mate pays 1.5)" : "");
  el<HTMLDivElement>("board").classList.toggle("shake", app.vm.shake);
}

function maybeAskEngine(): void {
  if (!app.bridge || app.thinking) return;
  if (!app.vm.status.ongoing) return;
  if (app.vm.sideToMove === app.humanSide) return;
  app.thinking = true;
  app.bridge.send(`go depth ${app.engineDepth}`);
}

function onFrame(frame: Frame): void {
  switch (frame.kind) {
    case "state":
      app.vm = applyStateFrame(app.vm, frame);
      paint();
      maybeAskEngine();
      break;
    case "bestmove":
      app.thinking = false;
      if (frame.move && app.bridge) {
        app.vm = recordMove(app.vm, frame.move);
        app.bridge.send(`move ${frame.move}`);
      }
      break;
    case "error":
      app.vm = { ...app.vm, toast: frame.message, shake: true };
      app.thinking = false;
      paint();
      break;
    default:
      break;
  }
}

function submitMove(move: string): void {
  if (!app.bridge) return;
  app.vm = recordMove(app.vm, move);
  app.bridge.send(`move ${move}`);
}

function onBoardClick(event: MouseEvent): void {
  if (app.vm.sideToMove !== app.humanSide || !app.vm.status.ongoing) return;
  const svg = el<HTMLDivElement>("board").querySelector("svg");
  if (!svg) return;
  const rect = svg.getBoundingClientRect();
  const x = ((event.clientX - rect.left) / rect.width) * SIZE;
  const y = ((event.clientY - rect.top) / rect.height) * SIZE;
  const hit = hitTest(defaultLayout(SIZE), x, y);
  if (!hit) return;
  const outcome = clickSquare(app.vm, cellName(hit.ring, hit.file));
  app.vm = outcome.vm;
  if (outcome.needsPromotion) {
    openPromotionDialog(outcome.needsPromotion);
  } else if (outcome.submit) {
    submitMove(outcome.submit);
  }
  paint();
}

function openPromotionDialog(choices: string[]): void {
  const dialog = el<HTMLDivElement>("promotion");
  dialog.innerHTML =
    "<span>Promote to:</span> " +
    choices
      .map((move) => `<button data-move="${move}">${move.slice(-1)}</button>`)
      .join(" ");
  dialog.style.display = "block";
  dialog.querySelectorAll("button").forEach((button) =>
    button.addEventListener("click", () => {
      dialog.style.display = "none";
      submitMove(button.dataset.move!);
    }),
  );
}

function newGame(): void {
  if (!app.bridge) return;
  app.vm = { ...emptyViewModel(), results: app.vm.results };
  const variant = el<HTMLSelectElement>("variant").value;
  app.humanSide = el<HTMLSelectElement>("side").value as "w" | "b";
  app.engineDepth = Number(el<HTMLInputElement>("depth").value) || 4;
  app.bridge.send(`variant ${variant}`);
  app.bridge.send("position start");
}

function connect(): void {
  const url = el<HTMLInputElement>("server").value;
  const bridge = new WebSocketBridge(url);
  bridge.onFrame(onFrame);
  bridge.onClose = () => {
    app.bridge = null;
    el("status").innerHTML =
      '<div class="toast">Connection lost. <button onclick="location.reload()">Reconnect</button></div>';
    document
      .querySelectorAll("button,select,input")
      .forEach((node) => node.toggleAttribute("disabled", true));
  };
  app.bridge = bridge;
}

export function start(): void {
  connect();
  el("board").addEventListener("click", (e) => onBoardClick(e as MouseEvent));
  el("new-game").addEventListener("click", newGame);
  el<HTMLInputElement>("mate-bonus").addEventListener("change", (e) => {
    app.mateBonus = (e.target as HTMLInputElement).checked;
    paint();
  });
  paint();
}

if (typeof document !== "undefined") {
  window.addEventListener("DOMContentLoaded", start);
}
