import { ApiError, RecognitionClient, type Candidate } from "./api.js";
import { CompositionBuffer } from "./compose.js";
import { CapturedInk } from "./ink.js";
import { SessionState } from "./state.js";
import {
  clearCandidates,
  clearViews,
  hideBanner,
  redrawCanvas,
  renderCandidates,
  renderFilmstrip,
  renderHeatGrid,
  showBanner,
} from "./view.js";

const CANVAS_SIZE = 320;
const TOP_K = 10;

export interface App {
  ink: CapturedInk;
  state: SessionState;
  compose: CompositionBuffer;
  elements: Record<string, HTMLElement>;
  /** Resolves when no recognition request is in flight. */
  idle(): Promise<void>;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function initApp(root: HTMLElement, client: RecognitionClient): App {
  const ink = new CapturedInk();
  const state = new SessionState();
  const compose = new CompositionBuffer();

  root.textContent = "";
  const banner = el("div", "banner");
  const status = el("div", "status", "loading model…");

  const canvas = document.createElement("canvas");
  canvas.className = "pad";
  canvas.width = CANVAS_SIZE;
  canvas.height = CANVAS_SIZE;

  const undoButton = el("button", "tool undo", "undo stroke");
  const clearButton = el("button", "tool clear", "clear");
  const tools = el("div", "tools");
  tools.append(undoButton, clearButton);

  const panel = el("div", "candidates");

  const composed = el("div", "composed");
  const backspaceButton = el("button", "tool backspace", "⌫");
  const copyButton = el("button", "tool copy", "copy");
  const composeBar = el("div", "compose-bar");
  composeBar.append(composed, backspaceButton, copyButton);

  const strip = el("div", "filmstrip");
  const heat = el("div", "heatgrid");

  const left = el("div", "pane left");
  left.append(canvas, tools);
  const right = el("div", "pane right");
  right.append(composeBar, panel, strip, heat);
  const main = el("div", "layout");
  main.append(left, right);
  root.append(banner, status, main);

  let pending: Promise<unknown> = Promise.resolve();

  function canvasPoint(event: MouseEvent): { x: number; y: number } {
    const rect = canvas.getBoundingClientRect();
    return { x: event.clientX - rect.left, y: event.clientY - rect.top };
  }

  function refreshCanvas(): void {
    redrawCanvas(canvas, ink.allStrokes());
  }

  function resetViews(): void {
    clearCandidates(panel);
    clearViews(strip, heat);
  }

  function pick(candidate: Candidate): void {
    compose.push(candidate.label);
    composed.textContent = compose.text;
    ink.clear();
    refreshCanvas();
    resetViews();
    state.reset();
  }

  function recognizeNow(): void {
    if (ink.isEmpty) {
      resetViews();
      state.reset();
      return;
    }
    const ticket = state.penUp();
    const strokes = ink.toStrokes();
    const work = Promise.all([
      client.recognize(strokes, TOP_K),
      client.featureMaps(strokes),
    ])
      .then(([recognition, maps]) => {
        if (!state.accept(ticket)) return; // superseded by a newer pen-up
        hideBanner(banner);
        renderCandidates(panel, recognition.candidates, pick);
        renderFilmstrip(strip, maps);
        renderHeatGrid(heat, maps.dirs);
      })
      .catch((err) => {
        if (ticket !== state.currentTicket) return;
        const reason =
          err instanceof ApiError && err.status === 0
            ? "service unreachable"
            : `recognition failed: ${err instanceof Error ? err.message : String(err)}`;
        showBanner(banner, reason);
      });
    pending = pending.then(() => work);
  }

  canvas.addEventListener("pointerdown", (event) => {
    if (ink.isDrawing) return; // single-touch app: ignore extra pointers
    event.preventDefault?.();
    const { x, y } = canvasPoint(event);
    state.beginDrawing();
    ink.beginStroke(x, y);
    refreshCanvas();
  });

  canvas.addEventListener("pointermove", (event) => {
    if (!ink.isDrawing) return;
    const { x, y } = canvasPoint(event);
    ink.extendStroke(x, y);
    refreshCanvas();
  });

  canvas.addEventListener("pointerup", () => {
    if (!ink.isDrawing) return;
    ink.endStroke();
    refreshCanvas();
    recognizeNow();
  });

  canvas.addEventListener("pointercancel", () => {
    ink.cancelStroke();
    refreshCanvas();
  });

  undoButton.addEventListener("click", () => {
    ink.undo();
    refreshCanvas();
    recognizeNow();
  });

  clearButton.addEventListener("click", () => {
    ink.clear();
    refreshCanvas();
    resetViews();
    state.reset();
  });

  backspaceButton.addEventListener("click", () => {
    compose.backspace();
    composed.textContent = compose.text;
  });

  copyButton.addEventListener("click", () => {
    const text = compose.text;
    if (navigator.clipboard?.writeText) {
      void navigator.clipboard.writeText(text);
    }
  });

  void client
    .modelInfo()
    .then((info) => {
      status.textContent = `${info.variant} · ${info.class_count} classes`;
    })
    .catch(() => {
      status.textContent = "model info unavailable";
    });

  return {
    ink,
    state,
    compose,
    elements: {
      banner,
      status,
      canvas,
      panel,
      composed,
      strip,
      heat,
      undoButton,
      clearButton,
      backspaceButton,
      copyButton,
    },
    async idle() {
      let last;
      do {
        last = pending;
        await last;
      } while (last !== pending);
    },
  };
}
