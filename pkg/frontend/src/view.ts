import type { Candidate, FeatureMapsResponse } from "./api.js";
import type { InkPoint } from "./ink.js";

/** Redraw the captured strokes onto the drawing canvas. */
export function redrawCanvas(canvas: HTMLCanvasElement, strokes: InkPoint[][]): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return; // test DOM has no 2d context
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.lineWidth = 3;
  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  ctx.strokeStyle = "#1a1a1a";
  for (const stroke of strokes) {
    if (stroke.length === 0) continue;
    ctx.beginPath();
    ctx.moveTo(stroke[0].x, stroke[0].y);
    for (const p of stroke.slice(1)) ctx.lineTo(p.x, p.y);
    if (stroke.length === 1) ctx.lineTo(stroke[0].x + 0.1, stroke[0].y + 0.1);
    ctx.stroke();
  }
}

/** Fill the candidate panel; labels are buttons wired to `onPick`. */
export function renderCandidates(
  panel: HTMLElement,
  candidates: Candidate[],
  onPick: (c: Candidate) => void,
): void {
  panel.textContent = "";
  for (const candidate of candidates) {
    const button = document.createElement("button");
    button.className = "candidate";
    button.dataset.classId = String(candidate.class_id);
    button.dataset.probability = String(candidate.probability);
    const label = document.createElement("span");
    label.className = "candidate-label";
    label.textContent = candidate.label;
    const prob = document.createElement("span");
    prob.className = "candidate-prob";
    prob.textContent = (candidate.probability * 100).toFixed(1) + "%";
    button.append(label, prob);
    button.addEventListener("click", () => onPick(candidate));
    panel.append(button);
  }
}

export function clearCandidates(panel: HTMLElement): void {
  panel.textContent = "";
}

/** Per-stroke maps as a filmstrip in writing order; padded maps stay blank. */
export function renderFilmstrip(strip: HTMLElement, maps: FeatureMapsResponse): void {
  strip.textContent = "";
  for (let i = 0; i < maps.stack.length; i++) {
    const populated = i < maps.stroke_count;
    const frame = document.createElement("canvas");
    frame.className = populated ? "frame populated" : "frame blank";
    frame.width = maps.size;
    frame.height = maps.size;
    frame.title = populated ? `stroke ${i + 1}` : "padding";
    const ctx = frame.getContext("2d");
    if (ctx) {
      const image = ctx.createImageData(maps.size, maps.size);
      for (let y = 0; y < maps.size; y++) {
        for (let x = 0; x < maps.size; x++) {
          const on = maps.stack[i][y][x] !== 0;
          const o = 4 * (y * maps.size + x);
          image.data[o] = on ? 20 : 245;
          image.data[o + 1] = on ? 60 : 245;
          image.data[o + 2] = on ? 160 : 245;
          image.data[o + 3] = 255;
        }
      }
      ctx.putImageData(image, 0, 0);
    }
    strip.append(frame);
  }
}

/** 512-vector as eight 8x8 blocks on a [0, 1] color scale. */
export function renderHeatGrid(grid: HTMLElement, dirs: number[]): void {
  grid.textContent = "";
  const block = 64;
  for (let d = 0; d < 8; d++) {
    const holder = document.createElement("div");
    holder.className = "heat-block";
    const caption = document.createElement("div");
    caption.className = "heat-caption";
    caption.textContent = `${d * 45}°`;
    const cells = document.createElement("div");
    cells.className = "heat-cells";
    for (let i = 0; i < block; i++) {
      const v = Math.min(1, Math.max(0, dirs[d * block + i] ?? 0));
      const cell = document.createElement("div");
      cell.className = "heat-cell";
      cell.dataset.value = v.toFixed(4);
      const hue = 230 - 190 * v;
      cell.style.backgroundColor = `hsl(${hue}, 75%, ${92 - 52 * v}%)`;
      cells.append(cell);
    }
    holder.append(caption, cells);
    grid.append(holder);
  }
}

export function clearViews(strip: HTMLElement, grid: HTMLElement): void {
  strip.textContent = "";
  grid.textContent = "";
}

export function showBanner(banner: HTMLElement, message: string): void {
  banner.textContent = message;
  banner.classList.add("visible");
}

export function hideBanner(banner: HTMLElement): void {
  banner.textContent = "";
  banner.classList.remove("visible");
}
