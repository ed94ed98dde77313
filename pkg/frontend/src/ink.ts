export interface InkPoint {
  x: number;
  y: number;
  t: number;
}

/** Strokes captured from pointer gestures, in drawing order.
 *
 * The points sent to the service are exactly the captured sequence; no
 * client-side resampling or smoothing happens here.
 */
export class CapturedInk {
  private strokes: InkPoint[][] = [];
  private open: InkPoint[] | null = null;

  beginStroke(x: number, y: number, t = Date.now()): void {
    this.open = [{ x, y, t }];
  }

  extendStroke(x: number, y: number, t = Date.now()): void {
    if (!this.open) return;
    this.open.push({ x, y, t });
  }

  endStroke(): boolean {
    if (!this.open) return false;
    this.strokes.push(this.open);
    this.open = null;
    return true;
  }

  /** Abandon an unfinished stroke (pointer cancel). */
  cancelStroke(): void {
    this.open = null;
  }

  undo(): boolean {
    if (this.open) {
      this.open = null;
      return true;
    }
    return this.strokes.pop() !== undefined;
  }

  clear(): void {
    this.strokes = [];
    this.open = null;
  }

  get strokeCount(): number {
    return this.strokes.length;
  }

  get isEmpty(): boolean {
    return this.strokes.length === 0 && this.open === null;
  }

  get isDrawing(): boolean {
    return this.open !== null;
  }

  /** Completed strokes plus the one being drawn, for canvas redraw. */
  allStrokes(): InkPoint[][] {
    return this.open ? [...this.strokes, this.open] : [...this.strokes];
  }

  /** The wire format: [[ [x, y], ... ], ...] of completed strokes. */
  toStrokes(): number[][][] {
    return this.strokes.map((stroke) => stroke.map((p) => [p.x, p.y]));
  }
}
