// Side-by-side playback of original vs corrected sequences on two canvases.
// Purely presentational: it maps already-normalized coordinates to display
// pixels and never touches them otherwise.

import type { KeyframeDoc, SequenceDocument } from "./types.js";
import { fitTransform, normalizedToDisplay, type Pt, type ViewTransform } from "./view.js";

// (start, end) joint pairs; the head stem attaches to the shoulder midpoint,
// which is not a joint, so it is drawn separately.
export const BONES: ReadonlyArray<readonly [string, string]> = [
  ["left_shoulder", "right_shoulder"],
  ["left_shoulder", "left_elbow"],
  ["left_elbow", "left_wrist"],
  ["right_shoulder", "right_elbow"],
  ["right_elbow", "right_wrist"],
  ["left_shoulder", "left_hip"],
  ["right_shoulder", "right_hip"],
  ["left_hip", "left_knee"],
  ["left_knee", "left_ankle"],
  ["right_hip", "right_knee"],
  ["right_knee", "right_ankle"],
];

/** Stroke a stick figure from display-space joint positions. `at` may return
 * null for joints that are not placed yet; those segments are skipped. */
export function strokeSkeleton(
  ctx: CanvasRenderingContext2D,
  at: (name: string) => Pt | null,
  color: string,
  lineWidth = 2.5,
): void {
  ctx.strokeStyle = color;
  ctx.lineWidth = lineWidth;
  ctx.lineCap = "round";

  for (const [a, b] of BONES) {
    const pa = at(a);
    const pb = at(b);
    if (!pa || !pb) continue;
    ctx.beginPath();
    ctx.moveTo(pa.x, pa.y);
    ctx.lineTo(pb.x, pb.y);
    ctx.stroke();
  }

  const head = at("head");
  const ls = at("left_shoulder");
  const rs = at("right_shoulder");
  if (head && ls && rs) {
    ctx.beginPath();
    ctx.moveTo((ls.x + rs.x) / 2, (ls.y + rs.y) / 2);
    ctx.lineTo(head.x, head.y);
    ctx.stroke();
    ctx.beginPath();
    ctx.arc(head.x, head.y, 7, 0, Math.PI * 2);
    ctx.stroke();
  }
}

function drawFrame(
  ctx: CanvasRenderingContext2D,
  frame: KeyframeDoc,
  doc: SequenceDocument,
  t: ViewTransform,
  color: string,
): void {
  const dims = doc.dims;
  const at = (name: string) => {
    const p = frame.joints[name];
    if (!p) return null;
    return normalizedToDisplay([p[0], p[1]], dims, t);
  };
  strokeSkeleton(ctx, at, color);

  const b = normalizedToDisplay([frame.ball[0], frame.ball[1]], dims, t);
  const radius = frame.ball_radius ?? 0;
  const r = Math.max(3, (radius * dims.width * t.scale) / 2);
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(b.x, b.y, r, 0, Math.PI * 2);
  ctx.fill();
}

export interface PlayerPane {
  canvas: HTMLCanvasElement;
  doc: SequenceDocument;
  color: string;
}

export class SideBySidePlayer {
  private panes: PlayerPane[];
  private frame = 0;
  private timer: ReturnType<typeof setInterval> | null = null;
  private readonly intervalMs: number;
  onFrame: ((index: number) => void) | null = null;

  constructor(panes: PlayerPane[], intervalMs = 200) {
    this.panes = panes;
    this.intervalMs = intervalMs;
  }

  get frameCount(): number {
    return Math.max(0, ...this.panes.map((p) => p.doc.frames.length));
  }

  get playing(): boolean {
    return this.timer !== null;
  }

  render(): void {
    for (const pane of this.panes) {
      const ctx = pane.canvas.getContext("2d");
      if (!ctx) continue;
      const { width, height } = pane.canvas;
      ctx.fillStyle = "#14181d";
      ctx.fillRect(0, 0, width, height);
      const frame = pane.doc.frames[Math.min(this.frame, pane.doc.frames.length - 1)];
      if (!frame) continue;
      const t = fitTransform(pane.doc.dims.width, pane.doc.dims.height, width, height);
      drawFrame(ctx, frame, pane.doc, t, pane.color);
    }
    if (this.onFrame) this.onFrame(this.frame);
  }

  seek(index: number): void {
    const n = this.frameCount;
    if (n === 0) return;
    this.frame = ((index % n) + n) % n;
    this.render();
  }

  play(): void {
    if (this.timer !== null || this.frameCount === 0) return;
    this.render();
    this.timer = setInterval(() => this.seek(this.frame + 1), this.intervalMs);
  }

  pause(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  stop(): void {
    this.pause();
    this.frame = 0;
  }
}
