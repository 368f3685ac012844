// Display-space math for the annotation canvas. Strictly a view concern:
// clicks are converted from display pixels to source-image pixels and sent
// to the service as-is; normalization and every corrected coordinate stay
// server-side.

export interface ViewTransform {
  scale: number;
  offsetX: number;
  offsetY: number;
}

export interface Pt {
  x: number;
  y: number;
}

/** Contain-fit the source image into the canvas, centered. */
export function fitTransform(
  imgW: number,
  imgH: number,
  canvasW: number,
  canvasH: number,
): ViewTransform {
  const scale = Math.min(canvasW / imgW, canvasH / imgH);
  return {
    scale,
    offsetX: (canvasW - imgW * scale) / 2,
    offsetY: (canvasH - imgH * scale) / 2,
  };
}

export function displayToImage(p: Pt, t: ViewTransform): Pt {
  return { x: (p.x - t.offsetX) / t.scale, y: (p.y - t.offsetY) / t.scale };
}

export function imageToDisplay(p: Pt, t: ViewTransform): Pt {
  return { x: p.x * t.scale + t.offsetX, y: p.y * t.scale + t.offsetY };
}

/** Zoom by factor keeping the display point fixed under the cursor. */
export function zoomAt(
  t: ViewTransform,
  at: Pt,
  factor: number,
  minScale = 0.1,
  maxScale = 16,
): ViewTransform {
  const scale = Math.min(maxScale, Math.max(minScale, t.scale * factor));
  const applied = scale / t.scale;
  return {
    scale,
    offsetX: at.x - (at.x - t.offsetX) * applied,
    offsetY: at.y - (at.y - t.offsetY) * applied,
  };
}

export function panBy(t: ViewTransform, dx: number, dy: number): ViewTransform {
  return { scale: t.scale, offsetX: t.offsetX + dx, offsetY: t.offsetY + dy };
}

/**
 * Where a server-provided normalized coordinate lands on the display
 * canvas. Inverts the service's published pixel-to-normalized mapping for
 * drawing only; the value itself is never re-derived client-side.
 */
export function normalizedToImage(
  n: [number, number],
  dims: { width: number; height: number },
): Pt {
  return {
    x: (n[0] * dims.width) / 2 + dims.width / 2,
    y: (n[1] * dims.height) / 2 + dims.height / 2,
  };
}

export function normalizedToDisplay(
  n: [number, number],
  dims: { width: number; height: number },
  t: ViewTransform,
): Pt {
  return imageToDisplay(normalizedToImage(n, dims), t);
}
