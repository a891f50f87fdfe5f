/**
 * Pixel <-> logical coordinate mapping for the 480x360 play canvas.
 * Logical units span [-240,240] x [-180,180] with y pointing up, so
 * canvas pixel (0,0) (top-left) is logical (-240, 180).
 */

export const CANVAS_WIDTH = 480;
export const CANVAS_HEIGHT = 360;
export const X_MAX = CANVAS_WIDTH / 2;
export const Y_MAX = CANVAS_HEIGHT / 2;

function clamp(v: number, lo: number, hi: number): number {
  return v < lo ? lo : v > hi ? hi : v;
}

/** Map a pixel position inside the rendered canvas (which may be CSS-scaled
 * to rectW x rectH) to logical units, clamped to the canvas bounds. */
export function pixelToLogical(
  px: number, py: number,
  rectW: number = CANVAS_WIDTH, rectH: number = CANVAS_HEIGHT,
): { x: number; y: number } {
  const x = (px / rectW) * CANVAS_WIDTH - X_MAX;
  const y = Y_MAX - (py / rectH) * CANVAS_HEIGHT;
  return { x: clamp(x, -X_MAX, X_MAX), y: clamp(y, -Y_MAX, Y_MAX) };
}

/** Inverse of pixelToLogical (before any pixel rounding). */
export function logicalToPixel(
  x: number, y: number,
  rectW: number = CANVAS_WIDTH, rectH: number = CANVAS_HEIGHT,
): { px: number; py: number } {
  return {
    px: ((x + X_MAX) / CANVAS_WIDTH) * rectW,
    py: ((Y_MAX - y) / CANVAS_HEIGHT) * rectH,
  };
}
