/**
 * Draws engine frames onto a 2d canvas.  The UI has no game logic and no
 * costume art: sprites render as labelled discs, colored stably by id, with
 * a heading tick so rotation is visible.  The engine is the only source of
 * truth for what is on screen.
 */

import { CANVAS_HEIGHT, CANVAS_WIDTH, logicalToPixel } from "./coords.js";
import { FrameMessage, SpriteDraw } from "./protocol.js";

const PALETTE = ["#e5484d", "#30a46c", "#0091ff", "#f5a623", "#8e4ec6", "#12a594"];

function spriteColor(id: string): string {
  let h = 0;
  for (let i = 0; i < id.length; i++) h = (h * 31 + id.charCodeAt(i)) | 0;
  return PALETTE[Math.abs(h) % PALETTE.length];
}

function drawSprite(ctx: CanvasRenderingContext2D, s: SpriteDraw): void {
  if (!s.visible) return;
  const { px, py } = logicalToPixel(s.x, s.y);
  const r = Math.max(4, 12 * (s.size / 100));
  ctx.fillStyle = spriteColor(s.id);
  ctx.beginPath();
  ctx.arc(px, py, r, 0, 2 * Math.PI);
  ctx.fill();
  // heading: 0 = up, 90 = right (matches the engine convention)
  const a = ((s.heading - 90) * Math.PI) / 180;
  ctx.strokeStyle = "#ffffff";
  ctx.beginPath();
  ctx.moveTo(px, py);
  ctx.lineTo(px + r * Math.cos(a), py + r * Math.sin(a));
  ctx.stroke();
  ctx.fillStyle = "#cccccc";
  ctx.font = "10px monospace";
  ctx.fillText(s.id, px + r + 2, py + 3);
}

export function renderFrame(ctx: CanvasRenderingContext2D, frame: FrameMessage): void {
  ctx.fillStyle = "#101418";
  ctx.fillRect(0, 0, CANVAS_WIDTH, CANVAS_HEIGHT);
  for (const s of frame.sprites) drawSprite(ctx, s);
  const vars = Object.entries(frame.vars)
    .map(([k, v]) => `${k}: ${Number.isInteger(v) ? v : v.toFixed(2)}`)
    .join("   ");
  ctx.fillStyle = "#e8e8e8";
  ctx.font = "12px monospace";
  ctx.fillText(`tick ${frame.tick}   ${vars}`, 8, 16);
  if (frame.game_over) {
    ctx.fillStyle = "rgba(0, 0, 0, 0.55)";
    ctx.fillRect(0, 0, CANVAS_WIDTH, CANVAS_HEIGHT);
    ctx.fillStyle = "#ffffff";
    ctx.font = "24px monospace";
    ctx.textAlign = "center";
    ctx.fillText("game over", CANVAS_WIDTH / 2, CANVAS_HEIGHT / 2);
    ctx.textAlign = "start";
  }
}
