/**
 * Captures real keyboard and mouse input from the page and forwards it to
 * the bridge.  Key and click events go out immediately; mouse moves are
 * coalesced to at most one per animation frame (the recorder's settling
 * rule, not the UI, decides snapshot timing).
 */

import { BridgeClient } from "./client.js";
import { pixelToLogical } from "./coords.js";

const GAME_KEYS = new Set(["ArrowLeft", "ArrowRight", "ArrowUp", "ArrowDown", " "]);

export function attachInput(canvas: HTMLCanvasElement, client: BridgeClient,
                            isLive: () => boolean): () => void {
  let pendingMove: { x: number; y: number } | null = null;
  let rafId = 0;

  const flushMove = () => {
    rafId = 0;
    if (pendingMove !== null && isLive()) {
      client.mouseMove(pendingMove.x, pendingMove.y);
      pendingMove = null;
    }
  };

  const toLogical = (ev: MouseEvent) => {
    const rect = canvas.getBoundingClientRect();
    return pixelToLogical(ev.clientX - rect.left, ev.clientY - rect.top,
                          rect.width, rect.height);
  };

  const onMouseMove = (ev: MouseEvent) => {
    pendingMove = toLogical(ev);
    if (rafId === 0) rafId = requestAnimationFrame(flushMove);
  };

  const onClick = (ev: MouseEvent) => {
    if (!isLive()) return;
    const { x, y } = toLogical(ev);
    client.mouseClick(x, y);
  };

  const onKey = (ev: KeyboardEvent) => {
    if (!isLive() || ev.repeat) return;
    if (GAME_KEYS.has(ev.key)) ev.preventDefault();
    if (ev.type === "keydown") client.keyDown(ev.key);
    else client.keyUp(ev.key);
  };

  canvas.addEventListener("mousemove", onMouseMove);
  canvas.addEventListener("mousedown", onClick);
  window.addEventListener("keydown", onKey);
  window.addEventListener("keyup", onKey);

  return () => {
    canvas.removeEventListener("mousemove", onMouseMove);
    canvas.removeEventListener("mousedown", onClick);
    window.removeEventListener("keydown", onKey);
    window.removeEventListener("keyup", onKey);
    if (rafId !== 0) cancelAnimationFrame(rafId);
  };
}
