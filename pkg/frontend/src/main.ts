import { BridgeClient } from "./client.js";
import { attachInput } from "./input.js";
import { renderFrame } from "./render.js";

const canvas = document.getElementById("play") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const status = document.getElementById("status")!;
const address = document.getElementById("address") as HTMLInputElement;
const gameSelect = document.getElementById("game") as HTMLSelectElement;
const connectBtn = document.getElementById("connect") as HTMLButtonElement;
const startBtn = document.getElementById("start") as HTMLButtonElement;
const stopBtn = document.getElementById("stop") as HTMLButtonElement;

address.value = `ws://${location.host || "127.0.0.1:8571"}/ws`;

let client: BridgeClient | null = null;
let live = false;
let detachInput: (() => void) | null = null;

function setButtons(connected: boolean): void {
  connectBtn.disabled = connected;
  startBtn.disabled = !connected || live;
  stopBtn.disabled = !live;
}

function show(text: string): void {
  status.textContent = text;
}

function connect(): void {
  const sock = new WebSocket(address.value);
  client = new BridgeClient(sock, {
    onFrame: (f) => renderFrame(ctx, f),
    onSession: (s) => {
      if (s.state === "started") {
        live = true;
        show(`playing ${s.game} (seed ${s.seed})`);
      } else {
        live = false;
        show(`session ended (${s.reason}): ${s.snapshots} snapshots over ${s.duration} ticks`);
      }
      setButtons(true);
    },
    onError: (e) => show(`bridge error: ${e.message}`),
    onProtocolError: (p) => show(`protocol error: ${p}`),
    onClose: () => {
      live = false;
      client = null;
      detachInput?.();
      detachInput = null;
      connectBtn.textContent = "reconnect";
      show("disconnected");
      setButtons(false);
    },
  });
  sock.addEventListener("open", () => {
    show("connected; press start");
    setButtons(true);
  });
  detachInput = attachInput(canvas, client, () => live);
}

connectBtn.onclick = connect;
startBtn.onclick = () => client?.start({ game: gameSelect.value, paced: "realtime" });
stopBtn.onclick = () => client?.stop();
setButtons(false);
show("not connected");
