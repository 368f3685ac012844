// Browser entry point: wires the annotation service to the DOM. All motion
// math lives server-side; this file only routes clicks (converted to source
// image pixels) into the API and paints what comes back. State transitions
// and gating rules live in state.ts so they stay testable without a DOM.

import { ApiError, Client } from "./api.js";
import { SideBySidePlayer, strokeSkeleton } from "./player.js";
import {
  annotationMode,
  bannerText,
  candidatesExhausted,
  exportGate,
  isVersionConflict,
  nextJoint,
  previewGate,
  undoTarget,
} from "./state.js";
import type { CorrectionPayload, FrameSlot, SessionState } from "./types.js";
import { JOINT_ORDER } from "./types.js";
import {
  displayToImage,
  fitTransform,
  imageToDisplay,
  normalizedToDisplay,
  panBy,
  zoomAt,
  type Pt,
  type ViewTransform,
} from "./view.js";

type ClickMode = "joint" | "ball";

interface AppState {
  session: SessionState | null;
  current: number;
  clickMode: ClickMode;
  view: ViewTransform | null;
  showCandidate: boolean;
  showAccepted: boolean;
  showCorrected: boolean;
  preview: CorrectionPayload | null;
  player: SideBySidePlayer | null;
}

const state: AppState = {
  session: null,
  current: 0,
  clickMode: "joint",
  view: null,
  showCandidate: true,
  showAccepted: true,
  showCorrected: false,
  preview: null,
  player: null,
};

const client = new Client("");
const imageCache = new Map<string, HTMLImageElement>();

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function showBanner(text: string, withReload = false): void {
  const banner = el<HTMLDivElement>("banner");
  banner.classList.remove("hidden");
  el<HTMLSpanElement>("banner-text").textContent = text;
  el<HTMLButtonElement>("banner-reload").classList.toggle("hidden", !withReload);
}

function clearBanner(): void {
  el<HTMLDivElement>("banner").classList.add("hidden");
}

/** Run an API call; surface failures in the banner. A version conflict gets
 * the reload prompt since this client's copy of the session is stale. */
async function guard(fn: () => Promise<void>): Promise<void> {
  try {
    clearBanner();
    await fn();
  } catch (err) {
    showBanner(bannerText(err), isVersionConflict(err));
    if (!(err instanceof ApiError)) throw err;
  }
}

function currentFrame(): FrameSlot | null {
  if (!state.session) return null;
  return state.session.frames[state.current] ?? null;
}

// --- session list ---------------------------------------------------------

async function refreshSessions(): Promise<void> {
  const { sessions } = await client.listSessions();
  const list = el<HTMLUListElement>("session-list");
  list.textContent = "";
  for (const s of sessions) {
    const item = document.createElement("li");
    const link = document.createElement("button");
    link.className = "session-link";
    const left = 10 - s.incomplete_frames.length;
    link.textContent = `${s.source_id} (${s.label}, ${left}/10 frames)`;
    link.addEventListener("click", () => void guard(() => openSession(s.session_id)));
    item.appendChild(link);
    list.appendChild(item);
  }
  if (sessions.length === 0) {
    const item = document.createElement("li");
    item.className = "empty";
    item.textContent = "no sessions yet";
    list.appendChild(item);
  }
}

function createFormValues(): Record<string, unknown> {
  const get = (id: string) => el<HTMLInputElement>(id).value.trim();
  const body: Record<string, unknown> = { label: el<HTMLSelectElement>("create-label").value };
  if (get("create-source")) body.source_id = get("create-source");
  if (get("create-width")) body.width = Number(get("create-width"));
  if (get("create-height")) body.height = Number(get("create-height"));
  if (get("create-detections")) body.detections_dir = get("create-detections");
  if (get("create-images")) body.images_dir = get("create-images");
  return body;
}

async function createSession(): Promise<void> {
  const session = await client.createSession(createFormValues());
  await refreshSessions();
  await openSession(session.session_id);
}

// --- annotation view ------------------------------------------------------

async function openSession(sid: string): Promise<void> {
  const session = await client.getSession(sid);
  state.session = session;
  state.current = 0;
  state.view = null;
  state.showCorrected = false;
  state.preview = session.last_preview;
  el<HTMLElement>("annotator").classList.remove("hidden");
  el<HTMLElement>("preview-panel").classList.add("hidden");
  syncOverrideControls();
  renderAll();
}

function applySession(session: SessionState): void {
  state.session = session;
  state.preview = session.last_preview;
  renderAll();
}

function renderAll(): void {
  renderFrameStrip();
  renderControls();
  renderCanvas();
}

function renderFrameStrip(): void {
  const strip = el<HTMLDivElement>("frame-strip");
  strip.textContent = "";
  if (!state.session) return;
  for (const frame of state.session.frames) {
    const chip = document.createElement("button");
    chip.className = `frame-chip ${frame.state}` + (frame.index === state.current ? " active" : "");
    chip.textContent = String(frame.index);
    chip.title = frame.state.replace("_", " ");
    chip.addEventListener("click", () => {
      state.current = frame.index;
      state.view = null;
      renderAll();
    });
    strip.appendChild(chip);
  }
}

function syncOverrideControls(): void {
  if (!state.session) return;
  const goal = el<HTMLSelectElement>("goal-select");
  const joint = el<HTMLSelectElement>("joint-select");
  goal.value = state.session.goal_overrides.goal_index?.toString() ?? "";
  joint.value = state.session.goal_overrides.blocking_joint ?? "";
}

function renderControls(): void {
  const session = state.session;
  const frame = currentFrame();
  if (!session || !frame) return;

  const mode = annotationMode(frame);
  const reviewing = mode === "review";
  el<HTMLButtonElement>("btn-accept").disabled = !reviewing;
  el<HTMLButtonElement>("btn-reject").disabled = !reviewing;
  el<HTMLButtonElement>("btn-undo").disabled = undoTarget(frame) === null;

  const joint = nextJoint(frame);
  const modeLabel = el<HTMLSpanElement>("mode-label");
  if (reviewing) {
    const total = frame.candidates.length;
    modeLabel.textContent = `review: candidate ${frame.cursor + 1}/${total}`;
  } else if (state.clickMode === "ball") {
    modeLabel.textContent = "click to place the ball";
  } else if (joint !== null) {
    modeLabel.textContent = `click to place: ${joint}`;
  } else if (frame.ball_pixel === null) {
    modeLabel.textContent = "skeleton complete; place the ball";
  } else {
    modeLabel.textContent = "frame complete";
  }
  if (candidatesExhausted(frame) && mode === "manual") {
    modeLabel.textContent += " (candidates exhausted, manual placement)";
  }

  el<HTMLButtonElement>("btn-mode-joint").classList.toggle("active", state.clickMode === "joint");
  el<HTMLButtonElement>("btn-mode-ball").classList.toggle("active", state.clickMode === "ball");

  const preview = previewGate(session);
  const correctBtn = el<HTMLButtonElement>("btn-correct");
  correctBtn.disabled = !preview.allowed;
  correctBtn.title = preview.reason ?? "run the correction and preview the result";
  const gate = exportGate(session, session.last_preview !== null);
  const exportBtn = el<HTMLButtonElement>("btn-export");
  exportBtn.disabled = !gate.allowed;
  exportBtn.title = gate.reason ?? "download the annotated clip";
  // spell the blocking condition out instead of leaving a dead button
  el<HTMLDivElement>("gate-note").textContent = preview.reason ?? gate.reason ?? "";

  el<HTMLButtonElement>("btn-show-candidate").classList.toggle("active", state.showCandidate);
  el<HTMLButtonElement>("btn-show-accepted").classList.toggle("active", state.showAccepted);
  el<HTMLButtonElement>("btn-show-corrected").disabled = state.preview === null;
  el<HTMLButtonElement>("btn-show-corrected").classList.toggle("active", state.showCorrected);
}

// --- canvas ---------------------------------------------------------------

function canvasTransform(canvas: HTMLCanvasElement): ViewTransform {
  const session = state.session;
  if (!session) return { scale: 1, offsetX: 0, offsetY: 0 };
  if (!state.view) {
    state.view = fitTransform(
      session.dims.width,
      session.dims.height,
      canvas.width,
      canvas.height,
    );
  }
  return state.view;
}

function frameImage(frame: FrameSlot): HTMLImageElement | null {
  const session = state.session;
  if (!session || frame.image === null) return null;
  const url = client.frameImageUrl(session.session_id, frame.index);
  const cached = imageCache.get(url);
  if (cached) return cached.complete ? cached : null;
  const img = new Image();
  img.src = url;
  img.addEventListener("load", () => renderCanvas());
  imageCache.set(url, img);
  return null;
}

function renderCanvas(): void {
  const session = state.session;
  const frame = currentFrame();
  const canvas = el<HTMLCanvasElement>("frame-canvas");
  const ctx = canvas.getContext("2d");
  if (!session || !frame || !ctx) return;
  const t = canvasTransform(canvas);
  const dims = session.dims;

  ctx.fillStyle = "#14181d";
  ctx.fillRect(0, 0, canvas.width, canvas.height);

  const img = frameImage(frame);
  const corner = imageToDisplay({ x: 0, y: 0 }, t);
  if (img) {
    ctx.drawImage(img, corner.x, corner.y, dims.width * t.scale, dims.height * t.scale);
  } else {
    ctx.fillStyle = "#232a32";
    ctx.fillRect(corner.x, corner.y, dims.width * t.scale, dims.height * t.scale);
  }

  // candidate under review, drawn dimmed until accepted
  if (state.showCandidate && frame.state === "candidate_proposed") {
    const candidate = frame.candidates[frame.cursor];
    if (candidate) {
      strokeSkeleton(
        ctx,
        (name) => {
          const p = candidate.joints[name];
          return p ? normalizedToDisplay([p[0], p[1]], dims, t) : null;
        },
        "#a6b0ba",
      );
    }
  }

  // effective skeleton so far: chosen candidate overlaid with manual clicks
  const chosen = frame.chosen_candidate !== null ? frame.candidates[frame.chosen_candidate] : null;
  const effective = (name: string): Pt | null => {
    const manual = frame.manual_joints[name];
    if (manual) return imageToDisplay({ x: manual[0], y: manual[1] }, t);
    const base = chosen?.joints[name];
    return base ? normalizedToDisplay([base[0], base[1]], dims, t) : null;
  };
  if (state.showAccepted) {
    strokeSkeleton(ctx, effective, "#4dabf7");
    ctx.fillStyle = "#ffd43b";
    for (const name of Object.keys(frame.manual_joints)) {
      const p = effective(name);
      if (!p) continue;
      ctx.beginPath();
      ctx.arc(p.x, p.y, 4, 0, Math.PI * 2);
      ctx.fill();
    }
  }

  if (frame.ball_pixel) {
    const b = imageToDisplay({ x: frame.ball_pixel[0], y: frame.ball_pixel[1] }, t);
    ctx.strokeStyle = "#ffffff";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.arc(b.x, b.y, 8, 0, Math.PI * 2);
    ctx.stroke();
  }

  // corrected pose overlay for this frame, from the last preview
  if (state.showCorrected && state.preview) {
    const corrected = state.preview.corrected.frames[state.current];
    if (corrected) {
      strokeSkeleton(
        ctx,
        (name) => {
          const p = corrected.joints[name];
          return p ? normalizedToDisplay([p[0], p[1]], dims, t) : null;
        },
        "#51cf66",
        2,
      );
    }
  }
}

function canvasPoint(canvas: HTMLCanvasElement, ev: MouseEvent): Pt {
  const rect = canvas.getBoundingClientRect();
  return {
    x: ((ev.clientX - rect.left) / rect.width) * canvas.width,
    y: ((ev.clientY - rect.top) / rect.height) * canvas.height,
  };
}

/** Route a click to the service as a source-image pixel. The server does
 * all normalization; the view transform only undoes zoom and pan. */
async function handleCanvasClick(display: Pt): Promise<void> {
  const session = state.session;
  const frame = currentFrame();
  if (!session || !frame) return;
  if (annotationMode(frame) === "review") return;
  const canvas = el<HTMLCanvasElement>("frame-canvas");
  const pixel = displayToImage(display, canvasTransform(canvas));
  const coords: [number, number] = [pixel.x, pixel.y];

  if (state.clickMode === "ball") {
    applySession(await client.setBall(session.session_id, frame.index, coords, session.version));
    return;
  }
  const joint = nextJoint(frame);
  if (joint === null) {
    if (frame.ball_pixel === null) {
      applySession(await client.setBall(session.session_id, frame.index, coords, session.version));
    }
    return;
  }
  applySession(
    await client.placeJoint(session.session_id, frame.index, joint, coords, session.version),
  );
}

function wireCanvas(): void {
  const canvas = el<HTMLCanvasElement>("frame-canvas");
  let dragging = false;
  let moved = false;
  let last: Pt = { x: 0, y: 0 };

  canvas.addEventListener("mousedown", (ev) => {
    dragging = true;
    moved = false;
    last = canvasPoint(canvas, ev);
  });
  canvas.addEventListener("mousemove", (ev) => {
    if (!dragging) return;
    const p = canvasPoint(canvas, ev);
    const dx = p.x - last.x;
    const dy = p.y - last.y;
    if (Math.abs(dx) + Math.abs(dy) > 2) moved = true;
    if (moved && state.view) {
      state.view = panBy(state.view, dx, dy);
      last = p;
      renderCanvas();
    }
  });
  window.addEventListener("mouseup", (ev) => {
    if (!dragging) return;
    dragging = false;
    if (!moved) {
      const p = canvasPoint(canvas, ev as MouseEvent);
      void guard(() => handleCanvasClick(p));
    }
  });
  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    const t = canvasTransform(canvas);
    const factor = ev.deltaY < 0 ? 1.15 : 1 / 1.15;
    state.view = zoomAt(t, canvasPoint(canvas, ev), factor);
    renderCanvas();
  });
}

// --- actions --------------------------------------------------------------

async function withSession(
  fn: (session: SessionState, frame: FrameSlot) => Promise<SessionState>,
): Promise<void> {
  const session = state.session;
  const frame = currentFrame();
  if (!session || !frame) return;
  applySession(await fn(session, frame));
}

async function runCorrection(): Promise<void> {
  const session = state.session;
  if (!session) return;
  const payload = await client.correct(session.session_id, {}, session.version);
  // the mutation bumped the version; reload so later edits do not conflict
  const fresh = await client.getSession(session.session_id);
  applySession(fresh);
  state.preview = { report: payload.report, corrected: payload.corrected };
  await showPreview();
  renderControls();
}

async function showPreview(): Promise<void> {
  const session = state.session;
  const preview = state.preview;
  if (!session || !preview) return;
  const original = await client.exportDocument(session.session_id);

  el<HTMLElement>("preview-panel").classList.remove("hidden");
  const r = preview.report;
  el<HTMLSpanElement>("preview-report").textContent =
    `${r.direction}, goal frame ${r.goal_index}, blocking ${r.blocking_joint}` +
    `${r.mirrored ? ", mirrored" : ""}; ` +
    `${r.iterations_run} iterations, ${r.converged ? "converged" : "not converged"}`;

  state.player?.pause();
  state.player = new SideBySidePlayer([
    { canvas: el<HTMLCanvasElement>("orig-canvas"), doc: original, color: "#a6b0ba" },
    { canvas: el<HTMLCanvasElement>("corr-canvas"), doc: preview.corrected, color: "#51cf66" },
  ]);
  state.player.onFrame = (i) => {
    el<HTMLSpanElement>("preview-frame").textContent = `frame ${i}`;
  };
  state.player.play();
}

async function exportSession(): Promise<void> {
  const session = state.session;
  if (!session) return;
  const doc = await client.exportDocument(session.session_id);
  const blob = new Blob([JSON.stringify(doc, null, 2) + "\n"], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = `${session.source_id}.json`;
  a.click();
  URL.revokeObjectURL(url);
}

async function applyOverrides(): Promise<void> {
  const session = state.session;
  if (!session) return;
  const goalRaw = el<HTMLSelectElement>("goal-select").value;
  const jointRaw = el<HTMLSelectElement>("joint-select").value;
  const fresh = await client.setOverrides(
    session.session_id,
    {
      goal_index: goalRaw === "" ? null : Number(goalRaw),
      blocking_joint: jointRaw === "" ? null : jointRaw,
    },
    session.version,
  );
  applySession(fresh);
}

function wireControls(): void {
  el<HTMLButtonElement>("btn-accept").addEventListener("click", () =>
    void guard(() => withSession((s, f) => client.accept(s.session_id, f.index, s.version))),
  );
  el<HTMLButtonElement>("btn-reject").addEventListener("click", () =>
    void guard(() => withSession((s, f) => client.reject(s.session_id, f.index, s.version))),
  );
  el<HTMLButtonElement>("btn-undo").addEventListener("click", () =>
    void guard(() =>
      withSession((s, f) => {
        const target = undoTarget(f);
        if (target === null) return Promise.resolve(s);
        return client.undoJoint(s.session_id, f.index, target, s.version);
      }),
    ),
  );
  el<HTMLButtonElement>("btn-mode-joint").addEventListener("click", () => {
    state.clickMode = "joint";
    renderControls();
  });
  el<HTMLButtonElement>("btn-mode-ball").addEventListener("click", () => {
    state.clickMode = "ball";
    renderControls();
  });
  el<HTMLSelectElement>("goal-select").addEventListener("change", () =>
    void guard(applyOverrides),
  );
  el<HTMLSelectElement>("joint-select").addEventListener("change", () =>
    void guard(applyOverrides),
  );
  el<HTMLButtonElement>("btn-correct").addEventListener("click", () =>
    void guard(runCorrection),
  );
  el<HTMLButtonElement>("btn-export").addEventListener("click", () =>
    void guard(exportSession),
  );
  el<HTMLButtonElement>("btn-show-candidate").addEventListener("click", () => {
    state.showCandidate = !state.showCandidate;
    renderAll();
  });
  el<HTMLButtonElement>("btn-show-accepted").addEventListener("click", () => {
    state.showAccepted = !state.showAccepted;
    renderAll();
  });
  el<HTMLButtonElement>("btn-show-corrected").addEventListener("click", () => {
    state.showCorrected = !state.showCorrected;
    renderAll();
  });
  el<HTMLButtonElement>("banner-dismiss").addEventListener("click", clearBanner);
  el<HTMLButtonElement>("btn-play").addEventListener("click", () => {
    if (!state.player) return;
    if (state.player.playing) state.player.pause();
    else state.player.play();
  });
  el<HTMLButtonElement>("banner-reload").addEventListener("click", () =>
    void guard(async () => {
      if (state.session) await openSession(state.session.session_id);
    }),
  );
  el<HTMLButtonElement>("btn-create").addEventListener("click", (ev) => {
    ev.preventDefault();
    void guard(createSession);
  });
}

function fillSelects(): void {
  const goal = el<HTMLSelectElement>("goal-select");
  for (let i = 1; i <= 9; i++) {
    const opt = document.createElement("option");
    opt.value = String(i);
    opt.textContent = `frame ${i}`;
    goal.appendChild(opt);
  }
  const joint = el<HTMLSelectElement>("joint-select");
  for (const name of JOINT_ORDER) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    joint.appendChild(opt);
  }
}

export function main(): void {
  fillSelects();
  wireControls();
  wireCanvas();
  void guard(refreshSessions);
}

main();
