// Annotation-session view logic, kept pure so it can be tested without a
// DOM. All decisions here read server state; nothing is mutated locally.
// The server's frame `cursor` walks the ranked candidate list, while the
// guided joint cursor derived here walks the 13 joints in canonical order.

import { ApiError } from "./api.js";
import type { FrameSlot, JointName, SessionState } from "./types.js";
import { JOINT_ORDER } from "./types.js";

/** Joints covered by the frame's effective skeleton so far: the chosen
 * candidate's joints overlaid with manual clicks. */
export function placedJoints(frame: FrameSlot): Set<string> {
  const placed = new Set<string>();
  if (frame.chosen_candidate !== null) {
    const candidate = frame.candidates[frame.chosen_candidate];
    if (candidate) {
      for (const name of Object.keys(candidate.joints)) placed.add(name);
    }
  }
  for (const name of Object.keys(frame.manual_joints)) placed.add(name);
  return placed;
}

/** Index into JOINT_ORDER of the next joint to place, JOINT_ORDER.length
 * when the skeleton is complete. Guided placement follows canonical order,
 * so this is the first gap. */
export function guidedCursor(frame: FrameSlot): number {
  const placed = placedJoints(frame);
  for (let i = 0; i < JOINT_ORDER.length; i++) {
    const name = JOINT_ORDER[i] as string;
    if (!placed.has(name)) return i;
  }
  return JOINT_ORDER.length;
}

export function nextJoint(frame: FrameSlot): JointName | null {
  const i = guidedCursor(frame);
  return i < JOINT_ORDER.length ? (JOINT_ORDER[i] as JointName) : null;
}

/** The manual placement undo steps back to. Guided order is canonical
 * order, so the most recent placement is the last placed joint in that
 * order; null when nothing manual is placed. */
export function undoTarget(frame: FrameSlot): JointName | null {
  const manual = new Set(Object.keys(frame.manual_joints));
  for (let i = JOINT_ORDER.length - 1; i >= 0; i--) {
    const name = JOINT_ORDER[i] as JointName;
    if (manual.has(name)) return name;
  }
  return null;
}

/** Review mode while a ranked candidate awaits a verdict; manual mode
 * otherwise, which includes candidate exhaustion (the reject-past-the-end
 * fallback) and sessions created without detections. */
export function annotationMode(frame: FrameSlot): "review" | "manual" {
  return frame.state === "candidate_proposed" ? "review" : "manual";
}

export function candidatesExhausted(frame: FrameSlot): boolean {
  return (
    frame.chosen_candidate === null &&
    frame.candidates.length > 0 &&
    frame.cursor >= frame.candidates.length
  );
}

export function incompleteFrames(session: SessionState): number[] {
  return session.frames.filter((f) => f.state !== "accepted").map((f) => f.index);
}

export interface Gate {
  allowed: boolean;
  reason: string | null;
}

/** Correction preview needs every frame complete. */
export function previewGate(session: SessionState): Gate {
  const missing = incompleteFrames(session);
  if (missing.length > 0) {
    return { allowed: false, reason: `frames incomplete: ${missing.join(", ")}` };
  }
  return { allowed: true, reason: null };
}

/** Export additionally requires a correction preview to have run, so the
 * annotator has seen the corrected motion before anything leaves. */
export function exportGate(session: SessionState, previewRan: boolean): Gate {
  const preview = previewGate(session);
  if (!preview.allowed) return preview;
  if (!previewRan) {
    return { allowed: false, reason: "run a correction preview before exporting" };
  }
  return { allowed: true, reason: null };
}

export function isVersionConflict(err: unknown): err is ApiError {
  return err instanceof ApiError && err.isVersionConflict;
}

/** Human-readable banner text for a failed request. */
export function bannerText(err: unknown): string {
  if (err instanceof ApiError) {
    return err.isVersionConflict
      ? "This session changed elsewhere; reload to continue."
      : `${err.code}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}
