// Shapes of the annotation service's JSON bodies. Field names follow the
// wire format, snake_case included, so responses can be used untranslated.

export const JOINT_ORDER = [
  "head",
  "left_shoulder",
  "right_shoulder",
  "left_elbow",
  "right_elbow",
  "left_wrist",
  "right_wrist",
  "left_hip",
  "right_hip",
  "left_knee",
  "right_knee",
  "left_ankle",
  "right_ankle",
] as const;

export type JointName = (typeof JOINT_ORDER)[number];

export type FrameStateName = "candidate_proposed" | "accepted" | "pending";

export interface Candidate {
  joints: Record<string, [number, number]>;
  score: number;
  source_person: number;
}

export interface FrameSlot {
  index: number;
  image: string | null;
  state: FrameStateName;
  candidates: Candidate[];
  cursor: number;
  chosen_candidate: number | null;
  manual_joints: Record<string, [number, number]>;
  ball_pixel: [number, number] | null;
  // normalized effective skeleton/ball, present once complete
  skeleton: Record<string, [number, number]> | null;
  ball: [number, number] | null;
}

export interface SessionState {
  session_id: string;
  created: string;
  updated: string;
  version: number;
  source_id: string;
  label: string;
  dims: { width: number; height: number };
  goal_overrides: { goal_index: number | null; blocking_joint: string | null };
  last_preview: CorrectionPayload | null;
  frames: FrameSlot[];
}

export interface SessionSummary {
  session_id: string;
  source_id: string;
  label: string;
  created: string;
  updated: string;
  version: number;
  incomplete_frames: number[];
}

export interface CorrectionReport {
  direction: string;
  goal_index: number;
  blocking_joint: string;
  mirrored: boolean;
  iterations_run: number;
  converged: boolean;
  displacement_trace: number[];
}

export interface KeyframeDoc {
  index: number;
  time: number;
  joints: Record<string, [number, number]>;
  ball: [number, number];
  ball_radius?: number;
}

export interface SequenceDocument {
  schema_version: number;
  source_id: string;
  label: string;
  dims: { width: number; height: number };
  frames: KeyframeDoc[];
}

export interface CorrectionPayload {
  report: CorrectionReport;
  corrected: SequenceDocument;
  version?: number;
}
