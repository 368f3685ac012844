"""Annotation sessions: persisted human-in-the-loop state for one clip.

A session owns ten frame slots. Each slot tracks ranked skeleton candidates,
the reviewer's accept/reject position, manual joint clicks, and the ball
click, all in source-image pixels; normalization happens here at the service
boundary. A frame is accepted once it has a complete skeleton and a ball.

Sessions persist as one JSON file per session under the store root, written
atomically (temp file then rename), with optimistic versioning: every
mutation states the version it read and conflicts are rejected.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from PIL import Image

from keeperkit import ingest
from keeperkit.document import sequence_to_obj
from keeperkit.model import (
    FRAME_COUNT,
    JOINT_ORDER,
    FrameDims,
    JointId,
    Keyframe,
    Point2,
    Sequence,
    Skeleton,
    VALID_LABELS,
    ValidationError,
    normalize_point,
)
from keeperkit.optimizer import OptimizerConfig
from keeperkit.pipeline import correct_sequence, report_obj

SESSION_SCHEMA_VERSION = 1

STATE_PENDING = "pending"
STATE_CANDIDATE_PROPOSED = "candidate_proposed"
STATE_ACCEPTED = "accepted"

_IMAGE_TYPES = {
    ".png": "image/png",
    ".jpg": "image/jpeg",
    ".jpeg": "image/jpeg",
    ".bmp": "image/bmp",
    ".webp": "image/webp",
}


class SessionError(Exception):
    """Annotation failure with a machine-readable code and an HTTP status."""

    def __init__(self, code: str, message: str, status: int = 400, **extra: object):
        self.code = code
        self.message = message
        self.status = status
        self.extra = dict(extra)
        super().__init__(message)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class FrameSlot:
    index: int
    image: str | None = None
    candidates: list[dict] = field(default_factory=list)
    cursor: int = 0
    chosen_candidate: int | None = None
    manual_joints: dict[str, list[float]] = field(default_factory=dict)
    ball_pixel: list[float] | None = None

    def skeleton_obj(self, dims: FrameDims) -> dict[str, list[float]] | None:
        """Effective normalized skeleton: the accepted candidate overlaid with
        manual clicks, or manual clicks alone once all 13 joints are placed."""
        base: dict[str, list[float]] = {}
        if self.chosen_candidate is not None:
            base = dict(self.candidates[self.chosen_candidate]["joints"])
        for name, pixel in self.manual_joints.items():
            p = normalize_point((pixel[0], pixel[1]), dims)
            base[name] = [p.x, p.y]
        if len(base) != len(JOINT_ORDER):
            return None
        return {jid.value: base[jid.value] for jid in JOINT_ORDER}

    def ball_obj(self, dims: FrameDims) -> list[float] | None:
        if self.ball_pixel is None:
            return None
        p = normalize_point((self.ball_pixel[0], self.ball_pixel[1]), dims)
        return [p.x, p.y]

    def state(self, dims: FrameDims) -> str:
        if self.skeleton_obj(dims) is not None and self.ball_pixel is not None:
            return STATE_ACCEPTED
        if self.chosen_candidate is None and self.cursor < len(self.candidates):
            return STATE_CANDIDATE_PROPOSED
        return STATE_PENDING

    def skeleton(self, dims: FrameDims) -> Skeleton | None:
        obj = self.skeleton_obj(dims)
        if obj is None:
            return None
        return Skeleton({jid: Point2(*obj[jid.value]) for jid in JOINT_ORDER})

    def to_obj(self, dims: FrameDims) -> dict:
        return {
            "index": self.index,
            "image": self.image,
            "state": self.state(dims),
            "candidates": self.candidates,
            "cursor": self.cursor,
            "chosen_candidate": self.chosen_candidate,
            "manual_joints": self.manual_joints,
            "ball_pixel": self.ball_pixel,
            "skeleton": self.skeleton_obj(dims),
            "ball": self.ball_obj(dims),
        }

    @staticmethod
    def from_obj(obj: dict) -> "FrameSlot":
        return FrameSlot(
            index=obj["index"],
            image=obj.get("image"),
            candidates=list(obj.get("candidates", [])),
            cursor=obj.get("cursor", 0),
            chosen_candidate=obj.get("chosen_candidate"),
            manual_joints={k: list(v) for k, v in obj.get("manual_joints", {}).items()},
            ball_pixel=list(obj["ball_pixel"]) if obj.get("ball_pixel") else None,
        )


@dataclass
class Session:
    session_id: str
    dims: FrameDims
    source_id: str
    label: str
    created: str
    updated: str
    version: int = 0
    frames: list[FrameSlot] = field(default_factory=list)
    goal_index_override: int | None = None
    blocking_joint_override: str | None = None
    last_preview: dict | None = None

    def frame(self, index: int) -> FrameSlot:
        if not isinstance(index, int) or not 0 <= index < FRAME_COUNT:
            raise SessionError(
                "frame_not_found", f"frame index must be in 0..{FRAME_COUNT - 1}, got {index}", 404
            )
        return self.frames[index]

    def incomplete_indices(self) -> list[int]:
        return [f.index for f in self.frames if f.state(self.dims) != STATE_ACCEPTED]

    def build_sequence(self) -> Sequence:
        """The annotated clip as a validated Sequence; frame index doubles as
        the timestamp since sessions carry no clock."""
        missing = self.incomplete_indices()
        if missing:
            raise SessionError(
                "incomplete_frames",
                "frames not complete: " + ", ".join(str(i) for i in missing),
                409,
                frames=missing,
            )
        frames = []
        for slot in self.frames:
            skeleton = slot.skeleton(self.dims)
            ball_obj = slot.ball_obj(self.dims)
            assert skeleton is not None and ball_obj is not None
            frames.append(
                Keyframe(
                    index=slot.index,
                    time=float(slot.index),
                    skeleton=skeleton,
                    ball=Point2(ball_obj[0], ball_obj[1]),
                )
            )
        return Sequence(
            frames=tuple(frames), dims=self.dims, label=self.label, source_id=self.source_id
        )

    def to_obj(self) -> dict:
        return {
            "session_schema_version": SESSION_SCHEMA_VERSION,
            "session_id": self.session_id,
            "created": self.created,
            "updated": self.updated,
            "version": self.version,
            "source_id": self.source_id,
            "label": self.label,
            "dims": {"width": self.dims.width, "height": self.dims.height},
            "goal_overrides": {
                "goal_index": self.goal_index_override,
                "blocking_joint": self.blocking_joint_override,
            },
            "last_preview": self.last_preview,
            "frames": [f.to_obj(self.dims) for f in self.frames],
        }

    @staticmethod
    def from_obj(obj: dict) -> "Session":
        dims = FrameDims(obj["dims"]["width"], obj["dims"]["height"])
        overrides = obj.get("goal_overrides", {})
        return Session(
            session_id=obj["session_id"],
            dims=dims,
            source_id=obj["source_id"],
            label=obj["label"],
            created=obj["created"],
            updated=obj["updated"],
            version=obj["version"],
            frames=[FrameSlot.from_obj(f) for f in obj["frames"]],
            goal_index_override=overrides.get("goal_index"),
            blocking_joint_override=overrides.get("blocking_joint"),
            last_preview=obj.get("last_preview"),
        )


def _parse_joint(name: str) -> JointId:
    try:
        return JointId(name)
    except ValueError:
        raise SessionError(
            "unknown_joint",
            f"unknown joint {name!r}; valid joints: " + ", ".join(j.value for j in JOINT_ORDER),
            400,
        ) from None


def _check_pixel(pixel: object) -> list[float]:
    if (
        not isinstance(pixel, (list, tuple))
        or len(pixel) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pixel)
    ):
        raise SessionError("bad_pixel", f"pixel must be a pair of numbers, got {pixel!r}", 400)
    try:
        Point2(float(pixel[0]), float(pixel[1]))
    except ValidationError as exc:
        raise SessionError("bad_pixel", str(exc), 400) from exc
    return [float(pixel[0]), float(pixel[1])]


def _rescore_next_frame(session: Session, index: int) -> None:
    """Once frame i has a skeleton, re-rank frame i+1's candidates against it,
    unless the reviewer already committed to something there."""
    if index + 1 >= FRAME_COUNT:
        return
    nxt = session.frames[index + 1]
    if nxt.chosen_candidate is not None or nxt.skeleton_obj(session.dims) is not None:
        return
    previous = session.frames[index].skeleton(session.dims)
    if previous is None or not nxt.candidates:
        return
    def score(cand: dict) -> float:
        total = 0.0
        for jid in JOINT_ORDER:
            x, y = cand["joints"][jid.value]
            total += Point2(x, y).distance_to(previous[jid])
        return total / len(JOINT_ORDER)
    rescored = [dict(c, score=score(c)) for c in nxt.candidates]
    rescored.sort(key=lambda c: (c["score"], c["source_person"]))
    nxt.candidates = rescored
    nxt.cursor = 0


def accept_candidate(session: Session, index: int) -> None:
    slot = session.frame(index)
    if slot.chosen_candidate is not None:
        raise SessionError("invalid_state", f"frame {index} already has an accepted candidate", 409)
    if slot.cursor >= len(slot.candidates):
        raise SessionError(
            "candidates_exhausted",
            f"frame {index} has no candidate to accept; place joints manually",
            409,
        )
    slot.chosen_candidate = slot.cursor
    _rescore_next_frame(session, index)


def reject_candidate(session: Session, index: int) -> None:
    slot = session.frame(index)
    if slot.chosen_candidate is not None:
        raise SessionError("invalid_state", f"frame {index} already has an accepted candidate", 409)
    if slot.cursor >= len(slot.candidates):
        raise SessionError(
            "candidates_exhausted", f"frame {index} has no candidate left to reject", 409
        )
    slot.cursor += 1


def set_ball(session: Session, index: int, pixel: object) -> None:
    slot = session.frame(index)
    slot.ball_pixel = _check_pixel(pixel)


def set_joint(session: Session, index: int, joint: str, pixel: object) -> None:
    slot = session.frame(index)
    jid = _parse_joint(joint)
    had_skeleton = slot.skeleton_obj(session.dims) is not None
    slot.manual_joints[jid.value] = _check_pixel(pixel)
    if not had_skeleton and slot.skeleton_obj(session.dims) is not None:
        _rescore_next_frame(session, index)


def clear_joint(session: Session, index: int, joint: str) -> None:
    slot = session.frame(index)
    jid = _parse_joint(joint)
    if jid.value not in slot.manual_joints:
        raise SessionError("joint_not_placed", f"joint {jid.value!r} has no manual placement", 409)
    del slot.manual_joints[jid.value]


def set_overrides(session: Session, goal_index: int | None, blocking_joint: str | None) -> None:
    if goal_index is not None:
        if not isinstance(goal_index, int) or not 1 <= goal_index < FRAME_COUNT:
            raise SessionError(
                "bad_override", f"goal_index must be in 1..{FRAME_COUNT - 1}, got {goal_index!r}", 400
            )
    if blocking_joint is not None:
        _parse_joint(blocking_joint)
    session.goal_index_override = goal_index
    session.blocking_joint_override = blocking_joint


def run_correction(
    session: Session,
    goal_index: int | None = None,
    blocking_joint: str | None = None,
    iterations: int | None = None,
    tolerance: float | None = None,
) -> tuple[dict, dict]:
    """Correct the annotated clip. Explicit arguments win over the session's
    stored overrides. Returns (report, corrected document) and records them
    as the session's last preview."""
    seq = session.build_sequence()
    g = goal_index if goal_index is not None else session.goal_index_override
    joint_name = blocking_joint if blocking_joint is not None else session.blocking_joint_override
    joint = _parse_joint(joint_name) if joint_name is not None else None
    defaults = OptimizerConfig()
    try:
        cfg = OptimizerConfig(
            iterations=iterations if iterations is not None else defaults.iterations,
            convergence_tol=tolerance if tolerance is not None else defaults.convergence_tol,
        )
        result = correct_sequence(seq, goal_index=g, blocking_joint=joint, config=cfg)
    except ValidationError as exc:
        raise SessionError("bad_correction", str(exc), 400) from exc
    report = report_obj(result)
    corrected = sequence_to_obj(result.corrected)
    session.last_preview = {
        "params": {
            "goal_index": g,
            "blocking_joint": joint.value if joint is not None else None,
            "iterations": cfg.iterations,
            "tolerance": cfg.convergence_tol,
        },
        "report": report,
        "corrected": corrected,
    }
    return report, corrected


def export_document(session: Session) -> dict:
    return sequence_to_obj(session.build_sequence())


def image_media_type(name: str) -> str | None:
    return _IMAGE_TYPES.get(Path(name).suffix.lower())


class SessionStore:
    """One directory per session under root, session.json inside, copied
    frame images beside it. Mutations are serialized per session and saved
    with a temp-file-then-rename so a crash never leaves a torn file."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def _lock(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def session_dir(self, session_id: str) -> Path:
        return self.root / session_id

    def _session_path(self, session_id: str) -> Path:
        return self.session_dir(session_id) / "session.json"

    def exists(self, session_id: str) -> bool:
        return self._session_path(session_id).is_file()

    def list_ids(self) -> list[str]:
        return sorted(p.parent.name for p in self.root.glob("*/session.json"))

    def load(self, session_id: str) -> Session:
        path = self._session_path(session_id)
        if not path.is_file():
            raise SessionError("not_found", f"no session {session_id!r}", 404)
        return Session.from_obj(json.loads(path.read_text()))

    def save(self, session: Session) -> None:
        target = self._session_path(session.session_id)
        target.parent.mkdir(parents=True, exist_ok=True)
        tmp = target.with_name(target.name + ".tmp")
        tmp.write_text(json.dumps(session.to_obj(), indent=2) + "\n")
        os.replace(tmp, target)

    def create(
        self,
        dims: FrameDims,
        source_id: str | None = None,
        label: str = "hit",
    ) -> Session:
        if label not in VALID_LABELS:
            raise SessionError(
                "bad_label", f"label must be one of {list(VALID_LABELS)}, got {label!r}", 400
            )
        session_id = uuid.uuid4().hex[:12]
        now = _now()
        session = Session(
            session_id=session_id,
            dims=dims,
            source_id=source_id or session_id,
            label=label,
            created=now,
            updated=now,
            frames=[FrameSlot(index=i) for i in range(FRAME_COUNT)],
        )
        self.save(session)
        return session

    def mutate(self, session_id: str, expected_version: int, fn) -> Session:
        """Load, check the version the client read, apply, bump, save."""
        with self._lock(session_id):
            session = self.load(session_id)
            if expected_version != session.version:
                raise SessionError(
                    "version_conflict",
                    f"session {session_id} is at version {session.version}, "
                    f"mutation was based on {expected_version}",
                    409,
                    current_version=session.version,
                )
            fn(session)
            session.version += 1
            session.updated = _now()
            self.save(session)
            return session


def _list_inputs(directory: Path, suffixes: set[str], what: str) -> list[Path]:
    if not directory.is_dir():
        raise SessionError("bad_input", f"{what} directory not found: {directory}", 400)
    files = sorted(p for p in directory.iterdir() if p.suffix.lower() in suffixes)
    if len(files) != FRAME_COUNT:
        raise SessionError(
            "bad_input",
            f"expected {FRAME_COUNT} frames, found {len(files)} {what} files in {directory}",
            400,
        )
    return files


def create_session_from_import(
    store: SessionStore,
    detections_dir: Path | str,
    images_dir: Path | str | None = None,
    dims: FrameDims | None = None,
    source_id: str | None = None,
    label: str = "hit",
) -> Session:
    """Build a session from ten detection documents and, optionally, ten
    frame images (copied into the session directory; dims read from them
    when not given explicitly)."""
    detection_files = _list_inputs(Path(detections_dir), {".json"}, "detection")

    image_files: list[Path] = []
    if images_dir is not None:
        image_files = _list_inputs(Path(images_dir), set(_IMAGE_TYPES), "image")
        for img in image_files:
            with Image.open(img) as im:
                img_dims = FrameDims(im.width, im.height)
            if dims is None:
                dims = img_dims
            elif dims != img_dims:
                raise SessionError(
                    "bad_input",
                    f"image {img.name} is {img_dims.width}x{img_dims.height}, "
                    f"expected {dims.width}x{dims.height}",
                    400,
                )
    if dims is None:
        raise SessionError(
            "bad_input", "frame dimensions required when no images are supplied", 400
        )

    session = store.create(dims=dims, source_id=source_id, label=label)
    frames_dir = store.session_dir(session.session_id) / "frames"
    for i, det_file in enumerate(detection_files):
        try:
            detection = ingest.load_detection_file(det_file)
        except ValidationError as exc:
            raise SessionError("bad_input", str(exc), 400) from exc
        proposals = ingest.rank_candidates(detection, None, dims, frame_index=i)
        session.frames[i].candidates = [
            {
                "joints": {jid.value: [c.skeleton[jid].x, c.skeleton[jid].y] for jid in JOINT_ORDER},
                "score": c.score,
                "source_person": c.source_person,
            }
            for c in proposals
        ]
        if image_files:
            frames_dir.mkdir(parents=True, exist_ok=True)
            data = image_files[i].read_bytes()
            rel = f"frames/frame_{i:02d}{image_files[i].suffix.lower()}"
            (store.session_dir(session.session_id) / rel).write_bytes(data)
            session.frames[i].image = rel
    store.save(session)
    return session
