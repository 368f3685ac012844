"""Import of externally produced multi-person keypoint detections.

Input files follow the common pose-estimator JSON layout: a top-level
"people" list where each person carries "pose_keypoints_2d", a flat list of
54 numbers (18 landmarks, each x, y, confidence, in pixel coordinates).
Landmarks the estimator could not see are reported with confidence 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from keeperkit.model import (
    FrameDims,
    JointId,
    Point2,
    Skeleton,
    ValidationError,
    normalize_point,
)

# Landmark slots in estimator output order. Only 13 of the 18 map to skeleton
# joints; facial slots and the neck are discarded.
LANDMARK_SLOTS: tuple[str, ...] = (
    "nose",
    "neck",
    "right_shoulder",
    "right_elbow",
    "right_wrist",
    "left_shoulder",
    "left_elbow",
    "left_wrist",
    "right_hip",
    "right_knee",
    "right_ankle",
    "left_hip",
    "left_knee",
    "left_ankle",
    "right_eye",
    "left_eye",
    "right_ear",
    "left_ear",
)

LANDMARK_TO_JOINT: dict[str, JointId] = {
    "nose": JointId.HEAD,
    "right_shoulder": JointId.RIGHT_SHOULDER,
    "right_elbow": JointId.RIGHT_ELBOW,
    "right_wrist": JointId.RIGHT_WRIST,
    "left_shoulder": JointId.LEFT_SHOULDER,
    "left_elbow": JointId.LEFT_ELBOW,
    "left_wrist": JointId.LEFT_WRIST,
    "right_hip": JointId.RIGHT_HIP,
    "right_knee": JointId.RIGHT_KNEE,
    "right_ankle": JointId.RIGHT_ANKLE,
    "left_hip": JointId.LEFT_HIP,
    "left_knee": JointId.LEFT_KNEE,
    "left_ankle": JointId.LEFT_ANKLE,
}

CONFIDENCE_THRESHOLD = 0.1


@dataclass(frozen=True)
class Landmark:
    """One detected landmark in pixel coordinates."""

    x: float
    y: float
    confidence: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "confidence"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise ValidationError(f"landmark {name} must be a finite number, got {v!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValidationError(
                f"landmark confidence must be in [0, 1], got {self.confidence!r}"
            )


@dataclass(frozen=True)
class PersonDetection:
    """Partial landmark map for one detected person."""

    landmarks: Mapping[str, Landmark]

    def __post_init__(self) -> None:
        for name in self.landmarks:
            if name not in LANDMARK_SLOTS:
                raise ValidationError(f"unknown landmark slot {name!r}")


@dataclass(frozen=True)
class RawDetection:
    """All people detected in one video frame."""

    people: tuple[PersonDetection, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "people", tuple(self.people))


@dataclass(frozen=True)
class MappingRejection:
    """Why a person could not be turned into a full skeleton."""

    missing: tuple[JointId, ...]
    reason: str | None = None

    def describe(self) -> str:
        if self.reason is not None:
            return self.reason
        names = ", ".join(j.value for j in self.missing)
        return f"missing or low-confidence joints: {names}"


@dataclass(frozen=True)
class CandidateProposal:
    """A ranked skeleton candidate for one frame. Lower score is better."""

    frame_index: int
    skeleton: Skeleton
    score: float
    source_person: int


def parse_detection(obj: object, where: str = "detection") -> RawDetection:
    """Build a RawDetection from decoded estimator JSON.

    Raises ValidationError naming the offending person and slot.
    """
    if not isinstance(obj, dict):
        raise ValidationError(f"{where}: expected a JSON object, got {type(obj).__name__}")
    people_obj = obj.get("people")
    if not isinstance(people_obj, list):
        raise ValidationError(f"{where}: 'people' must be a list")
    people: list[PersonDetection] = []
    for pi, person in enumerate(people_obj):
        if not isinstance(person, dict):
            raise ValidationError(f"{where}: people[{pi}] must be an object")
        flat = person.get("pose_keypoints_2d")
        if not isinstance(flat, list) or len(flat) != 3 * len(LANDMARK_SLOTS):
            raise ValidationError(
                f"{where}: people[{pi}].pose_keypoints_2d must be a list of "
                f"{3 * len(LANDMARK_SLOTS)} numbers"
            )
        landmarks: dict[str, Landmark] = {}
        for si, slot in enumerate(LANDMARK_SLOTS):
            x, y, c = flat[3 * si], flat[3 * si + 1], flat[3 * si + 2]
            try:
                lm = Landmark(x, y, c)
            except ValidationError as exc:
                raise ValidationError(
                    f"{where}: people[{pi}] slot {slot!r}: {exc}"
                ) from exc
            # Confidence 0 is the estimator's "not seen" marker.
            if lm.confidence > 0.0:
                landmarks[slot] = lm
        people.append(PersonDetection(landmarks))
    return RawDetection(tuple(people))


def load_detection_file(path: Path | str) -> RawDetection:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read detection file {path}: {exc}") from exc
    return parse_detection(obj, where=str(path))


def map_landmarks(
    person: PersonDetection,
    dims: FrameDims,
    min_confidence: float = CONFIDENCE_THRESHOLD,
) -> Skeleton | MappingRejection:
    """Map one person's landmarks to a normalized skeleton.

    Every one of the 13 joints must be present at or above min_confidence
    and the pose must be geometrically usable; otherwise the person is
    rejected, never raised on.
    """
    joints: dict[JointId, Point2] = {}
    missing: list[JointId] = []
    for slot, jid in LANDMARK_TO_JOINT.items():
        lm = person.landmarks.get(slot)
        if lm is None or lm.confidence < min_confidence:
            missing.append(jid)
        else:
            joints[jid] = normalize_point((lm.x, lm.y), dims)
    if missing:
        missing.sort(key=lambda j: list(JointId).index(j))
        return MappingRejection(tuple(missing))
    try:
        return Skeleton(joints)
    except ValidationError as exc:
        # degenerate geometry (all landmarks stacked on one spot, say) is as
        # unusable as a person with missing joints
        return MappingRejection((), reason=str(exc))


def _score(skeleton: Skeleton, previous: Skeleton | None) -> float:
    if previous is None:
        # Nothing to chain against yet: prefer the person standing nearest
        # the frame center, where the keeper starts.
        mid = skeleton.hip_midpoint()
        return math.hypot(mid.x, mid.y)
    return sum(skeleton[j].distance_to(previous[j]) for j in JointId) / len(JointId)


def rank_candidates(
    detection: RawDetection,
    previous: Skeleton | None,
    dims: FrameDims,
    frame_index: int = 0,
    min_confidence: float = CONFIDENCE_THRESHOLD,
) -> list[CandidateProposal]:
    """Rank every mappable person in a frame, best candidate first.

    With a previous skeleton the score is the mean per-joint distance to it;
    without one it is the hip-midpoint distance to the frame center. Ties
    keep detection-file order stably.
    """
    proposals: list[CandidateProposal] = []
    for pi, person in enumerate(detection.people):
        mapped = map_landmarks(person, dims, min_confidence)
        if isinstance(mapped, MappingRejection):
            continue
        proposals.append(
            CandidateProposal(
                frame_index=frame_index,
                skeleton=mapped,
                score=_score(mapped, previous),
                source_person=pi,
            )
        )
    proposals.sort(key=lambda c: (c.score, c.source_person))
    return proposals
