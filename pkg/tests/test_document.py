import json

import pytest

from conftest import build_sequence, build_skeleton
from keeperkit.document import (
    DocumentError,
    SCHEMA_VERSION,
    load_sequence,
    save_sequence,
    sequence_from_obj,
    sequence_to_obj,
    validate_obj,
)
from keeperkit.model import JOINT_ORDER, Keyframe


@pytest.fixture
def doc(template_sequence):
    return sequence_to_obj(template_sequence)


def errors_of(obj):
    return validate_obj(obj)


class TestRoundTrip:
    def test_obj_round_trip_is_exact(self, template_sequence):
        obj = sequence_to_obj(template_sequence)
        back = sequence_from_obj(json.loads(json.dumps(obj)))
        assert back.source_id == template_sequence.source_id
        assert back.label == template_sequence.label
        assert back.dims == template_sequence.dims
        for f0, f1 in zip(template_sequence.frames, back.frames):
            assert f0.time == f1.time
            assert f0.ball.x == f1.ball.x and f0.ball.y == f1.ball.y
            for jid in JOINT_ORDER:
                assert f0.skeleton[jid].x == f1.skeleton[jid].x
                assert f0.skeleton[jid].y == f1.skeleton[jid].y

    def test_ball_radius_round_trips(self):
        skels = [build_skeleton(dx=0.01 * i) for i in range(10)]
        seq = build_sequence(skeletons=skels)
        frames = tuple(
            Keyframe(f.index, f.time, f.skeleton, f.ball, ball_radius=0.02) for f in seq.frames
        )
        seq = type(seq)(frames=frames, dims=seq.dims, label=seq.label, source_id=seq.source_id)
        obj = sequence_to_obj(seq)
        assert obj["frames"][0]["ball_radius"] == 0.02
        back = sequence_from_obj(obj)
        assert all(f.ball_radius == 0.02 for f in back.frames)

    def test_ball_radius_omitted_when_absent(self, doc):
        assert "ball_radius" not in doc["frames"][0]

    def test_schema_version_stamped(self, doc):
        assert doc["schema_version"] == SCHEMA_VERSION

    def test_valid_document_has_no_errors(self, doc):
        assert errors_of(doc) == []


class TestValidateObj:
    def test_non_object(self):
        assert errors_of([1, 2]) == ["document: must be a JSON object, got list"]
        assert errors_of(None) == ["document: must be a JSON object, got NoneType"]

    def test_wrong_schema_version(self, doc):
        doc["schema_version"] = 2
        assert any(e.startswith("schema_version: must be 1, got 2") for e in errors_of(doc))

    def test_missing_source_id(self, doc):
        del doc["source_id"]
        assert any(e.startswith("source_id:") for e in errors_of(doc))
        doc["source_id"] = ""
        assert any(e.startswith("source_id:") for e in errors_of(doc))

    def test_bad_label(self, doc):
        doc["label"] = "draw"
        errs = errors_of(doc)
        assert any(e.startswith("label:") and "'draw'" in e for e in errs)

    def test_bad_dims(self, doc):
        doc["dims"] = {"width": 0, "height": -3}
        errs = errors_of(doc)
        assert any(e.startswith("dims.width:") for e in errs)
        assert any(e.startswith("dims.height:") for e in errs)
        doc["dims"] = {"width": True, "height": 720}
        assert any(e.startswith("dims.width:") for e in errors_of(doc))
        doc["dims"] = "1280x720"
        assert any(e.startswith("dims:") for e in errors_of(doc))

    def test_frames_not_a_list(self, doc):
        doc["frames"] = {}
        assert errors_of(doc) == ["frames: must be a list of 10 frames"]

    def test_wrong_frame_count(self, doc):
        doc["frames"] = doc["frames"][:9]
        assert any("expected exactly 10 frames, got 9" in e for e in errors_of(doc))

    def test_frame_index_mismatch(self, doc):
        doc["frames"][3]["index"] = 7
        assert any(e.startswith("frames[3].index: must be 3, got 7") for e in errors_of(doc))

    def test_negative_time(self, doc):
        doc["frames"][0]["time"] = -0.5
        assert any(e.startswith("frames[0].time:") for e in errors_of(doc))

    def test_non_increasing_time(self, doc):
        doc["frames"][2]["time"] = doc["frames"][1]["time"]
        errs = errors_of(doc)
        assert any(
            e.startswith("frames[2].time: must be strictly greater") for e in errs
        )

    def test_missing_joint(self, doc):
        del doc["frames"][1]["joints"]["left_ankle"]
        assert "frames[1].joints.left_ankle: missing" in errors_of(doc)

    def test_unknown_joint(self, doc):
        doc["frames"][0]["joints"]["nose"] = [0.0, 0.0]
        assert "frames[0].joints.nose: unknown joint name" in errors_of(doc)

    def test_joint_not_a_pair(self, doc):
        doc["frames"][0]["joints"]["head"] = [0.0]
        assert any(
            e.startswith("frames[0].joints.head: must be a pair") for e in errors_of(doc)
        )

    def test_non_finite_coordinate(self, doc):
        doc["frames"][0]["ball"] = ["0.1", 0.2]
        assert any(e.startswith("frames[0].ball[0]: must be a finite number") for e in errors_of(doc))

    def test_pixel_scale_coordinates_caught(self, doc):
        doc["frames"][4]["joints"]["head"] = [640.0, 360.0]
        errs = errors_of(doc)
        assert any(
            e.startswith("frames[4].joints.head[0]:")
            and "pixel coordinates must be normalized first" in e
            for e in errs
        )

    def test_missing_ball(self, doc):
        del doc["frames"][5]["ball"]
        assert "frames[5].ball: missing" in errors_of(doc)

    @pytest.mark.parametrize("radius", [0, -0.1, 5.0, "big"])
    def test_bad_ball_radius(self, doc, radius):
        doc["frames"][0]["ball_radius"] = radius
        assert any(e.startswith("frames[0].ball_radius:") for e in errors_of(doc))

    def test_all_violations_reported_together(self, doc):
        doc["label"] = "draw"
        del doc["frames"][1]["joints"]["head"]
        doc["frames"][8]["time"] = -1
        errs = errors_of(doc)
        assert len(errs) >= 3
        assert any(e.startswith("label:") for e in errs)
        assert "frames[1].joints.head: missing" in errs
        assert any(e.startswith("frames[8].time:") for e in errs)

    def test_frame_not_an_object(self, doc):
        doc["frames"][6] = 42
        assert "frames[6]: must be an object" in errors_of(doc)


class TestSequenceFromObj:
    def test_raises_with_error_list(self, doc):
        doc["label"] = "draw"
        with pytest.raises(DocumentError) as exc_info:
            sequence_from_obj(doc)
        err = exc_info.value
        assert str(err).startswith("invalid sequence document: label:")
        assert len(err.errors) == 1

    def test_head_on_hip_midpoint_rejected(self, doc):
        joints = doc["frames"][0]["joints"]
        joints["left_hip"] = [-0.1, 0.0]
        joints["right_hip"] = [0.1, 0.0]
        joints["head"] = [0.0, 0.0]
        with pytest.raises(DocumentError, match="hip midpoint"):
            sequence_from_obj(doc)


class TestFileIO:
    def test_save_and_load(self, template_sequence, tmp_path):
        path = tmp_path / "nested" / "clip.json"
        save_sequence(template_sequence, path)
        text = path.read_text()
        assert text.endswith("\n")
        back = load_sequence(path)
        assert sequence_to_obj(back) == sequence_to_obj(template_sequence)

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(DocumentError, match="cannot read"):
            load_sequence(tmp_path / "nope.json")

    def test_load_invalid_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(DocumentError, match="not valid JSON"):
            load_sequence(p)

    def test_load_reports_validation_errors(self, template_sequence, tmp_path):
        obj = sequence_to_obj(template_sequence)
        obj["frames"][2]["joints"].pop("head")
        p = tmp_path / "clip.json"
        p.write_text(json.dumps(obj))
        with pytest.raises(DocumentError, match=r"frames\[2\].joints.head: missing"):
            load_sequence(p)
