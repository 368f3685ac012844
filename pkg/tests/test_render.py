import io
import types
import xml.etree.ElementTree as ET

import pytest
from PIL import Image

from conftest import TEMPLATE_POSE, build_sequence, build_skeleton
from keeperkit.model import JointId, Keyframe, Point2, ValidationError
from keeperkit.render import (
    Goalpost,
    RenderConfig,
    from_render_space,
    layout_goalpost,
    render_frame_svg,
    render_sequence,
    to_render_space,
    write_render_outputs,
)

CFG = RenderConfig()


def frame_with(pose_overrides=None, ball=(0.0, 0.0), ball_radius=None, index=0):
    pose = dict(TEMPLATE_POSE)
    if pose_overrides:
        pose.update(pose_overrides)
    return Keyframe(
        index=index,
        time=float(index),
        skeleton=build_skeleton(pose=pose),
        ball=Point2(*ball),
        ball_radius=ball_radius,
    )


class TestRenderSpace:
    def test_center_maps_to_window_center(self):
        assert to_render_space(Point2(0.0, 0.0), CFG) == (1250.0, 600.0)

    def test_corner(self):
        assert to_render_space(Point2(1.0, -1.0), CFG) == (2500.0, 0.0)

    def test_magnification_scales_about_center(self):
        cfg = RenderConfig(magnification=2.0)
        assert to_render_space(Point2(0.5, 0.0), cfg) == (2500.0, 600.0)

    @pytest.mark.parametrize("mag", [0.5, 1.0, 2.0])
    def test_round_trip(self, mag):
        cfg = RenderConfig(magnification=mag)
        for p in (Point2(0.3, -0.7), Point2(-1.0, 1.0), Point2(0.123456, 0.654321)):
            x, y = to_render_space(p, cfg)
            back = from_render_space(x, y, cfg)
            assert abs(back.x - p.x) <= 1e-6
            assert abs(back.y - p.y) <= 1e-6

    def test_y_grows_downward_in_both_spaces(self):
        _, y_up = to_render_space(Point2(0.0, -0.5), CFG)
        _, y_down = to_render_space(Point2(0.0, 0.5), CFG)
        assert y_up < y_down


class TestConfigValidation:
    def test_bad_magnification(self):
        with pytest.raises(ValidationError):
            RenderConfig(magnification=0.0)

    def test_bad_window(self):
        with pytest.raises(ValidationError):
            RenderConfig(window_width=0)

    def test_bad_goalpost_height(self):
        with pytest.raises(ValidationError):
            RenderConfig(goalpost_height=0.0)

    def test_bad_interval(self):
        with pytest.raises(ValidationError):
            RenderConfig(frame_interval_ms=0)

    def test_goalpost_shape(self):
        with pytest.raises(ValidationError):
            Goalpost(left=10, right=5, top=0, bottom=1)


class TestLayoutGoalpost:
    def test_known_arithmetic(self):
        frame = frame_with(
            {
                JointId.LEFT_SHOULDER: (-0.04, -0.38),
                JointId.RIGHT_SHOULDER: (0.04, -0.38),
                JointId.HEAD: (0.0, -0.55),
            }
        )
        gp = layout_goalpost(frame, CFG)
        # shoulders render at x 1200 and 1300; head at y 270
        assert gp.left == pytest.approx(1195.0)
        assert gp.right == pytest.approx(1305.0)
        assert gp.bottom == pytest.approx(270.0)
        assert gp.top == pytest.approx(265.0)

    def test_zero_offset_hugs_shoulders(self):
        frame = frame_with()
        cfg = RenderConfig(goalpost_offset=0.0)
        gp = layout_goalpost(frame, cfg)
        lx, _ = to_render_space(frame.skeleton[JointId.LEFT_SHOULDER], cfg)
        rx, _ = to_render_space(frame.skeleton[JointId.RIGHT_SHOULDER], cfg)
        assert gp.left == pytest.approx(min(lx, rx))
        assert gp.right == pytest.approx(max(lx, rx))

    def test_centered_on_shoulder_midpoint(self):
        frame = frame_with(
            {
                JointId.LEFT_SHOULDER: (0.1, -0.38),
                JointId.RIGHT_SHOULDER: (0.3, -0.38),
            }
        )
        gp = layout_goalpost(frame, CFG)
        assert (gp.left + gp.right) / 2 == pytest.approx(1500.0)

    def test_crossbar_sits_above_head(self):
        frame = frame_with()
        gp = layout_goalpost(frame, CFG)
        _, head_y = to_render_space(frame.skeleton[JointId.HEAD], CFG)
        assert gp.bottom == pytest.approx(head_y)
        assert gp.top == pytest.approx(head_y - CFG.goalpost_height)


class TestFrameSvg:
    def svg(self, corrected=None, **kw):
        frame = frame_with(**kw)
        gp = layout_goalpost(frame, CFG)
        return render_frame_svg(frame, corrected, gp, CFG)

    def test_parses_as_xml(self):
        doc = self.svg()
        root = ET.fromstring(doc)
        assert root.tag.endswith("svg")

    def test_single_skeleton_has_twelve_segments(self):
        doc = self.svg()
        assert doc.count("<line ") == 12
        assert doc.count("<g ") == 1

    def test_corrected_draws_two_skeletons(self):
        corrected = frame_with({JointId.HEAD: (0.2, -0.6)}, ball=(0.5, -0.1))
        doc = self.svg(corrected=corrected)
        assert doc.count("<g ") == 2
        assert doc.count("<line ") == 24
        assert f'stroke="{CFG.dimmed_color}"' in doc
        assert f'stroke="{CFG.keeper_color}"' in doc
        # dimmed original under the corrected keeper
        assert doc.index(CFG.dimmed_color) < doc.index(CFG.keeper_color)

    def test_draw_order_goalpost_keeper_ball(self):
        doc = self.svg()
        goalpost_at = doc.index(CFG.goalpost_color)
        keeper_at = doc.index("<g ")
        ball_at = doc.index(f'fill="{CFG.ball_color}"')
        assert goalpost_at < keeper_at < ball_at

    def test_ball_position_comes_from_corrected_frame(self):
        corrected = frame_with(ball=(0.5, 0.0))
        doc = self.svg(corrected=corrected, ball=(-0.5, 0.0))
        bx, _ = to_render_space(corrected.ball, CFG)
        assert f'<circle cx="{bx:.3f}"' in doc

    def test_recorded_ball_radius_scales_with_window(self):
        doc = self.svg(ball=(0.0, 0.0), ball_radius=0.02)
        assert 'r="25.000"' in doc  # 0.02 * 2500 / 2

    def test_default_ball_radius_when_unrecorded(self):
        doc = self.svg()
        assert f'r="{CFG.ball_display_radius:.3f}"' in doc

    def test_fixed_precision_formatting(self):
        doc = self.svg(ball=(0.0, 0.0))
        assert 'cx="1250.000" cy="600.000"' in doc


SMALL = RenderConfig(window_width=500, window_height=240)


class TestRenderSequence:
    def test_skips_last_frame_by_default(self, template_sequence):
        result = render_sequence(template_sequence, cfg=SMALL)
        assert result.frame_indices == tuple(range(9))
        assert len(result.frame_documents) == 9

    def test_keeps_all_frames_when_asked(self, template_sequence):
        cfg = RenderConfig(window_width=500, window_height=240, skip_last_frame=False)
        result = render_sequence(template_sequence, cfg=cfg)
        assert result.frame_indices == tuple(range(10))
        assert len(result.frame_documents) == 10

    def test_every_document_parses(self, template_sequence):
        result = render_sequence(template_sequence, cfg=SMALL)
        for doc in result.frame_documents:
            ET.fromstring(doc)

    def test_byte_identical_across_runs(self, template_sequence):
        skels = [build_skeleton(dx=0.03 * i, dy=0.01 * i) for i in range(10)]
        corrected = build_sequence(skeletons=skels)
        a = render_sequence(template_sequence, corrected, cfg=SMALL)
        b = render_sequence(template_sequence, corrected, cfg=SMALL)
        assert a.frame_documents == b.frame_documents
        assert a.animation == b.animation

    def test_animation_is_a_gif_with_kept_frames(self, template_sequence):
        result = render_sequence(template_sequence, cfg=SMALL)
        assert result.animation[:6] in (b"GIF87a", b"GIF89a")
        img = Image.open(io.BytesIO(result.animation))
        assert img.n_frames == 9
        assert img.info["duration"] == SMALL.frame_interval_ms

    def test_mismatched_frame_counts_rejected(self, template_sequence):
        stub = types.SimpleNamespace(frames=template_sequence.frames[:9])
        with pytest.raises(ValidationError, match="same frame count"):
            render_sequence(template_sequence, stub)


class TestWriteOutputs:
    def test_file_names_and_contents(self, template_sequence, tmp_path):
        result = render_sequence(template_sequence, cfg=SMALL)
        paths = write_render_outputs(result, tmp_path / "out")
        names = [p.name for p in paths]
        assert names == [f"frame_{i:02d}.svg" for i in range(9)] + ["animation.gif"]
        for p in paths[:-1]:
            ET.fromstring(p.read_text())
        assert paths[-1].read_bytes() == result.animation
