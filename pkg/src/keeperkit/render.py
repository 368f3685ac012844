"""Viewable output: one vector document per frame plus an animated export.

The keeper is a 12-segment stick figure with a circular head marker, drawn
over a goalpost band sized from the first-frame shoulder spread. When a
corrected sequence is supplied it is drawn solid and the original is dimmed
underneath. Identical inputs produce byte-identical documents: coordinates
are formatted with fixed precision and no timestamps or ids are embedded.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

from PIL import Image, ImageDraw

from keeperkit.model import (
    JointId,
    Keyframe,
    Point2,
    Sequence,
    ValidationError,
)

# (start, end) joint pairs; the head stem attaches to the shoulder midpoint,
# which is not itself a joint, so it is drawn separately. 12 segments total
# counting the stem and the shoulder bar.
_BONES: tuple[tuple[JointId, JointId], ...] = (
    (JointId.LEFT_SHOULDER, JointId.RIGHT_SHOULDER),
    (JointId.LEFT_SHOULDER, JointId.LEFT_ELBOW),
    (JointId.LEFT_ELBOW, JointId.LEFT_WRIST),
    (JointId.RIGHT_SHOULDER, JointId.RIGHT_ELBOW),
    (JointId.RIGHT_ELBOW, JointId.RIGHT_WRIST),
    (JointId.LEFT_SHOULDER, JointId.LEFT_HIP),
    (JointId.RIGHT_SHOULDER, JointId.RIGHT_HIP),
    (JointId.LEFT_HIP, JointId.LEFT_KNEE),
    (JointId.LEFT_KNEE, JointId.LEFT_ANKLE),
    (JointId.RIGHT_HIP, JointId.RIGHT_KNEE),
    (JointId.RIGHT_KNEE, JointId.RIGHT_ANKLE),
)


@dataclass(frozen=True)
class RenderConfig:
    window_width: int = 2500
    window_height: int = 1200
    magnification: float = 1.0
    goalpost_offset: float = 5.0
    goalpost_height: float = 5.0
    skip_last_frame: bool = True
    ball_color: str = "white"
    frame_interval_ms: int = 200
    ball_display_radius: float = 12.0
    head_radius: float = 14.0
    bone_width: float = 4.0
    keeper_color: str = "#4dabf7"
    dimmed_color: str = "#5a6470"
    goalpost_color: str = "#c4c9cf"
    background: str = "#10131a"

    def __post_init__(self) -> None:
        if self.window_width <= 0 or self.window_height <= 0:
            raise ValidationError("render window dimensions must be positive")
        if not self.magnification > 0:
            raise ValidationError(f"magnification must be > 0, got {self.magnification!r}")
        if self.goalpost_offset < 0 or self.goalpost_height <= 0:
            raise ValidationError("goalpost offset must be >= 0 and height > 0")
        if self.frame_interval_ms <= 0:
            raise ValidationError("frame_interval_ms must be positive")


@dataclass(frozen=True)
class Goalpost:
    """Goal mouth band in render coordinates."""

    left: float
    right: float
    top: float
    bottom: float

    def __post_init__(self) -> None:
        if not (self.left < self.right and self.top < self.bottom):
            raise ValidationError("goalpost must have left < right and top < bottom")


@dataclass(frozen=True)
class RenderResult:
    frame_indices: tuple[int, ...]
    frame_documents: tuple[str, ...]
    animation: bytes


def to_render_space(p: Point2, cfg: RenderConfig) -> tuple[float, float]:
    """Map a normalized point into render pixels. Both spaces grow y downward,
    so world-up stays screen-up without a sign change."""
    return (
        p.x * cfg.magnification * cfg.window_width / 2.0 + cfg.window_width / 2.0,
        p.y * cfg.magnification * cfg.window_height / 2.0 + cfg.window_height / 2.0,
    )


def from_render_space(x: float, y: float, cfg: RenderConfig) -> Point2:
    """Inverse of to_render_space."""
    return Point2(
        (x - cfg.window_width / 2.0) / (cfg.magnification * cfg.window_width / 2.0),
        (y - cfg.window_height / 2.0) / (cfg.magnification * cfg.window_height / 2.0),
    )


def layout_goalpost(first_frame: Keyframe, cfg: RenderConfig) -> Goalpost:
    """Size the goal mouth from the first frame: width is the render-space
    shoulder spread plus twice the offset, centered on the shoulder midpoint;
    the band of goalpost_height ends at the head's render y, crossbar above."""
    s = first_frame.skeleton
    lx, ly = to_render_space(s[JointId.LEFT_SHOULDER], cfg)
    rx, ry = to_render_space(s[JointId.RIGHT_SHOULDER], cfg)
    hx, hy = to_render_space(s[JointId.HEAD], cfg)
    width = abs(lx - rx) + 2.0 * cfg.goalpost_offset
    center = (lx + rx) / 2.0
    return Goalpost(
        left=center - width / 2.0,
        right=center + width / 2.0,
        top=hy - cfg.goalpost_height,
        bottom=hy,
    )


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _skeleton_svg(frame: Keyframe, cfg: RenderConfig, color: str) -> str:
    s = frame.skeleton
    pts = {jid: to_render_space(s[jid], cfg) for jid in JointId}
    ls, rs = pts[JointId.LEFT_SHOULDER], pts[JointId.RIGHT_SHOULDER]
    neck = ((ls[0] + rs[0]) / 2.0, (ls[1] + rs[1]) / 2.0)
    head = pts[JointId.HEAD]
    lines = [
        f'<g stroke="{color}" stroke-width="{_fmt(cfg.bone_width)}" '
        f'stroke-linecap="round" fill="none">'
    ]
    lines.append(
        f'<line x1="{_fmt(head[0])}" y1="{_fmt(head[1])}" '
        f'x2="{_fmt(neck[0])}" y2="{_fmt(neck[1])}"/>'
    )
    for a, b in _BONES:
        xa, ya = pts[a]
        xb, yb = pts[b]
        lines.append(
            f'<line x1="{_fmt(xa)}" y1="{_fmt(ya)}" x2="{_fmt(xb)}" y2="{_fmt(yb)}"/>'
        )
    lines.append(
        f'<circle cx="{_fmt(head[0])}" cy="{_fmt(head[1])}" r="{_fmt(cfg.head_radius)}"/>'
    )
    lines.append("</g>")
    return "\n".join(lines)


def _ball_radius(frame: Keyframe, cfg: RenderConfig) -> float:
    if frame.ball_radius is not None:
        return frame.ball_radius * cfg.magnification * cfg.window_width / 2.0
    return cfg.ball_display_radius


def render_frame_svg(
    original: Keyframe,
    corrected: Keyframe | None,
    goalpost: Goalpost,
    cfg: RenderConfig,
) -> str:
    """One frame as a standalone vector document. Draw order is goalpost,
    keeper, ball; the corrected keeper is drawn last of the two skeletons."""
    w, h = cfg.window_width, cfg.window_height
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="{cfg.background}"/>',
        f'<rect x="{_fmt(goalpost.left)}" y="{_fmt(goalpost.top)}" '
        f'width="{_fmt(goalpost.right - goalpost.left)}" '
        f'height="{_fmt(goalpost.bottom - goalpost.top)}" '
        f'fill="none" stroke="{cfg.goalpost_color}" stroke-width="3"/>',
    ]
    if corrected is None:
        parts.append(_skeleton_svg(original, cfg, cfg.keeper_color))
    else:
        parts.append(_skeleton_svg(original, cfg, cfg.dimmed_color))
        parts.append(_skeleton_svg(corrected, cfg, cfg.keeper_color))
    ball_frame = corrected if corrected is not None else original
    bx, by = to_render_space(ball_frame.ball, cfg)
    parts.append(
        f'<circle cx="{_fmt(bx)}" cy="{_fmt(by)}" '
        f'r="{_fmt(_ball_radius(ball_frame, cfg))}" fill="{cfg.ball_color}"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _draw_skeleton(draw: ImageDraw.ImageDraw, frame: Keyframe, cfg: RenderConfig, color: str) -> None:
    s = frame.skeleton
    pts = {jid: to_render_space(s[jid], cfg) for jid in JointId}
    ls, rs = pts[JointId.LEFT_SHOULDER], pts[JointId.RIGHT_SHOULDER]
    neck = ((ls[0] + rs[0]) / 2.0, (ls[1] + rs[1]) / 2.0)
    head = pts[JointId.HEAD]
    width = max(1, round(cfg.bone_width))
    draw.line([head, neck], fill=color, width=width)
    for a, b in _BONES:
        draw.line([pts[a], pts[b]], fill=color, width=width)
    r = cfg.head_radius
    draw.ellipse(
        [head[0] - r, head[1] - r, head[0] + r, head[1] + r],
        outline=color,
        width=width,
    )


def _render_frame_raster(
    original: Keyframe,
    corrected: Keyframe | None,
    goalpost: Goalpost,
    cfg: RenderConfig,
) -> Image.Image:
    img = Image.new("RGB", (cfg.window_width, cfg.window_height), cfg.background)
    draw = ImageDraw.Draw(img)
    draw.rectangle(
        [goalpost.left, goalpost.top, goalpost.right, goalpost.bottom],
        outline=cfg.goalpost_color,
        width=3,
    )
    if corrected is None:
        _draw_skeleton(draw, original, cfg, cfg.keeper_color)
    else:
        _draw_skeleton(draw, original, cfg, cfg.dimmed_color)
        _draw_skeleton(draw, corrected, cfg, cfg.keeper_color)
    ball_frame = corrected if corrected is not None else original
    bx, by = to_render_space(ball_frame.ball, cfg)
    r = _ball_radius(ball_frame, cfg)
    draw.ellipse([bx - r, by - r, bx + r, by + r], fill=cfg.ball_color)
    return img


def render_sequence(
    original: Sequence,
    corrected: Sequence | None = None,
    cfg: RenderConfig = RenderConfig(),
) -> RenderResult:
    """Render every kept frame as a vector document and assemble the GIF."""
    if corrected is not None and len(corrected.frames) != len(original.frames):
        raise ValidationError(
            "original and corrected sequences must have the same frame count, "
            f"got {len(original.frames)} and {len(corrected.frames)}"
        )
    goalpost = layout_goalpost(original.frames[0], cfg)
    kept = list(range(len(original.frames)))
    if cfg.skip_last_frame:
        kept = kept[:-1]

    documents: list[str] = []
    rasters: list[Image.Image] = []
    for idx in kept:
        orig_frame = original.frames[idx]
        corr_frame = corrected.frames[idx] if corrected is not None else None
        documents.append(render_frame_svg(orig_frame, corr_frame, goalpost, cfg))
        rasters.append(_render_frame_raster(orig_frame, corr_frame, goalpost, cfg))

    buf = io.BytesIO()
    rasters[0].save(
        buf,
        format="GIF",
        save_all=True,
        append_images=rasters[1:],
        duration=cfg.frame_interval_ms,
        loop=0,
    )
    return RenderResult(
        frame_indices=tuple(kept),
        frame_documents=tuple(documents),
        animation=buf.getvalue(),
    )


def write_render_outputs(result: RenderResult, out_dir: Path | str) -> list[Path]:
    """Write frame_NN.svg files and animation.gif; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []
    for idx, doc in zip(result.frame_indices, result.frame_documents):
        p = out_dir / f"frame_{idx:02d}.svg"
        p.write_text(doc)
        paths.append(p)
    gif = out_dir / "animation.gif"
    gif.write_bytes(result.animation)
    paths.append(gif)
    return paths
