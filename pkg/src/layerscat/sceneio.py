"""Scene file parsing, RCS CSV serialization, and the diagnostics report file.

Scene format (line-oriented, ``#`` starts a comment)::

    background: eps_r mu_r sigma
    layer 1: circle(cx, cy, r) eps_r mu_r sigma [pec]
    layer 2: ...
    extension: d

Multi-scatterer scenes wrap per-object chains in ``group:`` ... ``end`` blocks
(all groups first); top-level ``layer i`` lines after the groups are the
shared enclosing layers and their indices continue the deepest group chain.
Shapes: ``circle(cx, cy, r)``, ``polygon(x1, y1, x2, y2, ...)``,
``sector(cx, cy, r, start_deg, end_deg)``.  Lengths in meters, angles in
degrees, sigma in S/m.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import SceneParseError, SceneValidationError
from .exterior import RcsCurve
from .geometry import (
    Circle,
    Layer,
    Medium,
    ObjectGroup,
    PolygonBoundary,
    Scene,
    Sector,
)

_LAYER_RE = re.compile(r"^layer\s+(\d+)\s*:\s*(.*)$")
_SHAPE_RE = re.compile(r"^(circle|polygon|sector)\s*\(([^)]*)\)\s*(.*)$")


@dataclass(frozen=True)
class RunConfig:
    """Everything one CLI invocation needs."""

    scene_path: str
    freq: float
    ppw: int
    formulation: str
    out_path: str
    angles: int = 360
    diagnostics_path: str | None = None
    extension_override: float | None = None

    def __post_init__(self):
        if self.formulation not in ("dsao", "pmchwt", "mie"):
            raise SceneValidationError(f"unknown formulation {self.formulation!r}")
        if self.freq <= 0:
            raise SceneValidationError("frequency must be positive")
        if self.angles < 1:
            raise SceneValidationError("need at least one observation angle")


# ---------------------------------------------------------------------------
# Scene parsing
# ---------------------------------------------------------------------------
def _parse_floats(text, line_no, what, expect=None):
    toks = [t for t in re.split(r"[\s,]+", text.strip()) if t]
    try:
        vals = [float(t) for t in toks]
    except ValueError:
        raise SceneParseError(f"bad number in {what}: {text!r}", line_no) from None
    if expect is not None and len(vals) != expect:
        raise SceneParseError(
            f"{what} needs {expect} numbers, got {len(vals)}", line_no
        )
    return vals


def _parse_shape(text, line_no):
    m = _SHAPE_RE.match(text)
    if not m:
        raise SceneParseError(f"expected shape(...), got {text!r}", line_no)
    name, args, rest = m.groups()
    vals = _parse_floats(args, line_no, f"{name} arguments")
    if name == "circle":
        if len(vals) != 3:
            raise SceneParseError("circle needs (cx, cy, r)", line_no)
        return Circle((vals[0], vals[1]), vals[2]), rest
    if name == "sector":
        if len(vals) != 5:
            raise SceneParseError(
                "sector needs (cx, cy, r, start_deg, end_deg)", line_no
            )
        return (
            Sector(
                (vals[0], vals[1]),
                vals[2],
                math.radians(vals[3]),
                math.radians(vals[4]),
            ),
            rest,
        )
    if len(vals) < 6 or len(vals) % 2:
        raise SceneParseError("polygon needs >= 3 (x, y) pairs", line_no)
    return PolygonBoundary(tuple(zip(vals[0::2], vals[1::2]))), rest


def _parse_layer(body, line_no):
    shape, rest = _parse_shape(body, line_no)
    toks = rest.split()
    pec = False
    if toks and toks[-1].lower() == "pec":
        pec = True
        toks = toks[:-1]
    vals = _parse_floats(" ".join(toks), line_no, "layer medium", expect=3)
    return Layer(shape, Medium(*vals), pec=pec)


def _check_indices(indices, start, line_no_hint, what):
    want = list(range(start, start + len(indices)))
    if indices != want:
        raise SceneParseError(
            f"{what} indices must run {want[0]}..{want[-1]}, got {indices}",
            line_no_hint,
        )


def parse_scene_text(text: str) -> Scene:
    background = None
    finished_groups = []
    current_group = None  # list of (idx, layer) while inside group: ... end
    top_layers = []       # (idx, layer, line_no) outside any group
    extension = 0.0
    saw_extension = False

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "group:":
            if current_group is not None:
                raise SceneParseError("nested group blocks are not allowed", line_no)
            if finished_groups and top_layers:
                raise SceneParseError(
                    "all group blocks must come before shared layers", line_no
                )
            current_group = []
            continue
        if line == "end":
            if current_group is None:
                raise SceneParseError("'end' without an open group", line_no)
            if not current_group:
                raise SceneParseError("empty group block", line_no)
            idx = [i for i, _ in current_group]
            _check_indices(idx, 1, line_no, "group layer")
            finished_groups.append(tuple(lay for _, lay in current_group))
            current_group = None
            continue
        if line.startswith("background:"):
            if background is not None:
                raise SceneParseError("duplicate background line", line_no)
            vals = _parse_floats(line[len("background:"):], line_no, "background", 3)
            background = Medium(*vals)
            continue
        if line.startswith("extension:"):
            if saw_extension:
                raise SceneParseError("duplicate extension line", line_no)
            (extension,) = _parse_floats(line[len("extension:"):], line_no, "extension", 1)
            if extension < 0:
                raise SceneParseError("extension distance must be >= 0", line_no)
            saw_extension = True
            continue
        m = _LAYER_RE.match(line)
        if m:
            idx = int(m.group(1))
            layer = _parse_layer(m.group(2), line_no)
            if current_group is not None:
                current_group.append((idx, layer))
            else:
                top_layers.append((idx, layer, line_no))
            continue
        raise SceneParseError(f"unrecognized line: {line!r}", line_no)

    if current_group is not None:
        raise SceneParseError("unterminated group block (missing 'end')", None)
    if background is None:
        raise SceneParseError("missing background line", None)

    if finished_groups:
        groups = tuple(ObjectGroup(g) for g in finished_groups)
        depth0 = max(len(g) for g in finished_groups)
        idx = [i for i, _, _ in top_layers]
        first_ln = top_layers[0][2] if top_layers else None
        _check_indices(idx, depth0 + 1, first_ln, "shared layer")
        shared = tuple(lay for _, lay, _ in top_layers)
    else:
        if not top_layers:
            raise SceneParseError("scene has no layers", None)
        idx = [i for i, _, _ in top_layers]
        _check_indices(idx, 1, top_layers[0][2], "layer")
        groups = (ObjectGroup(tuple(lay for _, lay, _ in top_layers)),)
        shared = ()

    return Scene(background, groups, shared, extension_distance=extension)


def parse_scene(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_scene_text(text)
    except SceneParseError as exc:
        raise SceneParseError(f"{path}: {exc.bare_message}", exc.line_no) from None


# ---------------------------------------------------------------------------
# RCS CSV
# ---------------------------------------------------------------------------
def _sci9(v: float) -> str:
    """Scientific notation, 9-digit mantissa fraction, minimal exponent."""
    if v == 0.0:
        return "0.000000000e0"
    if math.isinf(v):
        return "-inf" if v < 0 else "inf"
    e = int(math.floor(math.log10(abs(v))))
    mant = f"{v / 10.0 ** e:.9f}"
    if abs(float(mant)) >= 10.0:  # rounding carried the mantissa over
        e += 1
        mant = f"{v / 10.0 ** e:.9f}"
    return f"{mant}e{e}"


def write_rcs_csv(curve: RcsCurve, path) -> None:
    """Header ``phi_deg,sigma_m,sigma_db``; one row per angle; degrees with 6
    decimals; LF endings; byte-stable for identical curves."""
    lines = ["phi_deg,sigma_m,sigma_db"]
    for ang, sig in zip(curve.angles, curve.sigma):
        db = 10.0 * math.log10(sig) if sig > 0 else float("-inf")
        lines.append(f"{math.degrees(ang):.6f},{_sci9(sig)},{_sci9(db)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_rcs_csv(path) -> RcsCurve:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "phi_deg,sigma_m,sigma_db":
            raise SceneParseError(f"unexpected CSV header {header!r}", 1)
        angles, sigma = [], []
        for line_no, raw in enumerate(fh, start=2):
            raw = raw.strip()
            if not raw:
                continue
            parts = raw.split(",")
            if len(parts) != 3:
                raise SceneParseError("CSV row needs 3 columns", line_no)
            try:
                angles.append(math.radians(float(parts[0])))
                sigma.append(float(parts[1]))
            except ValueError:
                raise SceneParseError(f"bad CSV number in {raw!r}", line_no) from None
    return RcsCurve(np.asarray(angles), np.asarray(sigma))


def write_diagnostics(report, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report.render())
