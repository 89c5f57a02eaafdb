"""Scene model, contour discretization and material/wavenumber helpers.

Contours are closed, counter-clockwise, and discretized into flat straight
segments (pulse-basis support).  Outward unit normal of a CCW contour is the
tangent rotated by -90 degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import epsilon_0, mu_0
from shapely.geometry import Polygon as ShapelyPolygon

from .errors import GeometryError, SceneValidationError

# Media with sigma/(omega eps) above this are skin-depth dominated; their
# interior wavelength is not meaningful as a surface mesh scale.
LOSS_TANGENT_MESH_CUTOFF = 10.0


# ---------------------------------------------------------------------------
# Media
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Medium:
    """Homogeneous isotropic medium: eps_r, mu_r (dimensionless), sigma (S/m)."""

    eps_r: float
    mu_r: float = 1.0
    sigma: float = 0.0

    def __post_init__(self):
        if self.eps_r <= 0 or self.mu_r <= 0:
            raise SceneValidationError(
                f"eps_r and mu_r must be positive, got {self.eps_r}, {self.mu_r}"
            )
        if self.sigma < 0:
            raise SceneValidationError(f"sigma must be >= 0, got {self.sigma}")

    def loss_tangent(self, freq):
        omega = 2.0 * math.pi * freq
        return self.sigma / (omega * epsilon_0 * self.eps_r)


VACUUM = Medium(1.0, 1.0, 0.0)


def wavenumber(medium: Medium, freq: float) -> complex:
    """k = omega sqrt(mu eps_c), eps_c = eps - j sigma/omega (e^{+jwt}).

    The principal square root lands in Re(k) >= 0, Im(k) <= 0.
    """
    if freq <= 0:
        raise ValueError("frequency must be positive")
    omega = 2.0 * math.pi * freq
    eps_c = epsilon_0 * medium.eps_r - 1j * medium.sigma / omega
    mu = mu_0 * medium.mu_r
    return complex(omega * np.sqrt(mu * eps_c + 0j))


def medium_wavelength(medium: Medium, freq: float) -> float:
    """2 pi / |Re k|: the propagating wavelength inside the medium."""
    k = wavenumber(medium, freq)
    return 2.0 * math.pi / abs(k.real)


# ---------------------------------------------------------------------------
# Boundary shapes
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Circle:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise GeometryError(f"circle radius must be positive, got {self.radius}")

    @property
    def perimeter(self):
        return 2.0 * math.pi * self.radius

    def vertices(self, n):
        """n chord points, CCW, starting at angle 0."""
        th = 2.0 * math.pi * np.arange(n) / n
        cx, cy = self.center
        return np.column_stack([cx + self.radius * np.cos(th), cy + self.radius * np.sin(th)])

    def to_shapely(self, n=256):
        return ShapelyPolygon(self.vertices(n))

    def enclosing_circle(self):
        return self


@dataclass(frozen=True)
class PolygonBoundary:
    """Closed polygon, vertices CCW (reversed automatically if given CW)."""

    vertices_xy: tuple

    def __post_init__(self):
        v = np.asarray(self.vertices_xy, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise GeometryError("polygon needs at least 3 (x, y) vertices")
        poly = ShapelyPolygon(v)
        if not poly.is_valid or poly.area <= 0:
            raise GeometryError("polygon is self-intersecting or degenerate")
        if _signed_area(v) < 0:
            v = v[::-1]
        object.__setattr__(self, "vertices_xy", tuple(map(tuple, v)))

    @property
    def perimeter(self):
        v = np.asarray(self.vertices_xy)
        d = np.diff(np.vstack([v, v[:1]]), axis=0)
        return float(np.sum(np.hypot(d[:, 0], d[:, 1])))

    def to_shapely(self, n=None):
        return ShapelyPolygon(self.vertices_xy)

    def enclosing_circle(self):
        v = np.asarray(self.vertices_xy)
        c = v.mean(axis=0)
        r = float(np.max(np.hypot(v[:, 0] - c[0], v[:, 1] - c[1])))
        return Circle((float(c[0]), float(c[1])), r)


@dataclass(frozen=True)
class Sector:
    """Circular sector (pie slice): center, radius, CCW angular span [rad]."""

    center: tuple[float, float]
    radius: float
    start_angle: float
    end_angle: float

    def __post_init__(self):
        if self.radius <= 0:
            raise GeometryError("sector radius must be positive")
        span = self.end_angle - self.start_angle
        if not (0 < span < 2.0 * math.pi):
            raise GeometryError("sector angular span must lie in (0, 2 pi)")

    @property
    def span(self):
        return self.end_angle - self.start_angle

    @property
    def perimeter(self):
        return 2.0 * self.radius + self.radius * self.span

    def corner_points(self, n_arc):
        """Closed CCW vertex loop: apex, arc start, chords, arc end."""
        cx, cy = self.center
        th = self.start_angle + self.span * np.arange(n_arc + 1) / n_arc
        arc = np.column_stack([cx + self.radius * np.cos(th), cy + self.radius * np.sin(th)])
        return np.vstack([[cx, cy], arc])

    def to_shapely(self, n=128):
        return ShapelyPolygon(self.corner_points(n))

    def enclosing_circle(self):
        pts = self.corner_points(64)
        c = pts.mean(axis=0)
        r = float(np.max(np.hypot(pts[:, 0] - c[0], pts[:, 1] - c[1])))
        return Circle((float(c[0]), float(c[1])), r)


BoundarySpec = Circle | PolygonBoundary | Sector


def _signed_area(v):
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


# ---------------------------------------------------------------------------
# Discretization
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class DiscretizedBoundary:
    """Flat-segment discretization of one (or a union of) closed contour(s).

    Attributes
    ----------
    starts, ends : np.ndarray, shape (N, 2)
        Segment endpoints, CCW order.
    midpoints : np.ndarray, shape (N, 2)
    lengths : np.ndarray, shape (N,)
    normals : np.ndarray, shape (N, 2)
        Unit outward normals.
    boundary_id : str
    parts : tuple of (str, int, int)
        (id, start index, stop index) blocks when this is a union boundary.
    """

    starts: np.ndarray
    ends: np.ndarray
    boundary_id: str = ""
    parts: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "starts", np.asarray(self.starts, dtype=float))
        object.__setattr__(self, "ends", np.asarray(self.ends, dtype=float))
        d = self.ends - self.starts
        lengths = np.hypot(d[:, 0], d[:, 1])
        if np.any(lengths <= 0):
            raise GeometryError("zero-length segment in discretization")
        tangents = d / lengths[:, None]
        normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])
        object.__setattr__(self, "midpoints", 0.5 * (self.starts + self.ends))
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "tangents", tangents)
        object.__setattr__(self, "normals", normals)
        if not self.parts:
            object.__setattr__(self, "parts", ((self.boundary_id, 0, len(lengths)),))

    @property
    def segment_count(self):
        return len(self.lengths)

    @property
    def perimeter(self):
        return float(np.sum(self.lengths))


def discretize(boundary: BoundarySpec, target_h: float, boundary_id: str = "") -> DiscretizedBoundary:
    """Split a contour into near-uniform flat segments of length <= target_h.

    Circles become ceil(perimeter/h) equal chords; polygon/sector edges are
    divided independently so no segment crosses a vertex.  Deterministic for
    identical inputs.
    """
    if target_h <= 0:
        raise GeometryError("target_h must be positive")
    if target_h >= boundary.perimeter / 8.0:
        raise GeometryError(
            f"target_h {target_h} too coarse for perimeter {boundary.perimeter}"
        )
    if isinstance(boundary, Circle):
        n = math.ceil(boundary.perimeter / target_h)
        pts = boundary.vertices(n)
        starts = pts
        ends = np.roll(pts, -1, axis=0)
        return DiscretizedBoundary(starts, ends, boundary_id=boundary_id)
    if isinstance(boundary, Sector):
        n_arc = math.ceil(boundary.radius * boundary.span / target_h)
        loop = boundary.corner_points(n_arc)
        # apex -> arc start and arc end -> apex are straight edges; the arc
        # chords are already at target resolution
        return _discretize_loop(loop, target_h, boundary_id, presplit=slice(1, len(loop) - 1))
    if isinstance(boundary, PolygonBoundary):
        loop = np.asarray(boundary.vertices_xy)
        return _discretize_loop(loop, target_h, boundary_id)
    raise GeometryError(f"unsupported boundary type {type(boundary)!r}")


def _discretize_loop(loop, target_h, boundary_id, presplit=None):
    """Divide each edge of a closed CCW vertex loop into <= target_h pieces.

    ``presplit`` marks an index range whose edges are kept as single segments
    (already at resolution, e.g. arc chords).
    """
    starts, ends = [], []
    n_v = len(loop)
    keep = set(range(*presplit.indices(n_v))) if presplit is not None else set()
    for i in range(n_v):
        a, b = loop[i], loop[(i + 1) % n_v]
        edge = np.hypot(*(b - a))
        if edge == 0:
            continue
        n_seg = 1 if i in keep else math.ceil(edge / target_h)
        t = np.arange(n_seg + 1) / n_seg
        pts = a[None, :] + t[:, None] * (b - a)[None, :]
        starts.append(pts[:-1])
        ends.append(pts[1:])
    return DiscretizedBoundary(np.vstack(starts), np.vstack(ends), boundary_id=boundary_id)


def concatenate_boundaries(dbs, boundary_id="union"):
    """Union pseudo-boundary: stacked segments with per-part index blocks."""
    parts = []
    offset = 0
    for db in dbs:
        for (pid, i0, i1) in db.parts:
            parts.append((pid, offset + i0, offset + i1))
        offset += db.segment_count
    return DiscretizedBoundary(
        np.vstack([db.starts for db in dbs]),
        np.vstack([db.ends for db in dbs]),
        boundary_id=boundary_id,
        parts=tuple(parts),
    )


# ---------------------------------------------------------------------------
# Scene
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Layer:
    """One nesting level: its boundary and the medium filling its interior
    (the region between this boundary and the next one inward)."""

    boundary: BoundarySpec
    medium: Medium = VACUUM
    pec: bool = False


@dataclass(frozen=True)
class ObjectGroup:
    """An independent nested chain of layers, innermost first."""

    layers: tuple

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise SceneValidationError("object group needs at least one layer")
        for lay in self.layers[1:]:
            if lay.pec:
                raise SceneValidationError("only the innermost layer may be PEC")


@dataclass(frozen=True)
class Scene:
    """Nested layered scatterers in a homogeneous background.

    ``groups`` are pairwise-disjoint objects sharing the same enclosing
    ``shared_layers`` chain (possibly empty).  Boundary order is innermost
    (depth 1) to outermost (depth n).  ``extension_distance`` > 0 adds a
    fictitious boundary offset outward from the outermost boundary, in the
    background medium.
    """

    background: Medium
    groups: tuple
    shared_layers: tuple = ()
    extension_distance: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        object.__setattr__(self, "shared_layers", tuple(self.shared_layers))
        if not self.groups:
            raise SceneValidationError("scene needs at least one object group")
        if self.extension_distance < 0:
            raise SceneValidationError("extension distance must be >= 0")
        if len(self.groups) > 1 and not self.shared_layers:
            raise SceneValidationError(
                "multiple object groups must be enclosed by a shared layer"
            )
        self.validate_nesting()

    @classmethod
    def single(cls, background, layers, extension_distance=0.0):
        """Scene with one object whose chain is ``layers`` (innermost first)."""
        return cls(background, (ObjectGroup(tuple(layers)),), (), extension_distance)

    @property
    def layer_chain(self):
        """Flat chain for single-group scenes (innermost -> outermost)."""
        if len(self.groups) != 1:
            raise SceneValidationError("layer_chain is defined for single-group scenes")
        return self.groups[0].layers + self.shared_layers

    @property
    def outermost_boundary(self):
        if self.shared_layers:
            return self.shared_layers[-1].boundary
        return self.groups[0].layers[-1].boundary

    @property
    def innermost_is_pec(self):
        return any(g.layers[0].pec for g in self.groups)

    @property
    def is_circular_concentric(self):
        """True when every boundary is a circle and all share one center."""
        if len(self.groups) != 1:
            return False
        chain = self.layer_chain
        circles = [lay.boundary for lay in chain]
        if not all(isinstance(c, Circle) for c in circles):
            return False
        c0 = circles[0].center
        return all(
            math.hypot(c.center[0] - c0[0], c.center[1] - c0[1]) < 1e-12 for c in circles
        )

    def validate_nesting(self):
        polys = {}

        def poly_of(b):
            if b not in polys:
                polys[b] = b.to_shapely()
            return polys[b]

        for g_idx, g in enumerate(self.groups):
            for inner, outer in zip(g.layers, g.layers[1:]):
                pi, po = poly_of(inner.boundary), poly_of(outer.boundary)
                if not (po.contains(pi) and po.exterior.distance(pi) > 0):
                    raise SceneValidationError(
                        f"group {g_idx}: boundary nesting violated (inner not strictly inside outer)"
                    )
        for i, g in enumerate(self.groups):
            for h in self.groups[i + 1:]:
                if poly_of(g.layers[-1].boundary).distance(poly_of(h.layers[-1].boundary)) <= 0:
                    raise SceneValidationError("object groups must be pairwise disjoint")
        prev = [g.layers[-1].boundary for g in self.groups]
        for s_idx, lay in enumerate(self.shared_layers):
            po = poly_of(lay.boundary)
            for b in prev:
                pi = poly_of(b)
                if not (po.contains(pi) and po.exterior.distance(pi) > 0):
                    raise SceneValidationError(
                        f"shared layer {s_idx}: enclosed boundary not strictly inside"
                    )
            prev = [lay.boundary]

    def extension_boundary(self):
        """Fictitious enclosing circle at distance d from the outermost boundary."""
        if self.extension_distance <= 0:
            return None
        outer = self.outermost_boundary
        circ = outer.enclosing_circle()
        return Circle(circ.center, circ.radius + self.extension_distance)


# ---------------------------------------------------------------------------
# Scene meshing
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class SceneMesh:
    """Discretized boundaries of a scene.

    ``group_meshes[g][i]`` is the depth-(i+1) boundary of group g;
    ``shared_meshes`` follow (innermost first); ``extension_mesh`` is the
    fictitious boundary or None.
    """

    group_meshes: tuple
    shared_meshes: tuple
    extension_mesh: DiscretizedBoundary | None = None

    @property
    def boundaries(self):
        """Flat depth-ordered list; depth-1..k group boundaries are unioned."""
        out = []
        max_depth = max(len(gm) for gm in self.group_meshes)
        for d in range(max_depth):
            at_depth = [gm[d] for gm in self.group_meshes if len(gm) > d]
            out.append(at_depth[0] if len(at_depth) == 1 else concatenate_boundaries(at_depth))
        out.extend(self.shared_meshes)
        if self.extension_mesh is not None:
            out.append(self.extension_mesh)
        return out

    def __iter__(self):
        return iter(self.boundaries)

    def __len__(self):
        return len(self.boundaries)

    def __getitem__(self, i):
        return self.boundaries[i]

    @property
    def total_segments(self):
        return sum(db.segment_count for db in self.boundaries)


def _mesh_h(media, freq, ppw):
    """Smallest meaningful wavelength/ppw among adjacent media.

    Skin-depth dominated media (loss tangent above the cutoff) are skipped;
    their interior wavelength is microns at GHz and does not set a contour
    resolution scale.
    """
    usable = [m for m in media if m is not None and m.loss_tangent(freq) <= LOSS_TANGENT_MESH_CUTOFF]
    if not usable:
        usable = [m for m in media if m is not None]
    return min(medium_wavelength(m, freq) for m in usable) / ppw


def build_scene_mesh(scene: Scene, freq: float, points_per_wavelength: int) -> SceneMesh:
    """Mesh every boundary with h = min adjacent wavelength / ppw.

    The medium inside a PEC boundary does not contribute; the fictitious
    extension boundary uses the background wavelength.
    """
    if points_per_wavelength < 6:
        raise SceneValidationError("points_per_wavelength must be >= 6")

    def outside_medium(g_idx, depth):
        g = scene.groups[g_idx]
        if depth + 1 < len(g.layers):
            return g.layers[depth + 1].medium
        if scene.shared_layers:
            return scene.shared_layers[0].medium
        return scene.background

    group_meshes = []
    for g_idx, g in enumerate(scene.groups):
        meshes = []
        for depth, lay in enumerate(g.layers):
            inside = None if lay.pec else lay.medium
            h = _mesh_h([inside, outside_medium(g_idx, depth)], freq, points_per_wavelength)
            meshes.append(discretize(lay.boundary, h, boundary_id=f"g{g_idx}.gamma{depth + 1}"))
        group_meshes.append(tuple(meshes))

    shared_meshes = []
    n_group_depths = max(len(g.layers) for g in scene.groups)
    for s_idx, lay in enumerate(scene.shared_layers):
        if s_idx + 1 < len(scene.shared_layers):
            outside = scene.shared_layers[s_idx + 1].medium
        else:
            outside = scene.background
        h = _mesh_h([lay.medium, outside], freq, points_per_wavelength)
        depth = n_group_depths + s_idx + 1
        shared_meshes.append(discretize(lay.boundary, h, boundary_id=f"gamma{depth}"))

    ext_mesh = None
    ext = scene.extension_boundary()
    if ext is not None:
        h = _mesh_h([scene.background], freq, points_per_wavelength)
        ext_mesh = discretize(ext, h, boundary_id="gamma_ext")

    return SceneMesh(tuple(group_meshes), tuple(shared_meshes), ext_mesh)
