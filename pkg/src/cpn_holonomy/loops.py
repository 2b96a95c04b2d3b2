"""Closed control loops: representation, algebra and oriented enclosed areas.

A LoopPath is a closed polyline of chart points, optionally tagged with the
two-coordinate plane it lives in plus the frozen values of all other
coordinates. Loop vertex angles are stored as given (phi vertices must stay
inside [0, 2pi) so linear interpolation between vertices never wraps).

Orientation and area conventions, fixed project-wide and validated against
the dynamical oracles:

- families C1/C2 (planes (theta_b, phi_*)):  area = -closed-line-integral of
  sin^2(theta_b) d phi along the traversal, i.e. positive for clockwise
  traversal in the (theta, phi) plane;
- families C3/C4 (planes (theta_b, theta_c)): area = +closed-line-integral of
  sin(theta_first) d theta_second, i.e. positive for counterclockwise
  traversal.

With these signs every family's loop holonomy equals its single-generator
closed form with the signed area as coefficient, for either traversal
direction. Per-edge integrals are evaluated in closed form (the integrands
are trigonometric in a linearly interpolated angle), so areas carry no
quadrature error.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .chart import ControlPoint

CLOSURE_TOL = 1e-14
FAMILIES = ("C1", "C2", "C3", "C4")


@dataclass(frozen=True)
class PlaneTag:
    """Names the two varying coordinates ('theta:1', 'phi:2') and frozen non-zero values."""

    coords: tuple[str, str]
    frozen: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for c in self.coords:
            _split_coord(c)
        for c in self.frozen:
            _split_coord(c)

    def axes(self) -> tuple[tuple[str, int], tuple[str, int]]:
        return _split_coord(self.coords[0]), _split_coord(self.coords[1])


def _split_coord(name: str) -> tuple[str, int]:
    kind, _, idx = name.partition(":")
    if kind not in ("theta", "phi") or not idx.isdigit() or int(idx) < 1:
        raise ValueError(f"bad coordinate name {name!r}; expected 'theta:<k>' or 'phi:<k>'")
    return kind, int(idx)


@dataclass(frozen=True)
class LoopPath:
    """An oriented closed polyline in the chart.

    thetas/phis have shape (m, n) with m >= 3 vertices, first == last.
    """

    n: int
    thetas: np.ndarray
    phis: np.ndarray
    plane: PlaneTag | None = None
    family: str | None = None
    orientation: int = 1

    def __post_init__(self):
        th = np.asarray(self.thetas, dtype=float)
        ph = np.asarray(self.phis, dtype=float)
        if th.ndim != 2 or th.shape != ph.shape or th.shape[1] != self.n or th.shape[0] < 3:
            raise ValueError("need matching (m, n) vertex arrays with m >= 3")
        if np.max(np.abs(th[0] - th[-1])) > CLOSURE_TOL or np.max(np.abs(ph[0] - ph[-1])) > CLOSURE_TOL:
            raise ValueError("loop is not closed: first and last vertices differ")
        if np.any(th < -CLOSURE_TOL) or np.any(th > np.pi / 2 + CLOSURE_TOL):
            raise ValueError("theta vertices must lie in [0, pi/2]")
        if np.any(ph < 0) or np.any(ph >= 2 * np.pi):
            raise ValueError("phi vertices must lie in [0, 2pi)")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        if self.family is not None and self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        th = th.copy(); ph = ph.copy()
        th.setflags(write=False); ph.setflags(write=False)
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "phis", ph)
        if self.plane is not None:
            self._check_plane()

    def _check_plane(self):
        varying = np.zeros(2 * self.n, dtype=bool)
        for kind, idx in self.plane.axes():
            varying[(0 if kind == "theta" else self.n) + idx - 1] = True
        coords = np.concatenate([self.thetas, self.phis], axis=1)
        drift = np.max(np.abs(coords - coords[0]), axis=0)
        bad = np.nonzero((drift > CLOSURE_TOL) & ~varying)[0]
        if bad.size:
            raise ValueError("plane-tagged loop varies coordinates outside its plane")

    @classmethod
    def from_points(cls, points: list[ControlPoint], plane: PlaneTag | None = None,
                    family: str | None = None, orientation: int = 1) -> "LoopPath":
        n = points[0].n
        th = np.stack([p.theta for p in points])
        ph = np.stack([p.phi for p in points])
        return cls(n, th, ph, plane, family, orientation)

    @property
    def num_vertices(self) -> int:
        return self.thetas.shape[0]

    @property
    def base_point(self) -> ControlPoint:
        return ControlPoint(self.n, self.thetas[0], self.phis[0])

    def vertices(self) -> list[ControlPoint]:
        return [ControlPoint(self.n, t, p) for t, p in zip(self.thetas, self.phis)]

    def is_degenerate(self) -> bool:
        return (np.max(np.abs(self.thetas - self.thetas[0])) <= CLOSURE_TOL
                and np.max(np.abs(self.phis - self.phis[0])) <= CLOSURE_TOL)

    # ---------- serialization ----------

    def to_json_dict(self, segments_per_edge: int = 64) -> dict:
        plane = None
        if self.plane is not None:
            plane = {"coords": list(self.plane.coords),
                     "frozen": {k: float(v) for k, v in sorted(self.plane.frozen.items())}}
        return {
            "n": self.n,
            "plane": plane,
            "family": self.family,
            "points": [[list(map(float, t)), list(map(float, p))]
                       for t, p in zip(self.thetas, self.phis)],
            "segments_per_edge": segments_per_edge,
        }

    def to_json(self, segments_per_edge: int = 64, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(segments_per_edge), sort_keys=True, indent=indent)

    @classmethod
    def from_json_dict(cls, d: dict) -> tuple["LoopPath", int]:
        pts = d["points"]
        th = np.array([v[0] for v in pts], dtype=float)
        ph = np.array([v[1] for v in pts], dtype=float)
        plane = None
        if d.get("plane"):
            plane = PlaneTag(tuple(d["plane"]["coords"]), dict(d["plane"].get("frozen", {})))
        loop = cls(int(d["n"]), th, ph, plane, d.get("family"))
        return loop, int(d.get("segments_per_edge", 64))


def concatenate(a: LoopPath, b: LoopPath) -> LoopPath:
    """Traverse a then b. Both must be closed at the same base point."""
    if a.n != b.n:
        raise ValueError("loops live on different charts")
    if (np.max(np.abs(a.thetas[0] - b.thetas[0])) > 1e-12
            or np.max(np.abs(a.phis[0] - b.phis[0])) > 1e-12):
        raise ValueError("base-point mismatch: loops must share their base point")
    same_plane = a.plane == b.plane and a.plane is not None
    return LoopPath(
        a.n,
        np.concatenate([a.thetas, b.thetas[1:]]),
        np.concatenate([a.phis, b.phis[1:]]),
        plane=a.plane if same_plane else None,
        family=a.family if (same_plane and a.family == b.family) else None,
        orientation=a.orientation,
    )


def reverse(loop: LoopPath) -> LoopPath:
    """Same loop traversed backwards; orientation marker flipped."""
    return LoopPath(loop.n, loop.thetas[::-1], loop.phis[::-1],
                    plane=loop.plane, family=loop.family, orientation=-loop.orientation)


# ---------- oriented enclosed areas ----------

def _edge_mean_sin2(t0: float, t1: float) -> float:
    """Average of sin^2 over a linearly traversed theta edge."""
    dt = t1 - t0
    if abs(dt) < 1e-12:
        return float(np.sin(t0) ** 2)
    return float(0.5 - (np.sin(2 * t1) - np.sin(2 * t0)) / (4 * dt))


def _edge_mean_sin(t0: float, t1: float) -> float:
    dt = t1 - t0
    if abs(dt) < 1e-12:
        return float(np.sin(t0))
    return float((np.cos(t0) - np.cos(t1)) / dt)


def enclosed_area(loop: LoopPath, family: str) -> float:
    """Signed enclosed area of a plane-tagged loop under the family's convention."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if loop.plane is None:
        raise ValueError("enclosed_area needs a plane-tagged loop")
    (k0, i0), (k1, i1) = loop.plane.axes()
    if family in ("C1", "C2"):
        if k0 != "theta" or k1 != "phi" or (family == "C1" and i0 != i1):
            raise ValueError(f"plane {loop.plane.coords} does not match family {family}")
        tb = loop.thetas[:, i0 - 1]
        pc = loop.phis[:, i1 - 1]
        raw = sum(_edge_mean_sin2(tb[k], tb[k + 1]) * (pc[k + 1] - pc[k])
                  for k in range(len(tb) - 1))
        return -raw  # positive for clockwise traversal in (theta, phi)
    if k0 != "theta" or k1 != "theta" or i0 == i1:
        raise ValueError(f"plane {loop.plane.coords} does not match family {family}")
    tb = loop.thetas[:, i0 - 1]
    tc = loop.thetas[:, i1 - 1]
    return sum(_edge_mean_sin(tb[k], tb[k + 1]) * (tc[k + 1] - tc[k])
               for k in range(len(tb) - 1))


# ---------- loop builders ----------

def _bulk_point(n: int, frozen: dict[str, float]) -> tuple[np.ndarray, np.ndarray]:
    th, ph = np.zeros(n), np.zeros(n)
    for name, val in frozen.items():
        kind, idx = _split_coord(name)
        (th if kind == "theta" else ph)[idx - 1] = val
    return th, ph


def loop_from_plane_vertices(n: int, plane: PlaneTag, verts: list[tuple[float, float]],
                             family: str | None = None) -> LoopPath:
    """Build a loop from 2D vertices in the tagged plane (closing vertex appended)."""
    (k0, i0), (k1, i1) = plane.axes()
    if verts[0] != verts[-1]:
        verts = verts + [verts[0]]
    th0, ph0 = _bulk_point(n, plane.frozen)
    ths, phs = [], []
    for x, y in verts:
        t, p = th0.copy(), ph0.copy()
        (t if k0 == "theta" else p)[i0 - 1] = x
        (t if k1 == "theta" else p)[i1 - 1] = y
        ths.append(t)
        phs.append(p)
    return LoopPath(n, np.stack(ths), np.stack(phs), plane=plane, family=family)


def rectangle_loop(n: int, plane: PlaneTag, extent0: float, extent1: float,
                   clockwise: bool, family: str | None = None) -> LoopPath:
    """Axis-aligned rectangle [0, extent0] x [0, extent1] in the tagged plane."""
    ccw = [(0.0, 0.0), (extent0, 0.0), (extent0, extent1), (0.0, extent1), (0.0, 0.0)]
    verts = ccw[::-1] if clockwise else ccw
    return loop_from_plane_vertices(n, plane, verts, family)


def circle_loop(n: int, plane: PlaneTag, center: tuple[float, float], radius: float,
                num_vertices: int = 256, clockwise: bool = False,
                family: str | None = None) -> LoopPath:
    """Polygonal circle in the tagged plane (num_vertices edges)."""
    t = np.linspace(0.0, 2 * np.pi, num_vertices + 1)
    if clockwise:
        t = -t
    verts = [(center[0] + radius * np.cos(a), center[1] + radius * np.sin(a)) for a in t]
    verts[-1] = verts[0]
    return loop_from_plane_vertices(n, plane, verts, family)


def l_shape_loop(n: int, plane: PlaneTag, extent0: float, extent1: float,
                 notch0: float, notch1: float, clockwise: bool,
                 family: str | None = None) -> LoopPath:
    """Rectangle with the corner [notch0, extent0] x [notch1, extent1] removed."""
    if not (0 < notch0 < extent0 and 0 < notch1 < extent1):
        raise ValueError("notch must lie strictly inside the rectangle")
    ccw = [(0.0, 0.0), (extent0, 0.0), (extent0, notch1), (notch0, notch1),
           (notch0, extent1), (0.0, extent1), (0.0, 0.0)]
    verts = ccw[::-1] if clockwise else ccw
    return loop_from_plane_vertices(n, plane, verts, family)
