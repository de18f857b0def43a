"""Deterministic 2D world: walls, coloured targets and one disc-shaped robot."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import exp_response, nearest_segment, perimeter_rays, ray_cast
from .platforms import INFRARED, BodyVelocity, PlatformProfile

MAZE = "maze_markers"
BLOCK = "block_search"
WORLD_KINDS = (MAZE, BLOCK)

TICK = 0.1
MAZE_ROOMS = (3, 4)
MAZE_BOXES = 1  # per room, at most
# room side used for the large platform; smaller robots get a proportionally
# smaller world (wheel radius sets the scale of the environment)
PIONEER_SCALE = 5.0
_REF_WHEEL = 0.095


def world_scale(profile: PlatformProfile) -> float:
    return PIONEER_SCALE * profile.wheel_radius / _REF_WHEEL


@dataclass(frozen=True)
class SensorModel:
    ir_near: tuple[float, float] = (0.01, 2400.0)
    ir_far: tuple[float, float] = (0.05, 250.0)
    ir_max: float = 4095.0
    camera_fov: float = math.radians(60.0)

    def infrared(self, d: np.ndarray, max_range: float) -> np.ndarray:
        (d0, g0), (d1, g1) = self.ir_near, self.ir_far
        g = g0 * (g1 / g0) ** ((np.asarray(d, dtype=float) - d0) / (d1 - d0))
        g = np.clip(g, 0.0, self.ir_max)
        return np.where(np.asarray(d) > max_range, 0.0, g)


DEFAULT_SENSORS = SensorModel()

_ANGLE_CACHE: dict[tuple, np.ndarray] = {}


def _angles(profile: PlatformProfile) -> np.ndarray:
    key = profile.sensor_angles
    arr = _ANGLE_CACHE.get(key)
    if arr is None:
        arr = _ANGLE_CACHE[key] = np.asarray(key, dtype=float)
    return arr


@dataclass
class Target:
    x: float
    y: float
    radius: float
    colour: str = "blue"
    role: str = "marker"  # marker | finish | block
    active: bool = True

    @property
    def is_goal(self) -> bool:
        return self.role in ("finish", "block")


@dataclass(frozen=True)
class Blob:
    direction: str  # left | centre | right
    area: float
    bearing: float
    target: int


@dataclass(frozen=True)
class SensorFrame:
    readings: tuple[float, ...]
    blob: Blob | None = None


@dataclass
class WorldState:
    segments: np.ndarray  # (M, 4): x1 y1 x2 y2
    targets: list[Target]
    x: float
    y: float
    theta: float
    body_radius: float
    clock: float = 0.0
    contact: bool = False
    kind: str = "custom"
    seed: int = 0
    scale: float = PIONEER_SCALE
    n_obstacles: int = 0
    start: tuple[float, float, float] = field(init=False)

    def __post_init__(self):
        self.segments = np.asarray(self.segments, dtype=float).reshape(-1, 4)
        self.segments = np.ascontiguousarray(self.segments)
        self.start = (self.x, self.y, self.theta)
        self._one, self._ox, self._oy = np.zeros(1), np.zeros(1), np.zeros(1)

    @property
    def pose(self) -> tuple[float, float, float]:
        return self.x, self.y, self.theta

    def copy(self) -> "WorldState":
        w = WorldState(self.segments, [Target(**vars(t)) for t in self.targets],
                       self.x, self.y, self.theta, self.body_radius, self.clock,
                       self.contact, self.kind, self.seed, self.scale, self.n_obstacles)
        w.start = self.start
        return w

    # ------------------------------------------------------------ geometry

    def ray_distances(self, ox, oy, angles, max_range: float = math.inf) -> np.ndarray:
        """Distance along each ray to the nearest segment (``max_range`` if none)."""
        angles = np.atleast_1d(np.asarray(angles, dtype=float))
        ox = np.broadcast_to(np.asarray(ox, dtype=float), angles.shape).copy()
        oy = np.broadcast_to(np.asarray(oy, dtype=float), angles.shape).copy()
        return ray_cast(self.segments, ox, oy, angles, float(max_range))

    def clearance(self, x: float, y: float) -> tuple[float, np.ndarray]:
        """Distance from (x, y) to the nearest segment and the unit normal away from it."""
        d, nx, ny = nearest_segment(self.segments, float(x), float(y))
        return d, np.array([nx, ny])

    def _resolve_penetration(self) -> bool:
        hit = False
        for _ in range(4):
            d, nx, ny = nearest_segment(self.segments, self.x, self.y)
            if d >= self.body_radius - 1e-12:
                break
            push = self.body_radius - d + 1e-9
            self.x += push * nx
            self.y += push * ny
            hit = True
        return hit

    # ------------------------------------------------------------ dynamics

    def step(self, vel: BodyVelocity, dt: float = TICK) -> "WorldState":
        """Advance the robot one tick in place (unicycle model) and return self."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.x += vel.v * math.cos(self.theta) * dt
        self.y += vel.v * math.sin(self.theta) * dt
        self.theta = (self.theta + vel.omega * dt + math.pi) % (2 * math.pi) - math.pi
        self.contact = self._resolve_penetration()
        self.clock += dt
        return self

    def update_targets(self) -> bool:
        """Deactivate targets the robot touches; True once a goal target is touched."""
        goal = False
        for t in self.targets:
            if t.active and math.hypot(t.x - self.x, t.y - self.y) <= t.radius + self.body_radius:
                t.active = False
                goal = goal or t.is_goal
        return goal

    def goal_distance(self) -> float:
        """Distance to the nearest active target (inf when none)."""
        ds = [math.hypot(t.x - self.x, t.y - self.y) for t in self.targets if t.active]
        return min(ds) if ds else math.inf

    # ------------------------------------------------------------ sensing

    def camera(self, fov: float, max_range: float) -> Blob | None:
        best = None
        for k, t in enumerate(self.targets):
            if not t.active:
                continue
            dx, dy = t.x - self.x, t.y - self.y
            dist = math.hypot(dx, dy)
            if dist > max_range:
                continue
            bearing = (math.atan2(dy, dx) - self.theta + math.pi) % (2 * math.pi) - math.pi
            if abs(bearing) > fov / 2:
                continue
            if dist > 1e-9:
                self._one[0] = math.atan2(dy, dx)
                self._ox[0], self._oy[0] = self.x, self.y
                if ray_cast(self.segments, self._ox, self._oy, self._one, dist)[0] < dist - t.radius:
                    continue
            area = (t.radius / max(dist, t.radius)) ** 2
            if best is None or area > best.area:
                third = fov / 6
                direction = "left" if bearing > third else "right" if bearing < -third else "centre"
                best = Blob(direction, area, bearing, k)
        return best

    def sense(self, profile: PlatformProfile, model: SensorModel = DEFAULT_SENSORS) -> SensorFrame:
        angles = _angles(profile)
        lo, hi = profile.sensor_range
        d = perimeter_rays(self.segments, self.x, self.y, self.theta, self.body_radius, angles, hi + 1.0)
        if profile.sensor_modality == INFRARED:
            (d0, g0), (d1, g1) = model.ir_near, model.ir_far
            readings = exp_response(d, d0, g0, d1, g1, model.ir_max, hi)
        else:
            readings = np.minimum(np.maximum(d, lo), hi)
        blob = self.camera(model.camera_fov, profile.camera_range)
        return SensorFrame(tuple(readings.tolist()), blob)

    # ------------------------------------------------------------ text format

    def dumps(self) -> str:
        lines = [f"kind {self.kind}", f"seed {self.seed}", f"scale {self.scale!r}",
                 f"body_radius {self.body_radius!r}",
                 "start " + " ".join(repr(float(v)) for v in self.start)]
        lines += ["segment " + " ".join(repr(float(v)) for v in s) for s in self.segments]
        lines += [f"target {t.x!r} {t.y!r} {t.radius!r} {t.colour} {t.role}" for t in self.targets]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "WorldState":
        meta, segs, targets, start = {}, [], [], None
        for ln in text.splitlines():
            if not ln.strip():
                continue
            key, *rest = ln.split()
            if key == "segment":
                segs.append([float(v) for v in rest])
            elif key == "target":
                x, y, r, colour, role = rest
                targets.append(Target(float(x), float(y), float(r), colour, role))
            elif key == "start":
                start = tuple(float(v) for v in rest)
            else:
                meta[key] = rest[0]
        if start is None:
            raise ValueError("world description has no start pose")
        return cls(np.array(segs), targets, *start, body_radius=float(meta["body_radius"]),
                   kind=meta.get("kind", "custom"), seed=int(meta.get("seed", 0)),
                   scale=float(meta.get("scale", PIONEER_SCALE)))


# ------------------------------------------------------------------ generation

def _box(cx, cy, hw, hh, angle=0.0) -> list[list[float]]:
    c, s = math.cos(angle), math.sin(angle)
    corners = [(cx + c * px - s * py, cy + s * px + c * py)
               for px, py in ((-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh))]
    return [[*corners[i], *corners[(i + 1) % 4]] for i in range(4)]


def _rect_walls(x0, y0, x1, y1) -> list[list[float]]:
    return [[x0, y0, x1, y0], [x1, y0, x1, y1], [x1, y1, x0, y1], [x0, y1, x0, y0]]


def _probe(segments, x, y) -> float:
    probe = WorldState(np.array(segments, dtype=float).reshape(-1, 4), [], x, y, 0.0, 0.0)
    return probe.clearance(x, y)[0]


def _inside_box(x, y, box) -> bool:
    cx, cy, hw, hh, ang = box
    c, s = math.cos(-ang), math.sin(-ang)
    px, py = x - cx, y - cy
    return abs(c * px - s * py) <= hw and abs(s * px + c * py) <= hh


def _maze(rng: np.random.Generator, scale: float, body_radius: float):
    rooms = int(rng.integers(MAZE_ROOMS[0], MAZE_ROOMS[1] + 1))
    door = 0.32 * scale
    width, height = rooms * scale, scale
    segs = [[0, 0, width, 0], [0, height, width, height], [0, 0, 0, height], [width, 0, width, height]]
    targets = []
    margin = 0.12 * scale
    for k in range(1, rooms):
        x = k * scale
        lo = float(rng.uniform(margin, height - margin - door))
        segs += [[x, 0, x, lo], [x, lo + door, x, height]]
        targets.append(Target(x, lo + door / 2, 0.05 * scale, "blue", "marker"))
    # a baffle in some rooms turns the corridor into a maze
    for k in range(1, rooms):
        if rng.random() < 0.5:
            bx = (k + float(rng.uniform(0.4, 0.6))) * scale
            from_top = rng.random() < 0.5
            length = float(rng.uniform(0.3, 0.45)) * height
            segs.append([bx, height, bx, height - length] if from_top else [bx, 0, bx, length])
    fx = (rooms - 1 + float(rng.uniform(0.55, 0.85))) * scale
    fy = float(rng.uniform(0.25, 0.75)) * height
    targets.append(Target(fx, fy, 0.06 * scale, "blue", "finish"))
    # loose boxes in each room, kept clear of doors, the finish and each other
    gap = max(2.5 * body_radius, 0.12 * scale)
    boxes = []
    for k in range(rooms):
        placed, wanted = 0, int(rng.integers(0, MAZE_BOXES + 1))
        for _ in range(300):
            if placed == wanted:
                break
            hw, hh = (float(v) * scale for v in rng.uniform(0.05, 0.12, size=2))
            ang = float(rng.uniform(0, math.pi / 2)) if rng.random() < 0.4 else 0.0
            cx = (k + float(rng.uniform(0.2, 0.8))) * scale
            cy = float(rng.uniform(0.2, 0.8)) * height
            rad = math.hypot(hw, hh)
            if _probe(segs, cx, cy) < rad + gap:
                continue
            if any(math.hypot(cx - t.x, cy - t.y) < rad + gap + t.radius for t in targets):
                continue
            boxes.append((cx, cy, hw, hh, ang))
            segs += _box(cx, cy, hw, hh, ang)
            placed += 1
    for _ in range(200):
        sx = float(rng.uniform(0.15, 0.6)) * scale
        sy = float(rng.uniform(0.15, 0.85)) * height
        if not any(_inside_box(sx, sy, b) for b in boxes) and _probe(segs, sx, sy) > 2 * body_radius:
            break
    theta = float(rng.uniform(-math.pi, math.pi))
    return segs, targets, (sx, sy, theta), len(boxes)


def _block_search(rng: np.random.Generator, scale: float, body_radius: float):
    side = 1.6 * scale
    segs = _rect_walls(0.0, 0.0, side, side)
    gap = max(2.5 * body_radius, 0.12 * scale)
    wanted = int(rng.integers(5, 11))
    boxes = []
    shrink = 1.0
    for attempt in range(1, 20001):
        if len(boxes) == wanted:
            break
        if attempt % 400 == 0:
            # relax rather than loop forever: fewer boxes first, then smaller ones
            if wanted > 5:
                wanted -= 1
            else:
                shrink *= 0.8
        hw = float(rng.uniform(0.04, 0.12)) * side * shrink
        hh = float(rng.uniform(0.04, 0.12)) * side * shrink
        ang = float(rng.uniform(0, math.pi / 2)) if rng.random() < 0.4 else 0.0
        cx = float(rng.uniform(0, side))
        cy = float(rng.uniform(0, side))
        rad = math.hypot(hw, hh)
        if not (gap + rad <= cx <= side - gap - rad and gap + rad <= cy <= side - gap - rad):
            continue
        if any(math.hypot(cx - b[0], cy - b[1]) < rad + math.hypot(b[2], b[3]) + gap for b in boxes):
            continue
        boxes.append((cx, cy, hw, hh, ang))
    for b in boxes:
        segs += _box(*b)
    block_r = 0.04 * scale
    for _ in range(2000):
        tx, ty = (float(v) for v in rng.uniform(0.1 * side, 0.9 * side, size=2))
        if not any(_inside_box(tx, ty, b) for b in boxes) and _probe(segs, tx, ty) > block_r + gap / 2:
            break
    for _ in range(5000):
        sx, sy = (float(v) for v in rng.uniform(0.05 * side, 0.95 * side, size=2))
        far = math.hypot(sx - tx, sy - ty) >= max(2 * body_radius, 0.45 * side)
        if far and not any(_inside_box(sx, sy, b) for b in boxes) and _probe(segs, sx, sy) > 1.5 * body_radius:
            break
    theta = float(rng.uniform(-math.pi, math.pi))
    return segs, [Target(tx, ty, block_r, "red", "block")], (sx, sy, theta), len(boxes)


def generate_world(kind: str, seed: int, scale: float = PIONEER_SCALE,
                   body_radius: float | None = None) -> WorldState:
    """Procedurally generate a maze-with-markers or block-search world.

    ``scale`` is the side of one room in metres; ``body_radius`` (default
    proportional to scale) sets placement clearances for the start pose.
    """
    if body_radius is None:
        body_radius = 0.058 * scale
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF, WORLD_KINDS.index(kind)]))
    if kind == MAZE:
        segs, targets, start, n_obstacles = _maze(rng, scale, body_radius)
    elif kind == BLOCK:
        segs, targets, start, n_obstacles = _block_search(rng, scale, body_radius)
    else:
        raise ValueError(f"unknown world kind {kind!r}")
    return WorldState(np.array(segs, dtype=float), targets, *start, body_radius=body_radius,
                      kind=kind, seed=int(seed), scale=float(scale), n_obstacles=n_obstacles)
