"""Memory sharing across achievable (m1, m2, R1, R2) points and the resulting
lower envelope of the sequential delay T = R1 + R2.

Everything is exact. The envelope at a query is the minimum over all convex
combinations of one, two or three input points whose memory pair equals the
query; with at most a few dozen points direct enumeration is cheap.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import ParameterError
from .points import SchemePoint, frac


@dataclass(frozen=True)
class AchievablePoint:
    m1: Fraction
    m2: Fraction
    r1: Fraction
    r2: Fraction
    source: str = ""

    def __post_init__(self):
        for name in ("m1", "m2", "r1", "r2"):
            object.__setattr__(self, name, frac(getattr(self, name)))
        if not (0 <= self.m1 <= 1 and 0 <= self.m2 <= 1):
            raise ParameterError(f"memory ratios must lie in [0, 1], got ({self.m1}, {self.m2})")
        if self.r1 < 0 or self.r2 < 0:
            raise ParameterError(f"loads must be non-negative, got ({self.r1}, {self.r2})")

    @property
    def t_seq(self) -> Fraction:
        return self.r1 + self.r2

    @property
    def xy(self) -> tuple[Fraction, Fraction]:
        return self.m1, self.m2

    @classmethod
    def from_scheme(cls, p: SchemePoint, source: str | None = None) -> "AchievablePoint":
        return cls(p.m1, p.m2, p.r1, p.r2, p.tag if source is None else source)


def trivial_points(K2: int, N: int) -> tuple[AchievablePoint, AchievablePoint]:
    """Full user caches (nothing to send) and empty caches (server sends every
    file once to the mirrors, each mirror forwards one file per user)."""
    if K2 < 1 or N < 1:
        raise ParameterError(f"need K2, N >= 1, got {K2}, {N}")
    return (
        AchievablePoint(0, 1, 0, 0, "trivial-full"),
        AchievablePoint(0, 0, N, K2, "trivial-empty"),
    )


def share3(p1: AchievablePoint, p2: AchievablePoint, p3: AchievablePoint, alpha, beta) -> AchievablePoint:
    """Split each file in parts alpha, beta, 1-alpha-beta served by p1, p2, p3."""
    a, b = frac(alpha), frac(beta)
    if a < 0 or b < 0 or a + b > 1:
        raise ParameterError(f"weights need alpha, beta >= 0 and alpha + beta <= 1, got {a}, {b}")
    c = 1 - a - b
    return AchievablePoint(
        a * p1.m1 + b * p2.m1 + c * p3.m1,
        a * p1.m2 + b * p2.m2 + c * p3.m2,
        a * p1.r1 + b * p2.r1 + c * p3.r1,
        a * p1.r2 + b * p2.r2 + c * p3.r2,
        "shared",
    )


@dataclass(frozen=True)
class EnvelopeValue:
    m1: Fraction
    m2: Fraction
    feasible: bool
    t: Fraction | None = None
    r1: Fraction | None = None
    r2: Fraction | None = None
    support: tuple = ()  # (point index, weight)

    def support_str(self, points=None) -> str:
        def name(i):
            return points[i].source or str(i) if points is not None else str(i)

        return ";".join(f"{name(i)}@{w}" for i, w in self.support)


class _Triangle:
    __slots__ = ("idx", "det", "a", "b", "c")

    def __init__(self, idx, pts):
        (x1, y1), (x2, y2), (x3, y3) = (pts[i].xy for i in idx)
        self.idx = idx
        self.det = (x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)
        self.a, self.b, self.c = (x1, y1), (x2, y2), (x3, y3)

    def weights(self, x, y):
        (x1, y1), (x2, y2), (x3, y3) = self.a, self.b, self.c
        w2 = ((x - x1) * (y3 - y1) - (x3 - x1) * (y - y1)) / self.det
        w3 = ((x2 - x1) * (y - y1) - (x - x1) * (y2 - y1)) / self.det
        return 1 - w2 - w3, w2, w3


def _segment_weight(p, q, x, y):
    """Weight on q if (x, y) lies on segment p-q, else None."""
    (x1, y1), (x2, y2) = p, q
    dx, dy = x2 - x1, y2 - y1
    if (x - x1) * dy != (y - y1) * dx:
        return None
    lam = (x - x1) / dx if dx else (y - y1) / dy
    return lam if 0 <= lam <= 1 else None


class Envelope:
    """Precomputed supports for repeated envelope queries over one point set."""

    def __init__(self, points):
        self.points = list(points)
        if not self.points:
            raise ParameterError("lower envelope needs at least one point")
        pts = self.points
        self.tris = []
        for idx in combinations(range(len(pts)), 3):
            tri = _Triangle(idx, pts)
            if tri.det != 0:
                self.tris.append(tri)
        self.pairs = [(i, j) for i, j in combinations(range(len(pts)), 2) if pts[i].xy != pts[j].xy]

    def query(self, m1, m2, exclude: int | None = None) -> EnvelopeValue:
        x, y = frac(m1), frac(m2)
        pts = self.points
        best = None

        def offer(support):
            nonlocal best
            t = sum(w * pts[i].t_seq for i, w in support)
            if best is None or t < best[0]:
                best = (t, support)

        for i, p in enumerate(pts):
            if i != exclude and p.xy == (x, y):
                offer(((i, Fraction(1)),))
        for i, j in self.pairs:
            if exclude in (i, j):
                continue
            lam = _segment_weight(pts[i].xy, pts[j].xy, x, y)
            if lam is not None and 0 < lam < 1:
                offer(((i, 1 - lam), (j, lam)))
        for tri in self.tris:
            if exclude in tri.idx:
                continue
            w = tri.weights(x, y)
            if all(v > 0 for v in w):
                offer(tuple(zip(tri.idx, w)))
        if best is None:
            return EnvelopeValue(x, y, False)
        t, support = best
        return EnvelopeValue(
            x,
            y,
            True,
            t,
            sum(w * pts[i].r1 for i, w in support),
            sum(w * pts[i].r2 for i, w in support),
            support,
        )


def lower_envelope(points, grid) -> list[EnvelopeValue]:
    """Minimum achievable T at each (m1, m2) in ``grid``; outside-hull queries
    come back with ``feasible=False``."""
    env = Envelope(points)
    return [env.query(m1, m2) for m1, m2 in grid]


def square_grid(step) -> list[tuple[Fraction, Fraction]]:
    step = frac(step)
    if not 0 < step <= 1 or (1 / step).denominator != 1:
        raise ParameterError(f"grid step must be 1/n for a positive integer n, got {step}")
    n = int(1 / step)
    return [(Fraction(a, n), Fraction(b, n)) for a in range(n + 1) for b in range(n + 1)]


@dataclass(frozen=True)
class ConvexityEntry:
    index: int
    source: str
    on_envelope: bool
    t: Fraction
    best_other: Fraction | None  # best T reachable at the same memory pair without this point
    support: tuple = ()


def convexity_report(points) -> list[ConvexityEntry]:
    """A point is dominated when other points share to a strictly lower T at
    its memory pair."""
    pts = list(points)
    if len(pts) < 1:
        raise ParameterError("convexity report needs at least one point")
    env = Envelope(pts)
    out = []
    for i, p in enumerate(pts):
        v = env.query(p.m1, p.m2, exclude=i)
        dominated = v.feasible and v.t < p.t_seq
        out.append(ConvexityEntry(i, p.source, not dominated, p.t_seq, v.t, v.support if dominated else ()))
    return out


def grid_convexity_violations(values: list[EnvelopeValue], step) -> list[tuple]:
    """Midpoint checks along rows, columns and diagonals of a square grid."""
    step = frac(step)
    table = {(v.m1, v.m2): v.t for v in values if v.feasible}
    bad = []
    for (x, y), t in table.items():
        for dx, dy in ((step, 0), (0, step), (step, step), (step, -step)):
            a = table.get((x - dx, y - dy))
            b = table.get((x + dx, y + dy))
            if a is not None and b is not None and 2 * t > a + b:
                bad.append(((x, y), t, a, b))
    return bad
