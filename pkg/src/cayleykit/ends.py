"""Ball-complement analysis: components, end-depth, dead ends, rough equivalence.

A complement component is *interior* when it misses the outer sphere of
the window; with window R >= 2r+2 no interior component of the complement
of B(r) can hide beyond the window (that is the content of the linear
end-depth bound), so interior max-distances are trustworthy there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .cayley import CayleyBall, build_ball
from .errors import PreconditionError
from .growth import GrowthTable, Sample
from .zoo import GroupModel


@dataclass
class ComponentSet:
    window_R: int
    inner_r: int
    components: List[List[int]]
    boundary_touching: List[bool]

    @property
    def n_interior(self) -> int:
        return sum(1 for b in self.boundary_touching if not b)

    @property
    def n_boundary(self) -> int:
        return sum(1 for b in self.boundary_touching if b)


def complement_components(ball, r: int) -> ComponentSet:
    """Connected components of the induced subgraph on {v : dist(v) > r}."""
    R = ball.radius
    if r >= R:
        raise PreconditionError(f"complement radius {r} must be < window {R}")
    start = ball.level_start[r + 1] if r + 1 < len(ball.level_start) else ball.n
    n = ball.n
    comp = {}
    components = []
    touching = []
    outer = ball.level_start[R] if R < len(ball.level_start) else n
    for seed in range(start, n):
        if seed in comp:
            continue
        stack = [seed]
        comp[seed] = len(components)
        members = [seed]
        touches = seed >= outer
        while stack:
            v = stack.pop()
            for _, u in ball.neighbors(v):
                if u >= start and u not in comp:
                    comp[u] = len(components)
                    members.append(u)
                    if u >= outer:
                        touches = True
                    stack.append(u)
        members.sort()
        components.append(members)
        touching.append(touches)
    return ComponentSet(
        window_R=R, inner_r=r, components=components, boundary_touching=touching
    )


def end_depth_sample(ball, r: int) -> Sample:
    """One V0 sample from a ball whose radius is the window for this r."""
    comps = complement_components(ball, r)
    interior_max = r
    for members, touches in zip(comps.components, comps.boundary_touching):
        if not touches and members:
            interior_max = max(interior_max, max(ball.dist[v] for v in members))
    if ball.model.one_ended:
        exact = comps.n_boundary == 1
    else:
        exact = comps.n_interior == 0
    return Sample(
        r=r,
        value=interior_max,
        mode="exact" if exact else "lower_bound",
        window_R=ball.radius,
    )


def end_depth_window(r: int, window_factor) -> int:
    return math.ceil(Fraction(window_factor) * r) + 2


def end_depth_table(
    model: GroupModel,
    r_max: int,
    window_factor=2,
    max_vertices: int = 2_000_000,
    ball: Optional[CayleyBall] = None,
) -> GrowthTable:
    """V0 growth table for r in [0, r_max], window R = ceil(wf*r) + 2 per sample.

    For multi-ended models the sample is the per-boundary-component
    variant: the maximum over components, exact when no interior
    component exists.  Raises BudgetError when the largest window exceeds
    the vertex budget (callers may probe r values one at a time).
    """
    if Fraction(window_factor) < 2:
        raise PreconditionError("window_factor must be >= 2")
    R_needed = end_depth_window(r_max, window_factor)
    if ball is None or ball.radius < R_needed:
        ball = build_ball(model, R_needed, max_vertices=max_vertices)
    samples = [Sample(r=0, value=0, mode="exact", window_R=ball.radius)]
    for r in range(1, r_max + 1):
        window = end_depth_window(r, window_factor)
        samples.append(end_depth_sample(ball.restrict(window), r))
    return GrowthTable(
        kind="end_depth",
        samples=samples,
        meta={
            "model": model.name,
            "window_factor": str(window_factor),
            "r_max": r_max,
            "one_ended": model.one_ended,
        },
    )


# ---------------------------------------------------------------------------
# Dead ends


def dead_ends(ball) -> List[Tuple[int, int]]:
    """Vertices none of whose neighbors is farther out, with escape depths.

    Vertices with dist(v) < R are assessed (their full neighbor sets are in
    the window).  Escape depths are exact: a minimal escape path stays at
    dist <= dist(v) until its final step, hence inside the window.
    """
    from collections import deque

    out = []
    R = ball.radius
    for v in range(ball.n):
        dv = ball.dist[v]
        if dv == 0 or dv >= R:
            continue
        if any(ball.dist[u] > dv for _, u in ball.neighbors(v)):
            continue
        # escape BFS; never expand beyond dist(v) since those are escapes
        seen = {v}
        queue = deque([(v, 0)])
        depth = None
        while queue:
            w, d = queue.popleft()
            if ball.dist[w] > dv:
                depth = d
                break
            for _, u in ball.neighbors(w):
                if u not in seen:
                    seen.add(u)
                    queue.append((u, d + 1))
        if depth is not None:
            out.append((v, depth))
    out.sort(key=lambda t: (ball.dist[t[0]], t[0]))
    return out


# ---------------------------------------------------------------------------
# Rough equivalence of growth tables


@dataclass(frozen=True)
class RoughEquivWitness:
    c1: Fraction
    c2: Fraction
    c3: int
    C1: Fraction
    C2: Fraction
    C3: int
    verified_r: Tuple[int, ...]

    def as_tuple(self):
        return (self.c1, self.c2, self.c3, self.C1, self.C2, self.C3)


def _grid_fractions(limit: int) -> List[Fraction]:
    """Positive rationals with numerator/denominator <= limit, simplest first.

    Ordered by (denominator, numerator) so integer constants are tried
    before proper fractions; this fixes the meaning of "lexicographically
    least witness".
    """
    seen = set()
    out = []
    for q in range(1, limit + 1):
        for p in range(1, limit + 1):
            f = Fraction(p, q)
            if f not in seen:
                seen.add(f)
                out.append(f)
    return out


def _grid_offsets(limit: int) -> List[int]:
    out = [0]
    for k in range(1, limit + 1):
        out.extend((k, -k))
    return out


def _eval_floor(samples, x: Fraction) -> Optional[int]:
    best = None
    for s in samples:
        if s.r <= x:
            best = s.value
        else:
            break
    return best


def _eval_ceil(samples, x: Fraction) -> Optional[int]:
    for s in samples:
        if s.r >= x:
            return s.value
    return None


def rough_equiv(
    f: GrowthTable, g: GrowthTable, grid_limit: int = 8
) -> Optional[RoughEquivWitness]:
    """Grid search for constants with c1 f(c2 r) + c3 <= g(r) <= C1 f(C2 r) + C3.

    f is evaluated at the nearest sample below (lower bound) or above
    (upper bound) of the rescaled argument; growth tables are monotone so
    this is the conservative reading.  Returns the lexicographically least
    witness over the grid, or None ("none within grid", never a
    mathematical negative).
    """
    if f.kind != g.kind:
        raise PreconditionError(
            f"incompatible growth table kinds {f.kind!r} vs {g.kind!r}"
        )
    fs = f.exact_samples()
    gs = g.exact_samples()
    if len(fs) < 3 or len(gs) < 3:
        raise PreconditionError("rough_equiv needs at least 3 exact samples per table")
    fractions = _grid_fractions(grid_limit)
    offsets = _grid_offsets(grid_limit)

    def search(side: str):
        # side "lower": c1 f(c2 r) + c3 <= g(r); side "upper": g(r) <= C1 f(C2 r) + C3
        for a in fractions:
            for b in fractions:
                evals = []
                ok_shape = True
                for s in gs:
                    x = b * s.r
                    fx = _eval_floor(fs, x) if side == "lower" else _eval_ceil(fs, x)
                    if fx is None:
                        ok_shape = False
                        break
                    evals.append((s.r, fx, s.value))
                if not ok_shape:
                    continue
                for c in offsets:
                    if side == "lower":
                        if all(a * fx + c <= gv for _, fx, gv in evals):
                            return (a, b, c, tuple(r for r, _, _ in evals))
                    else:
                        if all(gv <= a * fx + c for _, fx, gv in evals):
                            return (a, b, c, tuple(r for r, _, _ in evals))
        return None

    lower = search("lower")
    if lower is None:
        return None
    upper = search("upper")
    if upper is None:
        return None
    c1, c2, c3, range_lo = lower
    C1, C2, C3, range_hi = upper
    verified = tuple(sorted(set(range_lo) & set(range_hi)))
    if len(verified) < 3:
        return None
    return RoughEquivWitness(c1=c1, c2=c2, c3=c3, C1=C1, C2=C2, C3=C3, verified_r=verified)
