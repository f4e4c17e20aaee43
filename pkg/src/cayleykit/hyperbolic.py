"""Hyperbolicity data on balls and the ray-fan construction.

Everything is window-relative: rays are maximal in-window geodesic
segments from the identity to the outer sphere, and "outside B(x)"
for fan containment means dist >= x (the measured ray constant may be 0,
in which case paths legitimately touch their level sphere).
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .cayley import bfs_distances
from .errors import PreconditionError, WindowError
from .filling import Loop, SearchBudget, fill_outside, make_loop
from .words import letter_key


@dataclass
class DeltaEstimate:
    value: int
    sample: str
    triangles: int


def _cached_dist_map(ball, cache: Dict[int, dict], v: int) -> dict:
    got = cache.get(v)
    if got is None:
        got = bfs_distances(ball, [v])
        cache[v] = got
    return got


def _canonical_geodesic_cached(ball, u: int, v: int, cache) -> List[int]:
    """Shortlex-least geodesic u -> v using a cached distance map from v."""
    dist_v = _cached_dist_map(ball, cache, v)
    path = [u]
    cur = u
    while cur != v:
        best = None
        for l in ball.letters:
            w = ball.step(cur, l)
            if w >= 0 and dist_v.get(w, -1) == dist_v[cur] - 1:
                if best is None or letter_key(l) < letter_key(best[0]):
                    best = (l, w)
        if best is None:
            raise WindowError("geodesic reconstruction failed")
        cur = best[1]
        path.append(cur)
    return path


def _triangle_defect(ball, triple, cache, stop_above: Optional[int] = None) -> int:
    """Max over side points of the distance to the union of the other sides."""
    u, v, w = triple
    sides = [
        _canonical_geodesic_cached(ball, u, v, cache),
        _canonical_geodesic_cached(ball, v, w, cache),
        _canonical_geodesic_cached(ball, w, u, cache),
    ]
    defect = 0
    for i in range(3):
        others = set(sides[(i + 1) % 3]) | set(sides[(i + 2) % 3])
        todo = [p for p in sides[i] if p not in others]
        if not todo:
            continue
        # multi-source BFS from the other two sides until this side is covered
        dmap = {s: 0 for s in others}
        queue = deque(others)
        remaining = set(todo)
        while queue and remaining:
            x = queue.popleft()
            d = dmap[x]
            for _, y in ball.neighbors(x):
                if y not in dmap:
                    dmap[y] = d + 1
                    if y in remaining:
                        remaining.discard(y)
                    queue.append(y)
        for p in todo:
            defect = max(defect, dmap.get(p, ball.radius))
    return defect


def estimate_delta(
    ball,
    rho: Optional[int] = None,
    count: Optional[int] = None,
    seed: Optional[int] = None,
) -> DeltaEstimate:
    """Slimness constant over examined triangles, shortlex-least sides.

    Exhaustive mode (rho): all vertex triples in B(rho) whose pairwise
    distances are ball-exact.  Sampled mode (count, seed): random triples
    from B(R // 3), which keeps pair distances exact by the midpoint rule.
    """
    if rho is None and count is None:
        raise PreconditionError("need rho (exhaustive) or count+seed (sampled)")
    cache: Dict[int, dict] = {}
    triples = []
    if count is not None:
        if seed is None:
            raise PreconditionError("sampled mode requires a seed")
        pool_r = max(1, ball.radius // 3)
        pool = list(range(ball.level_start[min(pool_r, ball.radius) + 1]))
        rng = random.Random(seed)
        seen = set()
        attempts = 0
        while len(triples) < count and attempts < 50 * count:
            attempts += 1
            t = tuple(sorted(rng.sample(pool, 3)))
            if t not in seen:
                seen.add(t)
                triples.append(t)
        sample = f"sampled(count={count}, seed={seed}, pool=B({pool_r}))"
    else:
        if rho > ball.radius:
            raise PreconditionError("rho exceeds ball radius")
        verts = list(range(ball.level_start[rho + 1] if rho + 1 < len(ball.level_start) else ball.n))
        for i in range(len(verts)):
            for j in range(i + 1, len(verts)):
                for k in range(j + 1, len(verts)):
                    triples.append((verts[i], verts[j], verts[k]))
        sample = f"exhaustive(rho={rho})"

    examined = 0
    delta = 0
    for t in triples:
        u, v, w = t
        ok = True
        for a, b in ((u, v), (v, w), (w, u)):
            da = _cached_dist_map(ball, cache, b).get(a)
            if da is None or ball.dist[a] + ball.dist[b] + da > 2 * ball.radius:
                ok = False
                break
        if not ok:
            continue
        examined += 1
        delta = max(delta, _triangle_defect(ball, t, cache))
    if examined == 0:
        raise PreconditionError("no triple with ball-exact distances available")
    return DeltaEstimate(value=delta, sample=sample, triangles=examined)


# ---------------------------------------------------------------------------
# Bestvina-Mess ray constant


def geodesic_vertex_set(ball) -> Tuple[set, dict]:
    """Y = vertices lying on some geodesic from the identity to sphere(R)."""
    R = ball.radius
    sphere = list(ball.sphere_ids(R))
    if not sphere:
        raise PreconditionError("outer sphere is empty")
    d_to_sphere = bfs_distances(ball, sphere)
    Y = {v for v, d in d_to_sphere.items() if ball.dist[v] + d == R}
    return Y, d_to_sphere


def ray_constant(ball, margin: int) -> int:
    """max over x in B(R - margin) of d(x, Y): how far any vertex sits from
    a geodesic segment identity -> sphere(R)."""
    if margin >= ball.radius:
        raise PreconditionError("margin must be < R")
    Y, _ = geodesic_vertex_set(ball)
    dY = bfs_distances(ball, sorted(Y))
    cutoff = ball.level_start[ball.radius - margin + 1]
    c_hat = 0
    for x in range(cutoff):
        c_hat = max(c_hat, dY.get(x, ball.radius))
    return c_hat


def extend_ray(ball, v: int) -> Tuple[int, ...]:
    """Maximal in-window geodesic segment 1 -> sphere(R) through v.

    Requires v in Y.  The inward half is the vertex's canonical shortlex
    geodesic; the outward half greedily takes the least letter that stays
    on a geodesic to the outer sphere.
    """
    R = ball.radius
    sphere = list(ball.sphere_ids(R))
    d_to_sphere = getattr(ball, "_d_to_sphere", None)
    if d_to_sphere is None:
        d_to_sphere = bfs_distances(ball, sphere)
        ball._d_to_sphere = d_to_sphere
    if ball.dist[v] + d_to_sphere.get(v, R + 1) != R:
        raise WindowError("vertex does not lie on a geodesic to the outer sphere")
    path = ball.walk(0, ball.words[v])
    cur = v
    while ball.dist[cur] < R:
        best = None
        for l in ball.letters:
            w = ball.step(cur, l)
            if (
                w >= 0
                and ball.dist[w] == ball.dist[cur] + 1
                and ball.dist[w] + d_to_sphere.get(w, R + 1) == R
            ):
                if best is None or letter_key(l) < letter_key(best[0]):
                    best = (l, w)
        if best is None:
            raise WindowError("ray extension stalled before the outer sphere")
        cur = best[1]
        path.append(cur)
    return tuple(path)


def ray_through(ball, v: int, c: int) -> Tuple[int, ...]:
    """A ray passing within c of v: extend through the nearest Y-vertex."""
    Y = getattr(ball, "_Y_cache", None)
    if Y is None:
        Y, _ = geodesic_vertex_set(ball)
        ball._Y_cache = Y
    if v in Y:
        return extend_ray(ball, v)
    dmap = {v: 0}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        if dmap[x] >= c:
            break
        for _, y in ball.neighbors(x):
            if y not in dmap:
                dmap[y] = dmap[x] + 1
                if y in Y:
                    return extend_ray(ball, y)
                queue.append(y)
    raise WindowError(f"no geodesic ray within {c} of vertex {v} (c exceeded)")


# ---------------------------------------------------------------------------
# CP tables


@dataclass
class CPReport:
    M: int
    c: int
    level: int
    L_hat: int
    pairs: List[Tuple[int, int, int, int]]  # (x, y, true_dist, complement_len)
    failures: List[Tuple[int, int, int]]  # (x, y, true_dist)
    path_cap: int

    @property
    def n_pairs(self):
        return len(self.pairs) + len(self.failures)


def cp_table(ball, M: int, c: int, R_prime: int, path_cap: Optional[int] = None) -> CPReport:
    """Shortest complement paths between same-sphere pairs at most M apart.

    Pairs x, y on sphere(R') with exact d(x, y) <= M (midpoint rule: any
    geodesic between them stays within R' + d/2 <= R, so the pruned BFS
    distance is the group distance).  Complement paths avoid the open ball:
    they stay at dist >= R' - c.  Pairs with no complement path within
    path_cap are failures.
    """
    if not (c < R_prime <= ball.radius - 1):
        raise PreconditionError("need c < R' <= R - 1")
    if path_cap is None:
        path_cap = 2 * M + 4
    R = ball.radius
    d_cap = min(M, 2 * (R - R_prime))
    prune = R_prime + d_cap // 2
    sphere = list(ball.sphere_ids(R_prime))
    sphere_set = set(sphere)
    level_floor = R_prime - c
    pairs = []
    failures = []
    L_hat = 0
    for x in sphere:
        # true distances to same-sphere partners, pruned so values are exact
        dmap = {x: 0}
        queue = deque([x])
        partners = {}
        while queue:
            v = queue.popleft()
            d = dmap[v]
            if d >= d_cap:
                continue
            for _, u in ball.neighbors(v):
                if u not in dmap and ball.dist[u] <= prune:
                    dmap[u] = d + 1
                    if u in sphere_set and u > x:
                        partners[u] = d + 1
                    queue.append(u)
        if not partners:
            continue
        # complement BFS from x, early stop when all partners found
        cmap = {x: 0}
        queue = deque([x])
        waiting = set(partners)
        while queue and waiting:
            v = queue.popleft()
            d = cmap[v]
            if d >= path_cap:
                continue
            for _, u in ball.neighbors(v):
                if u not in cmap and ball.dist[u] >= level_floor:
                    cmap[u] = d + 1
                    waiting.discard(u)
                    queue.append(u)
        for y, true_d in sorted(partners.items()):
            comp = cmap.get(y)
            if comp is None:
                failures.append((x, y, true_d))
            else:
                pairs.append((x, y, true_d, comp))
                L_hat = max(L_hat, comp)
    return CPReport(
        M=M, c=c, level=R_prime, L_hat=L_hat, pairs=pairs, failures=failures, path_cap=path_cap
    )


def complement_path(ball, u: int, v: int, floor: int, cap: int) -> Optional[List[int]]:
    """Deterministic shortest path u -> v among vertices with dist >= floor."""
    if ball.dist[u] < floor or ball.dist[v] < floor:
        return None
    dmap = {v: 0}
    queue = deque([v])
    while queue:
        x = queue.popleft()
        d = dmap[x]
        if x == u or d >= cap:
            if x == u:
                break
            continue
        for _, y in ball.neighbors(x):
            if y not in dmap and ball.dist[y] >= floor:
                dmap[y] = d + 1
                queue.append(y)
    if u not in dmap:
        return None
    path = [u]
    cur = u
    while cur != v:
        best = None
        for l in ball.letters:
            w = ball.step(cur, l)
            if w >= 0 and ball.dist[w] >= floor and dmap.get(w, -1) == dmap[cur] - 1:
                if best is None or letter_key(l) < letter_key(best[0]):
                    best = (l, w)
        cur = best[1]
        path.append(cur)
    return path


def bounded_distance(ball, u: int, v: int, cap: int, floor: int = 0) -> Optional[int]:
    if u == v:
        return 0
    dmap = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        d = dmap[x]
        if d >= cap:
            continue
        for _, y in ball.neighbors(x):
            if y not in dmap and ball.dist[y] >= floor:
                if y == v:
                    return d + 1
                dmap[y] = d + 1
                queue.append(y)
    return None


# ---------------------------------------------------------------------------
# The fan construction (truncated-ray ladder)


@dataclass
class FanTransition:
    """Per-point data for one level transition along one connecting segment."""

    path_point: int  # alpha_j(k)
    ray_point: int  # nearest ray point within c
    approach: Tuple[int, ...]  # geodesic from the path point to the ray point
    ray_index: int  # index of gamma'_k in level i+1 rays


@dataclass
class FanLevel:
    rays: List[Tuple[int, ...]]  # L^i + 1 vertex paths, identity -> sphere(R)
    markers: List[int]  # marker vertices at arc r + i
    f_segments: List[Tuple[int, ...]]  # L^i connecting paths between markers
    spacings: List[int]  # measured d(marker_j, marker_j+1)


@dataclass
class Fan:
    p: int
    q: int
    base_r: int
    N: int
    M: int
    c: int
    L: int
    delta: int
    levels: List[FanLevel]
    P: Tuple[int, ...]  # geodesic p -> gamma_0(r)
    Q: Tuple[int, ...]  # geodesic q -> gamma_1(r)
    transitions: Dict[Tuple[int, int], List[FanTransition]]

    def f_path(self, i: int) -> List[int]:
        out = []
        for seg in self.levels[i].f_segments:
            if out:
                out.extend(seg[1:])
            else:
                out.extend(seg)
        return out

    def invariant_report(self, ball) -> dict:
        r, c, M = self.base_r, self.c, self.M
        containment = []
        spacing = []
        for i, level in enumerate(self.levels):
            floor = r + i - c
            md = min(ball.dist[v] for v in self.f_path(i))
            containment.append({"level": i, "floor": floor, "min_dist": md, "ok": md >= floor})
            worst = max(level.spacings) if level.spacings else 0
            spacing.append({"level": i, "max_spacing": worst, "M": M, "ok": worst <= M})
        return {
            "containment": containment,
            "marker_spacing": spacing,
            "ok": all(x["ok"] for x in containment) and all(x["ok"] for x in spacing),
        }


def _edge_label(ball, u: int, v: int) -> int:
    for l in ball.letters:
        if ball.step(u, l) == v:
            return l
    raise WindowError(f"vertices {u}, {v} are not adjacent")


def path_letters(ball, path: Sequence[int]) -> List[int]:
    return [_edge_label(ball, path[k], path[k + 1]) for k in range(len(path) - 1)]


def build_fan(
    cx,
    p: int,
    q: int,
    N: int,
    M: int,
    c: int,
    L: int,
    delta: int,
    n: int = 1,
) -> Fan:
    """The ladder of paths f_0 .. f_N between rays through p and q.

    Level i connects the marked ray points at arc r+i by complement paths
    (dist >= r+i-c) of length <= L; new rays are selected through each
    integer point of the previous level's paths.  Raises WindowError with
    the failing pair when a complement path is missing or too long
    (window or M too small), and refuses parameter sets that violate
    M > 6c + 2*delta + 3 or L > 2c + 4.
    """
    ball = cx.ball
    model = ball.model
    if not model.one_ended:
        raise PreconditionError("fan construction requires a one-ended model")
    if p == q:
        raise PreconditionError("p and q must be joined by an edge (p != q)")
    if q not in [u for _, u in ball.neighbors(p)]:
        raise PreconditionError("p and q must be joined by an edge")
    if not M > 6 * c + 2 * delta + 3:
        raise PreconditionError(
            f"need M > 6c + 2delta + 3 = {6 * c + 2 * delta + 3}, got M = {M}"
        )
    if not L > 2 * c + 4:
        raise PreconditionError(f"need L > 2c + 4 = {2 * c + 4}, got L = {L}")
    r = ball.dist[p]
    if not r > n + 2 * c:
        raise PreconditionError(f"need dist(p) > n + 2c = {n + 2 * c}, got {r}")
    if r + N + 1 > ball.radius:
        raise PreconditionError("need r + N + 1 <= R so the fan fits the window")

    gamma0 = ray_through(ball, p, c)
    gamma1 = ray_through(ball, q, c)
    m0, m1 = gamma0[r], gamma1[r]
    d01 = bounded_distance(ball, m0, m1, cap=M)
    if d01 is None or d01 > M:
        raise WindowError(f"marker spacing at level 0 exceeds M ({d01} > {M})")
    f0 = complement_path(ball, m0, m1, floor=r - c, cap=L)
    if f0 is None:
        raise WindowError(f"CP path missing at level 0 for pair ({m0}, {m1})")
    levels = [
        FanLevel(rays=[gamma0, gamma1], markers=[m0, m1], f_segments=[tuple(f0)], spacings=[d01])
    ]
    transitions: Dict[Tuple[int, int], List[FanTransition]] = {}

    for i in range(N):
        level = levels[i]
        arc_next = r + i + 1
        new_rays: List[Tuple[int, ...]] = []
        new_markers: List[int] = []
        new_segments: List[Tuple[int, ...]] = []
        new_spacings: List[int] = []
        for j, seg in enumerate(level.f_segments):
            # alpha_j at most unit speed on [0, L]
            def alpha(k: int) -> int:
                return seg[min(k, len(seg) - 1)]

            trans: List[FanTransition] = []
            step_rays: List[Tuple[int, ...]] = [level.rays[j]]
            # k = 0 uses the marker's own ray
            trans.append(
                FanTransition(
                    path_point=alpha(0),
                    ray_point=level.markers[j],
                    approach=(alpha(0),),
                    ray_index=0,
                )
            )
            for k in range(1, L):
                v_k = alpha(k)
                ray_k = ray_through(ball, v_k, c)
                # y_k: nearest ray vertex to alpha_j(k), ties by arc position
                near = bfs_distances(ball, [v_k], cutoff=c)
                y_k = None
                for arc_pos, u in enumerate(ray_k):
                    d = near.get(u)
                    if d is not None and (y_k is None or d < y_k[0]):
                        y_k = (d, arc_pos, u)
                if y_k is None:
                    raise WindowError(f"ray through alpha({k}) misses it by more than c")
                y_k = y_k[2]
                approach = _short_geodesic(ball, v_k, y_k, c)
                # z_k scan: first ray vertex with dist >= r+i+1 AND within
                # 2c+1 of y_k (arc difference is exact distance on a geodesic)
                y_arc = ball.dist[y_k]
                z_ok = any(
                    ball.dist[z] >= arc_next and abs(ball.dist[z] - y_arc) <= 2 * c + 1
                    for z in ray_k
                )
                if not z_ok:
                    raise WindowError(
                        f"no z point within 2c+1 on the ray through alpha({k}) (window error)"
                    )
                step_rays.append(ray_k)
                trans.append(
                    FanTransition(
                        path_point=v_k, ray_point=y_k, approach=tuple(approach), ray_index=k
                    )
                )
            step_rays.append(level.rays[j + 1])
            trans.append(
                FanTransition(
                    path_point=alpha(L),
                    ray_point=level.markers[j + 1],
                    approach=tuple(),
                    ray_index=L,
                )
            )
            transitions[(i, j)] = trans
            # new markers and connecting paths at level i+1
            marker_pts = [ray[arc_next] for ray in step_rays]
            for k in range(L):
                a, b = marker_pts[k], marker_pts[k + 1]
                d_ab = bounded_distance(ball, a, b, cap=M)
                if d_ab is None or d_ab > M:
                    raise WindowError(
                        f"marker spacing at level {i + 1} pair (j={j}, k={k}) exceeds M"
                    )
                path = complement_path(ball, a, b, floor=arc_next - c, cap=L)
                if path is None:
                    raise WindowError(
                        f"CP path missing at level {i + 1} for pair ({a}, {b}); window or M too small"
                    )
                new_segments.append(tuple(path))
                new_spacings.append(d_ab)
            # assemble rays/markers, avoiding duplicating shared boundary rays
            if not new_rays:
                new_rays.extend(step_rays)
                new_markers.extend(marker_pts)
            else:
                new_rays.extend(step_rays[1:])
                new_markers.extend(marker_pts[1:])
        levels.append(
            FanLevel(
                rays=new_rays,
                markers=new_markers,
                f_segments=new_segments,
                spacings=new_spacings,
            )
        )

    P = tuple(_short_geodesic(ball, p, gamma0[r], 2 * c + 1))
    Q = tuple(_short_geodesic(ball, q, gamma1[r], 2 * c + 1))
    return Fan(
        p=p,
        q=q,
        base_r=r,
        N=N,
        M=M,
        c=c,
        L=L,
        delta=delta,
        levels=levels,
        P=P,
        Q=Q,
        transitions=transitions,
    )


def _short_geodesic(ball, u: int, v: int, cap: int) -> List[int]:
    if u == v:
        return [u]
    dmap = bfs_distances(ball, [v], cutoff=cap + 1)
    if u not in dmap:
        raise WindowError(f"no short geodesic from {u} to {v} within {cap}")
    path = [u]
    cur = u
    while cur != v:
        best = None
        for l in ball.letters:
            w = ball.step(cur, l)
            if w >= 0 and dmap.get(w, -1) == dmap[cur] - 1:
                if best is None or letter_key(l) < letter_key(best[0]):
                    best = (l, w)
        cur = best[1]
        path.append(cur)
    return path


# ---------------------------------------------------------------------------
# Fan verification: the ladder decomposition, cell by cell


def _loop_from_path_cycle(cx, cycle_vertices: List[int]) -> Loop:
    ball = cx.ball
    letters = path_letters(ball, cycle_vertices)
    return make_loop(ball, cycle_vertices[0], letters)


def _ray_portion(ray: Sequence[int], a: int, b: int) -> List[int]:
    """Vertices of the ray from arc a to arc b (either direction)."""
    if a <= b:
        return list(ray[a : b + 1])
    return list(reversed(ray[b : a + 1]))


def _segment_portion(path: Sequence[int], u: int, v: int) -> List[int]:
    iu = path.index(u)
    iv = path.index(v)
    if iu <= iv:
        return list(path[iu : iv + 1])
    return list(reversed(path[iv : iu + 1]))


@dataclass
class FanVerification:
    verdict: str  # "null_homotopic" | "unknown"
    n_cells: int
    filled: int
    unknown: int
    cells: List[dict]
    base_loop: dict

    @property
    def all_filled(self):
        return self.unknown == 0


def verify_fan_filling(
    cx, fan: Fan, n: int, budget: Optional[SearchBudget] = None
) -> FanVerification:
    """Fill the ladder decomposition of the fan boundary loop cell by cell outside B(n).

    Decomposes into the base loop and, per level transition, the sub-cells
    bounded by consecutive rays, beta paths and f-portions; each is filled
    via fill_outside.  The verdict is null_homotopic only if every cell
    filled.
    """
    ball = cx.ball
    budget = budget or SearchBudget()
    r, c, L = fan.base_r, fan.c, fan.L
    cells = []
    # base loop: P . f_0 . Q^-1 . edge qp
    base_loop_cycle = list(fan.P)
    f0 = fan.f_path(0)
    assert base_loop_cycle[-1] == f0[0]
    base_loop_cycle.extend(f0[1:])
    qpath = list(reversed(fan.Q))
    assert base_loop_cycle[-1] == qpath[0]
    base_loop_cycle.extend(qpath[1:])
    base_loop_cycle.append(fan.p)
    base = _loop_from_path_cycle(cx, base_loop_cycle)
    base_fill = fill_outside(cx, base, n, budget)
    base_loop = {
        "length": len(base.letters),
        "min_dist": base.min_dist,
        "outcome": base_fill.outcome,
        "length_bound": L + 4 * c + 2,
        "length_ok": len(base.letters) <= L + 4 * c + 2,
    }
    filled = 1 if base_fill.filled else 0
    unknown = 0 if base_fill.filled else 1

    for i in range(fan.N):
        level = fan.levels[i]
        nxt = fan.levels[i + 1]
        arc, arc_next = r + i, r + i + 1
        for j, seg in enumerate(level.f_segments):
            trans = fan.transitions[(i, j)]
            for k in range(L):
                t0, t1 = trans[k], trans[k + 1]
                ray0 = nxt.rays[j * L + t0.ray_index]
                ray1 = nxt.rays[j * L + t1.ray_index]
                w0, w1 = ray0[arc_next], ray1[arc_next]
                cycle: List[int] = []

                def extend(piece):
                    nonlocal cycle
                    if not piece:
                        return
                    if cycle:
                        assert cycle[-1] == piece[0], "fan decomposition does not close up"
                        cycle.extend(piece[1:])
                    else:
                        cycle.extend(piece)

                beta0 = list(t0.approach) or [t0.path_point]
                beta1 = list(t1.approach) or [t1.path_point]
                extend(beta0 if beta0[0] == t0.path_point else list(reversed(beta0)))
                extend(_ray_portion(ray0, ball.dist[t0.ray_point], arc_next))
                extend(list(nxt.f_segments[j * L + k]))
                extend(_ray_portion(ray1, arc_next, ball.dist[t1.ray_point]))
                rev_beta1 = beta1 if beta1[-1] == t1.path_point else list(reversed(beta1))
                extend(rev_beta1)
                extend(_segment_portion(seg, t1.path_point, t0.path_point))
                if cycle[0] != cycle[-1]:
                    raise WindowError("fan decomposition failed to close up")
                loop = _loop_from_path_cycle(cx, cycle[:-1] + [cycle[-1]])
                res = fill_outside(cx, loop, n, budget)
                bound = 2 * L + 4 * c - 1
                cells.append(
                    {
                        "i": i,
                        "j": j,
                        "k": k,
                        "length": len(loop.letters),
                        "length_bound": bound,
                        "length_ok": len(loop.letters) <= bound,
                        "min_dist": loop.min_dist,
                        "dist_floor": arc - 2 * c,
                        "outcome": res.outcome,
                    }
                )
                if res.filled:
                    filled += 1
                else:
                    unknown += 1
    verdict = "null_homotopic" if unknown == 0 else "unknown"
    return FanVerification(
        verdict=verdict,
        n_cells=len(cells) + 1,
        filled=filled,
        unknown=unknown,
        cells=cells,
        base_loop=base_loop,
    )


def fan_to_dict(ball, fan: Fan, report: Optional[dict] = None) -> dict:
    fmt = ball.model.alphabet.format_word
    data = {
        "p": fmt(ball.words[fan.p]),
        "q": fmt(ball.words[fan.q]),
        "base_r": fan.base_r,
        "N": fan.N,
        "M": fan.M,
        "c": fan.c,
        "L": fan.L,
        "delta": fan.delta,
        "levels": [
            {
                "markers": [fmt(ball.words[m]) for m in level.markers],
                "f_length": len(fan.f_path(i)) - 1,
                "spacings": level.spacings,
                "n_rays": len(level.rays),
            }
            for i, level in enumerate(fan.levels)
        ],
        "invariants": fan.invariant_report(ball),
    }
    if report is not None:
        data["verification"] = report
    return data
