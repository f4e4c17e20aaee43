"""Finite radius-R balls of Cayley graphs and 2-complexes.

Vertices are group elements of word length <= R, indexed in shortlex
discovery order (so ids are sorted by exact distance from the identity,
then shortlex).  Edges with an endpoint outside the ball are not stored;
callers that analyze complements must use a window strictly larger than
the radii of interest.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .errors import BudgetError, PreconditionError, WindowError
from .words import Word, free_multiply, letter_key
from .zoo import GroupModel


class CayleyBall:
    """All elements of word length <= radius with exact distances."""

    def __init__(self, model: GroupModel, radius: int):
        self.model = model
        self.radius = radius
        self.letters: Tuple[int, ...] = model.alphabet.letters
        self.deg = len(self.letters)
        self.slot = {l: i for i, l in enumerate(self.letters)}
        self.words: List[Word] = []
        self.dist: List[int] = []
        self.adj: List[int] = []
        self.level_start: List[int] = [0]
        self._key_to_id = {}
        self._buckets = {}
        self._bucket_states: List[tuple] = []

    # -- graph interface ----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.words)

    def step(self, v: int, letter: int) -> int:
        """Neighbor id of v along letter, or -1 if outside the ball."""
        return self.adj[v * self.deg + self.slot[letter]]

    def neighbors(self, v: int):
        base = v * self.deg
        for i, l in enumerate(self.letters):
            u = self.adj[base + i]
            if u >= 0:
                yield l, u

    def sphere_ids(self, r: int) -> range:
        if r > self.radius:
            raise PreconditionError(f"sphere radius {r} exceeds ball radius {self.radius}")
        lo = self.level_start[r]
        hi = self.level_start[r + 1] if r + 1 < len(self.level_start) else self.n
        return range(lo, hi)

    def restrict(self, radius: int) -> "BallView":
        return BallView(self, radius)

    # -- lookups ------------------------------------------------------------

    def vertex_for_word(self, word: Sequence[int]) -> Optional[int]:
        """Vertex representing the word, or None when it walks outside."""
        v = 0
        for l in word:
            v = self.step(v, l)
            if v < 0:
                return self._vertex_by_key(word)
        return v

    def _vertex_by_key(self, word) -> Optional[int]:
        solver = self.model.solver
        if solver.exact_key:
            return self._key_to_id.get(solver.key(tuple(word)))
        bucket = self._buckets.get(solver.bucket_key(tuple(word)))
        if not bucket:
            return None
        for vid in bucket:
            if solver.equal(tuple(word), self.words[vid]):
                return vid
        return None

    def walk(self, v: int, word: Sequence[int]) -> List[int]:
        """Vertex path of a word read from v; raises WindowError if it exits."""
        path = [v]
        for l in word:
            v = self.step(v, l)
            if v < 0:
                raise WindowError("path leaves the ball window")
            path.append(v)
        return path


class BallView:
    """A ball restricted to a smaller radius, sharing the parent's arrays."""

    def __init__(self, parent: CayleyBall, radius: int):
        if radius > parent.radius:
            raise PreconditionError("view radius exceeds parent radius")
        self.parent = parent
        self.model = parent.model
        self.radius = radius
        self.letters = parent.letters
        self.deg = parent.deg
        self.slot = parent.slot
        self.words = parent.words
        self.dist = parent.dist
        self.level_start = parent.level_start
        hi = radius + 1
        self.n = (
            parent.level_start[hi] if hi < len(parent.level_start) else parent.n
        )

    def step(self, v: int, letter: int) -> int:
        u = self.parent.step(v, letter)
        return u if u < self.n else -1

    def neighbors(self, v: int):
        for l, u in self.parent.neighbors(v):
            if u < self.n:
                yield l, u

    def sphere_ids(self, r: int) -> range:
        if r > self.radius:
            raise PreconditionError(f"sphere radius {r} exceeds view radius {self.radius}")
        return self.parent.sphere_ids(r)

    def restrict(self, radius: int) -> "BallView":
        return BallView(self.parent, radius)

    def vertex_for_word(self, word):
        vid = self.parent.vertex_for_word(word)
        return vid if vid is not None and vid < self.n else None

    def walk(self, v: int, word: Sequence[int]) -> List[int]:
        path = [v]
        for l in word:
            v = self.step(v, l)
            if v < 0:
                raise WindowError("path leaves the ball window")
            path.append(v)
        return path


def build_ball(
    model: GroupModel,
    radius: int,
    max_vertices: int = 2_000_000,
    pre_estimate: bool = True,
) -> CayleyBall:
    """BFS enumeration with solver-keyed deduplication.

    Deterministic: vertices are discovered in shortlex order level by
    level, so the stored word of each vertex is its shortlex-least
    geodesic representative.
    """
    if radius < 0:
        raise PreconditionError("radius must be >= 0")
    if pre_estimate:
        estimate = model.estimate_ball(radius)
        if estimate > 6 * max_vertices:
            raise BudgetError(
                f"{model.name} ball of radius {radius} is estimated at {estimate} vertices,"
                f" beyond the budget of {max_vertices}",
                reached=0,
            )
    ball = CayleyBall(model, radius)
    solver = model.solver
    exact = solver.exact_key
    deg = ball.deg

    ball.words.append(())
    ball.dist.append(0)
    ball.adj.extend([-1] * deg)
    if exact:
        ball._key_to_id[solver.key(())] = 0
    else:
        state = solver.bucket_start()
        ball._bucket_states.append(state)
        ball._buckets[state] = [0]
    ball.level_start.append(1)

    frontier = [0]
    for level in range(radius):
        for v in frontier:
            wv = ball.words[v]
            base = v * deg
            for slot_i, l in enumerate(ball.letters):
                if ball.adj[base + slot_i] >= 0:
                    continue
                cand = free_multiply(wv, (l,))
                if exact:
                    key = solver.key(cand)
                    u = ball._key_to_id.get(key, -1)
                else:
                    key = solver.bucket_step(ball._bucket_states[v], l)
                    u = -1
                    bucket = ball._buckets.get(key)
                    if bucket:
                        for cand_id in bucket:
                            if solver.equal(cand, ball.words[cand_id]):
                                u = cand_id
                                break
                if u < 0:
                    u = ball.n
                    if u >= max_vertices:
                        raise BudgetError(
                            f"{model.name} ball of radius {radius} exceeded the vertex budget",
                            reached=u,
                        )
                    ball.words.append(cand)
                    ball.dist.append(level + 1)
                    ball.adj.extend([-1] * deg)
                    if exact:
                        ball._key_to_id[key] = u
                    else:
                        ball._bucket_states.append(key)
                        ball._buckets.setdefault(key, []).append(u)
                ball.adj[base + slot_i] = u
                ball.adj[u * deg + ball.slot[-l]] = v
        frontier = list(range(ball.level_start[-1], ball.n))
        ball.level_start.append(ball.n)
    if not exact:
        ball._bucket_states = []  # only needed during construction
    return ball


# ---------------------------------------------------------------------------
# Distances and geodesics inside a ball


def bfs_distances(
    ball,
    sources: Iterable[int],
    allowed: Optional[Callable[[int], bool]] = None,
    cutoff: Optional[int] = None,
):
    """Dict of graph distances from a source set, optionally restricted."""
    dist = {}
    queue = deque()
    for s in sources:
        if s not in dist and (allowed is None or allowed(s)):
            dist[s] = 0
            queue.append(s)
    while queue:
        v = queue.popleft()
        d = dist[v]
        if cutoff is not None and d >= cutoff:
            continue
        for _, u in ball.neighbors(v):
            if u not in dist and (allowed is None or allowed(u)):
                dist[u] = d + 1
                queue.append(u)
    return dist


def pair_distance(ball, u: int, v: int) -> Tuple[int, bool]:
    """BFS distance inside the ball with a sound exactness flag.

    The flag is True when a true geodesic must fit inside the ball: any
    geodesic between u and v stays within (dist(u)+dist(v)+d)/2 of the
    identity, so the BFS value equals the group distance whenever that
    bound is at most R.  Otherwise the value is an upper bound.
    """
    if u == v:
        return 0, True
    dist = {u: 0}
    queue = deque([u])
    while queue:
        w = queue.popleft()
        d = dist[w]
        for _, x in ball.neighbors(w):
            if x not in dist:
                if x == v:
                    value = d + 1
                    return value, midpoint_exact(ball, u, v, value)
                dist[x] = d + 1
                queue.append(x)
    raise WindowError("vertices lie in different components of the ball graph")


def midpoint_exact(ball, u: int, v: int, value: int) -> bool:
    """A geodesic from u to v stays within (dist(u)+dist(v)+d)/2 of the
    identity; below R this certifies the ball distance is the group
    distance."""
    return ball.dist[u] + ball.dist[v] + value <= 2 * ball.radius


def canonical_geodesic(ball, u: int, v: int) -> Optional[List[int]]:
    """Shortlex-least geodesic label path u -> v inside the ball."""
    if u == v:
        return [u]
    dist_v = bfs_distances(ball, [v])
    if u not in dist_v:
        return None
    path = [u]
    cur = u
    while cur != v:
        best = None
        for l in ball.letters:
            w = ball.step(cur, l)
            if w >= 0 and dist_v.get(w, -1) == dist_v[cur] - 1:
                if best is None or letter_key(l) < letter_key(best[0]):
                    best = (l, w)
        cur = best[1]
        path.append(cur)
    return path


@dataclass
class GeodesicSegment:
    """A path that is geodesic in the ball graph."""

    vertices: Tuple[int, ...]

    def __len__(self):
        return len(self.vertices) - 1


def is_ball_geodesic(ball, vertices: Sequence[int]) -> bool:
    for a, b in zip(vertices, vertices[1:]):
        if b not in [u for _, u in ball.neighbors(a)]:
            return False
    d, _ = pair_distance(ball, vertices[0], vertices[-1])
    return d == len(vertices) - 1


def _descend(ball, start: int, dist_map: dict) -> List[int]:
    """Walk from start to the source of dist_map taking least letters."""
    path = [start]
    cur = start
    while dist_map[cur] > 0:
        best = None
        for l in ball.letters:
            w = ball.step(cur, l)
            if w >= 0 and dist_map.get(w, -1) == dist_map[cur] - 1:
                if best is None or letter_key(l) < letter_key(best[0]):
                    best = (l, w)
        cur = best[1]
        path.append(cur)
    return path


def geodesic_through(ball, v: int, n: int) -> GeodesicSegment:
    """A ball-geodesic segment through v extending up to n in both directions.

    Returns a path x ... v ... y with d(x,v) = m, d(v,y) = n' and
    d(x,y) = m + n', maximizing min(m, n') then m + n' (so homogeneous
    one-ended graphs yield m = n' = n whenever the window fits).  All
    searches are local: nothing beyond distance 2n from v is touched.
    """
    if ball.dist[v] + n > ball.radius:
        raise PreconditionError("search window does not fit: dist(v) + n > R")
    if n == 0:
        return GeodesicSegment((v,))
    local = bfs_distances(ball, [v], cutoff=n)
    by_level = {}
    for w, d in local.items():
        by_level.setdefault(d, []).append(w)
    for m in range(n, 0, -1):
        for n2 in range(n, m - 1, -1):
            for x in sorted(by_level.get(m, [])):
                dist_x = bfs_distances(ball, [x], cutoff=m + n2)
                for y in sorted(by_level.get(n2, [])):
                    if dist_x.get(y, -1) == m + n2:
                        leg1 = _descend(ball, x, local)
                        dist_y = bfs_distances(ball, [y], cutoff=n2)
                        leg2 = _descend(ball, v, dist_y)
                        path = leg1 + leg2[1:]
                        if len(path) - 1 == m + n2:
                            return GeodesicSegment(tuple(path))
    if ball.n == 1:
        return GeodesicSegment((v,))
    raise WindowError("no geodesic segment of positive length found")


# ---------------------------------------------------------------------------
# Cayley 2-complex


class CayleyComplexBall:
    """A ball plus the relator 2-cells whose support lies inside it."""

    def __init__(self, ball: CayleyBall):
        model = ball.model
        if not model.finitely_presented or model.presentation is None:
            raise PreconditionError(
                f"{model.name} is not finitely presented; 2-complex operations are rejected"
            )
        self.ball = ball
        self.cells: List[Tuple[Tuple[int, ...], Tuple[int, ...]]] = []
        self.cell_min_dist: List[int] = []
        self.edge_cells = {}
        self._build()

    def _build(self):
        from .words import cyclic_normal_form

        ball = self.ball
        canonical_relators = []
        seen = set()
        for r in ball.model.presentation.relators:
            c = cyclic_normal_form(r)
            if len(c) >= 3 and c not in seen:
                seen.add(c)
                canonical_relators.append(c)
        cell_keys = set()
        for v in range(ball.n):
            for rel in canonical_relators:
                verts = [v]
                ok = True
                cur = v
                for l in rel:
                    cur = ball.step(cur, l)
                    if cur < 0:
                        ok = False
                        break
                    verts.append(cur)
                if not ok or verts[-1] != v:
                    continue
                cycle = tuple(verts[:-1])
                key = self._cell_key(cycle, rel)
                if key in cell_keys:
                    continue
                cell_keys.add(key)
                cid = len(self.cells)
                self.cells.append((cycle, rel))
                self.cell_min_dist.append(min(ball.dist[u] for u in cycle))
                m = len(rel)
                for i in range(m):
                    a = cycle[i]
                    self.edge_cells.setdefault((a, rel[i]), []).append((cid, i, +1))
                    b = cycle[(i + 1) % m]
                    self.edge_cells.setdefault((b, -rel[i]), []).append((cid, i, -1))

    @staticmethod
    def _cell_key(cycle: Tuple[int, ...], letters: Tuple[int, ...]):
        m = len(cycle)
        reps = []
        for s in range(m):
            reps.append(tuple(cycle[(s + i) % m] for i in range(m)))
        rev = tuple(reversed(cycle))
        for s in range(m):
            reps.append(tuple(rev[(s + i) % m] for i in range(m)))
        return min(reps)

    @property
    def n_cells(self) -> int:
        return len(self.cells)


def build_complex(model: GroupModel, radius: int, **kwargs) -> CayleyComplexBall:
    return CayleyComplexBall(build_ball(model, radius, **kwargs))


# ---------------------------------------------------------------------------
# Export


def ball_to_dict(ball) -> dict:
    fmt = ball.model.alphabet.format_word
    return {
        "model": ball.model.name,
        "radius": ball.radius,
        "vertex_count": ball.n,
        "vertices": [
            {
                "index": v,
                "normal_form": fmt(ball.words[v]),
                "dist": ball.dist[v],
                "neighbors": [
                    [fmt((l,)), u] for l, u in ball.neighbors(v)
                ],
            }
            for v in range(ball.n)
        ],
    }


def ball_to_json(ball) -> str:
    return json.dumps(ball_to_dict(ball), sort_keys=True, separators=(",", ":"))


def ball_to_text(ball) -> str:
    fmt = ball.model.alphabet.format_word
    lines = [f"# model={ball.model.name} R={ball.radius} vertices={ball.n}"]
    for v in range(ball.n):
        nbrs = " ".join(f"{fmt((l,))}:{u}" for l, u in ball.neighbors(v))
        lines.append(f"{v}\t{fmt(ball.words[v]) or '1'}\t{ball.dist[v]}\t{nbrs}")
    return "\n".join(lines) + "\n"
