"""Van Kampen filling search in ball complements.

Loops are based cyclic edge words in a Cayley complex ball.  Fillings are
certificates: sequences of elementary moves (backtrack insertion or
deletion, 2-cell application, re-basing rotation) that transform the loop
into a constant loop while never touching a vertex of B(r).  Certificates
are verified by an independent replayer before being reported.

"unknown" is a first-class outcome; growth tables carry intervals.  The
only certified negative is the Z^2 winding obstruction, which every legal
move preserves.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .cayley import CayleyComplexBall, GeodesicSegment, build_complex
from .errors import PreconditionError, WindowError
from .growth import GrowthTable, Sample
from .zoo import GroupModel


@dataclass(frozen=True)
class Loop:
    base: int
    letters: Tuple[int, ...]
    min_dist: int

    def __len__(self):
        return len(self.letters)


class MoveError(PreconditionError):
    """A certificate move is illegal in the given complex/radius."""


def make_loop(ball, base: int, letters: Sequence[int]) -> Loop:
    verts = ball.walk(base, letters)
    if verts[-1] != base:
        raise PreconditionError("loop is not closed")
    return Loop(base=base, letters=tuple(letters), min_dist=min(ball.dist[v] for v in verts))


def loop_vertices(ball, loop: Loop) -> List[int]:
    return ball.walk(loop.base, loop.letters)[:-1] or [loop.base]


def parse_loop_literal(ball, text: str) -> Loop:
    """CLI loop literal: ``base=<normal form>; word=<letters>``."""
    base_word = None
    word = None
    for part in text.split(";"):
        key, _, value = part.strip().partition("=")
        if key.strip() == "base":
            base_word = value.strip()
        elif key.strip() == "word":
            word = value.strip()
    if word is None:
        raise PreconditionError("loop literal needs word=<letters>")
    alphabet = ball.model.alphabet
    base = 0
    if base_word:
        vid = ball.vertex_for_word(alphabet.parse_word(base_word))
        if vid is None:
            raise WindowError(f"base {base_word!r} is outside the ball")
        base = vid
    return make_loop(ball, base, alphabet.parse_word(word))


# ---------------------------------------------------------------------------
# Elementary moves and the independent replayer


def _move_tag(ball, verts: Sequence[int]) -> int:
    return min(ball.dist[v] for v in verts)


def apply_move(cx: CayleyComplexBall, loop: Loop, move: dict, r: int) -> Loop:
    """Apply one certificate move, checking legality and the radius constraint."""
    ball = cx.ball
    letters = list(loop.letters)
    n = len(letters)
    op = move["op"]
    if op == "rotate":
        d = move["delta"] % max(n, 1)
        verts = loop_vertices(ball, loop)
        base = verts[d] if n else loop.base
        new_letters = letters[d:] + letters[:d]
        return Loop(base, tuple(new_letters), loop.min_dist)
    if op == "slide":
        raise MoveError("slide moves are only legal in semistability replays")
    if op == "insert":
        p, l = move["pos"], move["letter"]
        if not 0 <= p <= n:
            raise MoveError(f"insert position {p} out of range")
        verts = loop_vertices(ball, loop)
        v = verts[p % max(n, 1)] if n else loop.base
        u = ball.step(v, l)
        if u < 0:
            raise MoveError("insert leaves the ball window")
        if ball.dist[u] <= r:
            raise MoveError(f"insert touches B({r})")
        new_letters = letters[:p] + [l, -l] + letters[p:]
        return Loop(loop.base, tuple(new_letters), min(loop.min_dist, ball.dist[u]))
    if op == "delete":
        p = move["pos"]
        if n < 2:
            raise MoveError("nothing to delete")
        q = (p + 1) % n
        if letters[p] != -letters[q]:
            raise MoveError("delete position is not a backtrack pair")
        if q == 0:
            # wrap deletion re-bases along the first letter
            verts = loop_vertices(ball, loop)
            new_base = verts[1] if n > 1 else loop.base
            new_letters = letters[1:p]
            return _remeasure(ball, new_base, new_letters)
        new_letters = letters[:p] + letters[p + 2 :]
        return _remeasure(ball, loop.base, new_letters)
    if op == "cell":
        cid, j, direction, s, p = (
            move["cell"],
            move["cell_pos"],
            move["direction"],
            move["span"],
            move["pos"],
        )
        cycle, clets = cx.cells[cid]
        m = len(clets)
        if not 1 <= s <= m:
            raise MoveError("bad cell span")
        cell_min = cx.cell_min_dist[cid]
        if cell_min <= r:
            raise MoveError(f"cell {cid} touches B({r})")
        verts = loop_vertices(ball, loop)
        if n == 0:
            raise MoveError("cannot apply a cell to a constant loop")
        # verify the matched span
        if direction == +1:
            for i in range(s):
                if letters[(p + i) % n] != clets[(j + i) % m]:
                    raise MoveError("loop does not match cell boundary (fwd)")
            if verts[p] != cycle[j]:
                raise MoveError("loop/cell vertex mismatch")
            repl = [-clets[(j - 1 - i) % m] for i in range(m - s)]
        else:
            for i in range(s):
                if letters[(p + i) % n] != -clets[(j - i) % m]:
                    raise MoveError("loop does not match cell boundary (bwd)")
            if verts[p] != cycle[(j + 1) % m]:
                raise MoveError("loop/cell vertex mismatch")
            repl = [clets[(j + 1 + i) % m] for i in range(m - s)]
        if p + s <= n:
            new_letters = letters[:p] + repl + letters[p + s :]
            new_base = loop.base
        else:
            # matched span wraps; rotate first so it does not
            d = p
            base = verts[d]
            rot = letters[d:] + letters[:d]
            new_letters = repl + rot[s:]
            new_base = base
        return _remeasure(ball, new_base, new_letters)
    raise MoveError(f"unknown move op {op!r}")


def _remeasure(ball, base: int, letters: List[int]) -> Loop:
    verts = ball.walk(base, letters)
    if verts[-1] != base:
        raise MoveError("move broke loop closure")
    return Loop(base, tuple(letters), min(ball.dist[v] for v in verts))


def replay_certificate(
    cx: CayleyComplexBall,
    loop: Loop,
    moves: Sequence[dict],
    r: int,
    expect_constant: bool = True,
) -> Loop:
    """Independent certificate validation.

    Replays every move with full legality checks; raises MoveError on any
    violation.  When expect_constant, the final loop must be empty.
    """
    cur = make_loop(cx.ball, loop.base, loop.letters)
    if cur.min_dist <= r:
        raise MoveError(f"input loop touches B({r})")
    for move in moves:
        cur = apply_move(cx, cur, move, r)
    if expect_constant and cur.letters:
        raise MoveError("certificate did not end at a constant loop")
    return cur


# ---------------------------------------------------------------------------
# Move generation


def _free_reduction_moves(cx, loop: Loop, r: int, based: bool = False) -> Tuple[Loop, List[dict]]:
    """Backtrack deletions to exhaustion; based mode never deletes across
    the base point (wrap deletions re-anchor the loop)."""
    moves = []
    cur = loop
    changed = True
    while changed and cur.letters:
        changed = False
        letters = cur.letters
        n = len(letters)
        last = n - 1 if based else n
        for p in range(last):
            q = (p + 1) % n
            if n >= 2 and letters[p] == -letters[q]:
                move = {"op": "delete", "pos": p}
                cur = apply_move(cx, cur, move, r)
                moves.append(move)
                changed = True
                break
        if changed:
            continue
        if not based and n >= 2 and letters[n - 1] == -letters[0]:
            move = {"op": "delete", "pos": n - 1}
            cur = apply_move(cx, cur, move, r)
            moves.append(move)
            changed = True
    return cur, moves


def _cell_moves_at(cx, loop: Loop, verts: List[int], p: int, r: int, based: bool = False):
    """All cell moves consuming a span starting at loop position p."""
    ball = cx.ball
    letters = loop.letters
    n = len(letters)
    out = []
    for cid, j, direction in cx.edge_cells.get((verts[p], letters[p]), []):
        if cx.cell_min_dist[cid] <= r:
            continue
        cycle, clets = cx.cells[cid]
        m = len(clets)
        max_span = min(m, n)
        if based:
            max_span = min(max_span, n - p)
        s = 1
        while s <= max_span:
            ok = True
            if direction == +1:
                if letters[(p + s - 1) % n] != clets[(j + s - 1) % m]:
                    ok = False
            else:
                if letters[(p + s - 1) % n] != -clets[(j - s + 1) % m]:
                    ok = False
            if not ok:
                break
            out.append(
                {
                    "op": "cell",
                    "pos": p,
                    "cell": cid,
                    "cell_pos": j,
                    "direction": direction,
                    "span": s,
                    "touched": cx.cell_min_dist[cid],
                }
            )
            s += 1
    return out


def _all_cell_moves(cx, loop: Loop, r: int):
    verts = loop_vertices(cx.ball, loop)
    out = []
    for p in range(len(loop.letters)):
        out.extend(_cell_moves_at(cx, loop, verts, p, r))
    return out


def _insert_moves(cx, loop: Loop, r: int):
    ball = cx.ball
    verts = loop_vertices(ball, loop)
    out = []
    n = len(loop.letters)
    for p in range(n + 1):
        v = verts[p % max(n, 1)] if n else loop.base
        for l in ball.letters:
            u = ball.step(v, l)
            if u >= 0 and ball.dist[u] > r:
                out.append({"op": "insert", "pos": p, "letter": l, "touched": ball.dist[u]})
    return out


# ---------------------------------------------------------------------------
# Dehn-style greedy shortening (exact filler for small cancellation complexes)


def _greedy_shorten(cx, loop: Loop, r: int, max_moves: int = 10_000, based: bool = False):
    """Apply length-reducing cell moves and free reductions while possible."""
    moves: List[dict] = []
    cur, ms = _free_reduction_moves(cx, loop, r, based=based)
    moves.extend(ms)
    steps = 0
    while cur.letters and steps < max_moves:
        steps += 1
        verts = loop_vertices(cx.ball, cur)
        n = len(cur.letters)
        best = None
        for p in range(n):
            for mv in _cell_moves_at(cx, cur, verts, p, r, based=based):
                m = len(cx.cells[mv["cell"]][1])
                gain = 2 * mv["span"] - m  # length delta is -gain
                if gain > 0:
                    cand = (gain, -p, -mv["cell"])
                    if best is None or cand > best[0]:
                        best = (cand, mv)
        if best is None:
            break
        cur = apply_move(cx, cur, best[1], r)
        moves.append(best[1])
        cur, ms = _free_reduction_moves(cx, cur, r, based=based)
        moves.extend(ms)
    return cur, moves


# ---------------------------------------------------------------------------
# Winding number obstruction (Z^2 lattice models)


def winding_number(cx, loop: Loop) -> int:
    """Signed crossings of the horizontal ray {(t, -1/2) : t > 1/2}.

    The ray's base point lies in the removed region for every r >= 1, and
    every legal move outside B(1) preserves the count, so a nonzero value
    certifies obstruction.
    """
    model = cx.ball.model
    if model.lattice_dims != 2:
        raise PreconditionError("winding numbers are defined for Zd(2) only")
    solver = model.solver
    verts = loop_vertices(cx.ball, loop)
    pts = [solver.exponents(cx.ball.words[v]) for v in verts]
    w = 0
    n = len(pts)
    for i in range(n):
        x1, y1 = pts[i]
        x2, y2 = pts[(i + 1) % n]
        if x1 == x2 and x1 >= 1:
            if y1 == -1 and y2 == 0:
                w += 1
            elif y1 == 0 and y2 == -1:
                w -= 1
    return w


# ---------------------------------------------------------------------------
# Structured lattice filler for Zd models


def _lattice_points(cx, loop: Loop):
    solver = cx.ball.model.solver
    verts = loop_vertices(cx.ball, loop)
    return verts, [solver.exponents(cx.ball.words[v]) for v in verts]


def _detect_plane(pts) -> Optional[Tuple[int, int]]:
    d = len(pts[0])
    varying = [i for i in range(d) if any(p[i] != pts[0][i] for p in pts)]
    if len(varying) > 2:
        return None
    while len(varying) < 2:
        varying.append(next(i for i in range(d) if i not in varying))
    return tuple(sorted(varying[:2]))


def _cell_windings(pts, plane):
    """Winding number of the loop around each dual cell of the plane grid."""
    i, j = plane
    edges = []
    n = len(pts)
    for k in range(n):
        p, q = pts[k], pts[(k + 1) % n]
        if p[i] == q[i] and abs(p[j] - q[j]) == 1:
            # vertical edge in the plane at x = p[i]
            ylow = min(p[j], q[j])
            edges.append((p[i], ylow, 1 if q[j] > p[j] else -1))
    windings: Dict[Tuple[int, int], int] = {}
    if not pts:
        return windings
    xs = [p[i] for p in pts]
    ys = [p[j] for p in pts]
    for y in range(min(ys), max(ys)):
        row = [(x, d) for (x, ylow, d) in edges if ylow == y]
        row.sort()
        total = 0
        acc = []
        for x, d in reversed(row):
            total += d
            acc.append((x, total))
        acc.reverse()
        # winding of cell with lower-left (x, y) = sum of signed crossings right of x
        for x in range(min(xs), max(xs)):
            w = 0
            for ex, cum in acc:
                if ex > x:
                    w = cum
                    break
            if w:
                windings[(x, y)] = w
    return windings


def _fill_lattice(cx, loop: Loop, r: int, max_moves: int = 20_000, based: bool = False):
    """Deterministic filler for loops of Zd models lying in a lattice plane.

    Peels enclosed allowed cells (reducing total |winding|); when only
    forbidden or missing cells remain enclosed, lifts the loop one level
    along a free axis, away from the origin.  Fails (returns None) when
    the window blocks a needed move.  All moves keep the base fixed in
    based mode, so the certificate doubles as a based nullhomotopy.
    """
    ball = cx.ball
    model = ball.model
    if not model.lattice_dims:
        return None
    solver = model.solver
    moves: List[dict] = []
    cur, ms = _free_reduction_moves(cx, loop, r, based=based)
    moves.extend(ms)

    def point_of(v):
        return solver.exponents(ball.words[v])

    def vertex_at(pt):
        word = []
        for axis, e in enumerate(pt, start=1):
            word.extend([axis if e > 0 else -axis] * abs(e))
        return ball.vertex_for_word(tuple(word))

    def cell_allowed(x, y, plane, fixed):
        i, j = plane
        for dx in (0, 1):
            for dy in (0, 1):
                pt = list(fixed)
                pt[i] = x + dx
                pt[j] = y + dy
                vid = vertex_at(tuple(pt))
                if vid is None or ball.dist[vid] <= r:
                    return False
        return True

    for _ in range(max_moves):
        if not cur.letters:
            return cur, moves
        verts, pts = _lattice_points(cx, cur)
        n = len(cur.letters)
        # based loops may carry a conjugating tail (lift certificates do);
        # the planar machinery works on the core between matched tail letters
        tail = 0
        if based:
            while (
                2 * (tail + 1) <= n
                and cur.letters[tail] == -cur.letters[n - 1 - tail]
            ):
                tail += 1
        core = range(tail, n - tail)
        if not core:
            cur2, ms = _free_reduction_moves(cx, cur, r, based=based)
            moves.extend(ms)
            if cur2.letters and cur2.letters == cur.letters:
                return None
            cur = cur2
            continue
        core_pts = [pts[p] for p in core] + [pts[core.stop % n]]
        plane = _detect_plane(core_pts)
        if plane is None:
            return None
        windings = _cell_windings(core_pts[:-1] if core.stop - core.start == n else core_pts, plane)             if False else _cell_windings(core_pts[:-1], plane)
        if not windings:
            cur2, ms = _free_reduction_moves(cx, cur, r, based=based)
            moves.extend(ms)
            if cur2.letters and cur2.letters == cur.letters:
                return None  # zero-winding loop should reduce; bail out
            cur = cur2
            continue
        fixed = list(core_pts[0])
        # try to peel an allowed enclosed cell adjacent to the core
        applied = False
        candidates = []
        for p in core:
            a, b = pts[p], pts[(p + 1) % n]
            for (cx2, cy2) in _incident_cells(a, b, plane):
                w = windings.get((cx2, cy2), 0)
                if w != 0:
                    candidates.append((cx2, cy2, p))
        seen = set()
        for cx2, cy2, p in sorted(candidates):
            if (cx2, cy2) in seen:
                continue
            seen.add((cx2, cy2))
            if not cell_allowed(cx2, cy2, plane, fixed):
                continue
            mv = _peel_move(
                cx, cur, verts, pts, plane, (cx2, cy2), windings[(cx2, cy2)], r, core
            )
            if mv is not None:
                cur = apply_move(cx, cur, mv, r)
                moves.append(mv)
                cur, ms = _free_reduction_moves(cx, cur, r, based=based)
                moves.extend(ms)
                applied = True
                break
        if applied:
            continue
        # all remaining enclosed cells blocked: lift the core along a free axis
        lift = _lift_moves(cx, cur, plane, r, core)
        if lift is None:
            return None
        for mv in lift:
            cur = apply_move(cx, cur, mv, r)
            moves.append(mv)
        cur, ms = _free_reduction_moves(cx, cur, r, based=based)
        moves.extend(ms)
    return None


def _incident_cells(a, b, plane):
    i, j = plane
    if a[i] == b[i]:  # vertical edge in plane
        x = a[i]
        y = min(a[j], b[j])
        return [(x, y), (x - 1, y)]
    y = a[j]
    x = min(a[i], b[i])
    return [(x, y), (x, y - 1)]


def _peel_move(cx, loop: Loop, verts, pts, plane, cell_xy, w, r, core=None) -> Optional[dict]:
    """A cell move along a shared edge that drives this cell's winding toward 0."""
    ball = cx.ball
    i, j = plane
    x, y = cell_xy
    n = len(loop.letters)
    positions = core if core is not None else range(n)
    for p in positions:
        a, b = pts[p], pts[(p + 1) % n]
        if (x, y) not in _incident_cells(a, b, plane):
            continue
        reference = pts[positions[0]] if core is not None else pts[0]
        for mv in _cell_moves_at(cx, loop, verts, p, r, based=core is not None):
            cycle, clets = cx.cells[mv["cell"]]
            cell_pts = [tuple(cx.ball.model.solver.exponents(ball.words[v])) for v in cycle]
            if not _cell_is_at(cell_pts, plane, (x, y), reference):
                continue
            if mv["span"] != 1:
                continue
            # orientation: applying the move adds or subtracts the cell boundary
            trial = apply_move(cx, loop, mv, r)
            new_w = _cell_windings(_lattice_points(cx, trial)[1], plane).get((x, y), 0)
            if abs(new_w) < abs(w):
                return mv
    return None


def _cell_is_at(cell_pts, plane, cell_xy, reference):
    i, j = plane
    x, y = cell_xy
    xs = sorted(p[i] for p in cell_pts)
    ys = sorted(p[j] for p in cell_pts)
    if xs[0] != x or xs[-1] != x + 1 or ys[0] != y or ys[-1] != y + 1:
        return False
    # must lie in the same plane slice as the loop
    others = [k for k in range(len(reference)) if k not in (i, j)]
    return all(all(p[k] == reference[k] for p in cell_pts) for k in others)


def _lift_moves(cx, loop: Loop, plane, r, core=None) -> Optional[List[dict]]:
    """Conjugate the loop core one level up a free axis via vertical cells."""
    ball = cx.ball
    model = ball.model
    d = model.lattice_dims
    free_axes = [k for k in range(d) if k not in plane]
    if not free_axes:
        return None
    verts, pts = _lattice_points(cx, loop)
    if core is None:
        core = range(len(loop.letters))
    k = free_axes[0]
    level = pts[core.start][k]
    direction = 1 if level >= 0 else -1
    up = (k + 1) * direction
    moves = []
    cur = loop
    start_vertex = verts[core.start]
    u = ball.step(start_vertex, up)
    if u < 0 or ball.dist[u] <= r:
        return None
    mv = {"op": "insert", "pos": core.start, "letter": up, "touched": ball.dist[u]}
    moves.append(mv)
    cur = apply_move(cx, cur, mv, r)
    n_core = core.stop - core.start
    for t in range(n_core):
        # after the insert the pattern is: ... up, -up, l_t, ...; swap
        # (-up, l_t) across the vertical square so the down edge walks along
        verts2 = loop_vertices(ball, cur)
        p = core.start + t + 1
        found = None
        for mv2 in _cell_moves_at(cx, cur, verts2, p, r):
            if mv2["span"] == 2:
                cycle, clets = cx.cells[mv2["cell"]]
                if len(clets) == 4:
                    trial = apply_move(cx, cur, mv2, r)
                    tl = trial.letters
                    if tl[: p] == cur.letters[: p] and len(tl) == len(cur.letters):
                        # want pattern: the down edge moved one step right
                        if tl[p] == cur.letters[p + 1] and tl[p + 1] == cur.letters[p]:
                            found = mv2
                            break
        if found is None:
            return None
        cur = apply_move(cx, cur, found, r)
        moves.append(found)
    return moves


# ---------------------------------------------------------------------------
# Bounded best-first loop search


def _canonical_state(ball, loop: Loop):
    n = len(loop.letters)
    if n == 0:
        return (loop.base, ())
    verts = loop_vertices(ball, loop)
    reps = []
    for s in range(n):
        reps.append(
            (tuple(verts[(s + i) % n] for i in range(n)), tuple(loop.letters[(s + i) % n] for i in range(n)), s)
        )
    best = min(reps, key=lambda t: (t[0], t[1]))
    return (best[0][0], best[1]), best[2]


@dataclass
class SearchBudget:
    max_states: int = 30_000
    max_len_factor: int = 2
    max_len_slack: int = 8

    def max_len(self, start_len: int) -> int:
        return self.max_len_factor * start_len + self.max_len_slack


def _best_first_fill(cx, loop: Loop, r: int, budget: SearchBudget):
    """Dijkstra-flavoured search over canonicalized loop states, shortest first."""
    import heapq

    ball = cx.ball
    start, _ = _canonical_state(ball, loop)
    start_loop = Loop(start[0], start[1], loop.min_dist)
    max_len = budget.max_len(len(loop.letters))
    counter = 0
    heap = [(len(start_loop.letters), 0, start)]
    parents = {start: (None, None, None)}  # state -> (prev_state, moves, rotation)
    expanded = 0
    while heap:
        _, _, state = heapq.heappop(heap)
        if not state[1]:
            return _reconstruct(cx, loop, parents, state, r)
        expanded += 1
        if expanded > budget.max_states:
            return None
        cur = _remeasure(ball, state[0], list(state[1]))
        verts = loop_vertices(ball, cur)
        moves = []
        n = len(cur.letters)
        for p in range(n):
            q = (p + 1) % n
            if cur.letters[p] == -cur.letters[q]:
                moves.append({"op": "delete", "pos": p})
        for p in range(n):
            moves.extend(_cell_moves_at(cx, cur, verts, p, r))
        if len(cur.letters) + 2 <= max_len:
            moves.extend(_insert_moves(cx, cur, r))
        for mv in moves:
            try:
                nxt = apply_move(cx, cur, mv, r)
            except MoveError:
                continue
            if len(nxt.letters) > max_len:
                continue
            nstate, rot = _canonical_state(ball, nxt)
            if nstate in parents:
                continue
            parents[nstate] = (state, mv, rot)
            counter += 1
            heapq.heappush(heap, (len(nstate[1]), counter, nstate))
    return None


def _reconstruct(cx, original: Loop, parents, goal, r):
    chain = []
    state = goal
    while True:
        prev, mv, rot = parents[state]
        if prev is None:
            break
        chain.append((mv, rot))
        state = prev
    chain.reverse()
    moves = []
    cur = make_loop(cx.ball, original.base, original.letters)
    # align the original loop with the canonical start state
    _, rot0 = _canonical_state(cx.ball, cur)
    if rot0 and cur.letters:
        mv = {"op": "rotate", "delta": rot0}
        moves.append(mv)
        cur = apply_move(cx, cur, mv, r)
    for mv, rot in chain:
        moves.append(mv)
        cur = apply_move(cx, cur, mv, r)
        if rot and cur.letters:
            rmv = {"op": "rotate", "delta": rot}
            moves.append(rmv)
            cur = apply_move(cx, cur, rmv, r)
    return moves


# ---------------------------------------------------------------------------
# fill_outside


@dataclass
class FillResult:
    outcome: str  # filled | unknown | obstructed
    certificate: Optional[List[dict]] = None
    obstruction: Optional[Tuple[str, int]] = None
    states_explored: int = 0
    note: str = ""

    @property
    def filled(self):
        return self.outcome == "filled"


def fill_outside(
    cx: CayleyComplexBall,
    loop: Loop,
    r: int,
    budget: Optional[SearchBudget] = None,
) -> FillResult:
    """Decide (within budget) whether the loop bounds a disk outside B(r).

    Pipeline: exact winding obstruction (Z^2), free/Dehn greedy
    shortening, the structured lattice filler, then bounded best-first
    search.  Filled certificates are replay-verified before return.
    """
    ball = cx.ball
    budget = budget or SearchBudget()
    if budget.max_states < 0:
        raise PreconditionError("budget parameters must be nonnegative")
    cur = make_loop(ball, loop.base, loop.letters)
    if cur.min_dist <= r:
        raise PreconditionError(f"loop touches B({r})")
    if r + 1 >= ball.radius:
        raise PreconditionError("need r + 1 < R so fillings have room")
    model = ball.model
    if model.planar_winding and r >= 1:
        w = winding_number(cx, cur)
        if w != 0:
            return FillResult(outcome="obstructed", obstruction=("winding", w))
    if budget.max_states == 0:
        return FillResult(outcome="unknown", note="zero budget")

    def finish(moves):
        replay_certificate(cx, loop, moves, r, expect_constant=True)
        return FillResult(outcome="filled", certificate=moves)

    shortened, moves0 = _greedy_shorten(cx, cur, r)
    if not shortened.letters:
        return finish(moves0)
    if model.lattice_dims:
        result = _fill_lattice(cx, shortened, r)
        if result is not None:
            final, moves1 = result
            if not final.letters:
                return finish(moves0 + moves1)
    found = _best_first_fill(cx, shortened, r, budget)
    if found is not None:
        return finish(moves0 + found)
    return FillResult(outcome="unknown", states_explored=budget.max_states)


# ---------------------------------------------------------------------------
# Probe families


def sphere_tracer(cx, plane: Tuple[int, int], rho: int) -> Optional[Loop]:
    """Zigzag loop tracing the l1 sphere of radius rho in a coordinate plane.

    Based at rho * e_i; winds once around the origin; min_dist = rho.
    """
    ball = cx.ball
    i, j = plane
    a, b = i + 1, j + 1
    quads = [(b, -a), (-a, -b), (-b, a), (a, b)]
    letters: List[int] = []
    for l1, l2 in quads:
        letters.extend([l1, l2] * rho)
    base = ball.vertex_for_word((a,) * rho)
    if base is None:
        return None
    try:
        return make_loop(ball, base, letters)
    except (PreconditionError, WindowError):
        return None


def probe_loops(
    cx: CayleyComplexBall,
    N: int,
    seed: int,
    n_random: int = 4,
    max_cells: int = 400,
) -> List[Loop]:
    """The documented deterministic probe family at base radius N.

    Members have min_dist >= N+1: (i) boundaries of 2-cells lying outside
    B(N); (ii) for lattice models, sphere tracers of radius N+1 in every
    coordinate plane; (iii) seeded random closed words from sphere(N+1)
    vertices, closed by shortest allowed return paths.
    """
    ball = cx.ball
    loops = []
    count = 0
    for cid, mind in enumerate(cx.cell_min_dist):
        if mind > N:
            cycle, clets = cx.cells[cid]
            loops.append(make_loop(ball, cycle[0], clets))
            count += 1
            if count >= max_cells:
                break
    if ball.model.lattice_dims:
        d = ball.model.lattice_dims
        for i in range(d):
            for j in range(i + 1, d):
                t = sphere_tracer(cx, (i, j), N + 1)
                if t is not None and t.min_dist > N:
                    loops.append(t)
    rng = random.Random(seed)
    sphere = list(ball.sphere_ids(min(N + 1, ball.radius)))
    from .cayley import bfs_distances

    attempts = 0
    made = 0
    while made < n_random and attempts < 20 * n_random and sphere:
        attempts += 1
        base = rng.choice(sphere)
        walk = [base]
        v = base
        length = rng.randint(2, max(3, N + 2))
        ok = True
        word = []
        for _ in range(length):
            options = [(l, u) for l, u in ball.neighbors(v) if ball.dist[u] > N]
            if not options:
                ok = False
                break
            l, u = rng.choice(options)
            word.append(l)
            v = u
        if not ok or v == base:
            if ok and v == base and word:
                loops.append(make_loop(ball, base, word))
                made += 1
            continue
        dist_back = bfs_distances(
            ball, [base], allowed=lambda x: ball.dist[x] > N
        )
        if v not in dist_back:
            continue
        # walk back greedily along the distance field
        back = []
        cur = v
        while cur != base:
            for l in ball.letters:
                u = ball.step(cur, l)
                if u >= 0 and ball.dist[u] > N and dist_back.get(u, -1) == dist_back[cur] - 1:
                    back.append(l)
                    cur = u
                    break
            else:
                ok = False
                break
        if not ok:
            continue
        loops.append(make_loop(ball, base, word + back))
        made += 1
    return loops


# ---------------------------------------------------------------------------
# sci growth table


def sci_growth_table(
    model: GroupModel,
    r_max: int,
    window: int,
    seed: int,
    budget: Optional[SearchBudget] = None,
    max_vertices: int = 2_000_000,
    cx: Optional[CayleyComplexBall] = None,
) -> GrowthTable:
    """Interval estimates of the sci growth V(r) from the probe family.

    For each r, probes are tested at increasing base radius N; N_high is
    the least N at which every probe filled, N_low the greatest N at which
    some probe failed (obstruction or budget).  Intervals never become
    point estimates unless an obstruction certifies the lower end.
    """
    if not model.finitely_presented:
        raise PreconditionError(f"{model.name} is not finitely presented")
    if not model.sci_candidate:
        raise PreconditionError(f"{model.name} is not flagged as an sci candidate")
    if cx is None:
        cx = build_complex(model, window, max_vertices=max_vertices)
    budget = budget or SearchBudget()
    samples = []
    notes = {}
    for r in range(1, r_max + 1):
        lo = None
        hi = None
        obstructed_all = True
        for N in range(r, window - 2):
            probes = probe_loops(cx, N, seed=seed + 1000 * r + N)
            outcomes = [fill_outside(cx, p, r, budget) for p in probes]
            if all(o.filled for o in outcomes):
                hi = N
                obstructed_all = False
                break
            lo = N
            if not any(o.outcome == "obstructed" for o in outcomes):
                obstructed_all = False
        samples.append(
            Sample(
                r=r,
                value=hi,
                mode="interval",
                window_R=window,
                lo=lo,
                hi=hi,
            )
        )
        if hi is None and obstructed_all:
            notes[str(r)] = "obstructed at every tested N"
    return GrowthTable(
        kind="sci",
        samples=samples,
        meta={
            "model": model.name,
            "window": window,
            "seed": seed,
            "probe_family": "annulus cell boundaries + sphere tracers + seeded random loops",
            "notes": notes,
        },
    )


# ---------------------------------------------------------------------------
# Semistability probes


@dataclass
class SemistabilityProbe:
    success: bool
    achieved_R: int
    certificate: List[dict]
    ray_positions: Tuple[int, ...]


def _slide_move(ball, ray: GeodesicSegment, loop: Loop, idx: int, delta: int, n: int):
    """Slide the base one step along the ray, wrapping the loop word."""
    new_idx = idx + delta
    if not 0 <= new_idx < len(ray.vertices):
        raise MoveError("slide leaves the ray")
    old = ray.vertices[idx]
    new = ray.vertices[new_idx]
    label = None
    for l, u in ball.neighbors(new):
        if u == old:
            label = l
            break
    if label is None:
        raise MoveError("ray vertices are not adjacent")
    if ball.dist[new] <= n:
        raise MoveError(f"slide touches B({n})")
    letters = (label,) + loop.letters + (-label,)
    return Loop(new, letters, min(loop.min_dist, ball.dist[new])), new_idx


def based_fill(cx, loop: Loop, n: int, budget: Optional[SearchBudget] = None):
    """Contract a loop to a constant at its own base, outside B(n).

    Every move keeps the base anchored, so the certificate is a based
    nullhomotopy (usable rel a ray through the base).  Returns the move
    list or None.
    """
    budget = budget or SearchBudget()
    cur, moves = _greedy_shorten(cx, loop, n, based=True)
    if not cur.letters:
        return moves
    if cx.ball.model.lattice_dims:
        got = _fill_lattice(cx, cur, n, based=True)
        if got is not None:
            final, more = got
            if not final.letters:
                return moves + more
    # based best-first: dedup on (base, letters), no rotations
    import heapq

    max_len = budget.max_len(len(loop.letters))
    counter = 0
    start = (cur.base, cur.letters)
    heap = [(len(cur.letters), 0, start)]
    parents = {start: (None, None)}
    expanded = 0
    ball = cx.ball
    while heap:
        _, _, state = heapq.heappop(heap)
        if not state[1]:
            chain = []
            while parents[state][0] is not None:
                state, mv = parents[state][0], parents[state][1]
                chain.append(mv)
            chain.reverse()
            return moves + chain
        expanded += 1
        if expanded > budget.max_states:
            return None
        cur2 = _remeasure(ball, state[0], list(state[1]))
        verts = loop_vertices(ball, cur2)
        nn = len(cur2.letters)
        cand = []
        for p in range(nn - 1):
            if cur2.letters[p] == -cur2.letters[p + 1]:
                cand.append({"op": "delete", "pos": p})
        for p in range(nn):
            cand.extend(_cell_moves_at(cx, cur2, verts, p, n, based=True))
        if nn + 2 <= max_len:
            cand.extend(_insert_moves(cx, cur2, n))
        for mv in cand:
            try:
                nxt = apply_move(cx, cur2, mv, n)
            except MoveError:
                continue
            if len(nxt.letters) > max_len:
                continue
            nstate = (nxt.base, nxt.letters)
            if nstate in parents:
                continue
            parents[nstate] = (state, mv)
            counter += 1
            heapq.heappush(heap, (len(nxt.letters), counter, nstate))
    return None


def semistability_probe(
    cx: CayleyComplexBall,
    ray: GeodesicSegment,
    loop: Loop,
    n: int,
    target_R: int,
    budget: Optional[SearchBudget] = None,
) -> SemistabilityProbe:
    """Push a ray-based loop outward rel the ray by moves outside B(n).

    First tries a based contraction (then slides the constant loop out
    along the ray); otherwise best-first search over (ray position, word)
    states maximizing the loop's minimum distance.  The achieved R' is
    maximal with the final loop outside B(R').
    """
    ball = cx.ball
    budget = budget or SearchBudget()
    if target_R >= ball.radius:
        raise PreconditionError("targetR must be < R")
    if loop.base not in ray.vertices:
        raise PreconditionError("loop base must lie on the ray")
    if loop.min_dist <= n:
        raise PreconditionError(f"loop touches B({n})")
    base_idx = ray.vertices.index(loop.base)

    contraction = based_fill(cx, loop, n, budget)
    if contraction is not None:
        moves = list(contraction)
        cur = replay_certificate(cx, loop, moves, n, expect_constant=True)
        idx = base_idx
        while ball.dist[ray.vertices[idx]] <= target_R and idx + 1 < len(ray.vertices):
            cur, idx = _slide_move(ball, ray, cur, idx, +1, n)
            moves.append({"op": "slide", "delta": +1})
            cur, ms = _free_reduction_moves(cx, cur, n, based=True)
            moves.extend(ms)
        final, positions = _replay_semistab(cx, ray, loop, moves, n)
        achieved = final.min_dist - 1
        return SemistabilityProbe(
            success=achieved >= target_R,
            achieved_R=achieved,
            certificate=moves,
            ray_positions=positions,
        )

    # greedy outward push: take strictly potential-reducing moves
    # (potential sum 4^(K - dist(v)) rewards bumping low vertices outward),
    # sliding up the ray when locally stuck.
    K = target_R + 1

    def potential(lp: Loop):
        verts = loop_vertices(ball, lp)
        return sum(4 ** max(0, K - ball.dist[v]) for v in verts)

    chain: List[dict] = []
    cur = _remeasure(ball, ray.vertices[base_idx], list(loop.letters))
    idx = base_idx
    cur_pot = potential(cur)
    max_len = budget.max_len(len(loop.letters)) + 2 * len(ray.vertices)
    steps = 0
    while cur.min_dist <= target_R and steps < budget.max_states:
        steps += 1
        verts = loop_vertices(ball, cur)
        nn = len(cur.letters)
        cand: List[dict] = []
        for p in range(nn - 1):
            if cur.letters[p] == -cur.letters[p + 1]:
                cand.append({"op": "delete", "pos": p})
        for p in range(nn):
            cand.extend(_cell_moves_at(cx, cur, verts, p, n, based=True))
        best_mv = None
        best_gain = None
        for mv in cand:
            try:
                nxt = apply_move(cx, cur, mv, n)
            except MoveError:
                continue
            if len(nxt.letters) > max_len:
                continue
            gain = (potential(nxt) - cur_pot, len(nxt.letters) - nn)
            if gain < (0, 0):
                if best_gain is None or gain < best_gain:
                    best_gain = gain
                    best_mv = (mv, nxt)
        if best_mv is not None:
            mv, nxt = best_mv
            chain.append(mv)
            cur = nxt
            cur_pot = potential(cur)
            continue
        # plateau: short best-first burst to find a strictly better state
        burst = _burst_improve(cx, cur, cur_pot, n, potential, max_len)
        if burst is not None:
            ms, cur = burst
            chain.extend(ms)
            cur_pot = potential(cur)
            continue
        # locally stuck: slide outward along the ray if possible
        if idx + 1 < len(ray.vertices):
            try:
                cur, idx = _slide_move(ball, ray, cur, idx, +1, n)
            except MoveError:
                break
            chain.append({"op": "slide", "delta": +1})
            cur, ms = _free_reduction_moves(cx, cur, n, based=True)
            chain.extend(ms)
            cur_pot = potential(cur)
            continue
        break
    final, positions = _replay_semistab(cx, ray, loop, chain, n)
    achieved = final.min_dist - 1
    return SemistabilityProbe(
        success=achieved >= target_R,
        achieved_R=achieved,
        certificate=chain,
        ray_positions=positions,
    )


def _burst_improve(cx, cur: Loop, cur_pot: int, n: int, potential, max_len: int, max_pops: int = 600):
    """Bounded based best-first from cur; returns the first strictly
    potential-reducing state reached, with its move chain."""
    import heapq

    ball = cx.ball
    start = (cur.base, cur.letters)
    heap = [((cur_pot, len(cur.letters)), 0, start)]
    parents = {start: (None, None)}
    counter = 0
    pops = 0
    while heap and pops < max_pops:
        (pot, _), _, state = heapq.heappop(heap)
        pops += 1
        lp = _remeasure(ball, state[0], list(state[1]))
        if pot < cur_pot:
            chain = []
            st = state
            while parents[st][0] is not None:
                st, mv = parents[st][0], parents[st][1]
                chain.append(mv)
            chain.reverse()
            return chain, lp
        verts = loop_vertices(ball, lp)
        nn = len(lp.letters)
        cand = []
        for p in range(nn - 1):
            if lp.letters[p] == -lp.letters[p + 1]:
                cand.append({"op": "delete", "pos": p})
        for p in range(nn):
            cand.extend(_cell_moves_at(cx, lp, verts, p, n, based=True))
        for mv in cand:
            try:
                nxt = apply_move(cx, lp, mv, n)
            except MoveError:
                continue
            if len(nxt.letters) > max_len:
                continue
            ns = (nxt.base, nxt.letters)
            if ns in parents:
                continue
            parents[ns] = (state, mv)
            counter += 1
            heapq.heappush(heap, ((potential(nxt), len(nxt.letters)), counter, ns))
    return None


def _replay_semistab(cx, ray, loop, moves, n):
    """Replay a rel-ray certificate; slides move the base along the ray only."""
    ball = cx.ball
    cur = make_loop(ball, loop.base, loop.letters)
    if cur.min_dist <= n:
        raise MoveError(f"input loop touches B({n})")
    idx = ray.vertices.index(loop.base)
    positions = [loop.base]
    for mv in moves:
        if mv["op"] == "slide":
            cur, idx = _slide_move(ball, ray, cur, idx, mv["delta"], n)
            positions.append(ray.vertices[idx])
        elif mv["op"] == "rotate":
            raise MoveError("rotation is not a rel-ray homotopy move")
        else:
            cur = apply_move(cx, cur, mv, n)
    if cur.base != ray.vertices[idx]:
        raise MoveError("semistability replay lost the ray base")
    return cur, tuple(positions)
