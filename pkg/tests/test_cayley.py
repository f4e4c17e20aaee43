import pytest

from cayleykit.cayley import (
    CayleyComplexBall,
    ball_to_json,
    bfs_distances,
    build_ball,
    geodesic_through,
    is_ball_geodesic,
    pair_distance,
)
from cayleykit.errors import BudgetError, PreconditionError
from cayleykit.words import word_key
from cayleykit.zoo import zoo_group

ZOO_SMALL = [
    "Zd:2",
    "Zd:3",
    "free:2",
    "racg:pentagon",
    "bs12",
    "lamplighter",
    "trefoil_amalgam",
    "zd2_diag",
]


def test_ball_counts_z2(z2):
    b = build_ball(z2, 2)
    assert b.n == 13
    assert [len(b.sphere_ids(r)) for r in range(3)] == [1, 4, 8]


def test_ball_counts_free2(free2):
    assert build_ball(free2, 3).n == 53  # 1 + 4 + 12 + 36


def test_ball_radius_zero(z2):
    b = build_ball(z2, 0)
    assert b.n == 1
    assert list(b.neighbors(0)) == []


def test_vertex_budget(z2):
    with pytest.raises(BudgetError):
        build_ball(z2, 8, max_vertices=10, pre_estimate=False)


@pytest.mark.parametrize("name", ZOO_SMALL)
def test_ball_self_consistency(name):
    """Stored dist equals BFS distance from the identity, R <= 6."""
    model = zoo_group(name)
    ball = build_ball(model, 6)
    dist = bfs_distances(ball, [0])
    assert len(dist) == ball.n
    for v in range(ball.n):
        assert dist[v] == ball.dist[v]
    # spheres partition the vertex set
    total = sum(len(ball.sphere_ids(r)) for r in range(7))
    assert total == ball.n


def test_surface2_self_consistency(surface2_ball6):
    ball = surface2_ball6
    dist = bfs_distances(ball, [0])
    assert all(dist[v] == ball.dist[v] for v in range(ball.n))


def test_interior_vertices_have_all_neighbors(z2_ball8):
    ball = z2_ball8
    for v in range(ball.n):
        if ball.dist[v] < ball.radius:
            assert all(ball.step(v, l) >= 0 for l in ball.letters)


def test_shortlex_vertex_indexing(z2_ball8):
    # ids sorted by (dist, shortlex of stored word)
    keys = [(ball_dist, word_key(w)) for ball_dist, w in zip(z2_ball8.dist, z2_ball8.words)]
    assert keys == sorted(keys)


def test_pair_distance_examples(z2, free2):
    b = build_ball(z2, 4)
    u = b.vertex_for_word((1, 1))
    v = b.vertex_for_word((2, 2))
    assert pair_distance(b, u, v) == (4, True)
    assert pair_distance(b, u, u) == (0, True)
    bf = build_ball(free2, 3)
    x = bf.vertex_for_word((1, 2, 1))
    y = bf.vertex_for_word((-2, -1, -2))
    d, exact = pair_distance(bf, x, y)
    assert d == 6
    assert exact is False  # conservative rule: 3 + 6 > 3


def test_homogeneity_spot_check(z2, free2):
    """The ball around a translated center is label-isomorphic to the
    ball around the identity (checked via the solver)."""
    for model, R in ((z2, 6), (free2, 5)):
        ball = build_ball(model, R)
        small = build_ball(model, 2)
        solver = model.solver
        for g in [ball.words[i] for i in list(ball.sphere_ids(2))[:5]]:
            gid = ball.vertex_for_word(g)
            for v in range(small.n):
                translated = ball.vertex_for_word(g + small.words[v])
                assert translated is not None
                for l, u in small.neighbors(v):
                    tu = ball.step(translated, l)
                    assert tu == ball.vertex_for_word(g + small.words[u])


def test_geodesic_through_examples(z2, free2):
    b = build_ball(z2, 6)
    v = b.vertex_for_word((1, 1))
    seg = geodesic_through(b, v, 2)
    assert v in seg.vertices
    assert len(seg.vertices) - 1 == 4
    assert is_ball_geodesic(b, seg.vertices)
    assert geodesic_through(b, 0, 0).vertices == (0,)
    bf = build_ball(free2, 5)
    w = bf.vertex_for_word((1, 2))
    seg2 = geodesic_through(bf, w, 2)
    assert is_ball_geodesic(bf, seg2.vertices)
    assert len(seg2.vertices) - 1 == 4


@pytest.mark.parametrize(
    "name", ["Zd:2", "Zd:3", "racg:pentagon", "bs12", "lamplighter", "trefoil_amalgam", "zd2_diag"]
)
def test_infgeod_proxy(name):
    """Every vertex of B(R-2) lies on a geodesic extending 2 both ways."""
    model = zoo_group(name)
    ball = build_ball(model, 6)
    n = 2
    cutoff = ball.level_start[ball.radius - n + 1]
    for v in range(cutoff):
        local = bfs_distances(ball, [v], cutoff=n)
        outer = [x for x, d in local.items() if d == n]
        found = False
        for x in outer:
            dist_x = bfs_distances(ball, [x], cutoff=2 * n)
            if any(dist_x.get(y, -1) == 2 * n for y in outer):
                found = True
                break
        assert found, f"{name}: vertex {v} has no through-geodesic"


def test_ball_view(z2_ball8):
    view = z2_ball8.restrict(4)
    assert view.n == 1 + 4 + 8 + 12 + 16
    full_sphere4 = list(z2_ball8.sphere_ids(4))
    for v in full_sphere4:
        assert all(u < view.n or view.step(v, l) == -1 for l, u in z2_ball8.neighbors(v) for l, u in [(l, u)])
    with pytest.raises(PreconditionError):
        view.sphere_ids(5)


def test_export_bit_stable(z2):
    a = ball_to_json(build_ball(z2, 3))
    b = ball_to_json(build_ball(z2, 3))
    assert a == b


def test_complex_cells_z3(z3_complex8):
    cx = z3_complex8
    # independent oracle: lattice squares with all four corners of l1 norm <= 8
    def norm(p):
        return sum(abs(c) for c in p)

    spans = [((1, 0, 0), (0, 1, 0)), ((1, 0, 0), (0, 0, 1)), ((0, 1, 0), (0, 0, 1))]
    expected = 0
    R = 8
    for x in range(-R, R + 1):
        for y in range(-R, R + 1):
            for z in range(-R, R + 1):
                base = (x, y, z)
                if norm(base) > R:
                    continue
                for e1, e2 in spans:
                    corners = [
                        base,
                        tuple(a + b for a, b in zip(base, e1)),
                        tuple(a + b for a, b in zip(base, e2)),
                        tuple(a + b + c for a, b, c in zip(base, e1, e2)),
                    ]
                    if all(norm(c) <= R for c in corners):
                        expected += 1
    assert cx.n_cells == expected
    # every cell closes up and is stored once
    ball = cx.ball
    for cycle, letters in cx.cells:
        assert len(cycle) == 4
        cur = cycle[0]
        for l in letters:
            cur = ball.step(cur, l)
        assert cur == cycle[0]
    keys = {CayleyComplexBall._cell_key(c, l) for c, l in cx.cells}
    assert len(keys) == cx.n_cells


def test_surface2_cell_spans(surface2_complex6):
    ball = surface2_complex6.ball
    for (cycle, _), mind in zip(surface2_complex6.cells, surface2_complex6.cell_min_dist):
        dists = [ball.dist[v] for v in cycle]
        assert min(dists) == mind
        assert max(dists) == mind + 4  # octagons span exactly 4 levels
