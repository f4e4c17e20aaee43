from fractions import Fraction

import pytest

from cayleykit.ends import (
    complement_components,
    dead_ends,
    end_depth_sample,
    end_depth_table,
    end_depth_window,
    rough_equiv,
)
from cayleykit.errors import PreconditionError
from cayleykit.growth import GrowthTable, Sample
from cayleykit.zoo import zoo_group


def test_z2_complement_connected(z2_ball8):
    cs = complement_components(z2_ball8, 3)
    assert len(cs.components) == 1
    assert cs.boundary_touching == [True]


def test_free2_complement_components(free2_ball5):
    cs = complement_components(free2_ball5, 2)
    assert len(cs.components) == 36  # 4 * 3^2 branches
    assert all(cs.boundary_touching)


def test_components_partition(free2_ball5, z2_ball8):
    for ball, r in ((free2_ball5, 2), (z2_ball8, 3)):
        cs = complement_components(ball, r)
        seen = set()
        for members in cs.components:
            assert not (seen & set(members))
            seen.update(members)
        expected = {v for v in range(ball.n) if ball.dist[v] > r}
        assert seen == expected


def test_component_radius_bound(z2_ball8):
    with pytest.raises(PreconditionError):
        complement_components(z2_ball8, 8)


def test_z2_end_depth_exact(z2):
    table = end_depth_table(z2, 8)
    for s in table.samples:
        assert s.value == s.r
        assert s.mode == "exact"
        assert s.window_R == end_depth_window(s.r, 2) or s.r == 0


def test_end_depth_window_factor():
    assert end_depth_window(3, 2) == 8
    assert end_depth_window(3, Fraction(5, 2)) == 10
    with pytest.raises(PreconditionError):
        end_depth_table(zoo_group("Zd:2"), 2, window_factor=1)


def test_window_stability_z2(z2):
    """V0 computed with window factors 2 and 3 agree for r <= 6."""
    t2 = end_depth_table(z2, 6, window_factor=2)
    t3 = end_depth_table(z2, 6, window_factor=3)
    for a, b in zip(t2.samples, t3.samples):
        assert a.value == b.value


def test_window_stability_surface2(surface2, surface2_ball6):
    """Window factors 2 and 3 agree at the radius the window supports."""
    s2 = end_depth_sample(surface2_ball6.restrict(end_depth_window(1, 2)), 1)
    s3 = end_depth_sample(surface2_ball6.restrict(end_depth_window(1, 3)), 1)
    assert s2.value == s3.value == 1


def test_lamplighter_interior_components_from_dead_ends(lamplighter_ball9):
    """A dead end of depth d isolates above r = dist - 1, giving an
    interior component and pushing V0 beyond r there."""
    ball = lamplighter_ball9
    dead = dead_ends(ball)
    assert dead
    v, depth = dead[0]
    assert depth > 1
    r = ball.dist[v] - 1
    view = ball.restrict(8)
    cs = complement_components(view, r)
    interior = [m for m, t in zip(cs.components, cs.boundary_touching) if not t]
    assert any(v in m for m in interior)
    sample = end_depth_sample(view, r)
    assert sample.value > r
    # at small radii the complement stays connected: no interior pocket
    cs3 = complement_components(view, 3)
    assert cs3.n_interior == 0


def test_dead_ends_z2_free2_empty(z2_ball8, free2_ball5):
    assert dead_ends(z2_ball8) == []
    assert dead_ends(free2_ball5) == []


def test_lamplighter_dead_ends(lamplighter_ball9):
    dead = dead_ends(lamplighter_ball9)
    assert dead
    ball = lamplighter_ball9
    for v, depth in dead:
        assert depth >= 1
        assert all(ball.dist[u] <= ball.dist[v] for _, u in ball.neighbors(v))


def test_v0_zero_sample(z2):
    table = end_depth_table(z2, 0)
    assert table.samples[0].value == 0


def _table(vals, mode="exact"):
    return GrowthTable(
        "end_depth", [Sample(r, v, mode, 2 * r + 2) for r, v in vals], {}
    )


def test_rough_equiv_examples():
    f = _table([(r, r) for r in range(1, 9)])
    g = _table([(r, 2 * r + 3) for r in range(1, 9)])
    w = rough_equiv(f, g)
    assert w.as_tuple() == (1, 1, 0, 2, 1, 3)
    # identity witness
    w2 = rough_equiv(f, f)
    assert w2.as_tuple() == (1, 1, 0, 1, 1, 0)
    # quadratic escapes every linear envelope on the grid
    q = _table([(r, r * r) for r in range(1, 9)])
    assert rough_equiv(f, q, grid_limit=4) is None


def test_rough_equiv_preconditions():
    f = _table([(r, r) for r in range(1, 9)])
    sci = GrowthTable("sci", [Sample(r, r, "exact", 8) for r in range(1, 9)], {})
    with pytest.raises(PreconditionError):
        rough_equiv(f, sci)
    short = _table([(1, 1), (2, 2)])
    with pytest.raises(PreconditionError):
        rough_equiv(f, short)


def test_multi_ended_end_depth_variant(free2):
    """Multi-ended models report the per-boundary-component maximum; with
    no interior pockets every sample is exact and equals r."""
    table = end_depth_table(free2, 4)
    assert not free2.one_ended
    for s in table.samples:
        assert s.value == s.r
        assert s.mode == "exact"
