import pytest

from cayleykit.cayley import build_ball, build_complex
from cayleykit.errors import PreconditionError
from cayleykit.filling import SearchBudget
from cayleykit.hyperbolic import (
    build_fan,
    complement_path,
    cp_table,
    estimate_delta,
    extend_ray,
    fan_to_dict,
    geodesic_vertex_set,
    ray_constant,
    ray_through,
    verify_fan_filling,
    _triangle_defect,
)
from cayleykit.presentation import augment_presentation
from cayleykit.zoo import GroupModel, zoo_group


def test_delta_free2_is_zero(free2_ball5):
    est = estimate_delta(free2_ball5, rho=2)
    assert est.value == 0


def test_delta_z2_positive_nondecreasing(z2):
    ball = build_ball(z2, 9)
    values = [estimate_delta(ball, rho=rho).value for rho in (3, 4)]
    assert values[0] >= 1
    assert values[0] <= values[1]


def test_delta_degenerate_triple(z2_ball8):
    # three equal vertices have defect 0
    assert _triangle_defect(z2_ball8, (5, 5, 5), {}) == 0


def test_delta_requires_sampling_args(z2_ball8):
    with pytest.raises(PreconditionError):
        estimate_delta(z2_ball8)
    with pytest.raises(PreconditionError):
        estimate_delta(z2_ball8, count=10)  # seed missing


def test_delta_sampled_deterministic(surface2_ball6):
    a = estimate_delta(surface2_ball6, count=40, seed=5)
    b = estimate_delta(surface2_ball6, count=40, seed=5)
    assert a.value == b.value
    assert a.triangles == b.triangles


def test_ray_constant_free_and_z2(free2_ball5, z2_ball8):
    assert ray_constant(free2_ball5, 2) == 0
    assert ray_constant(z2_ball8, 2) == 0


def test_y_criterion_soundness(z2, free2):
    """Every vertex of Y lies on a reconstructible geodesic to the sphere."""
    for model in (z2, free2, zoo_group("trefoil_amalgam")):
        ball = build_ball(model, 6)
        Y, _ = geodesic_vertex_set(ball)
        for v in sorted(Y):
            ray = extend_ray(ball, v)
            assert ray[0] == 0
            assert v in ray
            assert ball.dist[ray[-1]] == ball.radius
            for i, u in enumerate(ray):
                assert ball.dist[u] == i  # arc length = distance: a geodesic


def test_cp_table_z2(z2_ball8):
    report = cp_table(z2_ball8, M=2, c=1, R_prime=6)
    assert not report.failures
    assert report.L_hat <= 6
    # soundness: reported paths exist at the stated length
    for x, y, true_d, comp in report.pairs:
        path = complement_path(z2_ball8, x, y, floor=5, cap=report.path_cap)
        assert path is not None
        assert len(path) - 1 == comp
        assert all(z2_ball8.dist[v] >= 5 for v in path)


def test_cp_table_free2_disconnects(free2_ball5):
    report = cp_table(free2_ball5, M=2, c=0, R_prime=4)
    assert report.failures


def test_cp_table_preconditions(z2_ball8):
    with pytest.raises(PreconditionError):
        cp_table(z2_ball8, M=2, c=7, R_prime=6)


def test_complement_path_identity(z2_ball8):
    assert complement_path(z2_ball8, 5, 5, floor=0, cap=4) == [5]


@pytest.fixture(scope="module")
def z2_fan_setup(z2):
    ball = build_ball(z2, 8)
    from cayleykit.cayley import CayleyComplexBall

    cx = CayleyComplexBall(ball)
    delta = estimate_delta(ball, rho=3).value
    c = ray_constant(ball, 2)
    return cx, c, delta


def test_fan_z2_n2(z2_fan_setup):
    cx, c, delta = z2_fan_setup
    ball = cx.ball
    M = 6 * c + 2 * delta + 4
    p = min(ball.sphere_ids(2))
    ray0 = set(ray_through(ball, p, c))
    q = min(u for _, u in ball.neighbors(p) if u not in ray0)
    fan = build_fan(cx, p, q, N=2, M=M, c=c, L=24, delta=delta, n=1)
    rep = fan.invariant_report(ball)
    assert rep["ok"]
    for i, level in enumerate(fan.levels):
        floor = fan.base_r + i - c
        assert all(ball.dist[v] >= floor for v in fan.f_path(i))
        assert all(s <= M for s in level.spacings)
    ver = verify_fan_filling(cx, fan, n=1, budget=SearchBudget(max_states=6000))
    assert ver.verdict == "null_homotopic"
    assert all(cell["length"] <= 2 * fan.L + 4 * c - 1 for cell in ver.cells)
    data = fan_to_dict(ball, fan)
    assert data["invariants"]["ok"]


def test_fan_rejects_bad_parameters(z2_fan_setup):
    cx, c, delta = z2_fan_setup
    ball = cx.ball
    p = min(ball.sphere_ids(2))
    q = min(u for _, u in ball.neighbors(p))
    with pytest.raises(PreconditionError):
        build_fan(cx, p, p, N=1, M=20, c=c, L=24, delta=delta, n=1)
    with pytest.raises(PreconditionError):
        build_fan(cx, p, q, N=1, M=2 * delta + 6 * c + 3, c=c, L=24, delta=delta, n=1)
    with pytest.raises(PreconditionError):
        build_fan(cx, p, q, N=1, M=20, c=c, L=2 * c + 4, delta=delta, n=1)
    with pytest.raises(PreconditionError):
        build_fan(cx, p, q, N=9, M=20, c=c, L=24, delta=delta, n=1)


def test_fan_n0_filled_by_single_augmented_cell(z2):
    """With all short trivial words adjoined as relators, the base loop bounds a
    single 2-cell of the augmented complex."""
    ball = build_ball(z2, 8)
    delta = estimate_delta(ball, rho=3).value
    c = ray_constant(ball, 2)
    M = 6 * c + 2 * delta + 4
    report = cp_table(ball, M=M, c=max(c, 1), R_prime=2)
    L = max(report.L_hat, 2 * c + 5)
    bound = L + 4 * c + 3
    aug = augment_presentation(z2.presentation, bound=bound, solver=z2.solver)
    model = GroupModel(
        name="Z2aug", presentation=aug, solver=z2.solver, one_ended=True,
        lattice_dims=2, planar_winding=True, dist_formula=z2.dist_formula,
    )
    cx = build_complex(model, 8)
    p = min(cx.ball.sphere_ids(2))
    ray0 = set(ray_through(cx.ball, p, c))
    q = min(u for _, u in cx.ball.neighbors(p) if u not in ray0)
    fan = build_fan(cx, p, q, N=0, M=M, c=c, L=L, delta=delta, n=1)
    base_len = len(fan.f_path(0)) - 1 + len(fan.P) - 1 + len(fan.Q) - 1 + 1
    assert base_len <= L + 4 * c + 2
    ver = verify_fan_filling(cx, fan, n=1)
    assert ver.verdict == "null_homotopic"
    assert ver.n_cells == 1  # just the base loop
    # the base loop itself is a relator boundary of the augmented presentation:
    # the filling uses exactly one cell move
    assert ver.base_loop["outcome"] == "filled"


def test_fan_zero_budget_unknown(z2_fan_setup):
    cx, c, delta = z2_fan_setup
    ball = cx.ball
    M = 6 * c + 2 * delta + 4
    p = min(ball.sphere_ids(2))
    ray0 = set(ray_through(ball, p, c))
    q = min(u for _, u in ball.neighbors(p) if u not in ray0)
    fan = build_fan(cx, p, q, N=1, M=M, c=c, L=24, delta=delta, n=1)
    ver = verify_fan_filling(cx, fan, n=1, budget=SearchBudget(max_states=0))
    assert ver.verdict == "unknown"
    assert ver.filled == 0


def test_ray_through_missing(free2_ball5):
    # in a tree every vertex is on a ray; with c=0 the call must still
    # reject vertices that cannot reach the outer sphere geodesically
    Y, _ = geodesic_vertex_set(free2_ball5)
    assert 0 in Y
    ray = ray_through(free2_ball5, 0, 0)
    assert len(ray) == free2_ball5.radius + 1
