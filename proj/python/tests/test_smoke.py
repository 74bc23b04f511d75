import json
import math

import pytest

import subproj as sp


def test_neglog_projection():
    r = sp.sproj(sp.neg_log(), [0.5])
    assert r["status"] == "Projected"
    assert r["point"][0] == pytest.approx(0.5 - 0.5 * math.log(0.5), abs=1e-12)


def test_fixed_point_on_level_set():
    r = sp.sproj(sp.neg_log(), [2.0])
    assert r["status"] == "Fixed"
    assert r["point"] == [2.0]
    assert r["subgradient"] is None


def test_distance_projector_is_metric_projection():
    ball = sp.SetSpec.ball([0.0, 0.0], 1.0)
    assert sp.sproj(sp.dist(ball), [2.0, 0.0])["point"] == pytest.approx([1.0, 0.0])


def test_power_rule_matches_composed_spec():
    f = sp.dist(sp.SetSpec.ball([0.0, 0.0], 1.0))
    direct = sp.sproj(sp.power_comp(0.5, f), [3.0, 0.0])["point"]
    assert direct == pytest.approx(sp.sproj_power(0.5, f, [3.0, 0.0]))
    assert direct == pytest.approx([2.0, 0.0])


def test_moreau_projector_of_ball_indicator():
    f = sp.indicator(sp.SetSpec.ball([0.0, 0.0], 1.0))
    assert sp.sproj_moreau(f, 1.0, [3.0, 0.0]) == pytest.approx([2.0, 0.0])


def test_set_valued_image():
    f = sp.affine_max([([1.0, 0.0], 1.0), ([0.0, 1.0], 1.0)])
    images = sp.sproj_set(f, [0.0, 0.0], 3)
    assert sorted(map(tuple, images)) == sorted([(-1.0, 0.0), (0.0, -1.0), (-1.0, -1.0)])


def test_solve_two_balls():
    problem = {
        "dimension": 2,
        "functions": [
            {"type": "dist", "set": {"type": "ball", "center": [0, 0], "radius": 1}},
            {"type": "dist", "set": {"type": "ball", "center": [1.5, 0], "radius": 1}},
        ],
        "x0": [5, 5],
        "max_iter": 500,
    }
    r = sp.solve(json.dumps(problem))
    assert r["status"] == "Converged"
    assert r["final_residual"] <= 1e-8


def test_errors_carry_their_kind():
    with pytest.raises(sp.SubprojError, match="DomainError"):
        sp.sproj(sp.neg_log(), [-1.0])
    with pytest.raises(sp.SubprojError, match="SchemaError"):
        sp.normalize_problem('{"dimension": 1, "bogus": 2}')


def test_jacobian_is_numpy_matrix():
    jac = sp.sproj_jacobian(sp.neg_log(), [0.5])
    assert jac.shape == (1, 1)
    assert jac[0, 0] == pytest.approx(-math.log(0.5), rel=1e-12)
