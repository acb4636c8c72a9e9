import json
import math

import numpy as np
import pytest

import interlace


def test_capacity_of_a_point():
    rep = interlace.capacity([[0, 0, 0]])
    assert rep.value == pytest.approx(0.659462670449, rel=1e-6)
    assert rep.error_bound < 1e-3
    assert rep.sites == [[0, 0, 0]]
    assert sum(rep.equilibrium) == pytest.approx(rep.value)
    assert json.loads(rep.to_json())["value"] == rep.value


def test_energy_matches_killed_capacity():
    k = [[x, y, z] for x in (-1, 0, 1) for y in (-1, 0, 1) for z in (-1, 0, 1)]
    energy = interlace.dirichlet_energy_of_hitting_potential(k, 12)
    killed = interlace.capacity(k, solve_radius=12, far_field_boundary=False).value
    assert energy == pytest.approx(killed, rel=1e-8)


def test_sample_occupancy_is_nested_and_replayable():
    s = interlace.sample_window(2.0, 4, seed=3)
    low, high = s.occupancy(0.5), s.occupancy(2.0)
    assert low.shape == (9, 9, 9)
    assert not np.any(low & ~high)
    assert not s.occupancy(0.0).any()
    back = interlace.Sample.from_json(s.to_json())
    assert np.array_equal(back.occupancy(1.3), s.occupancy(1.3))
    assert sorted(s.marks) == sorted(back.marks)


def test_corrupt_snapshot_is_rejected():
    text = interlace.sample_window(1.0, 3, seed=4).to_json().replace('"u_max":1', '"u_max":2')
    with pytest.raises(interlace.PreconditionError):
        interlace.Sample.from_json(text)


def test_labels():
    field = np.zeros((5, 5, 5), dtype=np.uint8)
    field[:, 2, :] = 1
    ids, comps = interlace.label(field)
    assert ids[0, 2, 0] == -1
    assert len(comps) == 2
    assert all(c.touches_boundary for c in comps)
    assert sum(c.size for c in comps) == 125 - 25


def test_trifurcation_at_a_junction():
    field = np.ones((7, 7, 7), dtype=np.uint8)
    field[3, 3, :4] = 0
    field[3, 3:, 3] = 0
    field[:4, 3, 3] = 0
    assert interlace.trifurcation_points(field) == [[0, 0, 0]]


def test_verify_law_small():
    law = interlace.verify_law([[0, 0, 0]], 1.0, 5000, seed=2)
    assert law.target == pytest.approx(math.exp(-law.capacity))
    assert abs(law.z_score) < 4
    with pytest.raises(interlace.PreconditionError):
        interlace.verify_law([[0, 0, 0]], 1.0, 10)


def test_crossing_estimates():
    est = interlace.eta_curve([0.0, 0.5, 1.0, 2.0], 4, 150, seed=5)
    values = [e.value for e in est]
    assert values[0] == 1.0
    assert values == sorted(values, reverse=True)
    a = interlace.crossing_probability(1.0, 4, 150, seed=5, workers=1)
    b = interlace.crossing_probability(1.0, 4, 150, seed=5, workers=2)
    assert a.successes == b.successes
    assert a.config_digest == b.config_digest


def test_uniqueness_at_zero():
    rep = interlace.uniqueness_frequency(0.0, 8, 0.25, 10)
    assert rep.two_large.value == 0.0


def test_corridors():
    checks = interlace.corridor_checks(dim=3, separation=9)
    assert len(checks) == 5
    assert all(c.passed for c in checks)
    assert json.loads(interlace.corridor_plan_json(3, 9))["all_passed"]
    assert interlace.minimal_passing_separation(3, list(range(1, 9))) == 4


def test_config():
    text = interlace.normalize_config('{"seed": 4, "u": [0.5]}')
    assert json.loads(text)["seed"] == 4
    assert interlace.config_digest(text) == interlace.config_digest('{"u": [0.5], "seed": 4}')
    with pytest.raises(interlace.PreconditionError, match="'bogus'"):
        interlace.normalize_config('{"bogus": 1}')
