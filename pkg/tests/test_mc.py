import math

import numpy as np
import pytest

from gweyl import (
    exp_integral,
    lattice_norm_probability,
    mc_integral,
    sample_brownian,
    sup_ball_probability_exact,
    wick_moment,
)


def test_brownian_endpoint_variance():
    h, K, n = 0.8, 64, 100000
    ens = sample_brownian(K, h, n, seed=101)
    var = float(np.var(ens.paths[:, -1]))
    sigma = h * math.sqrt(2.0 / n)
    assert abs(var - h) < 4 * sigma
    assert np.all(ens.paths[:, 0] == 0.0)


def test_brownian_increment_independence():
    ens = sample_brownian(32, 1.0, 50000, seed=7)
    inc = ens.increments()
    corr = np.corrcoef(inc[:, 3], inc[:, 17])[0, 1]
    assert abs(corr) < 4.0 / math.sqrt(50000)


def test_brownian_cameron_martin_pairing_variance():
    # discrete stochastic integral of a piecewise-constant u': variance
    # h * int (u')^2
    h, K, n = 0.5, 128, 100000
    ens = sample_brownian(K, h, n, seed=11)
    ts = 0.5 * (ens.times[:-1] + ens.times[1:])
    uprime = np.where(ts < 0.5, 1.0, -2.0)
    vals = ens.ito_sum(uprime)
    want = h * float(np.mean(uprime**2))  # int over [0,1] of (u')^2
    var = float(np.var(vals))
    sigma = want * math.sqrt(2.0 / n)
    assert abs(var - want) < 4 * sigma


def test_brownian_determinism_and_csv(tmp_path):
    e1 = sample_brownian(16, 1.0, 100, seed=5)
    e2 = sample_brownian(16, 1.0, 100, seed=5)
    assert np.array_equal(e1.paths, e2.paths)
    path = tmp_path / "paths.csv"
    e1.to_csv(path, {"seed": 5})
    lines = path.read_text().splitlines()
    assert lines[0] == "# seed=5"
    assert len(lines) == 102  # header comment + grid header + 100 paths


def test_sup_ball_single_site_large_radius():
    rows = lattice_norm_probability([1.0], 8.0, 1.0, [1], 20000, seed=3)
    p, mc, se, exact = rows[0]
    assert exact > 1 - 1e-8
    assert mc == pytest.approx(1.0, abs=1e-4)


def test_sup_ball_exact_vs_mc_three_sites():
    b = [1.0, 2.0, 3.0]
    rows = lattice_norm_probability(b, 1.2, 0.7, [1, 2, 3], 200000, seed=13)
    for p, mc, se, exact in rows:
        assert abs(mc - exact) < 4 * max(se, 1e-6)
    exacts = [r[3] for r in rows]
    assert exacts[0] >= exacts[1] >= exacts[2]


def test_sup_ball_polynomial_weights_stay_positive():
    # b_j = (1 + j)^gamma gives a summable tail, hence a positive limit
    gamma = 1.0
    b = [(1.0 + j) ** gamma for j in range(40)]
    ladder = [5, 10, 20, 40]
    rows = lattice_norm_probability(b, 1.0, 0.5, ladder, 50000, seed=29)
    exacts = [r[3] for r in rows]
    assert all(x >= y for x, y in zip(exacts, exacts[1:]))
    # analytic limit over the whole family stays away from zero
    limit = sup_ball_probability_exact([(1.0 + j) ** gamma for j in range(4000)],
                                       1.0, 0.5)
    assert limit > 0.1
    assert all(e >= limit for e in exacts)
    for p, mc, se, exact in rows:
        assert abs(mc - exact) < 4 * max(se, 1e-6)


def test_mc_integral_constant_and_exponential():
    est, se = mc_integral(lambda x: np.ones(x.shape[0]), 2, 1.0, 1000, seed=1)
    assert est == 1.0 and se == 0.0
    a = np.array([0.9, -0.4])
    est, se = mc_integral(lambda x: np.exp(x @ a), 2, 0.5, 100000, seed=2)
    want = exp_integral(a, 0.5).real
    assert abs(est - want) < 4 * se


def test_mc_integral_matches_wick_oracle():
    h = 0.5
    us = [np.array([1.0, 0.0]), np.array([0.5, 0.5]),
          np.array([0.0, 1.0]), np.array([1.0, -1.0])]
    want = wick_moment(us, h)
    est, se = mc_integral(
        lambda x: (x @ us[0]) * (x @ us[1]) * (x @ us[2]) * (x @ us[3]),
        2, h, 100000, seed=23,
    )
    assert abs(est - want) < 4 * se
