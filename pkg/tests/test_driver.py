import math

import numpy as np
import pytest
from scipy import stats

from alelab.cluster import append_particle, cluster_from_angles, ideal_cluster
from alelab.driver import (DriverPath, StatsReport, ensemble_normality, extract_driver,
                           quadratic_variation, statistics, unwrap_angles)
from alelab.errors import StatisticsError
from alelab.params import SimParams
from alelab.slit_map import params_from_capacity


@pytest.fixture
def P():
    return SimParams(c=1e-3, N=101)


def test_step_driver_values_and_times(P):
    signs = [1, 1, -1, 1]
    st = ideal_cluster(P, signs)
    path = extract_driver(st)
    beta = params_from_capacity(P.c).beta
    assert len(path) == 5
    assert np.allclose(path.times, P.c * np.arange(5))
    assert np.allclose(path.steps, beta * np.concatenate([[0], np.cumsum(signs)]))
    assert path.xi(0.0) == 0.0
    assert path.xi(1.5 * P.c) == pytest.approx(beta)
    assert path.xi(path.T) == pytest.approx(path.endpoint)
    with pytest.raises(ValueError):
        path.xi(2 * path.T)


def test_endpoint_is_left_limit(P):
    # N steps of +beta: N + 1 particles and xi_T = N beta
    N = 100
    st = ideal_cluster(P, [1] * N)
    path = extract_driver(st, T=(N + 1) * P.c)
    beta = params_from_capacity(P.c).beta
    assert path.endpoint == pytest.approx(N * beta, rel=1e-12)
    assert quadratic_variation(path) == pytest.approx(N * beta ** 2, rel=1e-12)


def test_truncation_and_length_error(P):
    st = ideal_cluster(P, [1] * 9)
    assert len(extract_driver(st, T=5 * P.c)) == 5
    # T/c a hair below an integer still counts that particle
    assert len(extract_driver(st, T=3 * P.c * (1 - 1e-15))) == 3
    with pytest.raises(StatisticsError):
        extract_driver(st, T=20 * P.c)
    with pytest.raises(ValueError):
        extract_driver(st, T=-1.0)


def test_stopped_cluster_is_cut(P):
    st = ideal_cluster(P, [1, 1])
    st = append_particle(st, float(st.theta[-1]) + 1.0, P.c)
    assert st.stopped_at == 4
    path = extract_driver(st, T=50 * P.c)
    assert len(path) == 4 and path.T == pytest.approx(4 * P.c)


def test_unwrap_crosses_pi():
    th = np.array([3.1, -3.1, -3.0])
    u = unwrap_angles(th)
    assert np.allclose(np.diff(u), [2 * math.pi - 6.2, 0.1])


def test_concat(P):
    a = extract_driver(ideal_cluster(P, [1]))
    b = extract_driver(ideal_cluster(P, [-1]))
    ab = a.concat(b)
    assert len(ab) == 4 and ab.T == pytest.approx(a.T + b.T)
    assert ab.times[2] == pytest.approx(a.T)


def test_statistics_fields(P):
    rng = np.random.default_rng(0)
    signs = np.where(rng.random(100) < 0.5, 1, -1)
    st = ideal_cluster(P, signs)
    path = extract_driver(st, T=0.1)
    m = np.tile([1e-6, 4e-6, 0.0], (100, 1))
    rep = statistics(path, st, m)
    K = len(path)
    assert K == 100
    beta = params_from_capacity(P.c).beta
    assert rep.frac_plus == pytest.approx(np.mean(signs[:K - 1] > 0))
    assert rep.qv == pytest.approx((K - 1) * beta ** 2)
    assert rep.qv_ratio == pytest.approx((K - 1) * beta ** 2 / (4 * 0.1))
    # only the K - 1 moment rows inside the path are summed
    assert rep.mcleish[2] == pytest.approx((K - 1) * 1e-6)
    assert rep.m1_small == (rep.mcleish[2] <= rep.m1_gate * math.sqrt(0.1))
    assert StatsReport.from_json(rep.to_json()) == rep


def test_statistics_empty_moments(P):
    st = ideal_cluster(P, [1, -1])
    rep = statistics(extract_driver(st), st)
    assert rep.mcleish == (0.0, 0.0, 0.0)


def test_ks_against_scipy_and_by_hand():
    rng = np.random.default_rng(3)
    pairs = [(2 * math.sqrt(0.5) * x, 0.5) for x in rng.normal(size=200)]
    stat, p = ensemble_normality(pairs)
    z = np.sort([e / (2 * math.sqrt(T)) for e, T in pairs])
    n = z.size
    cdf = stats.norm.cdf(z)
    D = max(np.max(np.arange(1, n + 1) / n - cdf), np.max(cdf - np.arange(n) / n))
    assert stat == pytest.approx(D, rel=1e-12)
    assert p == pytest.approx(stats.kstwobign.sf(D * math.sqrt(n)), rel=1e-9)
    assert p > 1e-3
    # a shifted sample is rejected
    _, p_bad = ensemble_normality([(e + 2.0, T) for e, T in pairs])
    assert p_bad < 1e-6


def test_ks_needs_enough_runs():
    with pytest.raises(StatisticsError):
        ensemble_normality([(0.0, 1.0)] * 10)


def test_synthetic_walk_quadratic_variation():
    P = SimParams(c=1e-3, N=1000)
    rng = np.random.default_rng(5)
    st = ideal_cluster(P, np.where(rng.random(999) < 0.5, 1, -1))
    path = extract_driver(st, T=1.0)
    beta = params_from_capacity(P.c).beta
    assert quadratic_variation(path) / 4 == pytest.approx(999 * beta ** 2 / 4, rel=1e-12)
    assert 0.99 < quadratic_variation(path) / 4 < 1.01


def test_driver_from_arbitrary_angles():
    P = SimParams(c=1e-2, N=3, d_stat=2 * math.pi)
    st = cluster_from_angles(P, [0.0, 0.5, 0.2])
    path = extract_driver(st)
    assert np.allclose(path.steps, [0.0, 0.5, 0.2])
    assert isinstance(path, DriverPath)
