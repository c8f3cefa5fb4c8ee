import math

import numpy as np
import pytest

import alelab.simulation as sim
from alelab.errors import DomainError, NumericalAbort
from alelab.params import GridConfig, SimParams
from alelab.simulation import theory_stop_radius, replay, run_rng, simulate


def small(**kw):
    base = dict(c=1e-3, nu=4.0, sigma_exponent=6.0, N=15, seed=7, grid=GridConfig(coarse=256))
    base.update(kw)
    return SimParams(**base)


def test_records_and_state():
    P = small()
    res = simulate(P, run_rng(P.seed))
    st = res.state
    assert st.n == 15 and len(res.records) == 14
    assert [r.n for r in res.records] == list(range(2, 16))
    assert st.theta[0] == 0.0
    for r in res.records:
        assert r.mass_plus + r.mass_minus + r.mass_far == pytest.approx(1.0, abs=1e-9)
        assert abs(r.angle["m"]) == 1
        assert abs(r.angle["r"]) < 1e-12
        assert r.capacity == P.c
        assert r.theory_D == pytest.approx(P.c ** 4.5 * math.sqrt(P.sigma))
    assert res.moments.shape == (14, 3)
    assert not st.stopped


def test_same_seed_same_run_and_replay():
    P = small()
    a = simulate(P, run_rng(P.seed))
    b = simulate(P, run_rng(P.seed))
    assert np.array_equal(a.state.theta, b.state.theta)
    assert [r.angle for r in a.records] == [r.angle for r in b.records]
    st = replay(P, a.records)
    assert np.array_equal(st.theta, a.state.theta)
    assert np.array_equal(st.top_signs, a.state.top_signs)
    c = simulate(P, run_rng(P.seed, 1))
    assert not np.array_equal(c.state.top_signs, a.state.top_signs)


def test_run_streams_are_independent():
    x = run_rng(5, 0).random(4)
    y = run_rng(5, 1).random(4)
    assert not np.allclose(x, y)
    assert np.array_equal(run_rng(5, 3).random(4), run_rng(5, 3).random(4))


def test_empty_and_single():
    assert simulate(small(N=0)).state.n == 0
    r = simulate(small(N=1))
    assert r.state.n == 1 and r.records == []


def test_stop_at_tau():
    # a huge window lets angles land far from the poles at nu = 0
    P = small(nu=0.0, N=40, d_stat=1e-6)
    res = simulate(P, run_rng(1), stop_at_tau=True)
    assert res.state.stopped
    assert res.state.n == res.state.stopped_at
    assert res.records[-1].tau_flag


def test_positive_alpha_changes_capacities():
    P = small(alpha=0.5, N=6)
    res = simulate(P, run_rng(0))
    caps = [r.capacity for r in res.records]
    # attaching at a pole of the derivative shrinks the particle
    assert all(cp < P.c for cp in caps)
    assert res.state.total_capacity == pytest.approx(P.c + sum(caps))


def test_abort_keeps_partial_run(monkeypatch):
    P = small(N=10)
    real = sim.build_density
    calls = {"k": 0}

    def flaky(state, *a, **kw):
        calls["k"] += 1
        if calls["k"] == 5:
            raise DomainError("synthetic failure")
        return real(state, *a, **kw)

    monkeypatch.setattr(sim, "build_density", flaky)
    with pytest.raises(NumericalAbort) as ei:
        simulate(P, run_rng(0))
    e = ei.value
    assert e.last_good == 5
    assert e.partial.state.n == 5 and len(e.partial.records) == 4
    assert isinstance(e.__cause__, DomainError)


def test_theory_stop_radius_value():
    assert theory_stop_radius(1e-3, 1e-18) == pytest.approx(10 ** (-13.5 - 9))
