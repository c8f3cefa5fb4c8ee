import math

import mpmath as mp
import numpy as np
import pytest
from scipy import stats

from alelab import _kernels as K
from alelab.cluster import (RADIAL_LIFT, AnchoredAngle, append_particle, ideal_cluster,
                            log_abs_phi_prime, new_cluster)
from alelab.params import GridConfig, SimParams
from alelab.sampler import (KIND_OLD, _window_nodes, build_density, mass_near, next_capacity,
                            sample_angle, step_moments, window_edges)

from _oracle import MpCluster, density_masses


def params(**kw):
    base = dict(c=1e-3, nu=4.0, sigma_exponent=6.0, N=10, grid=GridConfig(coarse=1024))
    base.update(kw)
    return SimParams(**base)


def test_window_edges_geometry():
    e = window_edges(1e-3, 1e-12, 8)
    assert e[0] == -1e-3 and e[-1] == 1e-3
    assert np.allclose(e, -e[::-1], rtol=0, atol=0)
    assert np.all(np.diff(e) > 0)
    mid = len(e) // 2
    assert e[mid] == 0
    assert e[mid + 1] == pytest.approx(1e-12 / 8, rel=1e-12)


def test_window_nodes_exact_for_lobe_profile():
    s = 1e-9
    e = window_edges(1e-4, s, 4)
    nd = _window_nodes(e, s)
    assert np.all((nd >= e[:-1]) & (nd <= e[1:]))
    exact = np.arcsinh(e[1:] / s) - np.arcsinh(e[:-1] / s)
    rule = np.diff(e) / np.sqrt(s * s + nd * nd)
    assert np.allclose(rule, exact, rtol=1e-10)


def test_first_particle_is_uniform():
    g = build_density(new_cluster(params()))
    assert g.log_Z == pytest.approx(math.log(2 * math.pi))
    assert g.probabilities().sum() == pytest.approx(1.0)
    assert np.allclose(g.probabilities(), g.width / (2 * math.pi))


def test_masses_sum_to_one_and_are_symmetric():
    P = params()
    st = ideal_cluster(P, [1, -1])
    g = build_density(st)
    p = g.probabilities()
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    assert g.excluded == 0
    # the newest particle alone would be mirror symmetric; after an alternating
    # pair the two poles are close to each other in mass
    assert abs(g.window_mass(1) - g.window_mass(-1)) < 1e-3
    assert g.window_mass(1) + g.window_mass(-1) > 0.99


def test_node_values_match_direct_evaluation():
    P = params()
    st = ideal_cluster(P, [1, 1, -1])
    g = build_density(st)
    rng = np.random.default_rng(0)
    for i in rng.choice(g.size, 40, replace=False):
        k = int(g.kind[i])
        if k in (1, -1):
            ref = log_abs_phi_prime(st, k, complex(P.sigma, g.node[i]))
        else:
            th = g.center + g.anchor[i] + g.node[i]
            ref = log_abs_phi_prime(st, complex(math.cos(th), math.sin(th)), P.sigma)
        assert g.log_f[i] == pytest.approx(P.nu * float(ref), abs=1e-8)


def test_normalization_against_quadrature():
    # at nu = 1 the old base points carry integrable spikes, so the grid
    # needs its old-basepoint windows to match a quadrature split there
    P = params(nu=1.0)
    st = ideal_cluster(P, [1, -1])
    g = build_density(st, refine_old=True)
    logZ, pp, pm, rest = density_masses(MpCluster.from_state(st), P.nu, P.sigma, dps=15)
    assert g.log_Z == pytest.approx(logZ, abs=2e-3)
    assert g.window_mass(1) == pytest.approx(pp, abs=2e-3)
    assert g.window_mass(-1) == pytest.approx(pm, abs=2e-3)
    assert 1 - g.window_mass(1) - g.window_mass(-1) == pytest.approx(rest, abs=2e-3)


def test_one_slit_against_quadrature():
    P = params(nu=1.0)
    st = ideal_cluster(P, [])
    g = build_density(st)
    logZ, pp, pm, rest = density_masses(MpCluster.from_state(st), P.nu, P.sigma, dps=15)
    assert g.log_Z == pytest.approx(logZ, abs=1e-4)
    assert g.window_mass(0) == pytest.approx(rest, abs=1e-4)


def test_sampling_follows_cell_probabilities():
    P = params(nu=1.0)
    st = ideal_cluster(P, [1])
    g = build_density(st)
    rng = np.random.default_rng(11)
    draws = [sample_angle(g, rng) for _ in range(4000)]
    kinds = np.array([d.m if d.base == g.center and abs(d.r) <= g.beta / 4 and abs(d.m) == 1 else 0
                      for d in draws])
    expected = np.array([g.window_mass(-1), g.window_mass(0), g.window_mass(1)])
    observed = np.array([np.sum(kinds == -1), np.sum(kinds == 0), np.sum(kinds == 1)])
    chi2 = stats.chisquare(observed, expected * observed.sum())
    assert chi2.pvalue > 1e-3


def test_window_draws_keep_residual_precision():
    P = params()
    st = ideal_cluster(P, [1, -1, 1])
    g = build_density(st)
    rng = np.random.default_rng(3)
    rs = []
    for _ in range(200):
        a = sample_angle(g, rng)
        if abs(a.m) == 1 and a.base == g.center:
            rs.append(abs(a.r))
    # residuals are of order sigma, far below the resolution of theta_n itself
    assert len(rs) > 150
    assert np.median(rs) < 1e3 * P.sigma


def test_mass_near_matches_windows():
    P = params()
    st = ideal_cluster(P, [1])
    g = build_density(st)
    W = g.beta / 4
    assert mass_near(g, AnchoredAngle(1, 0.0, g.center, g.beta), W) == pytest.approx(g.window_mass(1), rel=1e-9)
    assert mass_near(g, g.center, math.pi + 1) == 1.0
    # float anchor agrees with the anchored one
    assert mass_near(g, g.center - g.beta, W) == pytest.approx(g.window_mass(-1), rel=1e-6)


def test_step_moments_by_hand():
    P = params(nu=1.0)
    st = ideal_cluster(P, [1])
    g = build_density(st)
    m1, m2, tail = step_moments(g, None, 4 * g.beta)
    p = g.probabilities()
    phi = g.anchor + g.left + g.width / 2
    phi = (phi + math.pi) % (2 * math.pi) - math.pi
    assert m1 == pytest.approx(np.sum(p * phi), abs=1e-12)
    assert m2 == pytest.approx(np.sum(p * phi ** 2), rel=1e-9)
    assert 0 <= tail <= m2


def test_next_capacity():
    P = params()
    st = ideal_cluster(P, [1])
    assert next_capacity(st, AnchoredAngle(1, 1e-18, float(st.theta[-1]), float(st.betas[-1]))) == P.c
    Pa = params(alpha=0.5)
    st = ideal_cluster(Pa, [1])
    th = AnchoredAngle(1, 2e-18, float(st.theta[-1]), float(st.betas[-1]))
    mc = MpCluster.from_state(st, dps=60)
    w = mp.expj(mc.th[-1] + mc.s.beta) * mp.exp(mp.mpc(Pa.sigma, 2e-18))
    ref = Pa.c * math.exp(-0.5 * float(mc.log_deriv(w)))
    assert next_capacity(st, th) == pytest.approx(ref, rel=1e-7)
    # far from the poles the capacity is close to the bare one
    assert next_capacity(st, float(st.theta[-1]) + 2.0) == pytest.approx(Pa.c, rel=0.05)


def test_old_window_linearization_against_mpmath():
    """Old-basepoint cells: the offset evaluation matches 90-digit composition."""
    P = params()
    st = ideal_cluster(P, [1] * 5)
    n = st.n
    j = n - 1
    mc = MpCluster.from_state(st, dps=90)
    z = mc.zhat(j)
    T = st.tables()
    _, logg, ok = K.chain_abs(complex(z) * math.exp(RADIAL_LIFT), n - 1, j, T)
    assert ok
    s = -int(st.top_signs[j])
    b = st.arrays["eib"][j - 1] if s > 0 else st.arrays["eib"][j - 1].conjugate()
    for x in (0.0, 2e-18, -5e-18, 1e-16):
        exact = float(mc.log_deriv(z * mp.exp(mp.mpc(P.sigma, x))))
        delta = b * np.expm1(math.exp(logg) * complex(P.sigma, x))
        _, ld, _ = K.chain_offset(delta, s, j - 1, T, st.switch())
        assert ld + logg == pytest.approx(exact, abs=1e-3)


def test_refined_grid_contains_old_windows():
    P = params()
    st = ideal_cluster(P, [1] * 5)
    g0 = build_density(st)
    g1 = build_density(st, refine_old=True)
    assert not np.any(g0.kind == KIND_OLD)
    assert np.any(g1.kind == KIND_OLD)
    assert g1.probabilities().sum() == pytest.approx(1.0, abs=1e-12)
    assert g1.log_Z >= g0.log_Z - 1e-3
