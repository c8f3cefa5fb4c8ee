import math

import mpmath as mp
import numpy as np
import pytest

from alelab.cluster import (AnchoredAngle, append_particle, basepoints, boundary_trace,
                            classify, cluster_from_angles, harmonic_sample, ideal_cluster,
                            log_abs_phi_prime, new_cluster, offset_chain, phi_apply,
                            phi_partial_apply, wrap_angle)
from alelab.errors import DomainError, OutOfRegimeError, PoleError
from alelab.params import SimParams
from alelab.slit_map import params_from_capacity, slit_map_rotated

from _oracle import MpCluster


@pytest.fixture
def P():
    return SimParams(c=1e-3, nu=4.0, sigma_exponent=6.0, N=10)


def alternating(P, n):
    return ideal_cluster(P, [(-1) ** k for k in range(n - 1)])


def random_cluster(P, n, seed, spread=1e-7):
    """Near-pole cluster with small random residuals."""
    rng = np.random.default_rng(seed)
    st = append_particle(new_cluster(P), 0.0, P.c)
    beta = float(st.betas[-1])
    for _ in range(n - 1):
        s = 1 if rng.random() < 0.5 else -1
        r = rng.uniform(-spread, spread)
        st = append_particle(st, AnchoredAngle(s, r, float(st.theta[-1]), beta), P.c)
    return st


def test_anchored_angle_keeps_residual():
    a = AnchoredAngle.from_offset(1.0, 0.1, 0.3 + 1e-17)
    assert a.m == 3
    assert a.shift(-2).m == 1 and a.shift(-2).r == a.r
    assert AnchoredAngle.from_json(a.to_json()) == a
    assert abs(AnchoredAngle.from_offset(0.0, 0.1, 0.04).r - 0.04) < 1e-18


def test_wrap_angle():
    assert wrap_angle(math.pi) == pytest.approx(-math.pi)
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


def test_classify(P):
    st = alternating(P, 3)
    beta = float(st.betas[-1])
    th = float(st.theta[-1])
    assert classify(st, th + beta + 1e-9) == (1, pytest.approx(1e-9, abs=1e-15))
    assert classify(st, th - beta - 2e-9)[0] == -1
    # midpoint tie goes to +1
    assert classify(st, AnchoredAngle(0, 0.0, th, beta))[0] == 1
    # anchored input: residual is passed through untouched
    assert classify(st, AnchoredAngle(-1, 3e-21, th, beta)) == (-1, 3e-21)
    s, phi = classify(st, AnchoredAngle(3, 1e-5, th, beta))
    assert s == 1 and phi == pytest.approx(2 * beta + 1e-5)


def test_append_records_signs_and_stopping(P):
    st = ideal_cluster(P, [1, -1, 1])
    assert list(st.top_signs) == [0, 1, -1, 1]
    assert np.all(st.residuals == 0)
    assert not st.stopped
    far = append_particle(st, float(st.theta[-1]) + 1.0, P.c)
    assert far.stopped_at == 5
    # stopping time is sticky
    again = append_particle(far, AnchoredAngle(1, 0.0, float(far.theta[-1]), float(far.betas[-1])), P.c)
    assert again.stopped_at == 5
    with pytest.raises(DomainError):
        append_particle(st, 0.0, 0.0)


def test_ideal_cluster_angles_are_exact_sums(P):
    st = ideal_cluster(P, [1] * 20)
    beta = params_from_capacity(P.c).beta
    assert st.theta[-1] == pytest.approx(20 * beta, rel=1e-14)


def test_single_particle_is_the_slit_map(P):
    st = cluster_from_angles(P, [0.7])
    p = params_from_capacity(P.c)
    w = np.array([1.5, 2j, 1.01 * np.exp(0.7j + 0.01j)])
    assert np.allclose(phi_apply(st, w), slit_map_rotated(w, 0.7, p), rtol=1e-14)


def test_empty_cluster_is_identity(P):
    st = new_cluster(P)
    assert phi_apply(st, 2 + 1j) == 2 + 1j
    assert log_abs_phi_prime(st, 1.5, 0.0) == 0


@pytest.mark.parametrize("seed", range(4))
def test_composition_against_mpmath(P, seed):
    st = random_cluster(P, 8, seed)
    mc = MpCluster.from_state(st)
    rng = np.random.default_rng(seed)
    w = (1 + 10 ** rng.uniform(-4, 0, 20)) * np.exp(1j * rng.uniform(-np.pi, np.pi, 20))
    got = phi_apply(st, w)
    lder = log_abs_phi_prime(st, 1.0, np.log(w))
    for wi, gi, li in zip(w, got, lder):
        ref, lref = mc.apply(mp.mpc(wi))
        assert abs(gi - complex(ref)) <= 1e-12
        assert li == pytest.approx(float(lref), abs=1e-9)


def test_partial_composition(P):
    st = random_cluster(P, 6, 3)
    mc = MpCluster.from_state(st)
    w = 1.2 * np.exp(0.4j)
    for j in range(st.n + 1):
        ref = complex(mc.apply(mp.mpc(w), lo=j)[0])
        assert abs(phi_partial_apply(st, j, w) - ref) < 1e-12
    assert phi_partial_apply(st, st.n, w) == w
    with pytest.raises(IndexError):
        phi_partial_apply(st, st.n + 1, w)


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("seed", [0, 1])
def test_log_derivative_near_poles(P, sign, seed):
    st = random_cluster(P, 10, seed)
    mc = MpCluster.from_state(st, dps=90)
    beta = mc.s.beta
    pole = mp.expj(mc.th[-1] + sign * beta)
    sig = P.sigma
    for phi in (0.0, 3 * sig, -50 * sig, 1e-9, -1e-6):
        got = log_abs_phi_prime(st, sign, complex(sig, phi))
        ref = mc.log_deriv(pole * mp.exp(mp.mpc(sig, phi)))
        assert got == pytest.approx(float(ref), abs=1e-7)


def test_log_derivative_array_and_pole(P):
    st = alternating(P, 4)
    d = np.array([1e-18 + 1e-16j, 1e-18 - 1e-16j])
    assert log_abs_phi_prime(st, 1, d).shape == (2,)
    with pytest.raises(PoleError):
        log_abs_phi_prime(st, 1, 0.0)


def test_inside_disc_rejected(P):
    st = alternating(P, 2)
    with pytest.raises(DomainError):
        phi_apply(st, 0.3)


def test_offset_chain_against_mpmath(P):
    st = random_cluster(P, 7, 5)
    mc = MpCluster.from_state(st, dps=90)
    beta = mc.s.beta
    d0 = complex(3e-13, 2e-13)
    for sign in (1, -1):
        w0 = mp.expj(mc.th[-1] + sign * beta)
        offs = offset_chain(st, sign, d0 * complex(w0))
        w = w0 + mp.mpc(d0) * w0
        n = mc.n
        for j in range(1, n + 1):
            k = n - j  # apply f_n .. f_{k+1}
            img = mc.apply(w, lo=k)[0]
            # base point of the particle attached after step k
            if k == 0:
                base = mp.mpf(1)
            else:
                sgn = mp.sign(mc.th[k] - mc.th[k - 1])
                base = mp.expj(mc.th[k - 1] + sgn * beta)
            ref = complex(img - base)
            assert abs(offs[j - 1] - ref) <= 1e-8 * abs(ref) + 1e-30
    with pytest.raises(OutOfRegimeError):
        offset_chain(st, 1, 1.0)


def test_basepoints_against_mpmath(P):
    st = random_cluster(P, 6, 2)
    mc = MpCluster.from_state(st, dps=60)
    bp = basepoints(st)
    assert bp.available.all()
    for j in range(1, st.n):
        ref = complex(mc.zhat(j))
        assert abs(bp.zhat[j - 1] - ref) < 1e-7
    assert abs(bp.poles[0] - complex(mp.expj(mc.th[-1] + mc.s.beta))) < 1e-12


def test_boundary_trace_and_harmonic_sample(P):
    st = alternating(P, 5)
    tr = boundary_trace(st)
    assert tr[0] == tr[-1]
    assert np.all(np.abs(tr) >= 1 - 1e-9)
    # the cluster sticks out by roughly the slit length near angle 0
    assert np.max(np.abs(tr)) > 1 + 0.5 * params_from_capacity(P.c).d
    pts = harmonic_sample(st, np.random.default_rng(0), 200)
    assert pts.shape == (200,) and np.all(np.abs(pts) >= 1 - 1e-9)
