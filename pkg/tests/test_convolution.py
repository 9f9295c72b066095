"""Nonlocal operators: oracles, frame consistency, and the reduction identity."""

import math

import numpy as np
import pytest

from peakonlab import convolution as cv
from peakonlab.convolution import DensitySample, conv_p, conv_q, node_convolutions, q_density
from peakonlab.kernel import M, m, phi_open_interval, phi_prime_open_interval
from peakonlab.profiles import InitialCondition, cosine, sine
from peakonlab.quadrature import integrate_samples

TWO_PI = 2.0 * math.pi


def uniform_sample(n, v_fn, vx_fn, jac_fn=None):
    s = np.linspace(0.0, TWO_PI, n + 1)
    jac = None if jac_fn is None else jac_fn(s)
    return DensitySample(nodes=s, v=v_fn(s), vx=vx_fn(s), jacobian=jac)


def random_trig_profile(rng, degree=5, scale=1.0):
    return InitialCondition(
        cosine_coeffs=tuple(rng.uniform(-scale, scale) / k for k in range(1, degree + 1)),
        sine_coeffs=tuple(rng.uniform(-scale, scale) / k for k in range(1, degree + 1)))


# ---------------------------------------------------------------- q-density

def test_q_density_zero_and_trig():
    sample = uniform_sample(64, np.zeros_like, np.zeros_like)
    assert np.all(q_density(sample) == 0.0)
    sample = uniform_sample(64, np.sin, np.cos)
    expected = np.sin(sample.nodes) ** 2 + 0.5 * np.cos(sample.nodes) ** 2
    assert np.allclose(q_density(sample), expected, atol=1e-15)
    assert np.all(q_density(sample) >= 0.0)


def test_q_density_of_kernel_closed_form():
    # for the wave profile, q = phi^2 + (phi^2 - m^2)/2 = (3 phi^2 - m^2)/2
    sample = uniform_sample(64, phi_open_interval, phi_prime_open_interval)
    expected = (3.0 * phi_open_interval(sample.nodes) ** 2 - m * m) / 2.0
    assert np.allclose(q_density(sample), expected, atol=1e-14)


def test_sample_validation():
    s = np.linspace(0.0, TWO_PI, 17)
    with pytest.raises(ValueError):
        DensitySample(nodes=s, v=np.zeros(17), vx=np.zeros(16))
    with pytest.raises(ValueError):
        DensitySample(nodes=s + 0.1, v=np.zeros(17), vx=np.zeros(17))
    with pytest.raises(ValueError):
        DensitySample(nodes=s, v=np.zeros(17), vx=np.zeros(17), jacobian=np.zeros(17))
    with pytest.raises(ValueError):
        conv_q(DensitySample(nodes=s, v=np.zeros(17), vx=np.zeros(17)), [])


# ------------------------------------------------------------------- conv_q

def test_conv_q_zero_density():
    sample = uniform_sample(128, np.zeros_like, np.zeros_like)
    assert np.all(conv_q(sample, [0.0, 1.0, 4.0]) == 0.0)


def test_conv_q_of_wave_profile_closed_form():
    # differentiate the stationary equation: Q[phi] = (M - phi) phi'
    sample = uniform_sample(4096, phi_open_interval, phi_prime_open_interval)
    targets = np.array([0.3, 1.0, math.pi, 5.0, 6.0])
    got = conv_q(sample, targets)
    want = (M - phi_open_interval(targets)) * phi_prime_open_interval(targets)
    assert np.max(np.abs(got - want)) < 1e-6


def test_conv_p_of_wave_profile_closed_form():
    # P[phi] = M phi - phi^2/2 + m^2/2 (same derivation, undifferentiated)
    sample = uniform_sample(4096, phi_open_interval, phi_prime_open_interval)
    targets = np.array([0.0, 0.7, math.pi, 4.4])
    got = conv_p(sample, targets)
    want = M * phi_open_interval(np.where(targets == 0, 1e-30, targets)) \
        - 0.5 * phi_open_interval(np.where(targets == 0, 1e-30, targets)) ** 2 + 0.5 * m * m
    want[targets == 0] = M * M - 0.5 * M * M + 0.5 * m * m
    assert np.max(np.abs(got - want)) < 1e-6


def test_conv_q_zero_mean_random_profiles():
    rng = np.random.default_rng(42)
    n = 512
    s = np.linspace(0.0, TWO_PI, n + 1)
    for _ in range(20):
        prof = random_trig_profile(rng)
        sample = DensitySample(nodes=s, v=prof.value(s), vx=prof.slope(s))
        vals = conv_q(sample, s)
        mean = integrate_samples(s, vals)
        assert abs(mean) < 1e-7


def test_conv_p_positive_for_nonzero_sample():
    sample = uniform_sample(256, np.sin, np.cos)
    vals = conv_p(sample, np.linspace(0.0, TWO_PI, 17))
    assert np.all(vals > 0.0)


def test_conv_p_derivative_is_conv_q():
    # central differences of P match Q at second order
    sample = uniform_sample(2048, np.sin, np.cos)
    x = np.array([0.9, 2.2, 4.8])
    h = 1e-4
    dp = (conv_p(sample, x + h) - conv_p(sample, x - h)) / (2 * h)
    q = conv_q(sample, x)
    assert np.max(np.abs(dp - q)) < 1e-6


def test_conv_lipschitz_modulus():
    # discrete modulus of continuity bounded by C*h for a bounded density
    sample = uniform_sample(1024, np.sin, np.cos)
    x = np.linspace(0.0, TWO_PI, 257)
    q = conv_q(sample, x)
    p = conv_p(sample, x)
    h = x[1] - x[0]
    # |Q| <= (1/2) max|phi'| * int q and q here integrates to ~ 3*pi/2
    bound = 8.0 * h
    assert np.max(np.abs(np.diff(q))) < bound
    assert np.max(np.abs(np.diff(p))) < bound


def test_jacobian_frame_matches_plain_frame():
    # same physical density sampled on a warped characteristic grid
    sig = np.linspace(0.0, TWO_PI, 1025)
    X = sig - 0.3 * np.sin(sig)          # increasing map with X(0)=0, X(2pi)=2pi
    J = 1.0 - 0.3 * np.cos(sig)
    warped = DensitySample(nodes=X, v=np.sin(X), vx=np.cos(X), jacobian=J)
    plain = uniform_sample(2048, np.sin, np.cos)
    targets = np.array([0.5, 1.9, 3.3, 5.7])
    assert np.max(np.abs(conv_q(warped, targets) - conv_q(plain, targets))) < 2e-5
    assert np.max(np.abs(conv_p(warped, targets) - conv_p(plain, targets))) < 2e-5


def test_unit_jacobian_equals_no_jacobian():
    s = np.linspace(0.0, TWO_PI, 513)
    a = DensitySample(nodes=s, v=np.sin(s), vx=np.cos(s))
    b = DensitySample(nodes=s, v=np.sin(s), vx=np.cos(s), jacobian=np.ones_like(s))
    t = np.array([0.0, 1.1, 4.4])
    assert np.allclose(conv_q(a, t), conv_q(b, t), atol=1e-14)
    assert np.allclose(conv_p(a, t), conv_p(b, t), atol=1e-14)


def test_node_convolutions_match_general_path():
    s = np.linspace(0.0, TWO_PI, 513)
    V, U = np.sin(s), np.cos(s)
    J = np.ones_like(s)
    Qf, Pf = node_convolutions(s, s, V, U, J)
    sample = DensitySample(nodes=s, v=V, vx=U, jacobian=None)
    Qg = conv_q(sample, s)
    Pg = conv_p(sample, s)
    # same rule algebraically; the O(n) path regroups sums through
    # cosh/sinh(pi + X) factors, which amplifies rounding to ~1e-11
    assert np.max(np.abs(Qf - Qg)) < 1e-10
    assert np.max(np.abs(Pf - Pg)) < 1e-10


def test_node_convolutions_warped_grid_against_fine_reference():
    sig = np.linspace(0.0, TWO_PI, 1025)
    X = sig - 0.3 * np.sin(sig)
    J = 1.0 - 0.3 * np.cos(sig)
    Qf, Pf = node_convolutions(sig, X, np.sin(X), np.cos(X), J)
    plain = uniform_sample(4096, np.sin, np.cos)
    idx = [0, 100, 512, 800, 1024]
    assert np.max(np.abs(Qf[idx] - conv_q(plain, X[idx]))) < 1e-6
    assert np.max(np.abs(Pf[idx] - conv_p(plain, X[idx]))) < 1e-6


def test_periodic_seam_consistency():
    # values at both endpoint nodes describe the same circle point
    s = np.linspace(0.0, TWO_PI, 257)
    Q, P = node_convolutions(s, s, np.sin(s), np.cos(s), np.ones_like(s))
    assert abs(Q[0] - Q[-1]) < 1e-12
    assert abs(P[0] - P[-1]) < 1e-12


# --------------------------------------------------- reduction identity

def test_reduction_identity_smooth_profiles():
    for prof in (sine(), cosine()):
        for x in (1.0, math.pi, -2.0, 0.5):
            assert cv.reduction_identity_gap(prof, x, 4096) < 1e-7


def test_reduction_identity_constant_profile():
    prof = InitialCondition(constant=1.0)
    for x in (0.25, 2.0, -1.3):
        assert cv.reduction_identity_gap(prof, x, 4096) < 1e-7


def test_reduction_identity_converges_with_nodes():
    prof = random_trig_profile(np.random.default_rng(5), degree=4)
    gaps = [cv.reduction_identity_gap(prof, 1.3, n) for n in (32, 64, 128)]
    assert gaps[1] <= gaps[0] / 3.0
    assert gaps[2] <= gaps[1] / 3.0
