"""Nonlocal circle convolutions against the peaked kernel and its derivative.

The transport form of the wave equation couples the local flow to two
half-convolutions of the perturbation density

    q[v] = v^2 + (1/2) v_x^2,
    Q[v](x) = (1/2) int_T phi'(x - y) q[v](y) dy,
    P[v](x) = (1/2) int_T phi(x - y)  q[v](y) dy.

Q has zero circle mean (so the perturbation mean is conserved) and is the
x-derivative of P.  Densities arrive as samples on position nodes covering
[0, 2*pi]; when the nodes are images of characteristics the sample carries
the jacobian dX/ds and the quadrature runs in the characteristic parameter
with weight J, which keeps steepening fronts resolved where X compresses.

Quadrature is the derivative-corrected trapezoid of :mod:`.quadrature`;
panels containing the kernel corner are split there with one-sided kernel
values, so the piecewise-smooth integrands are integrated piecewise.  Panel
sums run left to right for bit-reproducible results.

For the identity that eliminates the convolutions from the linearized flow,
see :func:`reduction_identity_gap`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernel
from .kernel import M, TWO_PI, m
from .quadrature import fd_derivative, ordered_sum, panel_integrals

_JUMP_SNAP = 1e-12 * TWO_PI


@dataclass(frozen=True)
class DensitySample:
    """Perturbation samples on increasing position nodes spanning [0, 2*pi].

    ``jacobian`` is present when the nodes are images of characteristics; it
    must be strictly positive.  The first and last node coincide on the
    circle, which is how one-sided slope data at the peak is carried.
    """

    nodes: np.ndarray
    v: np.ndarray
    vx: np.ndarray
    jacobian: np.ndarray | None = None

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        v = np.asarray(self.v, dtype=float)
        vx = np.asarray(self.vx, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "vx", vx)
        if not (nodes.shape == v.shape == vx.shape) or nodes.ndim != 1:
            raise ValueError("nodes, v, vx must be 1-d arrays of one length")
        if len(nodes) < 2:
            raise ValueError("need at least 2 nodes")
        if abs(nodes[0]) > 1e-12 or abs(nodes[-1] - TWO_PI) > 1e-9:
            raise ValueError("nodes must span [0, 2*pi]")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if self.jacobian is not None:
            jac = np.asarray(self.jacobian, dtype=float)
            object.__setattr__(self, "jacobian", jac)
            if jac.shape != nodes.shape:
                raise ValueError("jacobian length mismatch")
            if np.any(jac <= 0):
                raise ValueError("jacobian must be strictly positive")


def q_density(sample: DensitySample) -> np.ndarray:
    """Pointwise density v^2 + v_x^2/2; nonnegative by construction."""
    return sample.v ** 2 + 0.5 * sample.vx ** 2


def _integration_frame(sample: DensitySample):
    """Integration variable, weighted density, its derivative, and dX/dtau.

    Without a jacobian the integration variable is position itself.  With a
    jacobian the parameter grid is induced from the positions through
    dtau = dX * (1/J)_panel-mean, and the integrand picks up the weight J.
    """
    y = sample.nodes
    q = q_density(sample)
    if sample.jacobian is None:
        tau = y
        w = q
        dpos = np.ones_like(y)
    else:
        J = sample.jacobian
        dtau = np.diff(y) * 0.5 * (1.0 / J[:-1] + 1.0 / J[1:])
        tau = np.concatenate(([0.0], np.cumsum(dtau)))
        w = q * J
        dpos = J
    wp = fd_derivative(tau, w) if len(tau) >= 3 else np.zeros_like(w)
    return y, tau, w, wp, dpos


def _quadratic_at(xs: np.ndarray, ys: np.ndarray, x: float) -> float:
    """Lagrange quadratic through three points, evaluated at x."""
    (x0, x1, x2), (y0, y1, y2) = xs, ys
    return (y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2))
            + y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2))
            + y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1)))


def _kernel_arrays(which: str, d: np.ndarray):
    """Kernel and its d-derivative on |d| <= 2*pi, corner handled by caller."""
    ad = np.abs(d)
    c = m * np.cosh(math.pi - ad)
    s = -np.sign(d) * m * np.sinh(math.pi - ad)
    if which == "phi":
        return c, s, (M, M), (-1.0, 1.0)
    # which == "phi_prime": second derivative equals phi away from the corner
    return s, c, (-1.0, 1.0), (M, M)


def _convolve_at(which: str, frame, x: float) -> float:
    y, tau, w, wp, dpos = frame
    n_last = len(y) - 1
    xr = float(np.mod(x, TWO_PI))
    d = xr - y
    K, Kd, K_jump, Kd_jump = _kernel_arrays(which, d)
    F = K * w
    Fp = -Kd * dpos * w + K * wp  # derivative in tau

    def piece(ts, fs, fps):
        dt = np.diff(ts)
        keep = dt > 0
        return ordered_sum(panel_integrals(dt[keep], fs[:-1][keep], fs[1:][keep],
                                           fps[:-1][keep], fps[1:][keep]))

    if xr == 0.0:
        # corner at both domain ends; interior formulas already give the
        # correct branch at y = 2*pi, only the y = 0 node needs the d->0- side
        F0 = K_jump[1] * w[0]
        Fp0 = -Kd_jump[1] * dpos[0] * w[0] + K_jump[1] * wp[0]
        fs = np.concatenate(([F0], F[1:]))
        fps = np.concatenate(([Fp0], Fp[1:]))
        return piece(tau, fs, fps)

    idx = int(np.searchsorted(y, xr))
    on_node = None
    for cand in (idx - 1, idx, idx + 1):
        if 0 <= cand <= n_last and abs(y[cand] - xr) < _JUMP_SNAP:
            on_node = cand
            break
    if on_node is not None:
        j = on_node
        F_lo = K_jump[0] * w[j]
        Fp_lo = -Kd_jump[0] * dpos[j] * w[j] + K_jump[0] * wp[j]
        F_hi = K_jump[1] * w[j]
        Fp_hi = -Kd_jump[1] * dpos[j] * w[j] + K_jump[1] * wp[j]
        lower = piece(tau[:j + 1],
                      np.concatenate((F[:j], [F_lo])),
                      np.concatenate((Fp[:j], [Fp_lo])))
        upper = piece(tau[j:],
                      np.concatenate(([F_hi], F[j + 1:])),
                      np.concatenate(([Fp_hi], Fp[j + 1:])))
        return lower + upper

    # split the panel containing the corner; density data at the split point
    # comes from the quadratic through the three nearest nodes
    k = idx - 1
    lo = min(max(k - 1, 0), n_last - 2)
    sl = slice(lo, lo + 3)
    w_x = _quadratic_at(y[sl], w[sl], xr)
    wp_x = _quadratic_at(y[sl], wp[sl], xr)
    dpos_x = _quadratic_at(y[sl], dpos[sl], xr)
    tau_x = _quadratic_at(y[sl], tau[sl], xr)
    F_lo = K_jump[0] * w_x
    Fp_lo = -Kd_jump[0] * dpos_x * w_x + K_jump[0] * wp_x
    F_hi = K_jump[1] * w_x
    Fp_hi = -Kd_jump[1] * dpos_x * w_x + K_jump[1] * wp_x
    lower = piece(np.concatenate((tau[:k + 1], [tau_x])),
                  np.concatenate((F[:k + 1], [F_lo])),
                  np.concatenate((Fp[:k + 1], [Fp_lo])))
    upper = piece(np.concatenate(([tau_x], tau[k + 1:])),
                  np.concatenate(([F_hi], F[k + 1:])),
                  np.concatenate(([Fp_hi], Fp[k + 1:])))
    return lower + upper


def conv_q(sample: DensitySample, targets=None) -> np.ndarray:
    """Q[v] at the target positions (the sample's own nodes by default)."""
    if targets is None:
        targets = sample.nodes
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    if targets.size == 0:
        raise ValueError("targets must be nonempty")
    frame = _integration_frame(sample)
    return np.array([0.5 * _convolve_at("phi_prime", frame, x) for x in targets])


def conv_p(sample: DensitySample, targets=None) -> np.ndarray:
    """P[v] at the target positions (the sample's own nodes by default)."""
    if targets is None:
        targets = sample.nodes
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    if targets.size == 0:
        raise ValueError("targets must be nonempty")
    frame = _integration_frame(sample)
    return np.array([0.5 * _convolve_at("phi", frame, x) for x in targets])


def node_convolutions(s: np.ndarray, X: np.ndarray, V: np.ndarray,
                      U: np.ndarray, J: np.ndarray):
    """Q[v] and P[v] at every characteristic node in O(n).

    Splitting the kernel's cosh/sinh of (X_i - X_j) by addition formulas
    turns both convolutions into four cumulative corrected-trapezoid sums of
    cosh(X) g and sinh(X) g with g = q J, evaluated in the characteristic
    parameter s.  The result is algebraically the panel-split rule of
    :func:`conv_q`/:func:`conv_p` with the true parameter spacings, at O(n)
    instead of O(n^2).  Used by the nonlinear integrator each stage.
    """
    g = (V * V + 0.5 * U * U) * J
    gp = fd_derivative(s, g)
    cX = np.cosh(X)
    sX = np.sinh(X)
    h_c = cX * g
    h_s = sX * g
    hp_c = sX * J * g + cX * gp
    hp_s = cX * J * g + sX * gp
    ds = np.diff(s)
    pan_c = panel_integrals(ds, h_c[:-1], h_c[1:], hp_c[:-1], hp_c[1:])
    pan_s = panel_integrals(ds, h_s[:-1], h_s[1:], hp_s[:-1], hp_s[1:])
    low_c = np.concatenate(([0.0], np.cumsum(pan_c)))
    low_s = np.concatenate(([0.0], np.cumsum(pan_s)))
    high_c = low_c[-1] - low_c
    high_s = low_s[-1] - low_s

    sh_lo = np.sinh(math.pi - X)
    ch_lo = np.cosh(math.pi - X)
    sh_hi = np.sinh(math.pi + X)
    ch_hi = np.cosh(math.pi + X)
    Q = 0.5 * m * (-sh_lo * low_c - ch_lo * low_s + sh_hi * high_c - ch_hi * high_s)
    P = 0.5 * m * (ch_lo * low_c + sh_lo * low_s + ch_hi * high_c - sh_hi * high_s)
    return Q, P


def reduction_identity_gap(profile, x: float, nodes: int = 4096) -> float:
    """Residual of the identity that removes convolutions from the linear flow.

    For a periodic profile v the combination

        [v(0) - v(x)] phi'(x) - (phi' * phi v)(x) - (1/2)(phi' * phi' v_x)(x)

    collapses to  phi(x) w0(x) - (1/2) m^2 sinh(x) * (2*pi vbar)  with
    w0(x) = int_0^x v.  Left side by kernel quadrature, right side in closed
    form from the profile; returns |left - right|, which tends to 0 with the
    node count.  x is reduced to [-pi, pi] (sinh is not periodic).
    """
    xr = float(kernel.reduce_angle(x))
    phiv = lambda y: kernel.phi_open_interval(y) * profile.value(y)
    phiv_p = lambda y: (kernel.phi_prime_open_interval(y) * profile.value(y)
                        + kernel.phi_open_interval(y) * profile.slope(y))
    phipvx = lambda y: kernel.phi_prime_open_interval(y) * profile.slope(y)
    phipvx_p = lambda y: (kernel.phi_open_interval(y) * profile.slope(y)
                          + kernel.phi_prime_open_interval(y) * profile.second_derivative(y))
    conv1 = kernel.circle_convolution("phi_prime", phiv, phiv_p, xr, nodes)
    conv2 = kernel.circle_convolution("phi_prime", phipvx, phipvx_p, xr, nodes)
    v0 = profile.value(0.0)
    vx_val = profile.value(np.mod(xr, TWO_PI))
    left = (v0 - vx_val) * kernel.phi_prime(xr) - conv1 - 0.5 * conv2

    w0 = profile.antiderivative(np.mod(xr, TWO_PI))
    if xr < 0.0:
        w0 -= TWO_PI * profile.vbar
    right = kernel.phi(xr) * w0 - 0.5 * m * m * math.sinh(xr) * TWO_PI * profile.vbar
    return abs(left - right)
