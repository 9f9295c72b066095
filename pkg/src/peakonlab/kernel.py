"""Periodic peaked-wave kernel on the 2*pi circle.

The kernel is the 2*pi-periodic solution of (1 - d^2/dx^2) phi = 2 delta_0,

    phi(x) = cosh(pi - |x|) / sinh(pi),   x in [-pi, pi],

a piecewise-C^1 wave profile with a single corner at x = 0.  Its peak and
trough heights

    M = phi(0) = coth(pi),   m = phi(+-pi) = csch(pi)

satisfy M^2 - m^2 = 1, and away from the corner (phi')^2 = phi^2 - m^2.
The peaked traveling wave moves with speed equal to its crest height, c = M,
and solves the stationary equation

    -M phi + phi^2/2 + (3/4) phi * phi^2 = m^2

(* is circle convolution), equivalently (3/4) phi*phi^2 + phi^2/2 = M phi + m^2.

All values come from the cosh/sinh closed form; nothing is tabulated.  The
one-sided slopes at the corner are phi'(0+) = -1 and phi'(0-) = +1; quadrature
code that needs a single value at the corner uses their average, 0, which is
the midpoint-of-jump convention under which trapezoid-type rules keep their
order for jump integrands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from .quadrature import ordered_sum, panel_integrals

TWO_PI = 2.0 * math.pi

#: crest height of the kernel, coth(pi); also the wave speed of the peaked wave
M = math.cosh(math.pi) / math.sinh(math.pi)

#: trough height of the kernel, csch(pi)
m = 1.0 / math.sinh(math.pi)

#: speed of the peaked traveling wave (the crest moves with the local flow)
WAVE_SPEED = M

Side = Literal["left", "right", "interior"]


@dataclass(frozen=True)
class GreenKernel:
    """Crest/trough constants of the periodic kernel.

    Invariants: M**2 - m**2 == 1 (hyperbolic identity), M = phi(0),
    m = phi(+-pi).
    """

    M: float
    m: float


KERNEL = GreenKernel(M=M, m=m)


def reduce_angle(x):
    """Reduce to the fundamental interval [-pi, pi].

    Uses x - 2*pi*rint(x / 2*pi), i.e. IEEE-style remainder with
    round-half-to-even, so the reduction is deterministic across platforms.
    """
    x = np.asarray(x, dtype=float)
    r = x - TWO_PI * np.rint(x / TWO_PI)
    return r if r.ndim else float(r)


def phi(x):
    """Kernel value; valid for any argument (reduces internally)."""
    r = np.abs(reduce_angle(x))
    out = m * np.cosh(math.pi - r)
    return out if isinstance(r, np.ndarray) else float(out)


def phi_prime(x, side: Side = "interior"):
    """Piecewise derivative of the kernel.

    ``side`` selects the one-sided limit when x is congruent to 0: 'right'
    gives -1, 'left' gives +1, 'interior' the jump midpoint 0.  Off the
    corner the three choices agree.
    """
    r = reduce_angle(x)
    scalar = not isinstance(r, np.ndarray) or r.ndim == 0
    r = np.atleast_1d(r)
    out = -np.sign(r) * m * np.sinh(math.pi - np.abs(r))
    at_peak = (r == 0.0)
    if side == "right":
        out = np.where(at_peak, -1.0, out)
    elif side == "left":
        out = np.where(at_peak, 1.0, out)
    return float(out[0]) if scalar else out


def phi_eval(x, side: Side = "interior"):
    """Return (phi(x), phi'(x)) with the requested corner convention."""
    return phi(x), phi_prime(x, side)


def phi_open_interval(y):
    """phi on the open parameterization (0, 2*pi): m*cosh(pi - y), no modulus."""
    return m * np.cosh(math.pi - np.asarray(y, dtype=float))


def phi_prime_open_interval(y):
    """phi' on (0, 2*pi); at the endpoints this is the correct one-sided limit."""
    return m * np.sinh(np.asarray(y, dtype=float) - math.pi)


def circle_convolution(kernel: Literal["phi", "phi_prime"],
                       density: Callable[[np.ndarray], np.ndarray],
                       density_prime: Callable[[np.ndarray], np.ndarray],
                       x: float,
                       nodes: int) -> float:
    """Quadrature of int_0^{2pi} K(x - y) g(y) dy for an analytic density g.

    K is phi or its piecewise derivative.  The uniform grid is split at the
    kernel corner y = x (mod 2*pi); each smooth piece is integrated with the
    derivative-corrected panel rule using one-sided kernel data at the split,
    so the corner costs no accuracy.  ``density``/``density_prime`` must
    return the (0, 2*pi) branch values; at y = 0 and y = 2*pi that means the
    inward one-sided limits.
    """
    if nodes < 8:
        raise ValueError("nodes must be >= 8")
    xr = float(np.mod(x, TWO_PI))
    y = np.linspace(0.0, TWO_PI, nodes + 1)
    g = np.asarray(density(y), dtype=float)
    gp = np.asarray(density_prime(y), dtype=float)

    d = xr - y  # in (-2*pi, 2*pi], |d| <= 2*pi: closed form valid directly
    ad = np.abs(d)
    kv_phi = m * np.cosh(math.pi - ad)
    kv_phip = -np.sign(d) * m * np.sinh(math.pi - ad)
    if kernel == "phi":
        K, Kp = kv_phi, kv_phip
        K_at_jump = (M, M)          # phi continuous at the corner
        Kp_at_jump = (-1.0, 1.0)    # d -> 0+, d -> 0-
    elif kernel == "phi_prime":
        K, Kp = kv_phip, kv_phi     # (phi')' = phi away from the corner
        K_at_jump = (-1.0, 1.0)
        Kp_at_jump = (M, M)
    else:
        raise ValueError(f"unknown kernel {kernel!r}")

    F = K * g
    Fp = -Kp * g + K * gp  # derivative in y

    def piece(ya, yb, Fa, Fb, Fpa, Fpb, lo, hi):
        """Corrected-trapezoid over [ya..nodes lo..hi..yb] with custom ends."""
        ys = np.concatenate(([ya], y[lo:hi], [yb]))
        fs = np.concatenate(([Fa], F[lo:hi], [Fb]))
        fps = np.concatenate(([Fpa], Fp[lo:hi], [Fpb]))
        dx = np.diff(ys)
        keep = dx > 0
        pans = panel_integrals(dx[keep],
                               fs[:-1][keep], fs[1:][keep],
                               fps[:-1][keep], fps[1:][keep])
        return ordered_sum(pans)

    if xr == 0.0:
        # corner sits on both domain ends: one-sided kernel data there
        g0, gp0 = float(density(np.asarray([0.0]))[0]), float(density_prime(np.asarray([0.0]))[0])
        g1, gp1 = float(density(np.asarray([TWO_PI]))[0]), float(density_prime(np.asarray([TWO_PI]))[0])
        Fa = K_at_jump[1] * g0                       # y -> 0+: d -> 0-
        Fpa = -Kp_at_jump[1] * g0 + K_at_jump[1] * gp0
        Fb = K_at_jump[0] * g1                       # y -> 2*pi-: d -> 0+
        Fpb = -Kp_at_jump[0] * g1 + K_at_jump[0] * gp1
        return piece(0.0, TWO_PI, Fa, Fb, Fpa, Fpb, 1, nodes)

    # values approaching the corner from each side
    gx = float(density(np.asarray([xr]))[0])
    gpx = float(density_prime(np.asarray([xr]))[0])
    F_lo = K_at_jump[0] * gx
    Fp_lo = -Kp_at_jump[0] * gx + K_at_jump[0] * gpx
    F_hi = K_at_jump[1] * gx
    Fp_hi = -Kp_at_jump[1] * gx + K_at_jump[1] * gpx

    j = int(round(xr / (TWO_PI / nodes)))
    if abs(y[j] - xr) < 1e-12 * TWO_PI:
        lower = piece(0.0, y[j], F[0], F_lo, Fp[0], Fp_lo, 1, j)
        upper = piece(y[j], TWO_PI, F_hi, F[nodes], Fp_hi, Fp[nodes], j + 1, nodes)
    else:
        k = int(np.searchsorted(y, xr)) - 1
        lower = piece(0.0, xr, F[0], F_lo, Fp[0], Fp_lo, 1, k + 1)
        upper = piece(xr, TWO_PI, F_hi, F[nodes], Fp_hi, Fp[nodes], k + 1, nodes)
    return lower + upper


def stationary_residual(x: float, quadrature_nodes: int = 4096) -> float:
    """Residual of the stationary peaked-wave equation at x.

    Evaluates |-M phi + phi^2/2 + (3/4)(phi * phi^2) - m^2| with the
    convolution done by :func:`circle_convolution`; tends to 0 as the node
    count grows.  x must not sit on the corner (x != 0 mod 2*pi).
    """
    if float(np.mod(x, TWO_PI)) == 0.0:
        raise ValueError("stationary equation holds piecewise away from the corner")
    if quadrature_nodes < 64:
        raise ValueError("quadrature_nodes must be >= 64")
    conv = circle_convolution(
        "phi",
        lambda y: phi_open_interval(y) ** 2,
        lambda y: 2.0 * phi_open_interval(y) * phi_prime_open_interval(y),
        x, quadrature_nodes)
    p = phi(x)
    return abs(-M * p + 0.5 * p * p + 0.75 * conv - m * m)
