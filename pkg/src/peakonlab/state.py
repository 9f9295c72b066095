"""Solution state along characteristics.

The fundamental interval for characteristics is [0, 2*pi]: the peak sits on
the fixed curves s = 0 and s = 2*pi, and the interval between them is
invariant under the flow.  A state carries, per characteristic, the position
X, the perturbation value V, its antiderivative W = int_0^X v, the slope
U = v_x, and the jacobian J = dX/ds.  Endpoint entries hold one-sided data:
U[0] is the slope just right of the peak, U[-1] just left of it.

Boundary identities that every valid state satisfies: X[0] = 0,
X[-1] = 2*pi, W[0] = 0, W[-1] = 2*pi*vbar, V[0] = V[-1] (the peak value).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .profiles import InitialCondition

TWO_PI = 2.0 * math.pi


def cosine_grid(n: int) -> np.ndarray:
    """n characteristic parameters on [0, 2*pi], clustered at both ends.

    s_k = pi (1 - cos(pi k/(n-1))).  The jacobian degenerates like e^{-t}
    at s = 0 and grows like e^{t} at s = 2*pi; end clustering keeps both the
    contracting and the stretching end resolved.
    """
    if n < 2:
        raise ValueError("need at least 2 characteristics")
    return math.pi * (1.0 - np.cos(np.linspace(0.0, math.pi, n)))


@dataclass
class CharacteristicState:
    """Arrays (s, X, V, W, U, J) at one instant, plus the conserved mean."""

    t: float
    s: np.ndarray
    X: np.ndarray
    V: np.ndarray
    W: np.ndarray
    U: np.ndarray
    J: np.ndarray
    vbar: float

    @property
    def v_peak(self) -> float:
        """Perturbation value at the peak (carried by the s = 0 endpoint)."""
        return float(self.V[0])

    def validate(self, atol: float = 1e-8) -> None:
        arrays = (self.s, self.X, self.V, self.W, self.U, self.J)
        n = len(self.s)
        if any(len(a) != n for a in arrays):
            raise ValueError("state arrays must share one length")
        if abs(self.X[0]) > atol or abs(self.X[-1] - TWO_PI) > atol:
            raise ValueError("characteristic endpoints must stay at 0 and 2*pi")
        if np.any(np.diff(self.X) <= 0):
            raise ValueError("X must be strictly increasing in s")
        if np.any(self.J <= 0):
            raise ValueError("jacobian must stay positive")
        if abs(self.W[0]) > atol:
            raise ValueError("W must vanish at the peak")
        if abs(self.W[-1] - TWO_PI * self.vbar) > atol:
            raise ValueError("W(2*pi) must equal 2*pi*vbar")
        if abs(self.V[0] - self.V[-1]) > atol:
            raise ValueError("peak value must match at both endpoints")


def initial_state(ic: InitialCondition, n_chars: int) -> CharacteristicState:
    """t = 0 state on the cosine-stretched grid: X = s, J = 1."""
    s = cosine_grid(n_chars)
    return CharacteristicState(
        t=0.0,
        s=s,
        X=s.copy(),
        V=np.asarray(ic.value(s), dtype=float),
        W=np.asarray(ic.antiderivative(s), dtype=float),
        U=np.asarray(ic.slope(s), dtype=float),
        J=np.ones_like(s),
        vbar=ic.vbar,
    )
