"""Quadrature helpers: log-axis trapezoid rules for fast-decaying integrands."""

from dataclasses import dataclass

import numpy as np

__all__ = ["QuadratureSpec", "support_window", "log_axis", "leggauss_ab"]


@dataclass(frozen=True)
class QuadratureSpec:
    """Node count per axis, scan half-width in log coordinates, scheme tag."""

    nodes: int = 193
    halfwidth: float = 60.0
    scheme: str = "trapezoid-log"
    rel_floor: float = 1e-17

    def __post_init__(self):
        if self.nodes < 8:
            raise ValueError("QuadratureSpec requires nodes >= 8")


def support_window(log_env, lo, hi, drop, scan_pts=601):
    """Window [a, b] where the vectorized log-envelope stays within `drop` of its peak.

    `drop` is positive (e.g. 40 for a relative floor of e^-40).  The window is
    padded by one scan step on each side.
    """
    t = np.linspace(lo, hi, scan_pts)
    with np.errstate(over="ignore", invalid="ignore"):
        v = np.asarray(log_env(t), dtype=float)
    v[~np.isfinite(v)] = -np.inf
    k = int(np.argmax(v))
    vmax = v[k]
    if not np.isfinite(vmax):
        raise ValueError("support_window: envelope is -inf on the scan range")
    thresh = vmax - drop
    left = k
    while left > 0 and v[left - 1] >= thresh:
        left -= 1
    right = k
    while right < len(t) - 1 and v[right + 1] >= thresh:
        right += 1
    step = t[1] - t[0]
    return t[left] - step, t[right] + step


def log_axis(a, b, nodes):
    """Uniform log-coordinate nodes on [a, b]: returns (x = e^t, weight dt per node).

    With these weights, sum(f(x) * w) approximates int f(x) dx/x; the endpoint
    halving of the trapezoid rule is immaterial once the integrand has decayed
    below the truncation floor.
    """
    t = np.linspace(a, b, nodes)
    dt = t[1] - t[0]
    return np.exp(t), np.full(nodes, dt)


def leggauss_ab(n, a, b):
    """Gauss-Legendre nodes/weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w
