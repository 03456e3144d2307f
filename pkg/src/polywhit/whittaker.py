"""Whittaker functions of gl_n and so_{2n+1} type via recursive kernel quadrature.

Evaluation works on tensor grids in log coordinates: the recursion kernels
factor into pairwise couplings exp(-a/b), so each level is a chain tensor
contraction.  Pointwise evaluation is the singleton-grid special case; the
laws module reuses the grid evaluators for its multidimensional integrals.
"""

import math
from dataclasses import dataclass

import numpy as np

from .polymer import MCEstimate
from .quadrature import QuadratureSpec

__all__ = [
    "TriangularPattern",
    "HalfTriangularPattern",
    "pattern_statistics",
    "whittaker_gl",
    "whittaker_so",
    "gl_tensor",
    "so_tensor",
    "whittaker_gt_oracle",
    "nt_convert",
    "nt_whittaker",
    "DimensionCapError",
]

# window margin in log coordinates: exp(-e^m) is far below the floor for m >= 4.2
_MARGIN = 4.2

_DEFAULT_QUAD = QuadratureSpec(nodes=193)


class DimensionCapError(ValueError):
    """Rank exceeds the configured evaluation cap."""


@dataclass(frozen=True)
class TriangularPattern:
    """Positive triangular array z_{i,j}, 1 <= j <= i <= n (geometric GT pattern)."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        for i, r in enumerate(rows):
            if len(r) != i + 1:
                raise ValueError("row i of a triangular pattern has i entries")
            if any(v <= 0 for v in r):
                raise ValueError("pattern entries must be positive")

    @property
    def depth(self):
        return len(self.rows)

    def bottom(self):
        return self.rows[-1]


@dataclass(frozen=True)
class HalfTriangularPattern:
    """Positive half-triangular array z_{i,j}, 1 <= i <= 2n, 1 <= j <= ceil(i/2)."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if len(rows) % 2 != 0:
            raise ValueError("half-triangular patterns have even depth 2n")
        for i, r in enumerate(rows, start=1):
            if len(r) != (i + 1) // 2:
                raise ValueError("row i of a half-triangular pattern has ceil(i/2) entries")
            if any(v <= 0 for v in r):
                raise ValueError("pattern entries must be positive")

    @property
    def depth(self):
        return len(self.rows)

    def bottom(self):
        return self.rows[-1]


def pattern_statistics(pattern):
    """(type vector, energy) of a geometric Gelfand-Tsetlin pattern.

    type_i is the ratio of consecutive row products; the energy sums
    z_{i+1,j+1}/z_{i,j} + z_{i,j}/z_{i+1,j}, with the half-triangular wall
    convention z_{i,j} = 1 for j > ceil(i/2).
    """
    rows = pattern.rows
    half = isinstance(pattern, HalfTriangularPattern)

    def entry(i, j):
        # 1-based; returns wall value where applicable
        r = rows[i - 1]
        if j <= len(r):
            return r[j - 1]
        if half:
            return 1.0
        raise IndexError((i, j))

    typ = []
    for i in range(1, len(rows) + 1):
        num = math.prod(rows[i - 1])
        den = math.prod(rows[i - 2]) if i > 1 else 1.0
        typ.append(num / den)
    e = 0.0
    for i in range(1, len(rows)):
        for j in range(1, len(rows[i - 1]) + 1):
            zij = entry(i, j)
            e += entry(i + 1, j + 1) / zij + zij / entry(i + 1, j)
    return tuple(typ), e


# --- grid evaluators -----------------------------------------------------------


def _axis_window(lo_scale, hi_scale, margin=_MARGIN):
    """Log window for a variable squeezed by exp(-lo_scale/u - u/hi_scale)."""
    return math.log(lo_scale) - margin, math.log(hi_scale) + margin


def _axis(window, nodes):
    a, b = window
    if b <= a:
        mid = 0.5 * (a + b)
        a, b = mid - 1.0, mid + 1.0
    t = np.linspace(a, b, nodes)
    return np.exp(t), np.full(nodes, t[1] - t[0])


def _power(x, a):
    # x**a for positive x and possibly complex a, vectorized without complex log warnings
    if isinstance(a, complex) or np.iscomplexobj(np.asarray(a)):
        return np.exp(np.asarray(a) * np.log(x))
    return x ** a


def gl_tensor(alpha, x_axes, quad=_DEFAULT_QUAD, cap=3):
    """Psi^{gl_n} with parameter alpha on the tensor grid prod(x_axes).

    x_axes is a list of positive 1-D arrays; the result has shape
    (len(x_axes[0]), ..., len(x_axes[n-1])).
    """
    n = len(alpha)
    if n > cap:
        raise DimensionCapError(f"gl rank {n} exceeds cap {cap}")
    if n != len(x_axes):
        raise ValueError("alpha and x_axes must have equal length")
    return _gl_tensor_rec(tuple(alpha), [np.asarray(a, dtype=float) for a in x_axes], quad)


def _gl_tensor_rec(alpha, x_axes, quad):
    n = len(alpha)
    if n == 0:
        return np.array(1.0)
    if n == 1:
        return _power(x_axes[0], alpha[0])
    an = alpha[-1]
    u_axes = []
    u_wts = []
    for j in range(n - 1):
        win = _axis_window(float(x_axes[j + 1].min()), float(x_axes[j].max()))
        u, w = _axis(win, quad.nodes)
        u_axes.append(u)
        u_wts.append(w)
    inner = _gl_tensor_rec(alpha[:-1], u_axes, quad)
    m = inner
    for j in range(n - 1):
        shape = [1] * (n - 1)
        shape[j] = -1
        m = m * (u_wts[j] * _power(u_axes[j], -an)).reshape(shape)
    # chain couplings: u_j binds x_j via exp(-u/x_j) and x_{j+1} via exp(-x_{j+1}/u)
    letters = "abcdefgh"
    xlet = "ijklmnop"
    operands = [m]
    subs = [letters[: n - 1]]
    for j in range(n - 1):
        operands.append(np.exp(-np.outer(1.0 / x_axes[j], u_axes[j])))
        subs.append(xlet[j] + letters[j])
        operands.append(np.exp(-np.outer(x_axes[j + 1], 1.0 / u_axes[j])))
        subs.append(xlet[j + 1] + letters[j])
    spec = ",".join(subs) + "->" + xlet[:n]
    out = np.einsum(spec, *operands, optimize=True)
    for j in range(n):
        shape = [1] * n
        shape[j] = -1
        out = out * _power(x_axes[j], an).reshape(shape)
    return out


def so_tensor(beta, x_axes, quad=_DEFAULT_QUAD, cap=2):
    """Psi^{so_{2n+1}} with parameter beta on the tensor grid prod(x_axes)."""
    n = len(beta)
    if n > cap:
        raise DimensionCapError(f"so rank {n} exceeds cap {cap}")
    if n != len(x_axes):
        raise ValueError("beta and x_axes must have equal length")
    return _so_tensor_rec(tuple(beta), [np.asarray(a, dtype=float) for a in x_axes], quad)


def _so_tensor_rec(beta, x_axes, quad):
    n = len(beta)
    if n == 0:
        return np.array(1.0)
    bn = beta[-1]
    xa = list(x_axes) + [np.array([1.0])]
    # v_j sits between x_{j+1} (and u_{j-1}) below and x_j (scaled up) above
    v_wins = [
        _axis_window(min(float(xa[j + 1].min()), 1.0) if j == n - 1 else float(xa[j + 1].min()),
                     float(xa[j].max()))
        for j in range(n)
    ]
    # u_j couples v_j from above and v_{j+1} from below; widen by one margin
    u_wins = [(v_wins[j + 1][0] - _MARGIN, v_wins[j][1] + _MARGIN) for j in range(n - 1)]
    u_axes = []
    u_wts = []
    for win in u_wins:
        u, w = _axis(win, quad.nodes)
        u_axes.append(u)
        u_wts.append(w)
    inner = _so_tensor_rec(beta[:-1], u_axes, quad) if n > 1 else np.array(1.0)
    m = inner
    for j in range(n - 1):
        shape = [1] * (n - 1)
        shape[j] = -1
        m = m * (u_wts[j] * _power(u_axes[j], -bn)).reshape(shape)

    letters = "abcdefgh"   # u indices
    xlet = "ijklmnop"      # x indices (x_{n+1} singleton gets the last letter)
    operands = []
    subs = []
    if n > 1:
        operands.append(m)
        subs.append(letters[: n - 1])
    for j in range(n):
        v, vw = _axis(v_wins[j], quad.nodes)
        fac = vw * _power(v, 2.0 * bn)
        e_xj = np.exp(-np.outer(1.0 / xa[j], v))          # exp(-v / x_j)
        e_xj1 = np.exp(-np.outer(xa[j + 1], 1.0 / v))     # exp(-x_{j+1} / v)
        vsub = "z"
        ops = [fac, e_xj, e_xj1]
        ss = [vsub, xlet[j] + vsub, xlet[j + 1] + vsub]
        if j >= 1:
            ops.append(np.exp(-np.outer(1.0 / u_axes[j - 1], v)))   # exp(-v / u_{j-1})
            ss.append(letters[j - 1] + vsub)
        if j <= n - 2:
            ops.append(np.exp(-np.outer(u_axes[j], 1.0 / v)))       # exp(-u_j / v)
            ss.append(letters[j] + vsub)
        out_idx = "".join(sorted(set("".join(s.replace(vsub, "") for s in ss))))
        vj = np.einsum(",".join(ss) + "->" + out_idx, *ops, optimize=True)
        operands.append(vj)
        subs.append(out_idx)
    target = xlet[:n] if n >= 1 else ""
    spec = ",".join(subs) + "->" + target + xlet[n]
    out = np.einsum(spec, *operands, optimize=True)
    out = out[..., 0]  # collapse the singleton x_{n+1} axis
    for j in range(n):
        shape = [1] * n
        shape[j] = -1
        out = out * _power(x_axes[j], -bn).reshape(shape)
    return out


def whittaker_gl(alpha, x, quad=_DEFAULT_QUAD, cap=3):
    """Psi^{gl_n}_alpha(x) at a point, by nested quadrature of the recursion."""
    x = tuple(float(v) for v in x)
    if any(v <= 0 for v in x):
        raise ValueError("whittaker_gl requires positive x")
    t = gl_tensor(tuple(alpha), [np.array([v]) for v in x], quad, cap=cap)
    val = t.reshape(-1)[0]
    return complex(val) if np.iscomplexobj(t) else float(val)


def whittaker_so(beta, x, quad=_DEFAULT_QUAD, cap=2):
    """Psi^{so_{2n+1}}_beta(x) at a point; Psi^{so_1} of the empty argument is 1."""
    x = tuple(float(v) for v in x)
    if any(v <= 0 for v in x):
        raise ValueError("whittaker_so requires positive x")
    t = so_tensor(tuple(beta), [np.array([v]) for v in x], quad, cap=cap)
    val = t.reshape(-1)[0]
    return complex(val) if np.iscomplexobj(t) else float(val)


# --- pattern-integral Monte Carlo oracle ---------------------------------------


def _gl_pattern_logweight(z_rows, alpha):
    """log of type(z)^alpha * exp(-energy) for a full triangular pattern."""
    n = len(z_rows)
    prev = 0.0
    res = 0.0
    for i in range(n):
        s = sum(np.log(z) for z in z_rows[i])
        res = res + alpha[i] * (s - prev)
        prev = s
    for i in range(n - 1):
        for j in range(len(z_rows[i])):
            res = res - z_rows[i + 1][j + 1] / z_rows[i][j] - z_rows[i][j] / z_rows[i + 1][j]
    return res


def _so_pattern_logweight(z_rows, beta):
    """log of type(z)^{beta^{+-}} * exp(-energy) for a half-triangular pattern.

    Wall convention: entries right of row width count as 1 in the energy.
    """
    n2 = len(z_rows)
    n = n2 // 2
    bpm = []
    for k in range(n):
        bpm.extend([beta[k], -beta[k]])
    prev = 0.0
    res = 0.0
    for i in range(n2):
        s = sum(np.log(z) for z in z_rows[i])
        res = res + bpm[i] * (s - prev)
        prev = s
    for i in range(n2 - 1):
        for j in range(len(z_rows[i])):
            se = z_rows[i + 1][j + 1] if (j + 1) < len(z_rows[i + 1]) else 1.0
            res = res - se / z_rows[i][j] - z_rows[i][j] / z_rows[i + 1][j]
    return res


def whittaker_gt_oracle(family, params, x, n_mc, seed, sigma=1.3):
    """Importance-sampled Monte Carlo of the pattern integral (log-normal proposal).

    Independent oracle for the recursive evaluators; family is 'gl' or 'so'.
    """
    rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
    x = tuple(float(v) for v in x)
    n = len(x)
    center = float(np.mean(np.log(x)))
    if family == "gl":
        free_shape = [(i + 1) for i in range(n - 1)]
    elif family == "so":
        free_shape = [((i + 1) + 1) // 2 for i in range(2 * n - 1)]
    else:
        raise ValueError("family must be 'gl' or 'so'")
    nfree = sum(free_shape)
    if nfree == 0:
        return MCEstimate(1.0, 0.0, n_mc, seed)
    t = rng.normal(center, sigma, size=(n_mc, nfree))
    # proposal density in the dz/z measure is the normal density of t
    logq = -0.5 * ((t - center) / sigma) ** 2 - math.log(sigma * math.sqrt(2 * math.pi))
    logq = logq.sum(axis=1)
    z_rows = []
    pos = 0
    for width in free_shape:
        z_rows.append([np.exp(t[:, pos + j]) for j in range(width)])
        pos += width
    z_rows.append([np.full(n_mc, v) for v in x])
    if family == "gl":
        logw = _gl_pattern_logweight(z_rows, params)
    else:
        logw = _so_pattern_logweight(z_rows, params)
    vals = np.exp(logw - logq)
    mean = float(np.mean(vals.real)) if np.iscomplexobj(vals) else float(np.mean(vals))
    std = float(np.std(vals.real if np.iscomplexobj(vals) else vals)) / math.sqrt(n_mc)
    return MCEstimate(mean, std, n_mc, seed)


# --- number-theory parametrization bridge --------------------------------------


def nt_convert(x):
    """Change of variables x -> y: y_j = sqrt(x_{j+1}/x_j)/pi, y_n = 1/(pi sqrt(x_n))."""
    x = tuple(float(v) for v in x)
    if any(v <= 0 for v in x):
        raise ValueError("nt_convert requires positive x")
    n = len(x)
    y = [math.sqrt(x[j + 1] / x[j]) / math.pi for j in range(n - 1)]
    y.append(1.0 / (math.pi * math.sqrt(x[n - 1])))
    return tuple(y)


def nt_invert(y):
    """Inverse of nt_convert: recover x from y."""
    y = tuple(float(v) for v in y)
    n = len(y)
    x = [0.0] * n
    x[n - 1] = 1.0 / (math.pi * y[n - 1]) ** 2
    for j in range(n - 2, -1, -1):
        x[j] = x[j + 1] / (math.pi * y[j]) ** 2
    return tuple(x)


def nt_whittaker(kind, params, y, quad=_DEFAULT_QUAD):
    """Number-theory normalized Whittaker functions W^A_{n,a}(y), W^B_{n,b}(y).

    Kind 'A' maps to pi^{-(n+1)|alpha|} Psi^{gl_n}_{-alpha}(x) with
    a_i = 2 alpha_{n-i+1}; kind 'B' to Psi^{so_{2n+1}}_beta(x) with b_i = 2 beta_i.
    """
    y = tuple(float(v) for v in y)
    if any(v <= 0 for v in y):
        raise ValueError("nt_whittaker requires positive y")
    x = nt_invert(y)
    n = len(y)
    if kind == "A":
        a = tuple(params)
        alpha = tuple(a[n - k - 1] / 2.0 for k in range(n))
        pref = math.pi ** (-(n + 1) * sum(alpha).real) if np.iscomplexobj(np.asarray(alpha)) \
            else math.pi ** (-(n + 1) * sum(alpha))
        return pref * whittaker_gl(tuple(-ai for ai in alpha), x, quad)
    if kind == "B":
        beta = tuple(bi / 2.0 for bi in params)
        return whittaker_so(beta, x, quad)
    raise ValueError("kind must be 'A' or 'B'")
