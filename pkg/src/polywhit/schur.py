"""Classical and symplectic Schur polynomials (two routes each) and their
continuum analogues arising in the zero-temperature limits.

Exact polynomial routes use Fraction arithmetic; the continuum functions use
confluent alternants, so coinciding spectral parameters are handled by the
same determinant formulas with derivative columns.
"""

import itertools
import math
from fractions import Fraction

import numpy as np

from .quadrature import leggauss_ab

__all__ = [
    "Partition",
    "check_ordered_point",
    "schur_poly",
    "schur_poly_tableaux",
    "sp_poly",
    "sp_cont",
    "s_cont",
    "sp_cont_polytope_oracle",
    "CONFLUENCE_THRESHOLD",
]

CONFLUENCE_THRESHOLD = 1e-6


def Partition(mu):
    """Validated weakly decreasing nonnegative integer vector."""
    mu = tuple(int(m) for m in mu)
    if any(m < 0 for m in mu):
        raise ValueError("partition parts must be nonnegative")
    if any(mu[i] < mu[i + 1] for i in range(len(mu) - 1)):
        raise ValueError("partition parts must be weakly decreasing")
    return mu


def check_ordered_point(x):
    """Validated coordinates with 0 <= x_n <= ... <= x_1."""
    x = tuple(float(v) for v in x)
    if any(x[i] < x[i + 1] for i in range(len(x) - 1)) or (x and x[-1] < 0):
        raise ValueError("requires 0 <= x_n <= ... <= x_1")
    return x


# --- exact polynomial routes ----------------------------------------------------


def _complete_homogeneous(y, kmax):
    """h_0..h_kmax of the variables y (exact for Fraction input)."""
    one = Fraction(1) if any(isinstance(v, Fraction) for v in y) else 1.0
    h = [one] + [0 * one] * kmax
    for v in y:
        for k in range(1, kmax + 1):
            h[k] = h[k] + v * h[k - 1]
    return h


def _det_bareiss(m):
    """Fraction-free Bareiss determinant (exact on Fractions)."""
    a = [row[:] for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0 * a[0][0]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def schur_poly(mu, y):
    """Schur polynomial s_mu(y) by the Jacobi-Trudi determinant of complete
    homogeneous polynomials (division-free; exact on Fractions)."""
    mu = Partition(mu)
    n = len(mu)
    if n == 0:
        return Fraction(1) if any(isinstance(v, Fraction) for v in y) else 1.0
    h = _complete_homogeneous(y, mu[0] + n)
    zero = 0 * h[0]

    def hh(k):
        return zero if k < 0 else h[k]

    m = [[hh(mu[i] - i + j) for j in range(n)] for i in range(n)]
    return _det_bareiss(m)


def _ssyt_fill(shape, nvars):
    """All semistandard Young tableaux of the given shape with entries <= nvars."""
    rows = len(shape)
    tableau = [[0] * shape[r] for r in range(rows)]
    cells = [(r, c) for r in range(rows) for c in range(shape[r])]

    def rec(k):
        if k == len(cells):
            yield [row[:] for row in tableau]
            return
        r, c = cells[k]
        lo = 1
        if c > 0:
            lo = max(lo, tableau[r][c - 1])
        if r > 0:
            lo = max(lo, tableau[r - 1][c] + 1)
        for v in range(lo, nvars + 1):
            tableau[r][c] = v
            yield from rec(k + 1)

    yield from rec(0)


def schur_poly_tableaux(mu, y):
    """Semistandard-tableau sum oracle for s_mu(y) (small shapes only)."""
    mu = Partition(mu)
    shape = tuple(m for m in mu if m > 0)
    if not shape:
        return Fraction(1) if any(isinstance(v, Fraction) for v in y) else 1.0
    total = 0
    for t in _ssyt_fill(shape, len(y)):
        term = 1
        for row in t:
            for v in row:
                term = term * y[v - 1]
        total = total + term
    return total


def _sp_gt_patterns(mu, n):
    """Integer symplectic GT patterns of depth 2n with bottom row mu.

    Rows interlace downward; entries right of a row's width count as zero.
    Yields the list of rows from row 1 (width 1) to row 2n (= mu).
    """
    widths = [(i + 1) // 2 for i in range(1, 2 * n + 1)]

    def rec(rows_below):
        # rows_below[0] is the lowest collected row; build upward
        top = rows_below[0]
        depth = 2 * n - len(rows_below) + 1   # index of row `top`
        if depth == 1:
            yield rows_below
            return
        w = widths[depth - 2]
        ranges = []
        for j in range(w):
            hi = top[j]
            lo = top[j + 1] if j + 1 < len(top) else 0
            ranges.append(range(lo, hi + 1))
        for combo in itertools.product(*ranges):
            if all(combo[j] >= combo[j + 1] for j in range(w - 1)):
                yield from rec([list(combo)] + rows_below)

    yield from rec([list(mu)])


def sp_poly(mu, y, route="weyl"):
    """Symplectic Schur polynomial sp_mu(y) by Weyl determinant ratio or by
    Gelfand-Tsetlin pattern enumeration; both routes are exact on Fractions."""
    mu = Partition(mu)
    n = len(mu)
    if len(y) != n:
        raise ValueError("sp_poly needs len(y) == len(mu)")
    if route == "gt":
        total = 0
        for rows in _sp_gt_patterns(mu, n):
            sums = [sum(r) for r in rows]
            term = 1
            for k in range(1, n + 1):
                e = 2 * sums[2 * k - 2] - (sums[2 * k - 3] if k > 1 else 0) - sums[2 * k - 1]
                term = term * (y[k - 1] ** e)
            total = total + term
        return total
    if route != "weyl":
        raise ValueError("route must be 'weyl' or 'gt'")
    exps = [mu[i] + n - i for i in range(n)]          # mu_i + n - i + 1 with i 1-based
    den_exps = list(range(n, 0, -1))
    ones = [j for j in range(n) if y[j] == 1]
    if len(ones) > 1:
        raise ValueError("weyl route supports at most one y_j = 1; use route='gt'")

    def column(yj, es):
        return [yj ** e - yj ** (-e) for e in es]

    def dcolumn(yj, es):
        # d/dy of y^e - y^-e
        return [e * yj ** (e - 1) + e * yj ** (-e - 1) for e in es]

    def det_ratio(limit_col=None):
        num_rows = []
        den_rows = []
        for j in range(n):
            if limit_col is not None and j == limit_col:
                num_rows.append(dcolumn(y[j], exps))
                den_rows.append(dcolumn(y[j], den_exps))
            else:
                num_rows.append(column(y[j], exps))
                den_rows.append(column(y[j], den_exps))
        # rows indexed by j (variables), columns by exponents: transpose of the
        # usual convention, which leaves the ratio unchanged
        num = _det_bareiss([list(r) for r in zip(*num_rows)])
        den = _det_bareiss([list(r) for r in zip(*den_rows)])
        return num, den

    if not ones:
        num, den = det_ratio()
        return num / den
    # single y_j = 1: numerator and denominator both vanish to first order
    num, den = det_ratio(limit_col=ones[0])
    return num / den


# --- continuum analogues ---------------------------------------------------------


def _clusters(vals, tol):
    """Group indices of vals into clusters within tol (vals sorted per cluster head)."""
    order = sorted(range(len(vals)), key=lambda i: vals[i])
    groups = []
    for i in order:
        if groups and abs(vals[i] - vals[groups[-1][0]]) <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _sinhc_theta_derivs(x, theta, kmax):
    """Columns d^k/dtheta^k [sinh(x sqrt(theta))/sqrt(theta)] / k! for k < kmax.

    Power series in theta with positive terms; stable for theta >= 0.
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros((kmax,) + x.shape)
    for k in range(kmax):
        # m = k term: C(k,k) x^{2k+1}/(2k+1)!
        term = x ** (2 * k + 1) / math.factorial(2 * k + 1)
        acc = term.copy()
        m = k
        while True:
            m += 1
            term = term * theta * m / (m - k) * x * x / ((2 * m) * (2 * m + 1))
            acc += term
            if np.all(term <= 1e-18 * np.maximum(acc, 1e-300)):
                break
            if m > 500:
                break
        out[k] = acc
    return out


def sp_cont(alpha, x):
    """Continuum symplectic character: det(e^{a_j x_i} - e^{-a_j x_i}) divided by
    prod_{i<j}(a_i - a_j) prod_{i<=j}(a_i + a_j), with confluent parameters
    (including zeros and sign-coincidences) dispatched to derivative columns."""
    alpha = tuple(float(a) for a in alpha)
    x = tuple(float(v) for v in x)
    n = len(alpha)
    if len(x) != n:
        raise ValueError("sp_cont needs len(alpha) == len(x)")
    if n == 0:
        return 1.0
    # even in each alpha_j: work in theta = alpha^2, where
    # sp_cont = det(G(x_i, theta_j)) / prod_{i<j} (theta_i - theta_j),
    # G(x, theta) = sinh(x sqrt(theta))/sqrt(theta)
    theta = [a * a for a in alpha]
    scale = max(1.0, max(abs(a) for a in alpha))
    groups = _clusters(theta, 2 * CONFLUENCE_THRESHOLD * scale)
    xs = np.asarray(x)
    cols = np.empty((n, n))
    c = 0
    denom = 1.0
    reps = []
    for g in groups:
        th = sum(theta[i] for i in g) / len(g)
        dcols = _sinhc_theta_derivs(xs, th, len(g))
        for k in range(len(g)):
            cols[:, c + k] = dcols[k]
        m = len(g)
        # intra-cluster Vandermonde orientation: prod_{p<q}(t_p - t_q) over the
        # collapsing pairs contributes (-1)^{m(m-1)/2} against Taylor columns
        denom *= (-1.0) ** (m * (m - 1) // 2)
        reps.append((th, m, c))
        c += m
    for a in range(len(reps)):
        for b in range(a + 1, len(reps)):
            denom *= (reps[a][0] - reps[b][0]) ** (reps[a][1] * reps[b][1])
    return float(np.linalg.det(cols) / denom)


def s_cont(beta, x):
    """Continuum classical character: det(e^{b_j x_i}) / prod_{i<j}(b_i - b_j),
    with confluent parameters dispatched to derivative columns."""
    beta = tuple(float(b) for b in beta)
    x = tuple(float(v) for v in x)
    n = len(beta)
    if len(x) != n:
        raise ValueError("s_cont needs len(beta) == len(x)")
    if n == 0:
        return 1.0
    scale = max(1.0, max(abs(b) for b in beta))
    groups = _clusters(beta, CONFLUENCE_THRESHOLD * scale)
    xs = np.asarray(x)
    cols = np.empty((n, n))
    c = 0
    denom = 1.0
    reps = []
    for g in groups:
        b = sum(beta[i] for i in g) / len(g)
        e = np.exp(b * xs)
        m = len(g)
        for k in range(m):
            cols[:, c + k] = xs ** k * e / math.factorial(k)
        denom *= (-1.0) ** (m * (m - 1) // 2)
        reps.append((b, m))
        c += m
    for a in range(len(reps)):
        for bb in range(a + 1, len(reps)):
            denom *= (reps[a][0] - reps[bb][0]) ** (reps[a][1] * reps[bb][1])
    return float(np.linalg.det(cols) / denom)


def _unit_gauss(nodes):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (x + 1.0), 0.5 * w


def sp_cont_polytope_oracle(alpha, x, nodes=48):
    """sp_cont by iterated quadrature over the interlacing pattern polytope
    (independent oracle; n <= 2)."""
    alpha = tuple(float(a) for a in alpha)
    x = check_ordered_point(x)
    n = len(alpha)
    if n > 2:
        raise ValueError("polytope oracle supports n <= 2")
    g, wg = _unit_gauss(nodes)
    if n == 1:
        z = x[0] * g
        return float(x[0] * np.sum(wg * np.exp(alpha[0] * (2 * z - x[0]))))
    a1, a2 = alpha
    x1, x2 = x
    # rows: z11; z21; (z31, z32); bottom (x1, x2)
    # constraints: 0 <= z11 <= z21; z32 <= z21 <= z31; x2 <= z31 <= x1; 0 <= z32 <= x2
    z31 = x2 + (x1 - x2) * g
    z32 = x2 * g
    total = 0.0
    for i, zi in enumerate(z31):
        for j, zj in enumerate(z32):
            z21 = zj + (zi - zj) * g
            z11 = z21[:, None] * g[None, :]
            inner = z21 * (wg[None, :] * np.exp(a1 * (2 * z11 - z21[:, None]))).sum(axis=1)
            outer = np.exp(a2 * (2 * (zi + zj) - z21 - (x1 + x2)))
            total += (x1 - x2) * wg[i] * x2 * wg[j] * (zi - zj) * np.sum(wg * outer * inner)
    return float(total)
