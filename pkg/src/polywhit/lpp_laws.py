"""Exact distribution functions for zero-temperature (last passage) models:
determinant forms for the flat and half-flat geometries, a Pfaffian form for
the restricted geometry, and the exact geometric-weight sum over partitions.

Closed-form entries are integrals of polynomial-times-exponential functions on
[0, u]; a tiny poly-exp algebra keeps them exact, including the divided-
difference columns used when spectral parameters coincide.
"""

import itertools
import math
from fractions import Fraction

import numpy as np

from .quadrature import leggauss_ab
from .schur import CONFLUENCE_THRESHOLD, Partition, schur_poly, _clusters
from . import schur as _schur

__all__ = [
    "pfaffian",
    "schur_pfaffian",
    "lpp_cdf",
    "lpp_cdf_schur_form",
    "baik_rains_cdf",
    "geometric_lpp_exact_cdf",
]


class SkewSymmetryError(ValueError):
    """Matrix deviates from skew symmetry beyond tolerance."""


# --- Pfaffian --------------------------------------------------------------------


def pfaffian(a):
    """Pfaffian of a real skew-symmetric matrix of even order.

    Skew-symmetric Gaussian elimination (Parlett-Reid) with partial pivoting;
    the sign is tracked through the row/column swaps.  Pf(A)^2 = det(A).
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("pfaffian requires a square matrix")
    if n % 2 != 0:
        raise ValueError("pfaffian requires even dimension (pad odd inputs)")
    scale = max(np.abs(a).max(), 1.0)
    if np.abs(a + a.T).max() > 1e-13 * scale:
        raise SkewSymmetryError("matrix is not skew-symmetric within tolerance")
    if n == 0:
        return 1.0
    pf = 1.0
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.argmax(np.abs(a[k + 1:, k])))
        if kp != k + 1:
            a[[k + 1, kp], :] = a[[kp, k + 1], :]
            a[:, [k + 1, kp]] = a[:, [kp, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0.0:
            return 0.0
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2:] / a[k, k + 1]
            col = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return float(pf)


def schur_pfaffian(alpha):
    """Pfaffian of the matrix S_ij = (a_j - a_i)/(a_j + a_i), padded by a column
    of ones when n is odd; equals prod_{i<j} (a_j - a_i)/(a_j + a_i)."""
    alpha = [float(a) for a in alpha]
    n = len(alpha)
    for i in range(n):
        for j in range(n):
            if i != j and alpha[i] + alpha[j] == 0:
                raise ZeroDivisionError(f"alpha_{i+1} + alpha_{j+1} = 0")
    m = n + 1 if n % 2 else n
    s = np.zeros((m, m))
    for i in range(n):
        for j in range(n):
            s[i, j] = (alpha[j] - alpha[i]) / (alpha[j] + alpha[i])
    if m > n:
        s[:n, n] = 1.0
        s[n, :n] = -1.0
    return pfaffian(s)


def schur_pfaffian_product(alpha):
    """Product-formula reference for the Schur Pfaffian."""
    alpha = [float(a) for a in alpha]
    out = 1.0
    for i in range(len(alpha)):
        for j in range(i + 1, len(alpha)):
            out *= (alpha[j] - alpha[i]) / (alpha[j] + alpha[i])
    return out


# --- poly-exp algebra on [0, u] ----------------------------------------------------
# A function is a dict {s: coeffs} meaning sum_s e^{s x} * poly(coeffs, x),
# coeffs ascending.  All closed-form CDF entries live in this algebra.


def _poly_mul(p, q):
    out = [0.0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _poly_add(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, b in enumerate(q):
        out[i] += b
    return out


def _poly_eval(p, x):
    acc = 0.0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _shifted_power(c, k, scale=1.0):
    """Coefficients of (scale * (x + c))^k."""
    out = [0.0] * (k + 1)
    for j in range(k + 1):
        out[j] = math.comb(k, j) * c ** (k - j) * scale ** k
    return out


def pe_mul(f, g):
    out = {}
    for s1, p in f.items():
        for s2, q in g.items():
            s = s1 + s2
            r = _poly_mul(p, q)
            out[s] = _poly_add(out[s], r) if s in out else r
    return out


def pe_eval(f, x):
    return sum(math.exp(s * x) * _poly_eval(p, x) for s, p in f.items())


def _antider_term(s, coeffs, u):
    """Antiderivative of e^{sx} poly, vanishing at 0, within the algebra.

    For |s| u < 1 the exponential is expanded in series to avoid the 1/s^k
    cancellation of the closed form; the expansion is truncated far below
    double precision.
    """
    if s == 0.0:
        return {0.0: [0.0] + [c / (k + 1) for k, c in enumerate(coeffs)]}
    if abs(s) * u < 1.0:
        series = [1.0]
        term = 1.0
        for j in range(1, 40):
            term *= s / j
            series.append(term)
            if abs(term) * max(u, 1.0) ** j < 1e-22:
                break
        prod = _poly_mul(coeffs, series)
        return {0.0: [0.0] + [c / (k + 1) for k, c in enumerate(prod)]}
    q = [0.0] * len(coeffs)
    for k in range(len(coeffs) - 1, -1, -1):
        nxt = (k + 1) * q[k + 1] if k + 1 < len(coeffs) else 0.0
        q[k] = (coeffs[k] - nxt) / s
    return {s: q, 0.0: [-q[0]]}


def pe_antider(f, u):
    out = {}
    for s, p in f.items():
        for s2, q in _antider_term(s, p, u).items():
            out[s2] = _poly_add(out[s2], q) if s2 in out else q
    return out


def pe_integrate(f, u):
    return pe_eval(pe_antider(f, u), u)


def _col_sinh(a, k, u):
    """(1/k!) d^k/da^k [e^{-ua}(e^{ax} - e^{-ax})] as a poly-exp function."""
    fk = math.factorial(k)
    pos = [c * math.exp(-a * u) / fk for c in _shifted_power(-u, k)]          # (x-u)^k
    neg = [c * math.exp(-a * u) * (-1.0) ** k / fk for c in _shifted_power(u, k)]  # (u+x)^k
    return {a: pos, -a: [-c for c in neg]}


def _col_exp(b, k, u):
    """(1/k!) d^k/db^k [e^{-ub} e^{bx}]."""
    fk = math.factorial(k)
    pos = [c * math.exp(-b * u) / fk for c in _shifted_power(-u, k)]
    return {b: pos}


def _col_phi(a, k, u):
    """(1/k!) d^k/da^k [a e^{-ua}(e^{ax} - e^{-ax})] (restricted-geometry columns)."""
    fk = math.factorial(k)
    ea = math.exp(-a * u)
    pos = [c * a / fk for c in _shifted_power(-u, k)]
    if k >= 1:
        pos = _poly_add(pos, [c / math.factorial(k - 1) for c in _shifted_power(-u, k - 1)])
    pos = [c * ea for c in pos]
    neg = [c * a * (-1.0) ** k / fk for c in _shifted_power(u, k)]
    if k >= 1:
        neg = _poly_add(neg, [c * (-1.0) ** (k - 1) / math.factorial(k - 1)
                              for c in _shifted_power(u, k - 1)])
    neg = [c * ea for c in neg]
    return {a: pos, -a: [-c for c in neg]}


def _cluster_cols(values, builder, u):
    """Divided-difference column descriptors [(rep, order)], cluster list."""
    groups = _clusters(list(values), CONFLUENCE_THRESHOLD * max(1.0, max(map(abs, values))))
    cols = []
    reps = []
    for g in groups:
        rep = sum(values[i] for i in g) / len(g)
        reps.append((rep, len(g)))
        for k in range(len(g)):
            cols.append(builder(rep, k, u))
    return cols, reps


def _reduced_vandermonde(reps):
    """lim prod_{i<j}(v_i - v_j) with clustered values removed (Taylor columns)."""
    out = 1.0
    for _, m in reps:
        out *= (-1.0) ** (m * (m - 1) // 2)
    for a in range(len(reps)):
        for b in range(a + 1, len(reps)):
            out *= (reps[a][0] - reps[b][0]) ** (reps[a][1] * reps[b][1])
    return out


def lpp_cdf(geometry, alpha, beta=None, u=None):
    """P(tau <= u) for the flat / half-flat (determinant) and restricted
    (Pfaffian) last passage models with exponential waiting times.

    All entries are closed-form integrals of exponential products; coinciding
    rates are dispatched to divided-difference (Wronskian-limit) columns.
    """
    tag = geometry.tag if hasattr(geometry, "tag") else str(geometry)
    if u is None or u <= 0:
        raise ValueError("lpp_cdf requires u > 0")
    alpha = [float(a) for a in alpha]
    if any(a <= 0 for a in alpha):
        raise ValueError("rates must be positive")
    n = len(alpha)
    if tag in ("flat", "half-flat"):
        beta = [float(b) for b in beta]
        if len(beta) != n or any(b <= 0 for b in beta):
            raise ValueError("flat/half-flat need positive beta of the same length")
        builder_b = _col_sinh if tag == "flat" else _col_exp
        cols_a, reps_a = _cluster_cols(alpha, _col_sinh, u)
        cols_b, reps_b = _cluster_cols(beta, builder_b, u)
        m = np.empty((n, n))
        for i, ca in enumerate(cols_a):
            for j, cb in enumerate(cols_b):
                m[i, j] = pe_integrate(pe_mul(ca, cb), u)
        cauchy = _reduced_vandermonde(reps_a) * _reduced_vandermonde(reps_b)
        for ra, ma in reps_a:
            for rb, mb in reps_b:
                cauchy /= (ra + rb) ** (ma * mb)
        return float(np.linalg.det(m) / cauchy)
    if tag == "restricted":
        if beta:
            raise ValueError("restricted geometry carries no beta")
        cols, reps = _cluster_cols(alpha, _col_phi, u)
        anti = [pe_antider(c, u) for c in cols]
        mdim = n + 1 if n % 2 else n
        phi = np.zeros((mdim, mdim))
        for i in range(n):
            for j in range(i + 1, n):
                phi[i, j] = 2.0 * pe_integrate(pe_mul(cols[j], anti[i]), u) \
                    - pe_eval(anti[i], u) * pe_eval(anti[j], u)
                phi[j, i] = -phi[i, j]
        if mdim > n:
            for i in range(n):
                phi[i, n] = pe_eval(anti[i], u)
                phi[n, i] = -phi[i, n]
        denom = 1.0
        for a in range(len(reps)):
            for b in range(a + 1, len(reps)):
                ra, ma = reps[a]
                rb, mb = reps[b]
                denom *= ((rb - ra) / (rb + ra)) ** (ma * mb)
        intra = 1.0
        for ra, ma in reps:
            intra *= (2.0 * ra) ** (ma * (ma - 1) // 2)
        return float(pfaffian(phi) * intra / denom)
    raise ValueError(f"unsupported geometry {tag!r} for lpp_cdf")


# --- Schur-form quadrature route ---------------------------------------------------


def _sp_cont_batch(alpha, pts):
    return np.array([_schur.sp_cont(alpha, tuple(p)) for p in pts])


def _simplex_points(u, n, nodes):
    """Tensor-product map of [0,1]^n Gauss nodes onto the ordered simplex
    {0 <= x_n <= ... <= x_1 <= u}; returns (points, weights)."""
    g, w = np.polynomial.legendre.leggauss(nodes)
    g = 0.5 * (g + 1.0)
    w = 0.5 * w
    pts = [(u * gi, u * wi) for gi, wi in zip(g, w)]
    points = np.array([[p] for p, _ in pts])
    weights = np.array([wt for _, wt in pts])
    for _ in range(n - 1):
        new_pts = []
        new_wts = []
        for row, wt in zip(points, weights):
            top = row[-1]
            for gi, wi in zip(g, w):
                new_pts.append(list(row) + [top * gi])
                new_wts.append(wt * top * wi)
        points = np.array(new_pts)
        weights = np.array(new_wts)
    return points, weights


def lpp_cdf_schur_form(geometry, alpha, beta=None, u=None, nodes=None):
    """P(tau <= u) by direct quadrature of the ordered-simplex integral of the
    continuum character products (independent route; n <= 3)."""
    tag = geometry.tag if hasattr(geometry, "tag") else str(geometry)
    if u is None or u <= 0:
        raise ValueError("lpp_cdf_schur_form requires u > 0")
    alpha = tuple(float(a) for a in alpha)
    n = len(alpha)
    if n > 3:
        raise ValueError("schur-form route supports n <= 3")
    if nodes is None:
        nodes = 48 if n <= 2 else 32
    pts, wts = _simplex_points(u, n, nodes)
    spa = np.array([_schur.sp_cont(alpha, tuple(p)) for p in pts])
    if tag == "flat":
        beta = tuple(float(b) for b in beta)
        spb = np.array([_schur.sp_cont(beta, tuple(p)) for p in pts])
        pref = math.exp(-u * (sum(alpha) + sum(beta)))
        h = 1.0
        for i in range(n):
            for j in range(i, n):
                h *= (alpha[i] + alpha[j]) * (beta[i] + beta[j])
        for a in alpha:
            for b in beta:
                h *= a + b
        return float(h * pref * np.sum(wts * spa * spb))
    if tag == "half-flat":
        beta = tuple(float(b) for b in beta)
        scb = np.array([_schur.s_cont(beta, tuple(p)) for p in pts])
        pref = math.exp(-u * (sum(alpha) + sum(beta)))
        h = 1.0
        for i in range(n):
            for j in range(i, n):
                h *= alpha[i] + alpha[j]
        for a in alpha:
            for b in beta:
                h *= a + b
        return float(h * pref * np.sum(wts * spa * scb))
    if tag == "restricted":
        if beta:
            raise ValueError("restricted geometry carries no beta")
        pref = math.exp(-u * sum(alpha))
        h = 1.0
        for a in alpha:
            h *= a
        for i in range(n):
            for j in range(i, n):
                h *= alpha[i] + alpha[j]
        for i in range(n):
            for j in range(i + 1, n):
                h *= alpha[i] + alpha[j]
        return float(h * pref * np.sum(wts * spa))
    raise ValueError(f"unsupported geometry {tag!r}")


# --- geometric weights: Baik-Rains sum and enumeration oracle ----------------------


def baik_rains_cdf(y, u):
    """P(tau_flat <= u) for geometric weights, as the exact rational product
    prod_{i<=j}(1 - y_i y_j) * sum over bounded partitions of s_{2 mu}(y)."""
    y = tuple(Fraction(v) for v in y)
    if any(not (0 < v < 1) for v in y):
        raise ValueError("baik_rains_cdf needs 0 < y_i < 1")
    nn = len(y)
    u = int(u)
    if u < 0:
        raise ValueError("u must be a nonnegative integer")
    pref = Fraction(1)
    for i in range(nn):
        for j in range(i, nn):
            pref *= 1 - y[i] * y[j]
    total = Fraction(0)
    for comb in itertools.combinations_with_replacement(range(u + 1), nn):
        mu = tuple(sorted(comb, reverse=True))
        total += schur_poly(tuple(2 * m for m in mu), y)
    return pref * total


def geometric_lpp_exact_cdf(y, u):
    """Exact P(tau_flat <= u) by enumeration: any entry above u forces tau > u,
    so only configurations with entries in {0..u} contribute."""
    y = tuple(Fraction(v) for v in y)
    nn = len(y)
    u = int(u)
    cells = [(i, j) for i in range(1, nn + 1) for j in range(1, nn + 2 - i)]
    if (u + 1) ** len(cells) > 1e7:
        raise ValueError("enumeration cap exceeded")
    # success probability complement per cell: P(W = k) = (1 - q) q^k
    q = {(i, j): y[i - 1] * y[nn - j] for (i, j) in cells}
    norm = Fraction(1)
    for c in cells:
        norm *= 1 - q[c]
    ends = [(i, nn + 1 - i) for i in range(1, nn + 1)]
    total = Fraction(0)
    for vals in itertools.product(range(u + 1), repeat=len(cells)):
        w = dict(zip(cells, vals))
        z = {}
        for (i, j) in cells:
            best = 0
            if (i - 1, j) in z or (i, j - 1) in z:
                best = max(z.get((i - 1, j), -1), z.get((i, j - 1), -1))
            z[(i, j)] = w[(i, j)] + best
        if max(z[e] for e in ends) <= u:
            p = Fraction(1)
            for c in cells:
                p *= q[c] ** w[c]
            total += p
    return norm * total
