"""Special-function kernel: complex log-gamma, Macdonald function, Sklyanin density."""

import math

import numpy as np

__all__ = [
    "PoleError",
    "log_gamma_complex",
    "gamma_complex",
    "rgamma_complex",
    "bessel_k",
    "bessel_k_integral",
    "sklyanin_density",
]


class PoleError(ValueError):
    """Raised when a Gamma-type function is evaluated at a nonpositive-integer pole."""


_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Lanczos approximation, g = 607/128, 15 terms (Godfrey's coefficient set).
# Relative error of the rational part is below 1e-14 on Re(z) >= 0.5.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])


def _lanczos_half_plane(z):
    """Principal log-gamma for Re(z) >= 0.5 (vectorized, complex)."""
    zm1 = z - 1.0
    ser = np.full_like(z, _LANCZOS_C[0])
    for k in range(1, len(_LANCZOS_C)):
        ser = ser + _LANCZOS_C[k] / (zm1 + k)
    t = zm1 + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (zm1 + 0.5) * np.log(t) - t + np.log(ser)


def _log_sin_pi_upper(z):
    """Branch of log(sin(pi z)) continuous on Im(z) >= 0.

    Uses sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 pi i z}); |e^{2 pi i z}| < 1
    in the open upper half-plane, so the principal log of the last factor is
    well defined and the result continues analytically onto the real axis.
    """
    return (0.5j * math.pi - math.log(2.0)) - 1j * math.pi * z \
        + np.log1p(-np.exp(2j * math.pi * z))


def log_gamma_complex(z):
    """Principal-branch log Gamma.

    Accepts scalars or arrays; validated for Re(z) in [-20, 50] and
    |Im(z)| <= 200 with relative error below ~1e-13.  Raises PoleError at
    nonpositive integers.
    """
    scalar = np.isscalar(z) or (isinstance(z, np.ndarray) and z.ndim == 0)
    za = np.asarray(z, dtype=complex)
    on_pole = (za.imag == 0) & (za.real <= 0) & (za.real == np.round(za.real))
    if np.any(on_pole):
        raise PoleError("log_gamma_complex: argument is a nonpositive integer")

    out = np.empty_like(za)
    right = za.real >= 0.5
    if np.any(right):
        out[right] = _lanczos_half_plane(za[right])
    left = ~right
    if np.any(left):
        zl = za[left]
        # reflection: log Gamma(z) = log pi - log sin(pi z) - log Gamma(1 - z),
        # with conjugate symmetry used to stay on the Im >= 0 branch
        flip = zl.imag < 0
        zu = np.where(flip, np.conj(zl), zl)
        val = math.log(math.pi) - _log_sin_pi_upper(zu) - _lanczos_half_plane(1.0 - zu)
        out[left] = np.where(flip, np.conj(val), val)
    return complex(out) if scalar else out


def gamma_complex(z):
    """Gamma function via exp(log_gamma_complex)."""
    return np.exp(log_gamma_complex(z))


def rgamma_complex(z):
    """Entire reciprocal Gamma 1/Gamma(z); zero at nonpositive integers."""
    scalar = np.isscalar(z) or (isinstance(z, np.ndarray) and z.ndim == 0)
    za = np.atleast_1d(np.asarray(z, dtype=complex))
    pole = (za.imag == 0) & (za.real <= 0) & (za.real == np.round(za.real))
    out = np.zeros_like(za)
    if np.any(~pole):
        out[~pole] = np.exp(-log_gamma_complex(za[~pole]))
    return complex(out[0]) if scalar else out.reshape(np.shape(z))


# --- Macdonald function K_nu --------------------------------------------------

_EULER = 0.5772156649015328606
_ZETA2 = math.pi ** 2 / 6.0
_ZETA3 = 1.2020569031595942854
_ZETA4 = math.pi ** 4 / 90.0
_ZETA5 = 1.0369277551433699263
_ZETA6 = math.pi ** 6 / 945.0
_ZETA7 = 1.0083492773819228268

_K_EPS = 1e-16
_K_MAXIT = 20000
_K_XMIN = 2.0


def _temme_gammas(mu):
    """g1 = (1/G(1-mu) - 1/G(1+mu))/(2 mu), g2 = (1/G(1-mu) + 1/G(1+mu))/2.

    Near mu = 0 the difference is formed from the sinh/cosh representation
    of 1/Gamma(1 +- mu) to avoid cancellation; g1(0) = -EulerGamma.
    """
    gampl = 1.0 / math.gamma(1.0 + mu)
    gammi = 1.0 / math.gamma(1.0 - mu)
    if abs(mu) < 0.02:
        m2 = mu * mu
        expo = math.exp(-(_ZETA2 * m2 / 2.0 + _ZETA4 * m2 * m2 / 4.0
                          + _ZETA6 * m2 * m2 * m2 / 6.0))
        odd = _EULER * mu + _ZETA3 * mu * m2 / 3.0 + _ZETA5 * mu * m2 * m2 / 5.0 \
            + _ZETA7 * mu * m2 * m2 * m2 / 7.0
        if mu == 0.0:
            g1 = -_EULER
        else:
            g1 = -expo * math.sinh(odd) / mu
        g2 = expo * math.cosh(odd)
    else:
        g1 = (gammi - gampl) / (2.0 * mu)
        g2 = (gammi + gampl) / 2.0
    return g1, g2, gampl, gammi


def _bessel_k_mu(mu, x):
    """(K_mu, K_{mu+1}) for |mu| <= 0.5, x > 0.

    Temme's series below x = 2, Steed's continued fraction CF2 above.
    """
    if x < _K_XMIN:
        x2 = 0.5 * x
        pimu = math.pi * mu
        fact = pimu / math.sin(pimu) if pimu != 0.0 else 1.0
        d = -math.log(x2)
        e = mu * d
        fact2 = math.sinh(e) / e if e != 0.0 else 1.0
        g1, g2, gampl, gammi = _temme_gammas(mu)
        ff = fact * (g1 * math.cosh(e) + g2 * fact2 * d)
        ksum = ff
        e = math.exp(e)
        p = 0.5 * e / gampl
        q = 0.5 / (e * gammi)
        c = 1.0
        d2 = x2 * x2
        ksum1 = p
        for i in range(1, _K_MAXIT):
            ff = (i * ff + p + q) / (i * i - mu * mu)
            c *= d2 / i
            p /= (i - mu)
            q /= (i + mu)
            dl = c * ff
            ksum += dl
            ksum1 += c * (p - i * ff)
            if abs(dl) < abs(ksum) * _K_EPS:
                break
        return ksum, ksum1 * (2.0 / x)
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25 - mu * mu
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _K_MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _K_EPS:
            break
    h = a1 * h
    kmu = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
    return kmu, kmu * (mu + x + 0.5 - h) / x


def bessel_k(nu, x):
    """Macdonald function K_nu(x) for real order, x > 0.

    Accuracy ~1e-13 relative for x in [1e-3, 50], |nu| <= 20; K is even in nu.
    """
    if x <= 0.0:
        raise ValueError("bessel_k requires x > 0")
    nu = abs(float(nu))
    nl = int(nu + 0.5)
    mu = nu - nl
    kmu, k1 = _bessel_k_mu(mu, x)
    for i in range(nl):
        kmu, k1 = k1, (mu + i + 1) * (2.0 / x) * k1 + kmu
    return kmu


def bessel_k_integral(nu, x, nodes=800):
    """Quadrature oracle: K_nu(x) = (1/2) int z^nu exp(-(x/2)(z + 1/z)) dz/z.

    Trapezoid in log coordinates with a scanned, truncated window; independent
    of the series/continued-fraction route.
    """
    if x <= 0.0:
        raise ValueError("bessel_k_integral requires x > 0")
    t = np.linspace(-60.0, 60.0, 2001)
    logf = nu * t - (x / 2.0) * (np.exp(t) + np.exp(-t))
    peak = logf.max()
    keep = logf >= peak - 46.0
    lo, hi = t[keep][0] - 0.2, t[keep][-1] + 0.2
    tt = np.linspace(lo, hi, nodes)
    dt = tt[1] - tt[0]
    vals = np.exp(nu * tt - (x / 2.0) * (np.exp(tt) + np.exp(-tt)) - peak)
    return 0.5 * math.exp(peak) * float(vals.sum() * dt)


def sklyanin_density(lam):
    """Plancherel spectral density (2 pi i)^{-n} (n!)^{-1} prod_{i != j} Gamma(l_i - l_j)^{-1}."""
    lam = np.asarray(lam, dtype=complex)
    n = lam.size
    acc = 0.0 + 0.0j
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += log_gamma_complex(lam[i] - lam[j])
    return np.exp(-acc) / ((2j * math.pi) ** n * math.factorial(n))
