"""Reference universal kernels: sine, Airy, Bessel.

The Airy function is evaluated by this module's own contour quadrature of
the integral representation (rotated rays through the real saddle), locked
by tests against the Maclaurin series and scipy.  Bessel J_a uses its power
series.  Kernel formulas (not printed in the sources this library encodes)
follow the standard literature conventions:

    K_sine(s, t) = sin(pi (s - t)) / (pi (s - t))
    K_Airy(x, y) = (Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y)
    K_Bessel[a](x, y) = (J_a(sx) sy J_a'(sy) - sx J_a'(sx) J_a(sy)) / (2 (x - y)),
                        sx = sqrt(x), sy = sqrt(y)
"""
from __future__ import annotations

import numpy as np
from scipy.special import gammaln


def sine_kernel(s, t):
    d = np.asarray(s, dtype=float) - np.asarray(t, dtype=float)
    out = np.where(np.abs(d) < 1e-14, 1.0,
                   np.sin(np.pi * np.where(np.abs(d) < 1e-14, 1.0, d))
                   / (np.pi * np.where(np.abs(d) < 1e-14, 1.0, d)))
    return float(out) if np.ndim(out) == 0 else out


def sine_kernel_deriv(s, t):
    """(d/ds - d/dt) applied to the sine kernel: 2 d/dr sinc(pi r), r = s - t."""
    r = np.asarray(s, dtype=float) - np.asarray(t, dtype=float)
    small = np.abs(r) < 1e-7
    rs = np.where(small, 1.0, r)
    val = np.where(small, -2.0 * np.pi ** 2 * r / 3.0,
                   2.0 * (np.pi * rs * np.cos(np.pi * rs) - np.sin(np.pi * rs))
                   / (np.pi * rs * rs))
    return float(val) if np.ndim(val) == 0 else val


# ---------------------------------------------------------------------------
# Airy function by contour quadrature


_GL_NODES = None


def _gl(n=800):
    global _GL_NODES
    if _GL_NODES is None or len(_GL_NODES[0]) != n:
        from numpy.polynomial.legendre import leggauss
        _GL_NODES = leggauss(n)
    return _GL_NODES


def _airy_pair_quadrature(x: float) -> tuple[float, float]:
    """(Ai(x), Ai'(x)) from the two-ray contour at angles +-pi/3.

    Ai(x) = (1/pi) Im[ e^{i pi/3} int_0^inf exp(-r^3/3 - x r e^{i pi/3}) dr ];
    the cubic decays along both rays for every real x.  Gauss-Legendre nodes
    on the truncated ray give ~1e-13 absolute accuracy on the windows the
    edge tests use.
    """
    rmax = 12.0 + 2.2 * abs(x) ** 0.5
    nodes, weights = _gl()
    r = 0.5 * rmax * (nodes + 1.0)
    wgt = 0.5 * rmax * weights
    ph = np.exp(1j * np.pi / 3.0)
    f = np.exp(-r ** 3 / 3.0 - x * r * ph)
    ai = float((np.sum(f * wgt) * ph).imag / np.pi)
    aip = float((np.sum(-r * ph * f * wgt) * ph).imag / np.pi)
    return ai, aip


def airy_ai(x):
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.array([_airy_pair_quadrature(float(v))[0] for v in xs])
    return float(out[0]) if np.ndim(x) == 0 else out


def airy_ai_prime(x):
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.array([_airy_pair_quadrature(float(v))[1] for v in xs])
    return float(out[0]) if np.ndim(x) == 0 else out


def airy_series(x, terms: int = 40):
    """Maclaurin series of Ai (validation oracle for small arguments)."""
    import math
    c1 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
    c2 = 3.0 ** (-1.0 / 3.0) / math.gamma(1.0 / 3.0)
    f = g = 1.0
    fsum, gsum = 1.0, 1.0
    xt = np.asarray(x, dtype=float)
    fterm = np.ones_like(xt)
    gterm = xt.copy()
    fsum = np.ones_like(xt)
    gsum = xt.copy()
    for k in range(1, terms):
        fterm = fterm * xt ** 3 * (3 * k - 2) / ((3 * k) * (3 * k - 1) * (3 * k - 2))
        gterm = gterm * xt ** 3 * (3 * k - 1) / ((3 * k + 1) * (3 * k) * (3 * k - 1))
        fsum = fsum + fterm
        gsum = gsum + gterm
    return c1 * fsum - c2 * gsum


def airy_kernel(x, y):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    ax, apx = np.array([_airy_pair_quadrature(v) for v in x]).T
    ay, apy = np.array([_airy_pair_quadrature(v) for v in y]).T
    X, Y = x[:, None], y[None, :]
    num = ax[:, None] * apy[None, :] - apx[:, None] * ay[None, :]
    den = X - Y
    diag = apx[:, None] ** 2 - X * ax[:, None] ** 2
    out = np.where(np.abs(den) < 1e-10, diag, num / np.where(np.abs(den) < 1e-10, 1.0, den))
    return out


# ---------------------------------------------------------------------------
# Bessel


def bessel_j(alpha: float, z, terms: int = 60):
    """J_alpha by the power series; adequate for the hard-edge windows."""
    z = np.asarray(z, dtype=float)
    half = 0.5 * z
    out = np.zeros_like(z)
    for k in range(terms):
        out = out + (-1.0) ** k * np.exp(
            (alpha + 2 * k) * np.log(np.maximum(half, 1e-300))
            - gammaln(k + 1.0) - gammaln(alpha + k + 1.0))
    return np.where(z == 0.0, 1.0 if alpha == 0 else 0.0, out)


def bessel_j_prime(alpha: float, z, terms: int = 60):
    z = np.asarray(z, dtype=float)
    return 0.5 * (bessel_j(alpha - 1, z, terms) - bessel_j(alpha + 1, z, terms))


def bessel_kernel(alpha: float, x, y):
    """Hard-edge (Bessel) kernel in the squared variables."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    sx, sy = np.sqrt(x), np.sqrt(y)
    jx, jy = bessel_j(alpha, sx), bessel_j(alpha, sy)
    jpx, jpy = bessel_j_prime(alpha, sx), bessel_j_prime(alpha, sy)
    num = jx[:, None] * (sy * jpy)[None, :] - (sx * jpx)[:, None] * jy[None, :]
    den = 2.0 * (x[:, None] - y[None, :])
    # diagonal: (J_a(s)^2 - J_{a+1}(s) J_{a-1}(s)) / 4
    jm = bessel_j(alpha - 1, sx)
    jp = bessel_j(alpha + 1, sx)
    diag = 0.25 * (jx ** 2 - jm * jp)
    out = np.where(np.abs(den) < 1e-12, diag[:, None],
                   num / np.where(np.abs(den) < 1e-12, 1.0, den))
    return out
