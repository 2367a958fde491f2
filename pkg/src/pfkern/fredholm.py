"""Gap probabilities: Fredholm determinants det(I - K) by the Nystrom
method for continuum reference kernels, and finite determinants for the
discrete kernels restricted to lattice intervals.
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

from .kernels import projection_direct
from .refkernels import sine_kernel
from .saddles import site_density


def nystrom_det(kernel, a: float, b: float, nodes: int = 40) -> float:
    """det(I - K) on [a, b] with Gauss-Legendre discretization."""
    x, w = leggauss(nodes)
    x = 0.5 * (b - a) * (x + 1.0) + a
    w = 0.5 * (b - a) * w
    root = np.sqrt(w)
    M = root[:, None] * kernel(x[:, None], x[None, :]) * root[None, :]
    return float(np.linalg.det(np.eye(nodes) - M))


def gap_probability(kernel, a: float, b: float, tol: float = 1e-10,
                    start_nodes: int = 16, max_nodes: int = 512):
    """Nystrom determinant with a node-doubling convergence certificate.

    Returns (value, certificate) where the certificate is the difference
    between the last two levels.
    """
    n = start_nodes
    prev = nystrom_det(kernel, a, b, n)
    while True:
        n *= 2
        val = nystrom_det(kernel, a, b, n)
        err = abs(val - prev)
        if err < tol or n >= max_nodes:
            return val, err
        prev = val


def sine_gap(length: float, **kw):
    """det(I - K_sine) on [0, length]."""
    return gap_probability(sine_kernel, 0.0, length, **kw)


def discrete_gap(family, N: int, points) -> float:
    """det(I - K_N restricted to the lattice points of an interval)."""
    points = np.asarray(points, dtype=int)
    if points.size == 0:
        return 1.0
    K = projection_direct(family, N, points)
    return float(np.linalg.det(np.eye(len(points)) - K))


def bulk_scaled_gap_comparison(family, N: int, u: float, lengths) -> dict:
    """Finite-N discrete gaps on bulk intervals against the sine-kernel gap.

    The lattice interval starting at A u with microscopic length L contains
    the points x in [A u, A u + L / rho_site); both determinants are
    reported per length.
    """
    from .saddles import large_parameter
    A = large_parameter(family, N)
    rho = site_density(family, u, N)
    rows = []
    for L in lengths:
        lo = int(np.ceil(A * u))
        hi = int(np.floor(A * u + L / rho))
        pts = np.arange(lo, hi + 1)
        d = discrete_gap(family, N, pts)
        s, cert = sine_gap((len(pts)) * rho)
        rows.append({"length": float(L), "points": int(len(pts)),
                     "effective_length": float(len(pts) * rho),
                     "discrete": d, "sine": s, "sine_certificate": cert,
                     "rel_diff": abs(d - s) / s if s else float("inf")})
    return {"u": u, "N": N, "rho_site": rho, "entries": rows}
