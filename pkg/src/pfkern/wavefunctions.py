"""Orthonormal wave functions phi_n(x) = P_n(x) sqrt(w(x)) / sqrt(h_n).

Evaluation strategy: the monic three-term recurrence is run forward in the
degree with dynamic rescaling (exponent carried per lattice point).  Forward
recurrence is unstable deep in the left classically-forbidden region
x << a_n - 2 b_n, where phi_n is the minimal solution; those entries are
filled through the self-duality phi_n(x) = (-1)^(n+x) phi_x(n) shared by all
three families, which maps them into the stable region of the table.

Norms h_n are always obtained by direct lattice summation (in log space),
never from closed forms; closed forms appear only in tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .families import TruncatedLattice, truncate, check_support, DomainError

_RESCALE_LIMIT = 1e120
_TINY_LOG = -745.0  # exp underflows to 0 below this


@dataclass(frozen=True)
class WaveTable:
    """phi[n, x] for n <= n_max, x on the truncated lattice, plus log h_n."""

    family: object
    lattice: TruncatedLattice
    phi: np.ndarray      # (n_max+1, x_max+1)
    log_h: np.ndarray    # (n_max+1,)

    @property
    def n_max(self) -> int:
        return self.phi.shape[0] - 1


def _forward_monic(family, n_max, x):
    """Scaled monic values R[n,:] with shared exponents E[n,:]."""
    r_prev = np.ones_like(x)
    e = np.zeros_like(x)
    a0, _ = family.jacobi(0)
    r_cur = x - a0
    R = [r_prev.copy(), r_cur.copy()]
    E = [e.copy(), e.copy()]
    for n in range(1, n_max):
        an, bn2 = family.jacobi(n)
        r_next = (x - an) * r_cur - bn2 * r_prev
        r_prev, r_cur = r_cur, r_next
        big = np.abs(r_cur) > _RESCALE_LIMIT
        if np.any(big):
            sc = np.where(big, np.abs(r_cur), 1.0)
            r_cur = r_cur / sc
            r_prev = r_prev / sc
            e = e + np.log(sc)
        R.append(r_cur.copy())
        E.append(e.copy())
    return np.array(R[: n_max + 1]), np.array(E[: n_max + 1])


def _zone_edges(family, ns):
    """Oscillatory-zone edges a_n -+ 2 b_n per degree."""
    a, b2 = family.jacobi(ns.astype(float))
    b = np.sqrt(np.maximum(b2, 0.0))
    return a - 2.0 * b, a + 2.0 * b, b


def _bad_mask(family, n_max, x):
    """Entries in the left classically-forbidden region x < a_n - 2 b_n,
    where the forward recurrence amplifies roundoff.  There the dual entry
    (degree x, point n) sits in its stable right-forbidden region (the zone
    edges of the three families are dual: x < left(n) iff n > right(x)), so
    the duality fill is available whenever the table has row x."""
    ns = np.arange(n_max + 1)
    left, _, _ = _zone_edges(family, ns)
    deep = x[None, :] < (left[:, None] - 1.0)
    right = np.full(x.size, np.inf)
    have_dual = x.astype(int) <= n_max
    _, right_vals, _ = _zone_edges(family, x[have_dual])
    right[have_dual] = right_vals
    dual_ok = ns[:, None] > (right[None, :] + 1.0)
    return deep & dual_ok


def _zone_need(family, n_max):
    """Lattice size covering the top degree's zone plus its Airy tail."""
    a, b2 = family.jacobi(float(n_max))
    b = np.sqrt(max(b2, 0.0))
    return int(np.ceil(a + 2 * b + 10 * max(1.0, b ** (2.0 / 3.0)))) + 10


def wave_table(family, n_max: int, lattice: TruncatedLattice | None = None) -> WaveTable:
    """Build the full orthonormal table on the (truncated) lattice."""
    if lattice is None:
        # the table must cover the oscillatory zone of the top degree
        lattice = truncate(family, x_min=max(_zone_need(family, n_max), n_max + 1))
    if family.finite and n_max > family.M:
        raise DomainError(f"degree {n_max} exceeds Krawtchouk M={family.M}")
    if family.finite and n_max > family.M // 2:
        # forward recurrence degrades for degrees near M; build the lower
        # half and complete with phi_n(x) = (-1)^(M-n+x) phi_{M-n}(M-x)
        M = family.M
        low = wave_table(family, M // 2, lattice)
        phi = np.zeros((n_max + 1, lattice.size))
        log_h = np.empty(n_max + 1)
        keep = min(n_max, M // 2)
        phi[: keep + 1] = low.phi[: keep + 1]
        log_h[: keep + 1] = low.log_h[: keep + 1]
        xs = np.arange(lattice.size)
        for n in range(keep + 1, n_max + 1):
            sign = (-1.0) ** ((M - n + xs) % 2)
            phi[n] = sign * low.phi[M - n, ::-1]
            _, b2 = family.jacobi(float(n))
            log_h[n] = log_h[n - 1] + np.log(b2)
        return WaveTable(family=family, lattice=lattice, phi=phi, log_h=log_h)
    x = lattice.grid().astype(float)
    lw = family.log_weight(x)
    R, E = _forward_monic(family, n_max, x)

    logabs = np.where(R != 0.0, np.log(np.abs(R) + 1e-320), -np.inf) + E
    bad = _bad_mask(family, n_max, x)

    # Normalize rows in increasing degree.  Trusted columns give a partial
    # norm; the discarded region's true mass equals sum_B phi_x(n)^2 by
    # duality, with all dual rows (degree x < n) already final, so
    #   h_n = (trusted sum) / (1 - sum_B phi_x(n)^2)     exactly.
    m = np.where(bad, -np.inf, 2.0 * logabs + lw[None, :])
    mx = np.max(m, axis=1)
    log_h_part = mx + np.log(np.sum(np.exp(m - mx[:, None]), axis=1))

    phi = np.zeros_like(R)
    log_h = np.empty(n_max + 1)
    for n in range(n_max + 1):
        cols = np.nonzero(bad[n])[0]
        mass = float(np.sum(phi[cols, n] ** 2)) if cols.size else 0.0
        log_h[n] = log_h_part[n] - np.log1p(-mass)
        expo = logabs[n] + 0.5 * lw - 0.5 * log_h[n]
        row = np.where(expo > _TINY_LOG, np.sign(R[n]) * np.exp(expo), 0.0)
        if cols.size:
            sign = np.where((n + cols) % 2 == 0, 1.0, -1.0)
            row[cols] = sign * phi[cols, n]
        phi[n] = row
    return WaveTable(family=family, lattice=lattice, phi=phi, log_h=log_h)


@lru_cache(maxsize=48)
def _cached_table(family, n_max, x_max_hint):
    if family.finite:
        return wave_table(family, n_max, TruncatedLattice(x_max=family.M, tail_tol=0.0))
    x_min = max(_zone_need(family, n_max), n_max + 1, x_max_hint or 0)
    return wave_table(family, n_max, truncate(family, x_min=x_min))


def get_table(family, n_max: int, x_max: int | None = None) -> WaveTable:
    """Memoized wave table covering degrees <= n_max and lattice >= x_max."""
    if family.finite:
        n_max = min(n_max, family.M)
    return _cached_table(family, n_max, x_max)


def orthonormal_phi(family, n: int, x) -> float | np.ndarray:
    """phi_n(x) with sign fixed by a positive leading coefficient."""
    if n < 0:
        raise DomainError("degree must be nonnegative")
    if family.finite and n > family.M:
        raise DomainError(f"degree {n} exceeds Krawtchouk M={family.M}")
    check_support(family, x)
    tab = get_table(family, max(n, 8), int(np.max(np.asarray(x))) if not family.finite else None)
    out = tab.phi[n, np.asarray(x, dtype=int)]
    return float(out) if np.ndim(x) == 0 else out


def norm_hn(family, n: int) -> float:
    """Squared norm of the monic P_n, by direct lattice summation."""
    if n < 0:
        raise DomainError("degree must be nonnegative")
    if family.finite and n > family.M:
        raise DomainError(f"degree {n} exceeds Krawtchouk M={family.M}")
    tab = get_table(family, max(n, 8))
    return float(np.exp(tab.log_h[n]))
