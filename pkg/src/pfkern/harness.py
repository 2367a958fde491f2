"""Convergence harnesses: bulk sine limits, soft-edge Airy limits, the
hard-edge crossover, and first-correction extraction.

A `Regime` fixes the dimensionless shape of the ensemble while the large
parameter A sweeps: Meixner keeps xi with A = 2N; Charlier keeps tau =
theta/N with A = N; Krawtchouk keeps (gamma, p) with A = M, N = gamma M.

Microscopic scaling uses the per-site density: x = floor(A u + s / rho_site)
and kernels are multiplied by the mean spacing 1/rho_site; comparisons are
made at the realized (post-floor) microscopic coordinates.  One overall
amplitude c is always fitted and reported rather than assumed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .families import Charlier, Krawtchouk, Meixner
from .kernels import beta1_indices, oracle_block, projection_direct, rank_of
from .lattice_ops import apply_eps
from .refkernels import airy_kernel, bessel_kernel, sine_kernel, sine_kernel_deriv
from .saddles import (bulk_support, edge_data, large_parameter, saddle_solve,
                      site_density)
from .wavefunctions import get_table


@dataclass(frozen=True)
class Regime:
    kind: str                 # meixner / charlier / krawtchouk
    xi: float | None = None
    tau: float | None = None
    gamma: float | None = None
    p: float | None = None

    def family_and_N(self, A: int):
        if self.kind == "meixner":
            if A % 2:
                raise ValueError("Meixner large parameter A = 2N must be even")
            return Meixner(xi=self.xi, beta_m=1.0), A // 2
        if self.kind == "charlier":
            return Charlier(theta=self.tau * A), A
        N = int(round(self.gamma * A))
        return Krawtchouk(M=A, p=self.p), N

    def support(self, A_ref: int = 64):
        fam, N = self.family_and_N(A_ref)
        return bulk_support(fam, N)

    def rho_site(self, u: float, A_ref: int = 64) -> float:
        fam, N = self.family_and_N(A_ref)
        return site_density(fam, u, N)


DEFAULT_GRID = np.linspace(-2.0, 2.0, 17)


def _window_positions(A, u, spacing_sites, grid):
    xs = np.unique(np.floor(A * u + np.asarray(grid) * spacing_sites).astype(int))
    return xs[xs >= 0]


def _block_matrix(blk, which):
    return {"S": blk.S, "SD": blk.SD, "epsS": blk.epsS}[which]


def fit_amplitude(V, T):
    denom = float(np.sum(T * T))
    return float(np.sum(V * T) / denom) if denom > 0 else 0.0


def bulk_convergence_test(regime: Regime, beta: int, u: float, A_list,
                          grid=DEFAULT_GRID, block: str = "S") -> dict:
    """sup-norm distance of the rescaled block from the sine kernel per A.

    Returns per-A sup errors (with and without the fitted constant), the
    fitted constants, the rank-one contribution for beta = 1, and the
    log-log slope of the errors.
    """
    rows = []
    for A in A_list:
        fam, N = regime.family_and_N(int(A))
        rho = site_density(fam, u, N)
        sp = 1.0 / rho
        xs = _window_positions(A, u, sp, grid)
        blk = oracle_block(fam, N, beta, xs)
        V = _block_matrix(blk, block) * sp
        seff = (xs - A * u) * rho
        T = sine_kernel(seff[:, None], seff[None, :])
        c = fit_amplitude(V, T)
        entry = {
            "A": int(A), "N": N, "rho_site": rho, "c_fit": c,
            "sup_err_fitted": float(np.max(np.abs(V / c - T))) if c != 0 else float("inf"),
            "sup_err_raw": float(np.max(np.abs(V - T))),
            "diag_err": float(np.max(np.abs(np.diag(V) - 1.0))),
        }
        if beta == 1:
            a, b = beta1_indices(fam, N)
            tab = get_table(fam, a + 1, None if fam.finite else int(xs[-1] * 2 + 2))
            r1 = 0.5 * np.outer(tab.phi[a, xs], apply_eps(fam, tab.phi[b])[xs])
            entry["rank_one_sup"] = float(np.max(np.abs(r1)) * sp)
        rows.append(entry)
    errs = [r["sup_err_fitted"] for r in rows]
    ok = bool(np.all(np.isfinite(errs))) and min(errs) > 0 and len(errs) > 1
    slope = float(np.polyfit(np.log([r["A"] for r in rows]), np.log(errs), 1)[0]) \
        if ok else float("nan")
    return {"regime": regime.kind, "beta": beta, "u": u, "block": block,
            "entries": rows, "slope": slope}


def edge_convergence_test(regime: Regime, beta: int, A_list, side: str = "right",
                          s_grid=None, block: str = "S") -> dict:
    """Airy-kernel comparison at a soft edge under the A^(1/3) scaling."""
    s_grid = np.linspace(-3.5, 1.5, 13) if s_grid is None else np.asarray(s_grid)
    fam0, N0 = regime.family_and_N(int(A_list[0]))
    ed = edge_data(fam0, side, N0)
    u_star = ed["u_star"]
    orient = 1.0 if side == "right" else -1.0
    rows = []
    for A in A_list:
        fam, N = regime.family_and_N(int(A))
        # cubic normal form: A Phi ~ (kappa/6) zeta^3 + (x - A u*) lam zeta,
        # matching exp(tau^3/3 - s tau) gives the Airy length below
        c_A = (A * abs(ed["kappa"]) / 2.0) ** (1.0 / 3.0) / abs(ed["lam"])
        xs = np.unique(np.floor(A * u_star + orient * s_grid * c_A).astype(int))
        xs = xs[xs >= 0]
        if fam.finite:
            xs = xs[xs <= fam.M]
        if block == "K":
            V = projection_direct(fam, N, xs) * c_A
        else:
            blk = oracle_block(fam, N, beta, xs)
            V = _block_matrix(blk, block) * c_A
        seff = orient * (xs - A * u_star) / c_A
        order = np.argsort(seff)
        T = airy_kernel(seff[order], seff[order])
        Vo = V[np.ix_(order, order)]
        c = fit_amplitude(Vo, T)
        entry = {"A": int(A), "c_A": c_A, "c_fit": c,
                 "sup_err_fitted": float(np.max(np.abs(Vo / c - T))) if c else float("inf")}
        if beta == 1:
            a, b = beta1_indices(fam, N)
            tab = get_table(fam, a + 1, None if fam.finite else int(xs[-1] * 2 + 2))
            r1 = 0.5 * np.outer(tab.phi[a, xs], apply_eps(fam, tab.phi[b])[xs])
            entry["rank_one_sup"] = float(np.max(np.abs(r1)) * c_A)
        rows.append(entry)
    errs = [r["sup_err_fitted"] for r in rows]
    return {"regime": regime.kind, "beta": beta, "side": side, "u_star": u_star,
            "kappa": abs(ed["kappa"]), "lam": ed["lam"], "entries": rows,
            "monotone_decreasing": bool(np.all(np.diff(errs) < 0))}


def coalescence_exponent(regime: Regime, side: str = "right",
                         A_ref: int = 64) -> float:
    """Fit |z_+ - z_-| ~ C |u - u*|^p approaching a soft edge."""
    fam, N = regime.family_and_N(A_ref)
    lo, hi = bulk_support(fam, N)
    u_star = hi if side == "right" else lo
    inward = -1.0 if side == "right" else 1.0
    ds = np.geomspace(1e-4, 1e-2, 9) * (hi - lo)
    gaps = []
    for d in ds:
        bp = saddle_solve(fam, u_star + inward * d, N)
        gaps.append(abs(bp.z_plus - bp.z_minus))
    return float(np.polyfit(np.log(ds), np.log(gaps), 1)[0])


# ---------------------------------------------------------------------------
# first-correction machinery


def correction_dictionary(bulk, M_func, M_prime) -> dict:
    """Q0, Qa, Qb of the difference-quotient linearization at the saddles."""
    wp, wm = bulk.z_plus, bulk.z_minus
    gap = wp - wm
    Mp, Mm = M_func(wp), M_func(wm)
    Q0 = (Mp - Mm) / gap
    Qa = (M_prime(wp) * gap - (Mp - Mm)) / gap ** 2
    Qb = ((Mp - Mm) - M_prime(wm) * gap) / gap ** 2
    return {"Q0": complex(Q0), "Qa": complex(Qa), "Qb": complex(Qb)}


def eps_dictionary_closed_form(theta: float) -> dict:
    """Closed forms of Q0, Qa, Qb for the universal inverse symbol at angle
    theta (saddles on the unit circle)."""
    s, c = np.sin(theta), np.cos(theta)
    return {"Q0": complex(-c / (2 * s * s)),
            "Qa": complex(-1 / (4 * s * s) - 1j * c / (2 * s ** 3)),
            "Qb": complex(-1 / (4 * s * s) + 1j * c / (2 * s ** 3))}


def correction_extract(regime: Regime, beta: int, u: float, A_list,
                       grid=DEFAULT_GRID, subtract_rank_one: bool = False) -> dict:
    """Fit A (Delta S - sine) against {sine, (d_s - d_t) sine}.

    Richardson-extrapolates the residual field over the last two A values
    before fitting; returns the coefficients and the relative fit residual.
    """
    fields = []
    seff_ref = None
    for A in A_list:
        fam, N = regime.family_and_N(int(A))
        rho = site_density(fam, u, N)
        sp = 1.0 / rho
        xs = _window_positions(A, u, sp, grid)
        blk = oracle_block(fam, N, beta, xs)
        V = blk.S * sp
        if beta == 1 and subtract_rank_one:
            a, b = beta1_indices(fam, N)
            tab = get_table(fam, a + 1, None if fam.finite else int(xs[-1] * 2 + 2))
            V = V - 0.5 * np.outer(tab.phi[a, xs], apply_eps(fam, tab.phi[b])[xs]) * sp
        seff = (xs - A * u) * rho
        T = sine_kernel(seff[:, None], seff[None, :])
        # resample onto the requested grid so fields are commensurate
        R = A * (V - T)
        interp = _grid_resample(seff, R, grid)
        fields.append(interp)
        seff_ref = grid
    R = 2.0 * fields[-1] - fields[-2] if len(fields) >= 2 else fields[-1]
    T0 = sine_kernel(grid[:, None], grid[None, :])
    T1 = sine_kernel_deriv(grid[:, None], grid[None, :])
    G = np.array([[np.sum(T0 * T0), np.sum(T0 * T1)],
                  [np.sum(T1 * T0), np.sum(T1 * T1)]])
    rhs = np.array([np.sum(R * T0), np.sum(R * T1)])
    coef = np.linalg.solve(G, rhs)
    fit = coef[0] * T0 + coef[1] * T1
    rel = float(np.linalg.norm(R - fit) / max(np.linalg.norm(R), 1e-300))
    return {"alpha_hat": float(coef[0]), "beta_hat": float(coef[1]),
            "relative_residual": rel,
            "residual_norm": float(np.linalg.norm(R)),
            "fields": len(fields)}


def _grid_resample(seff, R, grid):
    """Bilinear resample of the residual field onto the requested grid."""
    from scipy.interpolate import RegularGridInterpolator
    f = RegularGridInterpolator((seff, seff), R, bounds_error=False, fill_value=None)
    gg = np.array(np.meshgrid(grid, grid, indexing="ij"))
    pts = gg.reshape(2, -1).T
    return f(pts).reshape(len(grid), len(grid))


# ---------------------------------------------------------------------------
# Meixner -> hard-edge crossover


def meixner_eps_gram(family, r: int, nodes: int = 4096) -> np.ndarray:
    """E_{jk} = <phi_j, eps phi_k> for the geometric weight without any
    lattice: a Toeplitz part from one contour (Parseval pairing of the
    inverse multiplier) plus the rank-one even-chain correction with closed
    parity sums.
    """
    from .symbols import inverse_eps_symbol, meixner_parity_sums
    from .contours import ContourSpec
    s = family.s
    spec = ContourSpec(radius=0.9, node_count=nodes)
    z = spec.nodes()
    w = spec.weights(z)
    sz = np.sqrt(1 - s * s) / (1 - s * z)
    sz_inv = np.sqrt(1 - s * s) / (1 - s / z)
    blas = (z - s) / (1 - s * z)
    core = sz_inv * sz * inverse_eps_symbol(family, z) / z
    # tau_d = (1/2pi i) oint core * B^d dw/w... collect coefficients of B^d
    # by direct powers (d ranges over -(r-1) .. r-1)
    ds = np.arange(-(r - 1), r)
    tau = np.array([np.sum(core * blas ** d * w / z ** 0).real for d in ds])
    T = np.empty((r, r))
    for j in range(r):
        T[j] = tau[(np.arange(r) - j) + (r - 1)]
    # raw anchor values raw_k(0) = [w^0]{eps-hat Sz B^k}
    raw0 = np.array([np.sum(sz * blas ** k * inverse_eps_symbol(family, z) / z * w).real
                     for k in range(r)])
    evens = np.empty(r)
    cks = np.empty(r)
    for k in range(r):
        even_k, odd_k = meixner_parity_sums(family, k)
        evens[k] = even_k
        cks[k] = -s * odd_k - raw0[k]
    # eps phi_k = (multiplier image) + c_k 1_even, so the Gram picks up the
    # rank-one term <phi_j, 1_even> c_k = evens_j c_k
    return T + np.outer(evens, cks)


def _bessel_fit(V, xs, index, scale, offsets=np.linspace(0.0, 1.6, 17)):
    """Best (relative L2 error, offset, amplitude) of V against the Bessel
    kernel at u = scale (x + offset)."""
    best = None
    for d in offsets:
        lam = scale * (xs + d)
        T = bessel_kernel(index, lam, lam) * scale
        c = fit_amplitude(V, T)
        if c <= 0:
            continue
        err = float(np.linalg.norm(V / c - T) / np.linalg.norm(T))
        if best is None or err < best[0]:
            best = (err, float(d), c)
    return best or (float("inf"), 0.0, 0.0)


def crossover_test(alpha: float, N_list, x_top: int = 40, block: str = "S",
                   beta: int = 4, beta_m: float = 1.0) -> dict:
    """Meixner hard edge with xi = 1 - alpha/(2N) against the Bessel kernel.

    The lattice maps to the Bessel variable through u = c_h A (x + d) with
    c_h A = 4 alpha' tied to the candidate rate and d a fitted sub-lattice
    offset.  The recovered alpha is the rate whose tied-scale fit minimizes
    the residual; the adjudicated finding (beta_m = 1 throughout) is that
    the matching Bessel index is beta_m - 1 = 0 while the printed statement
    names the rate alpha as the index, so the spec-facing comparison against
    bessel(alpha) is reported alongside the index-0 fit.
    """
    xs = np.arange(0, x_top + 1)
    rows = []
    for N in N_list:
        fam = Meixner(xi=1.0 - alpha / (2.0 * N), beta_m=beta_m)
        V = _crossover_block(fam, N, xs, beta, block) if beta_m == 1.0 else None
        if V is None:
            V = projection_direct(fam, N, xs)
        err_spec, d_spec, amp_spec = _bessel_fit(V, xs, alpha, 4.0 * alpha)
        err_idx0, d0, amp0 = _bessel_fit(V, xs, beta_m - 1.0, 4.0 * alpha)
        rows.append({"N": int(N), "xi": 1.0 - alpha / (2.0 * N),
                     "err_vs_bessel_alpha": err_spec, "amp": amp_spec,
                     "err_vs_bessel_index0": err_idx0, "amp_index0": amp0,
                     "offset_index0": d0, "c_h": 4.0 * alpha / (2.0 * N)})
    errs = [r["err_vs_bessel_alpha"] for r in rows]
    # rate recovery at the largest N via the tied-scale scan
    N = int(N_list[-1])
    fam = Meixner(xi=1.0 - alpha / (2.0 * N), beta_m=beta_m)
    V = (_crossover_block(fam, N, xs, beta, block) if beta_m == 1.0
         else projection_direct(fam, N, xs))
    scan = []
    for a_try in np.linspace(max(0.1, alpha - 0.8), alpha + 0.8, 33):
        err, _, _ = _bessel_fit(V, xs, beta_m - 1.0, 4.0 * a_try)
        scan.append((float(a_try), err))
    alpha_hat = float(min(scan, key=lambda t: t[1])[0])
    return {"alpha": alpha, "beta": beta, "block": block, "entries": rows,
            "monotone_decreasing": bool(np.all(np.diff(errs) < 0)),
            "alpha_hat": alpha_hat, "scan": scan}


def _crossover_block(family, N, xs, beta, block):
    """Hard-edge window of the requested block for geometric-weight Meixner,
    assembled without materializing the macroscopic lattice: window wave
    functions from the contour representation and the eps Gram matrix from
    `meixner_eps_gram`."""
    from .symbols import eps_phi_via_contour, phi_via_contour
    r = rank_of(family, N)
    Phi = np.asarray([phi_via_contour(family, k, xs) for k in range(r + 1)])
    if block == "K":
        return Phi[:r].T @ Phi[:r]
    if beta == 1:
        a, b = beta1_indices(family, N)
        eps_b = eps_phi_via_contour(family, b, xs)
        return Phi[:r].T @ Phi[:r] + 0.5 * np.outer(Phi[a], eps_b)
    E = meixner_eps_gram(family, r)
    return Phi[:r].T @ E @ Phi[:r]
