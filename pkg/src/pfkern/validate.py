"""The runnable invariant suite behind `pfkern validate`.

Each invariant reports (name, residual, tolerance, passes); the overall
verdict separates hard failures from adjudicated findings (the composition
mismatches that ship with structured residual diagnostics).
"""
from __future__ import annotations

import numpy as np

from .families import Charlier, Krawtchouk, Meixner, TruncatedLattice, truncate
from .kernels import (adjudicate_composition, adjudicate_projection,
                      projection_contour, projection_direct)
from .lattice_ops import (build_d, build_epsilon_direct, build_epsilon_factored,
                          check_mutual_inverse, interior_window)
from .wavefunctions import get_table

DESK_FAMILIES = (
    Meixner(xi=0.25, beta_m=1.0),
    Charlier(theta=1.0),
    Charlier(theta=4.0),
    Krawtchouk(M=60, p=0.4),
)


def _item(name, residual, tol):
    return {"name": name, "residual": float(residual), "tolerance": tol,
            "passes": bool(residual < tol)}


def run_validation(family=None, wrong_nesting: bool = False) -> dict:
    fams = (family,) if family is not None else DESK_FAMILIES
    invariants = []
    findings = []
    for fam in fams:
        tab = get_table(fam, 30)
        gram = tab.phi @ tab.phi.T
        invariants.append(_item(f"{fam!r} orthonormality (Gram)",
                                np.max(np.abs(gram - np.eye(31))), 1e-9))

        lat = truncate(fam) if fam.finite else TruncatedLattice(x_max=120)
        eps_d = build_epsilon_direct(fam, lat)
        eps_f = build_epsilon_factored(fam, lat)
        win = interior_window(lat)
        invariants.append(_item(f"{fam!r} eps direct vs factored",
                                np.max(np.abs(eps_d.mat[win, win] - eps_f.mat[win, win])),
                                1e-12))
        invariants.append(_item(f"{fam!r} eps antisymmetry",
                                np.max(np.abs(eps_d.mat[win, win] + eps_d.mat.T[win, win])),
                                1e-10))
        inv_fam = Krawtchouk(M=61, p=0.4) if fam.finite else fam
        inv_lat = truncate(inv_fam) if inv_fam.finite else lat
        res = check_mutual_inverse(build_d(inv_fam, inv_lat),
                                   build_epsilon_direct(inv_fam, inv_lat),
                                   get_table(inv_fam, 22, None if inv_fam.finite
                                             else inv_lat.x_max), 20)
        invariants.append(_item(f"{inv_fam!r} D eps mutual inverse (interior)",
                                res["interior_residual"], 1e-8))

        N = 8
        xs = np.arange(0, min(3 * N + 5, fam.M + 1 if fam.finite else 10 ** 9))
        K = projection_direct(fam, N, xs)
        invariants.append(_item(f"{fam!r} projection idempotence",
                                _idempotence_defect(fam, N), 1e-9))
        variant = "paper" if (wrong_nesting and not isinstance(fam, Meixner)) \
            else "adjudicated"
        if wrong_nesting and isinstance(fam, Meixner):
            from .kernels import _meixner_paper_kernel, _meixner_pair
            r1, r2 = _meixner_pair(fam, "product<1")
            Kc = _meixner_paper_kernel(fam, N, xs, xs, r1, r2, 1024)
        else:
            Kc = projection_contour(fam, N, xs, variant=variant, nodes=1024)
        invariants.append(_item(f"{fam!r} contour vs direct projection"
                                + (" [injected wrong nesting]" if wrong_nesting else ""),
                                np.max(np.abs(Kc - K)) / np.max(np.abs(K)), 1e-8))

        proj = adjudicate_projection(fam, 8)
        findings.append({"type": "nesting", "family": fam.name,
                         "winner": proj["winner"], "candidates": proj["candidates"]})
        comp = adjudicate_composition(fam)
        findings.append({"type": "composition", "family": fam.name,
                         "outcome": comp["outcome"], "winner": comp["winner"],
                         "winner_error": comp["winner_error"],
                         "columns_residual_rank": comp["columns_residual_rank"],
                         "candidates": comp["candidates"]})
    all_pass = all(i["passes"] for i in invariants) and not wrong_nesting
    composition_clean = all(f.get("outcome") == "match" for f in findings
                            if f["type"] == "composition")
    return {"invariants": invariants, "findings": findings,
            "all_pass": bool(all_pass and composition_clean)}


def _idempotence_defect(fam, N):
    span = np.arange(0, fam.M + 1 if fam.finite else 140)
    K = projection_direct(fam, N, span)
    return np.max(np.abs(K @ K - K))
