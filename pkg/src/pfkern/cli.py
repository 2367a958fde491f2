"""Command-line interface.

Subcommands: kernel, validate, asym (density/bulk/edge/correction/
crossover/gap), splice (kernel/reality/edge-ratio).  Exit codes: 0 success,
1 usage error, 2 numerical failure, 3 structured mismatch (success with
findings, carried in the report).
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .contours import QuadratureError
from .families import Charlier, Krawtchouk, Meixner, DomainError
from . import reports


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(1)


def _add_family_args(p):
    p.add_argument("--family", required=True,
                   choices=["meixner", "charlier", "krawtchouk"])
    p.add_argument("--xi", type=float, help="Meixner ratio in (0,1)")
    p.add_argument("--beta-m", type=float, default=1.0, help="Meixner Pochhammer exponent")
    p.add_argument("--theta", type=float, help="Charlier rate")
    p.add_argument("--M", type=int, help="Krawtchouk lattice size")
    p.add_argument("--p", type=float, help="Krawtchouk success probability")


def _family(args):
    if args.family == "meixner":
        if args.xi is None:
            raise DomainError("--xi required for meixner")
        return Meixner(xi=args.xi, beta_m=args.beta_m)
    if args.family == "charlier":
        if args.theta is None:
            raise DomainError("--theta required for charlier")
        return Charlier(theta=args.theta)
    if args.M is None or args.p is None:
        raise DomainError("--M and --p required for krawtchouk")
    return Krawtchouk(M=args.M, p=args.p)


def _regime(args):
    from .harness import Regime
    if args.family == "meixner":
        return Regime(kind="meixner", xi=args.xi if args.xi is not None
                      else (args.s ** 2 if args.s else None))
    if args.family == "charlier":
        return Regime(kind="charlier", tau=args.tau)
    return Regime(kind="krawtchouk", gamma=args.gamma, p=args.p)


def _parse_window(text, family, N):
    from .kernels import default_window
    if not text:
        return default_window(family, N)
    lo, hi = (int(v) for v in text.split(":"))
    return np.arange(lo, hi + 1)


def _parse_list(text):
    return [int(v) for v in text.split(",")]


def _load_config(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, val = line.partition("=")
            out[key.strip()] = val.strip()
    return out


def cmd_kernel(args) -> int:
    from .kernels import adjudicate_composition, s1_block, s4_block, oracle_block
    fam = _family(args)
    window = _parse_window(args.window, fam, args.N)
    route = "oracle" if args.oracle else "contour"
    blk = (s4_block if args.beta == 4 else s1_block)(fam, args.N, window, route=route)
    out = reports.output_dir(args.out)
    stem = os.path.join(out, f"kernel_{fam.name}_b{args.beta}_N{args.N}")
    reports.write_kernel_csv(stem + ".csv", blk)
    adj = adjudicate_composition(fam)
    reports.write_json(stem + ".json",
                       {"metadata": reports.block_metadata(blk),
                        "composition_adjudication": adj},
                       config=vars(args) | {"command": "kernel"})
    if args.dump_ops:
        from .families import truncate, TruncatedLattice
        from .lattice_ops import build_d, build_epsilon_direct, dump_csv
        lat = truncate(fam) if fam.finite else TruncatedLattice(x_max=int(window[-1]) * 2)
        dump_csv(build_d(fam, lat), stem + "_d.csv")
        dump_csv(build_epsilon_direct(fam, lat), stem + "_eps.csv")
    print(f"wrote {stem}.csv ({len(window)}^2 rows) provenance={blk.provenance}")
    return 0 if adj["outcome"] == "match" else 3


def cmd_validate(args) -> int:
    from .validate import run_validation
    fam = _family(args) if args.family else None
    report = run_validation(fam, wrong_nesting=args.wrong_nesting)
    out = reports.output_dir(args.out)
    path = os.path.join(out, "validate.json")
    reports.write_json(path, report, config=vars(args) | {"command": "validate"})
    for item in report["invariants"]:
        status = "pass" if item["passes"] else "FINDING"
        print(f"[{status}] {item['name']}: residual {item['residual']:.3e} "
              f"(tol {item['tolerance']:.1e})")
    print(f"wrote {path}")
    return 0 if report["all_pass"] else 3


def cmd_asym(args) -> int:
    from .harness import (Regime, bulk_convergence_test, correction_extract,
                          crossover_test, edge_convergence_test)
    out = reports.output_dir(args.out)
    if args.study == "density":
        from .saddles import (bulk_support, cos_theta, density_and_spacing,
                              saddle_solve, site_density)
        reg = _regime(args)
        fam, N = reg.family_and_N(args.A or 64)
        lo, hi = bulk_support(fam, N)
        us = np.linspace(lo, hi, args.grid + 2)[1:-1]
        rows = []
        for u in us:
            rho, delta = density_and_spacing(fam, u, N)
            rows.append((float(u), float(cos_theta(fam, u, N)), float(rho),
                         float(delta), float(site_density(fam, u, N))))
        path = os.path.join(out, f"density_{args.family}.csv")
        reports.write_table_csv(path, ["u", "cos_theta", "rho", "delta", "rho_site"], rows)
        print(f"wrote {path} ({len(rows)} rows over ({lo:.6g}, {hi:.6g}))")
        return 0
    if args.study == "bulk":
        rep = bulk_convergence_test(_regime(args), args.beta, args.u,
                                    _parse_list(args.A_list), block=args.block)
        path = os.path.join(out, f"bulk_{args.family}_b{args.beta}.json")
        reports.write_json(path, rep, config=vars(args) | {"command": "asym bulk"})
        print(f"slope {rep['slope']:.3f}; wrote {path}")
        return 0
    if args.study == "edge":
        rep = edge_convergence_test(_regime(args), args.beta,
                                    _parse_list(args.A_list), block=args.block)
        path = os.path.join(out, f"edge_{args.family}_b{args.beta}.json")
        reports.write_json(path, rep, config=vars(args) | {"command": "asym edge"})
        print(f"monotone decreasing: {rep['monotone_decreasing']}; wrote {path}")
        return 0
    if args.study == "correction":
        rep = correction_extract(_regime(args), args.beta, args.u, _parse_list(args.A_list))
        path = os.path.join(out, f"correction_{args.family}_b{args.beta}.json")
        reports.write_json(path, rep, config=vars(args) | {"command": "asym correction"})
        print(f"alpha_hat {rep['alpha_hat']:.4f} beta_hat {rep['beta_hat']:.4f} "
              f"residual {rep['relative_residual']:.3f}; wrote {path}")
        return 0
    if args.study == "crossover":
        rep = crossover_test(args.alpha, _parse_list(args.N_list), beta=args.beta,
                             block=args.block)
        path = os.path.join(out, "crossover.json")
        reports.write_json(path, rep, config=vars(args) | {"command": "asym crossover"})
        print(f"alpha_hat {rep['alpha_hat']:.3f} monotone {rep['monotone_decreasing']}; "
              f"wrote {path}")
        return 0
    if args.study == "gap":
        from .fredholm import bulk_scaled_gap_comparison
        reg = _regime(args)
        fam, N = reg.family_and_N(args.A or 256)
        rep = bulk_scaled_gap_comparison(fam, N, args.u,
                                         [float(v) for v in args.lengths.split(",")])
        path = os.path.join(out, "gap.json")
        reports.write_json(path, rep, config=vars(args) | {"command": "asym gap"})
        print(f"wrote {path}")
        return 0
    return 1


def cmd_splice(args) -> int:
    from .kuznetsov import (GaussianTest, edge_ratio_report, m_h, m_h_numeric,
                            reality_symmetry_check, spliced_oracle, spliced_s4)
    from .harness import Regime
    out = reports.output_dir(args.out)
    test = GaussianTest(sigma=args.sigma)
    if args.study == "kernel":
        fam = _family(args)
        window = _parse_window(args.window, fam, args.N)
        blk = spliced_s4(fam, args.N, test, window)
        orc = spliced_oracle(fam, args.N, test, window)
        rel = float(np.max(np.abs(blk.S - orc.S)) / np.max(np.abs(orc.S)))
        stem = os.path.join(out, f"spliced_{fam.name}_N{args.N}_sigma{args.sigma:g}")
        reports.write_kernel_csv(stem + ".csv", blk)
        reports.write_json(stem + ".json",
                           {"metadata": reports.block_metadata(blk),
                            "oracle_rel_diff": rel},
                           config=vars(args) | {"command": "splice kernel"})
        print(f"spliced block vs oracle: {rel:.3e}; wrote {stem}.csv")
        return 0 if rel < 1e-6 else 3
    if args.study == "reality":
        rep = reality_symmetry_check(test)
        phis = np.linspace(-3 * np.pi / 4, 3 * np.pi / 4, 25)
        rows = [(float(ph), float(np.real(m_h(test, np.exp(1j * ph)))),
                 float(np.imag(m_h(test, np.exp(1j * ph)))),
                 float(np.real(m_h_numeric(test, np.exp(1j * ph))))) for ph in phis]
        path = os.path.join(out, "reality.csv")
        reports.write_table_csv(path, ["phi", "re_mh", "im_mh", "re_numeric"], rows)
        reports.write_json(os.path.join(out, "reality.json"), rep,
                           config=vars(args) | {"command": "splice reality"})
        print(f"max |Im m_h| on circle: {rep['max_imag_unit_circle']:.3e}; wrote {path}")
        return 0
    if args.study == "edge-ratio":
        rep = edge_ratio_report(Regime(kind="charlier", tau=args.tau), test, A=args.A or 96)
        path = os.path.join(out, "edge_ratio.json")
        reports.write_json(path, rep, config=vars(args) | {"command": "splice edge-ratio"})
        print(f"measured {rep['measured_ratio']:.4f} vs predicted "
              f"{rep['predicted_ratio']:.4f} (rel diff {rep['rel_diff']:.3f}); wrote {path}")
        return 0
    return 1


def build_parser() -> _Parser:
    parser = _Parser(prog="pfkern", description=__doc__)
    parser.add_argument("--config", help="key=value file providing defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", help="evaluate a kernel block window")
    _add_family_args(k)
    k.add_argument("--beta", type=int, choices=[1, 4], required=True)
    k.add_argument("--N", type=int, required=True)
    k.add_argument("--window", help="lo:hi lattice window")
    k.add_argument("--oracle", action="store_true", help="lattice-oracle provenance")
    k.add_argument("--dump-ops", action="store_true", help="CSV dumps of D and eps")
    k.add_argument("--out")
    k.add_argument("--threads", type=int, default=0)
    k.set_defaults(fn=cmd_kernel)

    v = sub.add_parser("validate", help="run the full invariant suite")
    v.add_argument("--family", choices=["meixner", "charlier", "krawtchouk"])
    v.add_argument("--xi", type=float)
    v.add_argument("--beta-m", type=float, default=1.0)
    v.add_argument("--theta", type=float)
    v.add_argument("--M", type=int)
    v.add_argument("--p", type=float)
    v.add_argument("--wrong-nesting", action="store_true",
                   help="inject the rejected contour convention (diagnostic)")
    v.add_argument("--out")
    v.set_defaults(fn=cmd_validate)

    a = sub.add_parser("asym", help="asymptotic studies")
    a.add_argument("study", choices=["density", "bulk", "edge", "correction",
                                     "crossover", "gap"])
    _add_family_args(a)
    a.add_argument("--s", type=float, help="Meixner sqrt(xi) regime parameter")
    a.add_argument("--tau", type=float, help="Charlier theta/N limit")
    a.add_argument("--gamma", type=float, help="Krawtchouk N/M limit")
    a.add_argument("--beta", type=int, choices=[1, 4], default=1)
    a.add_argument("--block", default="S", choices=["S", "SD", "epsS", "K"])
    a.add_argument("--u", type=float)
    a.add_argument("--A", type=int)
    a.add_argument("--A-list", dest="A_list", default="32,64,128")
    a.add_argument("--N-list", dest="N_list", default="16,32,64")
    a.add_argument("--alpha", type=float, default=1.0)
    a.add_argument("--grid", type=int, default=100)
    a.add_argument("--lengths", default="0.5,1.0")
    a.add_argument("--out")
    a.set_defaults(fn=cmd_asym)

    s = sub.add_parser("splice", help="spectral-multiplier studies")
    s.add_argument("study", choices=["kernel", "reality", "edge-ratio"])
    _add_family_args(s)
    s.add_argument("--sigma", type=float, default=2.0)
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--N", type=int, default=6)
    s.add_argument("--A", type=int)
    s.add_argument("--window")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_splice)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        if extra:
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.config:
        defaults = _load_config(args.config)
        for key, val in defaults.items():
            attr = key.replace("-", "_")
            if getattr(args, attr, None) in (None, False):
                cur = getattr(args, attr, None)
                cast = type(cur) if cur is not None else str
                setattr(args, attr, cast(val) if cast is not bool else val == "true")
    try:
        return args.fn(args)
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
