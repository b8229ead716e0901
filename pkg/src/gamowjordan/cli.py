"""Command-line experiment runner.

Every subcommand reads a JSON config, writes ``<subcommand>.json`` (and a
``<subcommand>.csv`` when a time grid is involved) into ``--out`` and
returns an exit status:

====  ==========================================
0     all declared tolerances met
2     configuration could not be read or parsed
3     an input violates a mathematical invariant
4     a computed check missed its tolerance
====  ==========================================
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
from scipy.linalg import block_diag

from . import contour, exact, jordan, model, states
from .config import ConfigError, load_config, parse_t_grid
from .errors import ConvergenceError, GamowJordanError

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_CONFIG", "EXIT_VALIDATION", "EXIT_TOLERANCE"]

log = logging.getLogger("gamowjordan")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_TOLERANCE = 4

DEFAULT_TOL = {
    "laurent": 1e-10,
    "pole-term": 1e-10,
    "contour-check": 1e-8,
    "expand": 1e-10,
    "evolve": 1e-10,
    "decay-curve": 1e-10,
    "identity-suite": 0.0,
}


def _c(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _need(cfg, *what):
    for name in what:
        if name == "model" and cfg.model is None:
            raise ConfigError("config must define a model")
        if name in ("psi", "phi") and getattr(cfg, name) is None:
            raise ConfigError(f"config must define the wave function '{name}'")
        if name == "t_grid" and cfg.t_grid is None:
            raise ConfigError("a t-grid is required (config 't_grid' or --t-grid a:b:n)")


def _pmap(fn, items, workers):
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- subcommands


def run_laurent(cfg, tol, args):
    _need(cfg, "model")
    m = cfg.model
    closed = model.laurent_principal(m, include_phase=True).coefficients
    numeric = contour.cauchy_residue_coeffs(m, cfg.quadrature).coefficients
    rel = float(np.max(np.abs(numeric - closed) / np.abs(closed)))
    checks = {"cauchy_matches_closed_form": rel <= tol}
    results = {
        "closed_form": [_c(a) for a in closed],
        "cauchy": [_c(a) for a in numeric],
        "max_relative_deviation": rel,
    }
    return results, checks, None


def run_pole_term(cfg, tol, args):
    _need(cfg, "model", "psi", "phi")
    m, psi, phi = cfg.model, cfg.psi, cfg.phi
    pt = contour.pole_term(m, psi, phi, absorb_gauge=True)
    pt_direct = contour.pole_term(m, psi, phi, absorb_gauge=False)
    scale = max(abs(pt.total), 1e-300)
    results = {
        "total": _c(pt.total),
        "per_order": [_c(x) for x in pt.per_order],
        "product_series_route": _c(pt_direct.total),
    }
    checks = {"routes_agree": abs(pt.total - pt_direct.total) <= tol * scale}
    if m.gamma_is_constant:
        quad = contour.pole_term_quadrature(m, psi, phi, cfg.quadrature)
        results["circle_quadrature"] = _c(quad)
        checks["circle_quadrature_agrees"] = abs(pt.total - quad) <= tol * scale
    return results, checks, None


def run_contour_check(cfg, tol, args):
    _need(cfg, "model", "psi", "phi")
    # the quadrature must be well below the identity tolerance to make the check meaningful
    q = dataclasses.replace(cfg.quadrature, tol=min(cfg.quadrature.tol, tol * 1e-3))
    rep = contour.contour_identity_check(cfg.model, cfg.psi, cfg.phi, q, tol)
    results = {
        "direct": _c(rep.direct.value),
        "background": _c(rep.background.value),
        "pole_term": _c(rep.pole_term.total),
        "defect": rep.defect,
        "relative_defect": rep.relative_defect,
        "E_max": rep.direct.E_max,
        "tail_bound": rep.direct.tail_bound + rep.background.tail_bound,
        "quadrature_error": rep.direct.error + rep.background.error,
    }
    return results, {"contour_deformation_identity": rep.passed}, None


def run_expand(cfg, tol, args):
    _need(cfg, "model", "psi", "phi")
    m = cfg.model
    b = contour.expansion_coefficients(m, cfg.phi)
    via_expansion = contour.pole_term_from_expansion(m, cfg.psi, cfg.phi)
    pt = contour.pole_term(m, cfg.psi, cfg.phi).total
    dev = abs(via_expansion - pt)
    results = {
        "coefficients": [_c(x) for x in b],
        "ket_components": [_c(x) for x in contour.gamow_components(m, cfg.psi).to("jordan").values],
        "pole_term_from_expansion": _c(via_expansion),
        "pole_term": _c(pt),
        "deviation": dev,
    }
    return results, {"expansion_reproduces_pole_term": dev <= tol * max(abs(pt), 1e-300)}, None


def _evolve_row(payload):
    models, comps, t = payload
    U = block_diag(*[jordan.evolution_matrix(m, t).entries for m in models])
    oracle = block_diag(*[jordan.matrix_exp_oracle(m, t).entries for m in models])
    row = [t]
    for z in U.reshape(-1):
        row += [z.real, z.imag]
    if comps is not None:
        evolved = np.concatenate(
            [jordan.evolve_components(c, t).values for c in comps]
        )
        for z in evolved:
            row += [z.real, z.imag]
    return row, float(np.max(np.abs(U - oracle)))


def run_evolve(cfg, tol, args):
    _need(cfg, "model", "t_grid")
    models = cfg.models
    size = sum(m.r for m in models)
    header = ["t"]
    for i in range(size):
        for j in range(size):
            header += [f"U_{i}_{j}_re", f"U_{i}_{j}_im"]
    comps = None
    if cfg.psi is not None:
        comps = [contour.gamow_components(m, cfg.psi).to("jordan") for m in models]
        for k in range(size):
            header += [f"psi_{k}_re", f"psi_{k}_im"]
    out = _pmap(_evolve_row, [(models, comps, float(t)) for t in cfg.t_grid], args.workers)
    rows = [r for r, _ in out]
    dev = max(d for _, d in out)
    results = {"blocks": [m.r for m in models], "dimension": size, "max_oracle_deviation": dev}
    return results, {"agrees_with_matrix_exponential": dev <= tol}, (header, rows)


def _decay_row(payload):
    m, psi_comps, n, k, t = payload
    P_W = states.pair_with_observable(states.evolve_state_closed(m, n, t), psi_comps)
    P_dyad = states.pair_with_observable(states.evolve_dyad(m, k, k, t), psi_comps)
    return t, P_dyad.real, P_W


def run_decay_curve(cfg, tol, args):
    _need(cfg, "model", "psi", "t_grid")
    m = cfg.model
    n = cfg.options.get("n")
    k = int(cfg.options.get("dyad_k", m.r - 1))
    if not 0 <= k < m.r or (n is not None and not 0 <= int(n) < m.r):
        raise GamowJordanError(f"dyad/state index outside 0..{m.r - 1}")
    n = None if n is None else int(n)
    comps = contour.gamow_components(m, cfg.psi).to("jordan")
    P0 = states.pair_with_observable(states.evolve_state_closed(m, n, 0.0), comps)
    if P0 == 0:
        raise GamowJordanError("observable has zero overlap with the state operator; ratio undefined")
    out = _pmap(_decay_row, [(m, comps, n, k, float(t)) for t in cfg.t_grid], args.workers)
    header = ["t", "P_dyad", "P_W_re", "P_W_im", "P_W_ratio", "exp_neg_gamma_t"]
    rows, worst = [], 0.0
    for t, P_dyad, P_W in out:
        ratio = P_W / P0
        expected = float(np.exp(-m.Gamma * t))
        worst = max(worst, abs(ratio - expected))
        rows.append([t, P_dyad, P_W.real, P_W.imag, ratio.real, expected])
    results = {
        "state": "W" if n is None else f"W^({n})",
        "dyad_k": k,
        "P_W_at_zero": _c(P0),
        "max_ratio_deviation": worst,
    }
    return results, {"survival_ratio_is_exponential": worst <= tol}, (header, rows)


def _identity_row(n):
    return exact.identity_suite(n, n)["rows"][-1]


def run_identity_suite(cfg, tol, args):
    n_max = args.n_max if args.n_max is not None else int(cfg.options.get("n_max", 12))
    if not 0 <= n_max <= exact.MAX_SYMBOLIC_N:
        raise GamowJordanError(f"--n-max must be in 0..{exact.MAX_SYMBOLIC_N}")
    rows = _pmap(_identity_row, range(n_max + 1), args.workers)
    checks = {}
    for family in ("binom_product_identity", "binom_cancellation", "reorder_check", "symbolic_state_evolution"):
        checks[family] = all(row[family] for row in rows)
    return {"n_max": n_max, "rows": rows}, checks, None


COMMANDS = {
    "laurent": (run_laurent, "principal part: closed form vs Cauchy extraction"),
    "pole-term": (run_pole_term, "pole term from symbolic derivatives and circle quadrature"),
    "contour-check": (run_contour_check, "real-axis integral vs background plus pole term"),
    "expand": (run_expand, "Jordan-ket expansion coefficients of the prepared state"),
    "evolve": (run_evolve, "evolution matrix on a t-grid, checked against a series oracle"),
    "decay-curve": (run_decay_curve, "survival curves of W and a single dyad"),
    "identity-suite": (run_identity_suite, "exact combinatorial identity table"),
}


# ---------------------------------------------------------------- plumbing


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) for x in row])


def _write_gnuplot(path, csv_name, header):
    cols = {name: i + 1 for i, name in enumerate(header)}
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 't'",
        f"plot '{csv_name}' using 1:{cols['P_dyad']} with lines, \\",
        f"     '' using 1:{cols['P_W_ratio']} with lines, \\",
        f"     '' using 1:{cols['exp_neg_gamma_t']} with points",
        "",
    ]
    Path(path).write_text("\n".join(lines))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gamowjordan",
        description="Higher-order resonance pole toolkit: pole terms, Jordan blocks, decay checks.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", type=Path, help="JSON experiment config")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory (default: .)")
        p.add_argument("--tol", type=float, help=f"tolerance override (default {DEFAULT_TOL[name]:g})")
        p.add_argument("--n-max", type=int, help="largest n for the identity suite")
        p.add_argument("--t-grid", help="time grid start:stop:count, overrides the config")
        p.add_argument("--workers", type=int, default=1, help="process pool size for sweeps")
        if name == "decay-curve":
            p.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")
    return parser


def _effective_tol(args, cfg):
    if args.tol is not None:
        if not args.tol >= 0:
            raise ConfigError("--tol must be non-negative")
        return args.tol
    return cfg.tol if cfg.tol is not None else DEFAULT_TOL[args.command]


def run(args) -> int:
    """Execute one parsed command line; returns the exit status."""
    try:
        cfg = load_config(args.config)
        if args.t_grid is not None:
            cfg = dataclasses.replace(cfg, t_grid=parse_t_grid(args.t_grid))
        tol = _effective_tol(args, cfg)
        fn = COMMANDS[args.command][0]
        results, checks, table = fn(cfg, tol, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except GamowJordanError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    passed = all(checks.values())
    report = {
        "command": args.command,
        "config_sha256": cfg.sha256,
        "tolerances": {"tol": tol, "quadrature_tol": cfg.quadrature.tol},
        "checks": checks,
        "passed": passed,
        "results": results,
    }
    if cfg.t_grid is not None and table is not None:
        report["t_grid"] = {"start": float(cfg.t_grid[0]), "stop": float(cfg.t_grid[-1]), "count": len(cfg.t_grid)}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = args.command
    (out / f"{stem}.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    if table is not None:
        header, rows = table
        _write_csv(out / f"{stem}.csv", header, rows)
        if getattr(args, "gnuplot", False):
            _write_gnuplot(out / f"{stem}.gp", f"{stem}.csv", header)
    log.info("wrote %s", out / f"{stem}.json")
    if not passed:
        failed = ", ".join(k for k, v in checks.items() if not v)
        print(f"tolerance failure ({tol:g}): {failed}", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
