"""Command-line driver.

Subcommands: run, convergence, superconvergence, equiv-check, bench,
dof-table.  Each accepts an optional flat key=value config file plus
``--set key=value`` overrides; results land in the config's ``out`` path
as CSV (floats carry 17 significant digits).
"""

from __future__ import annotations

import argparse
import sys

from . import driver, equiv
from .mesh import save_state_csv


def _load_config(args) -> driver.RunConfig:
    text = ""
    if args.config:
        with open(args.config) as fh:
            text = fh.read()
    overrides = {}
    for item in args.set or []:
        if "=" not in item:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        overrides[key.strip()] = val
    if args.out:
        overrides["out"] = args.out
    return driver.parse_config(text, overrides)


def _add_common(sub):
    sub.add_argument("config", nargs="?", default=None,
                     help="flat key=value config file")
    sub.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override a config key")
    sub.add_argument("--out", default=None, help="output CSV path")


def cmd_run(args) -> int:
    cfg = _load_config(args)
    res = driver.run_simulation(cfg)
    save_state_csv(res.state, cfg.out)
    err_rows = [(name, err) for name, err in sorted(res.errors.families.items())]
    err_rows.append(("e_dofs", res.errors.e_dofs))
    driver.write_csv(cfg.out + ".errors.csv", ["family", "l2_error"], err_rows)
    b = res.bench
    driver.write_csv(cfg.out + ".bench.csv", driver.BENCH_HEADER, [b.row()])
    n = cfg.grids[0]
    dt = driver.default_dt(cfg, 1.0 / n)
    meta = [("method", b.method), ("grid", n), ("dt", dt),
            ("dt_rule", "cfl_override * dx" if cfg.cfl_override is not None
             else "catalog C_CFL * dx"),
            ("steps", b.steps), ("boundary", cfg.boundary),
            ("seed", cfg.seed), ("threads", cfg.threads),
            ("rk", cfg.rk)]
    driver.write_csv(cfg.out + ".meta.csv", ["key", "value"], meta)
    print(f"{b.method}: e_dofs={driver.fmt(res.errors.e_dofs)} "
          f"tau={b.tau:.3g}s steps={b.steps}")
    return 0


def cmd_convergence(args) -> int:
    cfg = _load_config(args)
    rows = driver.run_convergence_study(cfg)
    driver.write_csv(cfg.out, ["method", "dx", "e_dofs", "eoc"], rows)
    for row in rows:
        print(", ".join(driver.fmt(v) for v in row))
    return 0


def cmd_superconvergence(args) -> int:
    cfg = _load_config(args)
    rows = driver.run_superconvergence_probe(cfg)
    driver.write_csv(cfg.out, ["point_set", "dx", "error", "eoc"], rows)
    for row in rows:
        print(", ".join(driver.fmt(v) for v in row))
    return 0


def cmd_equiv_check(args) -> int:
    cfg = _load_config(args)
    dimension = 2 if cfg.problem.endswith("2d") else 1
    setting = equiv.EquivSetting(
        dimension=dimension, problem=cfg.problem,
        problem_params=_problem_params(cfg), flux=cfg.flux,
        alpha_plus=cfg.alpha_plus, beta_plus=cfg.beta_plus,
        K=cfg.K, n_cells=cfg.grids[0], seed=cfg.seed,
        tolerance=cfg.tolerance, variant=args.variant)
    report = equiv.verify_equivalence(setting)
    driver.write_csv(cfg.out, ["family", "max_abs", "scale", "relative", "pass"],
                     report.rows())
    for fam, max_abs, scale, rel, ok in report.rows():
        print(f"{fam}: relative={rel:.3e} {'PASS' if ok else 'FAIL'}")
    if report.metadata:
        print("metadata:", ", ".join(f"{k}={v}" for k, v in
                                     sorted(report.metadata.items()) if v != ""))
    return 0 if report.passed else 1


def _problem_params(cfg: driver.RunConfig) -> dict:
    if cfg.problem == "advection1d":
        return {"u": cfg.u}
    if cfg.problem == "advection2d":
        return {"ux": cfg.ux, "uy": cfg.uy}
    if cfg.problem == "acoustics2x2":
        return {"c": cfg.c_sound}
    return {}


def cmd_bench(args) -> int:
    cfg = _load_config(args)
    records, slopes = driver.run_benchmark(cfg)
    driver.write_csv(cfg.out, driver.BENCH_HEADER,
                     [r.row() for r in records])
    driver.write_csv(cfg.out + ".slopes.csv", ["method", "slope"], slopes)
    for method, slope in slopes:
        print(f"{method}: tau ~ N_cells^{slope:.3f}")
    return 0


def cmd_dof_table(args) -> int:
    cfg = _load_config(args)
    rows = driver.emit_dof_table()
    driver.write_csv(cfg.out,
                     ["family", "order", "n_dofs", "n_tdofs", "n_mom",
                      "n_edge", "n_node", "n_int", "c_cfl"], rows)
    for row in rows:
        print(", ".join(driver.fmt(v) for v in row))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="afdg",
        description="Active Flux / DG solvers, equivalence checks and "
                    "benchmarks on Cartesian grids")
    subs = parser.add_subparsers(dest="command", required=True)

    for name, fn in [("run", cmd_run), ("convergence", cmd_convergence),
                     ("superconvergence", cmd_superconvergence),
                     ("bench", cmd_bench), ("dof-table", cmd_dof_table)]:
        sub = subs.add_parser(name)
        _add_common(sub)
        sub.set_defaults(fn=fn)

    sub = subs.add_parser("equiv-check")
    _add_common(sub)
    sub.add_argument("--variant", default="tensorial",
                     choices=["tensorial", "classical_midpoint"])
    sub.set_defaults(fn=cmd_equiv_check)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
