"""Experiment driver: simulations, convergence/superconvergence studies,
runtime benchmarks and the dof table, with CSV emission.

Methods are named by family and order: ``af`` of order p uses K = p - 2
(tensorial dofs in 2-d), ``dg`` of order p uses K = p - 1.  Errors are
measured against the advected exact solution, per dof family (RMS), and
``e_dofs`` is the maximum over families.  Timing wraps the integration
loop only; everything runs single-threaded and deterministic.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, replace

import numpy as np

from . import af, dg, mesh, poly, timeint
from .mesh import (AfState1D, AfState2D, DgState1D, DgState2D, Grid1D, Grid2D,
                   dof_counts)
from .problems import NumericalFluxSpec, builtin_problems

__all__ = [
    "RunConfig", "parse_config", "ErrorReport", "BenchRecord", "RunResult",
    "run_simulation", "run_convergence_study", "run_superconvergence_probe",
    "run_benchmark", "emit_dof_table", "eoc", "write_csv", "fmt",
]


def fmt(x) -> str:
    """Floats with 17 significant digits; everything else via str."""
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path: str, header: list, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def eoc(err_coarse: float, err_fine: float) -> float:
    """Experimental order of convergence under mesh halving."""
    if err_fine <= 0 or err_coarse <= 0:
        return float("nan")
    return math.log2(err_coarse / err_fine)


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    experiment: str = "run"
    method: str = "dg"              # af | dg
    order: int = 3
    k: int | None = None            # overrides the order-implied K
    rk: str = "ssprk3"
    problem: str = "advection2d"
    u: float = 1.0                  # 1-d advection speed
    ux: float = 1.0
    uy: float = 1.0
    c_sound: float = 1.0
    init: str = "gauss"
    flux: str = "upwind"
    alpha_plus: float = 1.0
    beta_plus: float = 1.0
    grids: tuple = (20, 40)
    t_final: float = 0.1
    cfl_override: float | None = None
    boundary: str = "periodic"
    seed: int = 0
    threads: int = 1
    tolerance: float = 1e-11
    out: str = "out.csv"

    @property
    def K(self) -> int:
        if self.k is not None:
            return self.k
        return self.order - 2 if self.method == "af" else self.order - 1

    def method_id(self) -> str:
        rk_order = {"ssprk3": 3, "ssprk33": 3, "ssprk54": 4, "ssprk5_4": 4}
        return f"{self.method.upper()}{self.order}{rk_order[self.rk]}"


_BOOL = {"true": True, "false": False, "yes": True, "no": False}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if key == "grids":
        return tuple(int(g) for g in raw.replace(",", " ").split())
    if raw.lower() in _BOOL:
        return _BOOL[raw.lower()]
    if raw.lower() in ("none", ""):
        return None
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            pass
    return raw


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Flat key=value text; '#' starts a comment; later keys win."""
    cfg = RunConfig()
    items: dict = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (expected key=value): {line!r}")
        key, raw = line.split("=", 1)
        items[key.strip()] = raw
    for key, raw in (overrides or {}).items():
        items[key] = raw
    for key, raw in items.items():
        if not hasattr(cfg, key):
            raise ValueError(f"unknown config key {key!r}")
        value = _parse_value(key, raw) if isinstance(raw, str) else raw
        setattr(cfg, key, value)
    return cfg


# ---------------------------------------------------------------------------
# initial data and exact solutions


def initial_condition(cfg: RunConfig):
    if cfg.problem.endswith("2d"):
        if cfg.init == "gauss":
            return lambda x, y: 0.8 + np.exp(-((x - 0.5) / 0.05) ** 2
                                             - ((y - 0.5) / 0.05) ** 2)
        if cfg.init == "sine":
            return lambda x, y: np.sin(2 * np.pi * x) * np.sin(2 * np.pi * y)
        raise ValueError(f"unknown 2-d initial data {cfg.init!r}")
    if cfg.init in ("sine", "gauss"):
        if cfg.init == "sine":
            return lambda x: np.sin(2 * np.pi * x)
        return lambda x: 0.8 + np.exp(-((x - 0.5) / 0.05) ** 2)
    if cfg.init == "const":
        return lambda x: np.ones_like(np.asarray(x, dtype=float))
    raise ValueError(f"unknown initial data {cfg.init!r}")


def exact_solution(cfg: RunConfig):
    """Translated initial data (linear advection only)."""
    q0 = initial_condition(cfg)
    if cfg.problem.endswith("2d"):
        return lambda t, x, y: q0(x - cfg.ux * t, y - cfg.uy * t)
    return lambda t, x: q0(x - cfg.u * t)


def make_problem(cfg: RunConfig):
    factory = builtin_problems()[cfg.problem]
    if cfg.problem == "advection1d":
        return factory(u=cfg.u)
    if cfg.problem == "advection2d":
        return factory(ux=cfg.ux, uy=cfg.uy)
    if cfg.problem == "acoustics2x2":
        return factory(c=cfg.c_sound)
    return factory()


def make_flux(cfg: RunConfig, problem=None, state_values=None) -> NumericalFluxSpec:
    if cfg.flux == "upwind":
        return NumericalFluxSpec.upwind()
    if cfg.flux == "central":
        return NumericalFluxSpec.central()
    if cfg.flux == "alpha":
        return NumericalFluxSpec.alpha(cfg.alpha_plus, 1.0 - cfg.alpha_plus)
    if cfg.flux == "lax_friedrichs":
        from .problems import lax_friedrichs_speed
        return NumericalFluxSpec.lax_friedrichs(
            lax_friedrichs_speed(problem, state_values))
    raise ValueError(f"unknown flux {cfg.flux!r}")


# ---------------------------------------------------------------------------
# Dirichlet ghost padding (exact-solution traces)


def _pad_dg_2d(state: DgState2D, exact, t: float) -> DgState2D:
    """Embed the state in a one-cell ghost ring projected from the exact
    solution; the periodic stencil code then runs unchanged and the ring
    derivatives are discarded."""
    g = state.grid
    nx, ny = g.n_cells_x, g.n_cells_y
    K = state.K
    gpad = Grid2D(g.x_min - g.dx, g.x_max + g.dx, nx + 2,
                  g.y_min - g.dy, g.y_max + g.dy, ny + 2)
    coeffs = np.zeros((nx + 2, ny + 2, K + 1, K + 1))
    coeffs[1:-1, 1:-1] = state.coeffs

    def fill_strip(x0, x1, ncx, y0, y1, ncy, si, sj):
        strip = mesh.fill_dg_2d(Grid2D(x0, x1, ncx, y0, y1, ncy), K,
                                lambda x, y: exact(t, x, y))
        coeffs[si:si + ncx, sj:sj + ncy] = strip.coeffs

    fill_strip(gpad.x_min, gpad.x_max, nx + 2, gpad.y_min, g.y_min, 1, 0, 0)
    fill_strip(gpad.x_min, gpad.x_max, nx + 2, g.y_max, gpad.y_max, 1, 0, ny + 1)
    fill_strip(gpad.x_min, g.x_min, 1, g.y_min, g.y_max, ny, 0, 1)
    fill_strip(g.x_max, gpad.x_max, 1, g.y_min, g.y_max, ny, nx + 1, 1)
    return DgState2D(gpad, K, coeffs, periodic=True)


def _pad_af_2d(state: AfState2D, exact, t: float) -> AfState2D:
    """Same ghost-ring embedding for tensorial AF dofs."""
    g = state.grid
    nx, ny = g.n_cells_x, g.n_cells_y
    K = state.K
    gpad = Grid2D(g.x_min - g.dx, g.x_max + g.dx, nx + 2,
                  g.y_min - g.dy, g.y_max + g.dy, ny + 2)
    f = lambda x, y: exact(t, x, y)
    rule = poly.gauss_legendre_rule(12)
    nodes, weights = rule.nodes, rule.weights
    bws = [poly.moment_normalization(k) * poly.moment_weight(k)(nodes) * weights
           for k in range(K)]

    xs_if = gpad.gx.interfaces(True)          # length nx+2
    ys_if = gpad.gy.interfaces(True)
    xc = gpad.gx.centers()
    yc = gpad.gy.centers()

    N = np.zeros((nx + 2, ny + 2))
    N[1:, 1:] = state.node_values             # real nodes at interfaces 1..nx+1
    N[0, :] = f(xs_if[0], ys_if)
    N[:, 0] = f(xs_if, ys_if[0])

    Ex = np.zeros((nx + 2, ny + 2, K))
    Ex[1:, 1:-1] = state.x_edge
    for j in (0, ny + 1):
        vals = f(xs_if[:, None, None], yc[j] + gpad.dy * nodes[None, None, :])
        for k in range(K):
            Ex[:, j, k] = np.tensordot(vals[:, 0, :], bws[k], axes=(1, 0))
    vals = f(xs_if[0], yc[None, :, None] + gpad.dy * nodes[None, None, :])
    for k in range(K):
        Ex[0, :, k] = np.tensordot(vals[0], bws[k], axes=(1, 0))

    Ey = np.zeros((nx + 2, ny + 2, K))
    Ey[1:-1, 1:] = state.y_edge
    for i in (0, nx + 1):
        vals = f(xc[i] + gpad.dx * nodes[None, None, :], ys_if[None, :, None])
        for k in range(K):
            Ey[i, :, k] = np.tensordot(vals[0], bws[k], axes=(1, 0))
    vals = f(xc[:, None, None] + gpad.dx * nodes[None, None, :], ys_if[0])
    for k in range(K):
        Ey[:, 0, k] = np.tensordot(vals[:, 0, :], bws[k], axes=(1, 0))

    Mo = np.zeros((nx + 2, ny + 2, K, K))
    Mo[1:-1, 1:-1] = state.cell_moments
    for idx in range(4):
        if idx == 0:
            xin, yin, si, sj = xc, yc[:1], slice(0, nx + 2), slice(0, 1)
        elif idx == 1:
            xin, yin, si, sj = xc, yc[-1:], slice(0, nx + 2), slice(ny + 1, ny + 2)
        elif idx == 2:
            xin, yin, si, sj = xc[:1], yc[1:-1], slice(0, 1), slice(1, ny + 1)
        else:
            xin, yin, si, sj = xc[-1:], yc[1:-1], slice(nx + 1, nx + 2), slice(1, ny + 1)
        fq = f(xin[:, None, None, None] + gpad.dx * nodes[None, None, :, None],
               yin[None, :, None, None] + gpad.dy * nodes[None, None, None, :])
        for m in range(K):
            for n in range(K):
                Mo[si, sj, m, n] = np.einsum("ijab,a,b->ij", fq, bws[m], bws[n])
    return AfState2D(gpad, K, N, Ex, Ey, Mo, "tensorial", periodic=True)


def _slice_dg_pad(dpad: DgState2D, state: DgState2D) -> DgState2D:
    return replace(state, coeffs=dpad.coeffs[1:-1, 1:-1])


def _slice_af_pad(dpad: AfState2D, state: AfState2D) -> AfState2D:
    nx, ny = state.grid.n_cells_x, state.grid.n_cells_y
    return replace(state,
                   node_values=dpad.node_values[1:nx + 2, 1:ny + 2],
                   x_edge=dpad.x_edge[1:nx + 2, 1:ny + 1],
                   y_edge=dpad.y_edge[1:nx + 1, 1:ny + 2],
                   cell_moments=dpad.cell_moments[1:nx + 1, 1:ny + 1])


# ---------------------------------------------------------------------------
# state construction and rhs assembly per method


def build_state(cfg: RunConfig, n: int):
    """Initial state; AF moments are integrated with the catalog rule of
    the selected order (matching the solver's integration order), DG uses
    the plain high-accuracy projection."""
    q0 = initial_condition(cfg)
    periodic = cfg.boundary == "periodic"
    if cfg.problem.endswith("2d"):
        grid = Grid2D.square(n)
        if cfg.method == "dg":
            return mesh.fill_dg_2d(grid, cfg.K, q0, periodic)
        rule = dg.quad_rule_for_order("af", cfg.order)
        return mesh.fill_af_2d(grid, cfg.K, q0, "tensorial", periodic, rule)
    grid = Grid1D(0.0, 1.0, n)
    if not periodic:
        raise ValueError("1-d runs are periodic")
    if cfg.method == "dg":
        return mesh.fill_dg_1d(grid, cfg.K, q0)
    return mesh.fill_af_1d(grid, cfg.K, q0,
                           rule=dg.quad_rule_for_order("af", cfg.order))


def make_rhs(cfg: RunConfig, problem, flux: NumericalFluxSpec):
    """rhs(state, t) -> state-shaped derivative, honoring the boundary mode."""
    dirichlet = cfg.boundary == "dirichlet"
    exact = exact_solution(cfg) if dirichlet else None

    if cfg.problem.endswith("2d"):
        ux, uy = cfg.ux, cfg.uy
        if cfg.method == "dg":
            def rhs(state, t):
                if dirichlet:
                    dpad = dg.dg_rhs_2d(_pad_dg_2d(state, exact, t), ux, uy,
                                        flux, flux)
                    return _slice_dg_pad(dpad, state)
                return dg.dg_rhs_2d(state, ux, uy, flux, flux)
            return rhs

        alpha = flux.advection_weights(ux) if ux != 0 else (1.0, 0.0)
        beta = flux.advection_weights(uy) if uy != 0 else (1.0, 0.0)

        def rhs(state, t):
            if dirichlet:
                dpad = af.af_rhs_2d_tensorial(_pad_af_2d(state, exact, t),
                                              ux, uy, alpha, beta)
                return _slice_af_pad(dpad, state)
            return af.af_rhs_2d_tensorial(state, ux, uy, alpha, beta)
        return rhs

    if cfg.method == "dg":
        return lambda state, t: dg.dg_rhs_1d(state, problem, flux)
    if problem.linear and problem.is_scalar:
        ap, am = flux.advection_weights(problem.advection_speed)
        variant = af.PointUpdateVariant.alpha(ap, am)
    elif cfg.flux == "lax_friedrichs":
        variant = af.PointUpdateVariant("flux_vector_splitting", a=flux.a)
    else:
        variant = af.PointUpdateVariant.upwind()
    return lambda state, t: af.af_rhs_1d(state, problem, variant)


# ---------------------------------------------------------------------------
# error measurement


@dataclass
class ErrorReport:
    families: dict
    e_dofs: float

    @classmethod
    def from_states(cls, state, exact_state) -> "ErrorReport":
        fams = {}
        for name, a, b in _family_arrays(state, exact_state):
            fams[name] = float(np.sqrt(np.mean((a - b) ** 2)))
        return cls(families=fams, e_dofs=max(fams.values()))


def _family_arrays(state, exact_state):
    if isinstance(state, (DgState1D, DgState2D)):
        yield "modal", state.coeffs, exact_state.coeffs
    elif isinstance(state, AfState1D):
        yield "point_values", state.point_values, exact_state.point_values
        yield "moments", state.moments, exact_state.moments
    elif isinstance(state, AfState2D):
        yield "node_values", state.node_values, exact_state.node_values
        yield "x_edge", state.x_edge, exact_state.x_edge
        yield "y_edge", state.y_edge, exact_state.y_edge
        yield "moments", state.cell_moments, exact_state.cell_moments
    else:
        raise TypeError(type(state).__name__)


def exact_state_at(cfg: RunConfig, n: int, t: float):
    exact = exact_solution(cfg)
    periodic = cfg.boundary == "periodic"
    if cfg.problem.endswith("2d"):
        grid = Grid2D.square(n)
        f = lambda x, y: exact(t, x, y)
        if cfg.method == "dg":
            return mesh.fill_dg_2d(grid, cfg.K, f, periodic)
        return mesh.fill_af_2d(grid, cfg.K, f, "tensorial", periodic)
    grid = Grid1D(0.0, 1.0, n)
    f = lambda x: exact(t, x)
    if cfg.method == "dg":
        return mesh.fill_dg_1d(grid, cfg.K, f)
    return mesh.fill_af_1d(grid, cfg.K, f)


# ---------------------------------------------------------------------------
# experiments


@dataclass
class BenchRecord:
    method: str
    n_cells: int
    n_dofs: int
    tau: float
    tau_per_step: float
    steps: int
    e_dofs: float
    metric: float

    def row(self):
        return (self.method, self.n_cells, self.n_dofs, self.tau,
                self.tau_per_step, self.steps, self.e_dofs, self.metric)


BENCH_HEADER = ["method", "n_cells", "n_dofs", "tau", "tau_per_step",
                "steps", "e_dofs", "metric"]


@dataclass
class RunResult:
    state: object
    errors: ErrorReport
    bench: BenchRecord


def _scheme(cfg: RunConfig) -> timeint.RkScheme:
    try:
        return timeint.schemes_by_name()[cfg.rk]
    except KeyError:
        raise ValueError(f"unknown RK scheme {cfg.rk!r}") from None


def default_dt(cfg: RunConfig, dx: float) -> float:
    """CFL-coupled step size.

    2-d tensorial AF shares its spectrum with the DG method one degree
    lower (they are the same method up to a dof mapping), so its step
    limit is the DG catalog value at order K+1; the larger catalog CFL of
    the AF column belongs to the reduced-dof variant we do not evolve.
    """
    if cfg.cfl_override is not None:
        return cfg.cfl_override * dx
    if cfg.method == "af" and cfg.problem.endswith("2d"):
        return timeint.dt_from_cfl("dg", cfg.K + 1, dx)
    return timeint.dt_from_cfl(cfg.method, cfg.order, dx)


def run_simulation(cfg: RunConfig, n: int | None = None,
                   timed_repeats: int = 1) -> RunResult:
    """Integrate one grid to t_final; timing excludes setup and errors."""
    if not cfg.problem.startswith("advection"):
        raise ValueError("error measurement needs the advected exact "
                         "solution; simulations run advection problems")
    n = n or cfg.grids[0]
    problem = make_problem(cfg)
    state0 = build_state(cfg, n)
    flux = make_flux(cfg, problem, state0.arrays()[0])
    rhs = make_rhs(cfg, problem, flux)
    scheme = _scheme(cfg)
    dx = state0.grid.dx
    dt = default_dt(cfg, dx)
    steps = int(np.ceil(cfg.t_final / dt - 1e-12))

    taus = []
    final = None
    for _ in range(max(1, timed_repeats)):
        t0 = time.perf_counter()
        final = timeint.integrate(state0.copy(), rhs, scheme, dt, cfg.t_final)
        taus.append(time.perf_counter() - t0)
    tau = float(np.mean(taus))

    exact_state = exact_state_at(cfg, n, cfg.t_final)
    errors = ErrorReport.from_states(final, exact_state)
    n_cells = n ** 2 if cfg.problem.endswith("2d") else n
    counts = dof_counts(cfg.method, cfg.order)
    bench = BenchRecord(method=cfg.method_id(), n_cells=n_cells,
                        n_dofs=counts.n_dofs, tau=tau,
                        tau_per_step=tau / steps, steps=steps,
                        e_dofs=errors.e_dofs,
                        metric=counts.n_dofs * errors.e_dofs * tau)
    return RunResult(final, errors, bench)


def run_convergence_study(cfg: RunConfig):
    """Rows (method, dx, e_dofs, eoc) over the config's grid list."""
    if len(cfg.grids) < 2:
        raise ValueError("a convergence study needs at least two grids")
    for a, b in zip(cfg.grids[:-1], cfg.grids[1:]):
        if b != 2 * a:
            raise ValueError("grids must refine by factors of 2")
    rows = []
    prev = None
    for n in cfg.grids:
        res = run_simulation(cfg, n)
        dx = 1.0 / n
        rate = eoc(prev, res.errors.e_dofs) if prev is not None else float("nan")
        rows.append((cfg.method_id(), dx, res.errors.e_dofs, rate))
        prev = res.errors.e_dofs
    return rows


def _dg_sample_errors_1d(state: DgState1D, exact, t, points) -> float:
    basis = dg.dg_basis(state.K)
    vals = np.einsum("inc,nq->iqc", state.coeffs,
                     np.array([p(points) for p in basis.phi]))[:, :, 0]
    xs = state.grid.centers()[:, None] + state.grid.dx * points[None, :]
    return float(np.sqrt(np.mean((vals - exact(t, xs)) ** 2)))


def run_superconvergence_probe(cfg: RunConfig):
    """DG error sampled at Radau/uniform/average (1-d) or crossing points
    (2-d); rows (point_set, dx, error, eoc)."""
    if cfg.method != "dg" or cfg.flux != "upwind":
        raise ValueError("the superconvergence probe runs upwind DG")
    exact = exact_solution(cfg)
    rows = []
    if not cfg.problem.endswith("2d"):
        radau = poly.radau_points(cfg.K, "left" if cfg.u > 0 else "right")
        uniform = np.array([-3 / 8, -1 / 8, 1 / 8, 3 / 8])
        errs = {"radau_points": [], "uniform_points": [], "cell_averages": []}
        for n in cfg.grids:
            res = run_simulation(cfg, n)
            state = res.state
            errs["radau_points"].append(
                _dg_sample_errors_1d(state, exact, cfg.t_final, radau))
            errs["uniform_points"].append(
                _dg_sample_errors_1d(state, exact, cfg.t_final, uniform))
            exact_state = exact_state_at(cfg, n, cfg.t_final)
            errs["cell_averages"].append(float(np.sqrt(np.mean(
                (state.coeffs[:, 0, :] - exact_state.coeffs[:, 0, :]) ** 2))))
    else:
        if cfg.K != 1:
            raise ValueError("the 2-d crossing-point probe is built for K=1")
        cross_x = poly.radau_points(1, "left" if cfg.ux > 0 else "right")
        cross_y = poly.radau_points(1, "left" if cfg.uy > 0 else "right")
        errs = {"crossing_points": []}
        for n in cfg.grids:
            res = run_simulation(cfg, n)
            state = res.state
            basis = dg.dg_basis(1)
            px = np.array([p(cross_x) for p in basis.phi])
            py = np.array([p(cross_y) for p in basis.phi])
            vals = np.einsum("ijmn,ma,nb->ijab", state.coeffs, px, py)
            g = state.grid
            xs = g.gx.centers()[:, None, None, None] + g.dx * cross_x[None, None, :, None]
            ys = g.gy.centers()[None, :, None, None] + g.dy * cross_y[None, None, None, :]
            errs["crossing_points"].append(float(np.sqrt(np.mean(
                (vals - exact(cfg.t_final, xs, ys)) ** 2))))
    for name, es in errs.items():
        prev = None
        for n, e in zip(cfg.grids, es):
            rate = eoc(prev, e) if prev is not None else float("nan")
            rows.append((name, 1.0 / n, e, rate))
            prev = e
    return rows


def run_benchmark(cfg: RunConfig, methods=None, min_time: float = 0.05,
                  max_repeats: int = 50):
    """BenchRecords over the grid list plus fitted log-log slopes.

    Each configuration gets one discarded warm-up run, then repeats until
    the accumulated time passes ``min_time`` (timer-resolution guard);
    tau is the mean over repeats.  Comparisons only ever pair identical
    RK schemes and grids.
    """
    if len(cfg.grids) < 3:
        raise ValueError("scaling fits need at least three grid sizes")
    methods = methods or [("af", 3), ("dg", 3)]
    records = []
    slopes = []
    for family, order in methods:
        mcfg = replace(cfg, method=family, order=order, k=None)
        taus = []
        for n in cfg.grids:
            run_simulation(mcfg, n)                       # warm-up, discarded
            reps = []
            t_acc = 0.0
            while t_acc < min_time and len(reps) < max_repeats:
                res = run_simulation(mcfg, n)
                reps.append(res)
                t_acc += res.bench.tau
            tau = float(np.mean([r.bench.tau for r in reps]))
            rec = replace(reps[-1].bench, tau=tau,
                          tau_per_step=tau / reps[-1].bench.steps,
                          metric=dof_counts(family, order).n_dofs
                          * reps[-1].errors.e_dofs * tau)
            records.append(rec)
            taus.append((rec.n_cells, tau))
        xs = np.log([t[0] for t in taus])
        ys = np.log([t[1] for t in taus])
        slope = float(np.polyfit(xs, ys, 1)[0])
        slopes.append((mcfg.method_id(), slope))
    return records, slopes


def planted_cost_slope(grids, cfl: float = 0.25, work_per_cell: int = 60):
    """Scaling-oracle: a synthetic rhs of known linear cost, timed through
    the same loop, must show the CFL-coupled 1.5 slope."""
    taus = []
    for n in grids:
        n_cells = n * n
        data = np.linspace(0.0, 1.0, n_cells * work_per_cell)
        steps = int(np.ceil(0.1 / (cfl / n)))
        t0 = time.perf_counter()
        for _ in range(steps):
            data = np.sin(data) * 1e-3 + data
        taus.append((n_cells, time.perf_counter() - t0))
    xs = np.log([t[0] for t in taus])
    ys = np.log([t[1] for t in taus])
    return float(np.polyfit(xs, ys, 1)[0])


def emit_dof_table():
    """Rows for AF orders 3-7 and DG orders 2-6, catalog columns included."""
    rows = []
    for order in range(3, 8):
        c = dof_counts("af", order)
        rows.append(("af", order, c.n_dofs, c.n_tdofs, c.n_mom, c.n_edge,
                     c.n_node, mesh.AF_N_INT[order], mesh.AF_CFL[order]))
    for order in range(2, 7):
        c = dof_counts("dg", order)
        rows.append(("dg", order, c.n_dofs, c.n_tdofs, c.n_mom, "-", "-",
                     mesh.DG_N_INT[order], mesh.DG_CFL[order]))
    return rows
