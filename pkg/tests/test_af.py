"""Active Flux right-hand sides and reconstruction."""

import numpy as np
import pytest

from afdg import af, dg, mesh, poly
from afdg.af import PointUpdateVariant
from afdg.mesh import AfState1D, Grid1D, Grid2D
from afdg.problems import (NumericalFluxSpec, acoustics2x2, advection1d,
                           burgers)

UP = PointUpdateVariant.upwind()


def smooth_state_1d(K, n=16, lo=-1.0, hi=1.0, seed=0):
    rng = np.random.default_rng(seed)
    phase = rng.uniform(0, 2 * np.pi)
    mid, amp = 0.5 * (lo + hi), 0.35 * (hi - lo)
    init = lambda x: mid + amp * np.sin(2 * np.pi * x + phase)
    return mesh.fill_af_1d(Grid1D(0, 1, n), K, init)


# ---------------------------------------------------------------------------
# reconstruction


def test_reconstruct_constant_partition_of_unity():
    state = mesh.fill_af_1d(Grid1D(0, 1, 4), 2, lambda x: np.ones_like(x))
    p = af.af_reconstruct(state, 1)[0]
    xs = np.linspace(-0.5, 0.5, 33)
    assert np.allclose(p(xs), 1.0, atol=1e-13)


def test_reconstruct_single_moment_dof_gives_s0():
    grid = Grid1D(0, 1, 3)
    state = AfState1D(grid, 1, np.zeros((3, 1)), np.zeros((3, 1, 1)))
    state.moments[1, 0, 0] = 1.0
    p = af.af_reconstruct(state, 1)[0]
    xs = np.linspace(-0.5, 0.5, 21)
    assert np.allclose(p(xs), 1.5 - 6.0 * xs ** 2, atol=1e-13)


def test_adjacent_cells_share_interface_value():
    # sharedness is structural (one stored dof); evaluating the two cell
    # polynomials at the face re-derives it up to basis roundoff
    state = smooth_state_1d(2, seed=3)
    left = af.af_reconstruct(state, 4)[0](0.5)
    right = af.af_reconstruct(state, 5)[0](-0.5)
    assert left == pytest.approx(right, abs=1e-14)
    assert left == pytest.approx(state.point_values[5, 0], abs=1e-14)


# ---------------------------------------------------------------------------
# 1-d right-hand side


def test_constant_state_zero_all_variants():
    prob = advection1d(u=1.2)
    state = mesh.fill_af_1d(Grid1D(0, 1, 8), 2, lambda x: np.ones_like(x))
    variants = [UP, PointUpdateVariant("central"),
                PointUpdateVariant.alpha(0.7, 0.3),
                PointUpdateVariant("flux_vector_splitting", a=2.0),
                PointUpdateVariant.dg_inspired(NumericalFluxSpec.central())]
    for variant in variants:
        d = af.af_rhs_1d(state, prob, variant)
        for arr in d.arrays():
            assert np.max(np.abs(arr)) < 1e-12


def test_k1_upwind_point_stencil():
    # d/dt Q_{i+1/2} = -(U/dx) (2 Q_{i-1/2} - 6 Q_i + 4 Q_{i+1/2})
    grid = Grid1D(0, 1, 4)
    rng = np.random.default_rng(8)
    state = AfState1D(grid, 1, rng.uniform(-1, 1, (4, 1)),
                      rng.uniform(-1, 1, (4, 1, 1)))
    u = 1.5
    d = af.af_rhs_1d(state, advection1d(u=u), PointUpdateVariant.alpha(1.0, 0.0))
    p = state.point_values[:, 0]
    mo = state.moments[:, 0, 0]
    want = -(u / grid.dx) * (2 * np.roll(p, 1) - 6 * np.roll(mo, 1) + 4 * p)
    assert np.allclose(d.point_values[:, 0], want, atol=1e-12)


def test_average_update_is_flux_difference():
    prob = burgers()
    state = smooth_state_1d(2, lo=0.5, hi=2.0, seed=4)
    d = af.af_rhs_1d(state, prob, UP)
    f = prob.flux(state.point_values[:, 0])
    want = -(np.roll(f, -1) - f) / state.grid.dx
    assert np.allclose(d.moments[:, 0, 0], want, atol=1e-12)


@pytest.mark.parametrize("K", [1, 2, 3, 4])
def test_conservation_periodic(K):
    prob = burgers()
    state = smooth_state_1d(K, lo=0.5, hi=2.0, seed=K)
    for variant in (UP, PointUpdateVariant("flux_vector_splitting", a=2.5)):
        d = af.af_rhs_1d(state, prob, variant)
        total = np.sum(d.moments[:, 0, 0]) * state.grid.dx
        assert abs(total) < 1e-12 * np.max(np.abs(state.point_values))


def test_linearity():
    prob = advection1d(u=0.9)
    s1, s2 = smooth_state_1d(2, seed=5), smooth_state_1d(2, seed=6)
    a, b = 1.3, -0.4
    comb = s1.with_arrays([a * x + b * y
                           for x, y in zip(s1.arrays(), s2.arrays())])
    d = af.af_rhs_1d(comb, prob, UP)
    d1 = af.af_rhs_1d(s1, prob, UP)
    d2 = af.af_rhs_1d(s2, prob, UP)
    for got, x, y in zip(d.arrays(), d1.arrays(), d2.arrays()):
        want = a * x + b * y
        assert np.max(np.abs(got - want)) <= 1e-12 * max(1, np.max(np.abs(want)))


@pytest.mark.parametrize("K", [1, 2, 3])
def test_point_update_exact_for_global_polynomial(K):
    # dofs filled from a degree-(K+1) polynomial: the upwind point update
    # reproduces the analytic -u q' at the interior interfaces it sees
    rng = np.random.default_rng(K + 30)
    coeffs = rng.uniform(-1, 1, K + 2)
    q = np.polynomial.polynomial.Polynomial(coeffs)
    dq = q.deriv()
    u = 1.7
    grid = Grid1D(0, 1, 8)
    state = mesh.fill_af_1d(grid, K, q)
    d = af.af_rhs_1d(state, advection1d(u=u), PointUpdateVariant.alpha(1.0, 0.0))
    xs = grid.interfaces()
    # periodic wrap breaks the polynomial at interface 0; check the rest
    want = -u * dq(xs[1:])
    assert np.allclose(d.point_values[1:, 0], want, atol=1e-10 * max(1, np.max(np.abs(want))))


def test_dg_inspired_linear_equals_alpha_weighted():
    prob = advection1d(u=1.3)
    state = smooth_state_1d(2, seed=9)
    flux = NumericalFluxSpec.alpha(0.7, 0.3)
    d1 = af.af_rhs_1d(state, prob, PointUpdateVariant.dg_inspired(flux))
    d2 = af.af_rhs_1d(state, prob, PointUpdateVariant.alpha(0.7, 0.3))
    scale = np.max(np.abs(d2.point_values))
    assert np.max(np.abs(d1.point_values - d2.point_values)) <= 1e-13 * scale
    assert np.max(np.abs(d1.moments - d2.moments)) <= \
        1e-13 * np.max(np.abs(d2.moments))


def test_dg_inspired_nonlinear_requires_projection_data():
    state = smooth_state_1d(1, lo=0.5, hi=2.0, seed=2)
    with pytest.raises(ValueError):
        af.af_rhs_1d(state, burgers(),
                     PointUpdateVariant.dg_inspired(
                         NumericalFluxSpec.lax_friedrichs(3.0)))


def test_sonic_state_rejected():
    state = smooth_state_1d(1, seed=1)
    fp = af.FluxProjection1D(
        F_dofs=np.zeros((state.grid.n_cells, 3, 1)),
        A=np.zeros(state.grid.n_cells),
        dfdql=np.ones(state.grid.n_cells),
        dfdqr=np.ones(state.grid.n_cells))
    with pytest.raises(ZeroDivisionError):
        af.af_rhs_1d(state, burgers(),
                     PointUpdateVariant.dg_inspired(
                         NumericalFluxSpec.lax_friedrichs(3.0)),
                     flux_projection=fp)


def test_jacobian_splitting_system():
    prob = acoustics2x2(c=1.0)
    rng = np.random.default_rng(14)
    grid = Grid1D(0, 1, 12)
    state = AfState1D(grid, 1, rng.uniform(-1, 1, (12, 2)),
                      rng.uniform(-1, 1, (12, 1, 2)))
    d = af.af_rhs_1d(state, prob, UP)
    assert d.point_values.shape == (12, 2)
    assert np.all(np.isfinite(d.point_values))
    # central variant averages the one-sided updates of the +/- splits
    d_c = af.af_rhs_1d(state, prob, PointUpdateVariant("central"))
    assert np.all(np.isfinite(d_c.point_values))


# ---------------------------------------------------------------------------
# 2-d tensorial


def smooth_state_2d(K, n=10, seed=0, variant="tensorial"):
    rng = np.random.default_rng(seed)
    ph = rng.uniform(0, 2 * np.pi, 2)
    init = lambda x, y: (np.sin(2 * np.pi * x + ph[0])
                         * np.cos(2 * np.pi * y + ph[1]) + 0.25)
    return mesh.fill_af_2d(Grid2D.square(n), K, init, variant)


def test_2d_constant_zero():
    state = mesh.fill_af_2d(Grid2D.square(5), 2, lambda x, y: np.ones_like(x + y))
    d = af.af_rhs_2d_tensorial(state, 1.0, -0.6)
    for arr in d.arrays():
        assert np.max(np.abs(arr)) < 1e-12


@pytest.mark.parametrize("K", [1, 2])
@pytest.mark.parametrize("impl", ["numpy", "kernel"])
def test_2d_zero_y_speed_reduces_to_1d(K, impl):
    """Each x-interface row behaves like the 1-d method with edge data
    playing the role of point values."""
    state = smooth_state_2d(K, seed=K)
    d2 = af.af_rhs_2d_tensorial(state, 1.4, 0.0, impl=impl)
    prob = advection1d(u=1.4)
    n = state.grid.n_cells_x
    for j in range(3):
        for k in range(K):
            line = AfState1D(Grid1D(0, 1, n), K,
                             state.x_edge[:, j, k][:, None],
                             state.cell_moments[:, j, :, k][:, :, None])
            d1 = af.af_rhs_1d(line, prob, PointUpdateVariant.alpha(1.0, 0.0))
            assert np.allclose(d2.x_edge[:, j, k], d1.point_values[:, 0],
                               atol=1e-11)
            assert np.allclose(d2.cell_moments[:, j, :, k],
                               d1.moments[:, :, 0], atol=1e-11)


def test_2d_average_update_uses_edge_averages():
    state = smooth_state_2d(1, seed=7)
    ux, uy = 1.2, -0.8
    d = af.af_rhs_2d_tensorial(state, ux, uy)
    ex, ey = state.x_edge[:, :, 0], state.y_edge[:, :, 0]
    want = -(ux * (np.roll(ex, -1, axis=0) - ex) / state.grid.dx
             + uy * (np.roll(ey, -1, axis=1) - ey) / state.grid.dy)
    assert np.allclose(d.cell_moments[:, :, 0, 0], want, atol=1e-11)


def test_2d_edge_update_matches_simpson_form():
    """The K=1 edge-average update evaluated through the dual-basis
    contraction equals the literal Simpson combination of the three
    normal-derivative samples along the edge."""
    state = smooth_state_2d(1, seed=11)
    ux = 1.0
    d = af.af_rhs_2d_tensorial(state, ux, 0.0)
    vals_eta = np.array([-0.5, 0.0, 0.5])
    # d/dx of the reconstruction at the right face of each cell
    ops = af.af_ops(1)
    C = af._dof_tensor_2d(state)
    bx_d = np.array([f.derivative()(0.5) for f in ops.basis.functions()])
    by = ops.basis_values(vals_eta)
    ddx = np.einsum("ijpq,p,qs->ijs", C, bx_d, by) / state.grid.dx
    simpson = (ddx[:, :, 0] + 4 * ddx[:, :, 1] + ddx[:, :, 2]) / 6.0
    want = -ux * np.roll(simpson, 1, axis=0)
    assert np.allclose(d.x_edge[:, :, 0], want, atol=1e-11)


def test_2d_conservation():
    state = smooth_state_2d(2, seed=13)
    d = af.af_rhs_2d_tensorial(state, 1.1, 0.7, (0.6, 0.4), (0.3, 0.7))
    total = np.sum(d.cell_moments[:, :, 0, 0])
    assert abs(total) < 1e-10


@pytest.mark.parametrize("K", [1, 2])
def test_2d_kernel_matches_numpy(K):
    state = smooth_state_2d(K, seed=K + 5)
    da = af.af_rhs_2d_tensorial(state, 1.3, 0.8, (0.7, 0.3), (0.4, 0.6),
                                impl="numpy")
    db = af.af_rhs_2d_tensorial(state, 1.3, 0.8, (0.7, 0.3), (0.4, 0.6),
                                impl="kernel")
    for x, y in zip(da.arrays(), db.arrays()):
        assert np.max(np.abs(x - y)) <= 1e-13 * max(1.0, np.max(np.abs(x)))


def test_2d_global_continuity_after_rk_stage():
    """Shared dofs keep the reconstruction globally continuous after a
    time step; check value agreement across every vertical interface."""
    from afdg import timeint
    state = smooth_state_2d(1, seed=17)
    rhs = lambda s, t: af.af_rhs_2d_tensorial(s, 1.0, 1.0)
    stepped = timeint.rk_step(timeint.SSPRK3, rhs, state, 0.01)
    eta = np.linspace(-0.5, 0.5, 7)
    vals = af.af_eval_2d(stepped, np.array([-0.5, 0.5]), eta)
    left_of_if = np.roll(vals[:, :, 1, :], 1, axis=0)
    right_of_if = vals[:, :, 0, :]
    assert np.max(np.abs(left_of_if - right_of_if)) < 1e-13


# ---------------------------------------------------------------------------
# classical midpoint variant


def test_classical_constant_zero():
    state = mesh.fill_af_2d(Grid2D.square(5), 1,
                            lambda x, y: np.ones_like(x + y),
                            variant="classical_midpoint")
    d = af.af_rhs_2d_classical(state, 1.0, 0.8)
    for arr in d.arrays():
        assert np.max(np.abs(arr)) < 1e-12


def test_classical_zero_speeds_zero():
    state = smooth_state_2d(1, seed=19, variant="classical_midpoint")
    d = af.af_rhs_2d_classical(state, 0.0, 0.0)
    for arr in d.arrays():
        assert np.max(np.abs(arr)) == 0.0


def test_classical_center_value_recovery():
    # the 3x3 value table reproduces the stored cell average through the
    # tensor-Lagrange mean weights
    state = smooth_state_2d(1, seed=21, variant="classical_midpoint")
    V = af.classical_cell_values(state)
    w = np.array([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0])
    avg = np.einsum("ijab,a,b->ij", V, w, w)
    assert np.allclose(avg, state.cell_moments[:, :, 0, 0], atol=1e-13)


def test_classical_simpson_combination_gap():
    """Simpson-combining the midpoint/node updates along an edge does not
    reproduce the edge-average update: the two dof choices genuinely
    differ as methods."""
    rng = np.random.default_rng(23)
    n = 8
    grid = Grid2D.square(n)
    tens = mesh.AfState2D(grid, 1, rng.uniform(-1, 1, (n, n)),
                          rng.uniform(-1, 1, (n, n, 1)),
                          rng.uniform(-1, 1, (n, n, 1)),
                          rng.uniform(-1, 1, (n, n, 1, 1)))
    from afdg.equiv import _tensorial_to_classical
    classical = _tensorial_to_classical(tens)
    d_tens = af.af_rhs_2d_tensorial(tens, 1.0, 1.0)
    d_cls = af.af_rhs_2d_classical(classical, 1.0, 1.0)
    simpson = mesh.simpson_edge_average(d_cls.node_values,
                                        d_cls.x_edge[..., 0],
                                        np.roll(d_cls.node_values, -1, axis=1))
    gap = np.max(np.abs(simpson - d_tens.x_edge[..., 0]))
    assert gap > 1e-3 * np.max(np.abs(tens.node_values))


def test_reconstruction_matrix_matches_tensor():
    state = smooth_state_2d(2, seed=25)
    C = af.reconstruction_matrix_2d(state, 3, 4)
    full = af._dof_tensor_2d(state)
    assert np.allclose(C, full[3, 4], atol=0)


def test_point_only_dg_inspired_update():
    prob = advection1d(u=1.1)
    state = smooth_state_1d(1, seed=27)
    flux = NumericalFluxSpec.central()
    dpts = af.af_rhs_1d_dg_inspired_point(state, prob, flux)
    full = af.af_rhs_1d(state, prob, PointUpdateVariant.dg_inspired(flux))
    assert np.array_equal(dpts, full.point_values)


def test_classical_af_third_order_at_catalog_cfl():
    """The classical midpoint variant is the genuine third-order method:
    it converges at order 3 and tolerates the catalog CFL number 0.27
    (the tensorial variant's step limit is the stricter one of its DG
    twin; the catalog value belongs to this dof family)."""
    import math
    from afdg import timeint

    def one(n):
        ph = (0.3, 1.1)
        init = lambda x, y: (np.sin(2 * np.pi * x + ph[0])
                             * np.cos(2 * np.pi * y + ph[1]) + 0.2)
        state = mesh.fill_af_2d(Grid2D.square(n), 1, init,
                                variant="classical_midpoint")
        rhs = lambda s, t: af.af_rhs_2d_classical(s, 1.0, 1.0)
        final = timeint.integrate(state, rhs, timeint.SSPRK3, 0.27 / n, 0.25)
        ref = mesh.fill_af_2d(Grid2D.square(n), 1,
                              lambda x, y: init(x - 0.25, y - 0.25),
                              variant="classical_midpoint")
        return max(np.sqrt(np.mean((a - b) ** 2))
                   for a, b in zip(final.arrays(), ref.arrays()))

    errs = [one(n) for n in (8, 16, 32)]
    assert math.log2(errs[-2] / errs[-1]) == pytest.approx(3.0, abs=0.2)


def _burgers_exact(t, x):
    # smooth pre-shock solution by fixed-point iteration on q = q0(x - q t)
    q0 = lambda y: 1.0 + 0.3 * np.sin(2 * np.pi * y)
    q = q0(x)
    for _ in range(60):
        q = q0(x - q * t)
    return q


@pytest.mark.parametrize("variant", [
    PointUpdateVariant.upwind(),
    PointUpdateVariant("flux_vector_splitting", a=1.5),
], ids=["jacobian_splitting", "flux_vector_splitting"])
def test_burgers_preshock_fourth_order(variant):
    import math
    from afdg import timeint
    prob = burgers()
    T = 0.1

    def one(n):
        grid = Grid1D(0, 1, n)
        state = mesh.fill_af_1d(grid, 2, lambda x: _burgers_exact(0.0, x))
        rhs = lambda s, t: af.af_rhs_1d(s, prob, variant)
        final = timeint.integrate(state, rhs, timeint.SSPRK54,
                                  0.1 * grid.dx, T)
        ref = mesh.fill_af_1d(grid, 2, lambda x: _burgers_exact(T, x))
        return max(np.sqrt(np.mean((a - b) ** 2))
                   for a, b in zip(final.arrays(), ref.arrays()))

    errs = [one(n) for n in (16, 32, 64)]
    eocs = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert eocs[-1] == pytest.approx(4.0, abs=0.35)
