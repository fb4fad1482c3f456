"""Semi-discrete Active Flux right-hand sides and reconstruction.

1-d: arbitrary K with selectable point-value updates (Jacobian splitting,
flux-vector splitting, slope-weighted/central for advection, and the
flux-projection update that mirrors a two-point numerical flux).  Moments
update centrally through integration by parts; no Riemann fluxes enter.

2-d: the tensorial variant stores node values, edge moments (k = 0 is the
edge average) and interior tensor moments.  Its update decomposes exactly
into 1-d pieces: one-sided derivative stencils act along either edge
traces or moment rows, and the moment stencil acts along the transverse
direction.  K = 1 reproduces the edge-average/node/cell-average updates
with Simpson-exact edge integrals; K = 2 gives the fourth-order method.
The classical variant (edge midpoints instead of averages) is kept for
the midpoint-vs-average comparison and is upwind-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels, poly
from .mesh import AfState1D, AfState2D, simpson_edge_average
from .problems import NumericalFluxSpec, ProblemSpec

__all__ = [
    "AfOps", "af_ops", "PointUpdateVariant",
    "af_reconstruct", "af_eval_1d", "af_eval_2d", "reconstruction_matrix_2d",
    "af_rhs_1d", "af_rhs_1d_dg_inspired_point", "FluxProjection1D",
    "af_rhs_2d_tensorial", "af_rhs_2d_classical",
]


@dataclass(frozen=True)
class AfOps:
    """Precomputed 1-d stencil weights in dof order (left pt, moments, right pt)."""

    K: int
    basis: poly.AfBasis
    d_plus: np.ndarray        # B_p'(+1/2)
    d_minus: np.ndarray       # B_p'(-1/2)
    mom_w: np.ndarray         # moment-update weights, shape (K, K+2)
    vals_plus: np.ndarray     # B_p(+1/2)
    vals_minus: np.ndarray    # B_p(-1/2)

    def basis_values(self, nodes: np.ndarray) -> np.ndarray:
        return np.array([f(nodes) for f in self.basis.functions()])


@lru_cache(maxsize=None)
def af_ops(K: int) -> AfOps:
    basis = poly.moment_dual_basis(K)
    funcs = basis.functions()
    d_plus = np.array([f.derivative()(0.5) for f in funcs])
    d_minus = np.array([f.derivative()(-0.5) for f in funcs])
    vals_plus = np.array([f(0.5) for f in funcs])
    vals_minus = np.array([f(-0.5) for f in funcs])
    mom_w = np.zeros((K, K + 2))
    for k in range(K):
        bk = basis.b[k]
        ak = basis.A[k]
        db = bk.derivative()
        for p, f in enumerate(funcs):
            mom_w[k, p] = ak * (bk(0.5) * vals_plus[p]
                                - bk(-0.5) * vals_minus[p]
                                - (db * f).cell_integral())
    return AfOps(K, basis, d_plus, d_minus, mom_w, vals_plus, vals_minus)


@dataclass(frozen=True)
class PointUpdateVariant:
    """Point-value update selector.

    kinds: jacobian_splitting, flux_vector_splitting, central,
    alpha_weighted (advection only), dg_inspired (mirrors the two-point
    numerical flux in ``flux`` through the flux projection).
    """

    kind: str
    alpha_plus: float = 1.0
    alpha_minus: float = 0.0
    a: float = 0.0            # speed bound for flux_vector_splitting
    flux: NumericalFluxSpec | None = None

    def __post_init__(self):
        if self.kind == "alpha_weighted" and \
                abs(self.alpha_plus + self.alpha_minus - 1.0) > 1e-14:
            raise ValueError("alpha weights must sum to 1")

    @staticmethod
    def upwind() -> "PointUpdateVariant":
        return PointUpdateVariant("jacobian_splitting")

    @staticmethod
    def alpha(ap: float, am: float) -> "PointUpdateVariant":
        return PointUpdateVariant("alpha_weighted", ap, am)

    @staticmethod
    def dg_inspired(flux: NumericalFluxSpec) -> "PointUpdateVariant":
        return PointUpdateVariant("dg_inspired", flux=flux)


# ---------------------------------------------------------------------------
# reconstruction


def cell_dof_tensor_1d(state: AfState1D) -> np.ndarray:
    """Dofs per cell in basis order, shape (n_cells, K+2, m)."""
    pts, mo = state.point_values, state.moments
    if state.periodic:
        right = np.roll(pts, -1, axis=0)
    else:
        right = pts[1:]
        pts = pts[: state.grid.n_cells]
    return np.concatenate([pts[:, None, :], mo, right[:, None, :]], axis=1)


def af_reconstruct(state: AfState1D, cell: int) -> list[poly.PolySpec]:
    """Cell polynomial(s), one PolySpec per component."""
    ops = af_ops(state.K)
    dofs = cell_dof_tensor_1d(state)[cell]          # (K+2, m)
    out = []
    for c in range(state.n_components):
        coeffs = np.zeros(state.K + 2)
        for p, f in enumerate(ops.basis.functions()):
            coeffs += dofs[p, c] * f.coefficients
        out.append(poly.PolySpec(coeffs))
    return out


def af_eval_1d(state: AfState1D, xi: np.ndarray) -> np.ndarray:
    """Evaluate every cell's reconstruction at reference points xi.

    Returns shape (n_cells, len(xi), m).
    """
    ops = af_ops(state.K)
    dofs = cell_dof_tensor_1d(state)
    bv = ops.basis_values(np.asarray(xi))        # (K+2, nxi)
    return np.einsum("ipc,pq->iqc", dofs, bv)


def reconstruction_matrix_2d(state: AfState2D, i: int, j: int) -> np.ndarray:
    """Tensor dof matrix C with value(xi, eta) = Bx(xi)^T C By(eta)."""
    if state.variant != "tensorial":
        raise ValueError("tensor reconstruction requires the tensorial variant")
    K = state.K
    n = state.grid.n_cells_x
    ny = state.grid.n_cells_y
    ip = (i + 1) % n if state.periodic else i + 1
    jp = (j + 1) % ny if state.periodic else j + 1
    C = np.zeros((K + 2, K + 2))
    C[0, 0] = state.node_values[i, j]
    C[K + 1, 0] = state.node_values[ip, j]
    C[0, K + 1] = state.node_values[i, jp]
    C[K + 1, K + 1] = state.node_values[ip, jp]
    C[0, 1:K + 1] = state.x_edge[i, j]
    C[K + 1, 1:K + 1] = state.x_edge[ip, j]
    C[1:K + 1, 0] = state.y_edge[i, j]
    C[1:K + 1, K + 1] = state.y_edge[i, jp]
    C[1:K + 1, 1:K + 1] = state.cell_moments[i, j]
    return C


def af_eval_2d(state: AfState2D, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Evaluate all tensorial cell reconstructions on a tensor point grid.

    Returns shape (nx, ny, len(xi), len(eta)).
    """
    ops = af_ops(state.K)
    C = _dof_tensor_2d(state)                     # (nx, ny, K+2, K+2)
    bx = ops.basis_values(np.asarray(xi))
    by = ops.basis_values(np.asarray(eta))
    return np.einsum("ijpq,pa,qb->ijab", C, bx, by)


def _dof_tensor_2d(state: AfState2D) -> np.ndarray:
    K = state.K
    N, Ex, Ey, Mo = state.node_values, state.x_edge, state.y_edge, state.cell_moments
    if state.periodic:
        Nr = np.roll(N, -1, axis=0)
        Nt = np.roll(N, -1, axis=1)
        Nrt = np.roll(Nr, -1, axis=1)
        Exr = np.roll(Ex, -1, axis=0)
        Eyt = np.roll(Ey, -1, axis=1)
        nx, ny = N.shape
    else:
        nx, ny = N.shape[0] - 1, N.shape[1] - 1
        Nr, Nt, Nrt = N[1:, :-1], N[:-1, 1:], N[1:, 1:]
        N = N[:-1, :-1]
        Exr, Ex = Ex[1:, :], Ex[:-1, :]
        Eyt, Ey = Ey[:, 1:], Ey[:, :-1]
    C = np.zeros((nx, ny, K + 2, K + 2))
    C[:, :, 0, 0] = N
    C[:, :, K + 1, 0] = Nr
    C[:, :, 0, K + 1] = Nt
    C[:, :, K + 1, K + 1] = Nrt
    C[:, :, 0, 1:K + 1] = Ex
    C[:, :, K + 1, 1:K + 1] = Exr
    C[:, :, 1:K + 1, 0] = Ey
    C[:, :, 1:K + 1, K + 1] = Eyt
    C[:, :, 1:K + 1, 1:K + 1] = Mo
    return C


# ---------------------------------------------------------------------------
# 1-d right-hand side


@dataclass(frozen=True)
class FluxProjection1D:
    """Per-cell flux-projection dofs plus interface data for the
    flux-mirroring point update.

    F_dofs[i, p, c] are the AF-basis dofs of the degree-(K+1) projection
    of the flux along cell i (endpoints equal the interface numerical
    fluxes); A, dfdql, dfdqr live on interfaces.
    """

    F_dofs: np.ndarray
    A: np.ndarray
    dfdql: np.ndarray
    dfdqr: np.ndarray


def af_rhs_1d(state: AfState1D, problem: ProblemSpec,
              variant: PointUpdateVariant,
              quad: poly.QuadratureRule | None = None,
              flux_projection: FluxProjection1D | None = None) -> AfState1D:
    """Semi-discrete derivative of an AF state (periodic grids).

    Moment integrals are closed-form for linear problems and quadrature
    otherwise.  The ``dg_inspired`` variant routes everything through the
    flux projection; linear scalar problems build it natively, nonlinear
    ones must pass ``flux_projection`` (its interior moments involve the
    broken flux profile, which the AF dofs alone do not determine).
    """
    if not state.periodic:
        raise NotImplementedError("1-d AF right-hand side is periodic-only")
    ops = af_ops(state.K)
    dx = state.grid.dx
    dofs = cell_dof_tensor_1d(state)                     # (n, K+2, m)

    if variant.kind == "dg_inspired":
        if flux_projection is None:
            flux_projection = _native_flux_projection(state, problem, dofs,
                                                      variant.flux)
        return _rhs_from_flux_projection(state, ops, dx, flux_projection)

    # one-sided reconstruction derivatives at the interfaces
    dq_plus = np.einsum("p,ipc->ic", ops.d_plus, dofs) / dx    # at right face
    dq_minus = np.einsum("p,ipc->ic", ops.d_minus, dofs) / dx  # at left face
    dql = np.roll(dq_plus, 1, axis=0)       # (DQ_{a-1})^+ at interface a
    dqr = dq_minus                          # (DQ_a)^-   at interface a
    pts = state.point_values

    if variant.kind == "alpha_weighted":
        if not (problem.linear and problem.is_scalar):
            raise ValueError("alpha-weighted point update is defined for "
                             "linear advection")
        u = problem.advection_speed
        dpts = -u * (variant.alpha_plus * dql + variant.alpha_minus * dqr)
    elif variant.kind == "central":
        if problem.is_scalar:
            j = problem.jacobian(pts)
            dpts = -0.5 * j * (dql + dqr)
        else:
            J = problem.jacobian(pts)
            dpts = -0.5 * np.einsum("cd,ad->ac", J, dql + dqr)
    elif variant.kind == "jacobian_splitting":
        if problem.is_scalar:
            jp, jm = problem.split(pts)
            dpts = -(jp * dql + jm * dqr)
        else:
            Jp, Jm = problem.split(pts)
            dpts = -(np.einsum("cd,ad->ac", Jp, dql)
                     + np.einsum("cd,ad->ac", Jm, dqr))
    elif variant.kind == "flux_vector_splitting":
        if not problem.is_scalar:
            raise ValueError("flux-vector splitting implemented for scalars")
        if not variant.a > 0:
            raise ValueError("flux-vector splitting needs a positive speed bound")
        j = problem.jacobian(pts)
        dpts = -(0.5 * (j + variant.a) * dql + 0.5 * (j - variant.a) * dqr)
    else:
        raise ValueError(f"unknown point update {variant.kind!r}")

    dmo = _moment_rhs_1d(state, problem, ops, dofs, quad)
    return state.with_arrays([dpts, dmo])


def _moment_rhs_1d(state, problem, ops, dofs, quad):
    dx = state.grid.dx
    if problem.linear and problem.is_scalar:
        u = problem.advection_speed
        return -(u / dx) * np.einsum("kp,ipc->ikc", ops.mom_w, dofs)
    if problem.linear:
        J = problem.jacobian(None)
        contr = np.einsum("kp,ipc->ikc", ops.mom_w, dofs)
        return -(1.0 / dx) * np.einsum("cd,ikd->ikc", J, contr)
    rule = quad or _default_af_rule(state.K)
    bvals = ops.basis_values(rule.nodes)                  # (K+2, nq)
    qvals = np.einsum("ipc,pq->iqc", dofs, bvals)
    fvals = problem.flux(qvals)
    K = state.K
    dmo = np.empty_like(state.moments)
    f_l = problem.flux(dofs[:, 0, :])
    f_r = problem.flux(dofs[:, -1, :])
    for k in range(K):
        bk = ops.basis.b[k]
        ak = ops.basis.A[k]
        dbw = bk.derivative()(rule.nodes) * rule.weights
        vol = np.einsum("iqc,q->ic", fvals, dbw)
        dmo[:, k, :] = (ak / dx) * (vol - (bk(0.5) * f_r - bk(-0.5) * f_l))
    return dmo


def _default_af_rule(K: int) -> poly.QuadratureRule:
    from .mesh import AF_N_INT
    n_int = AF_N_INT.get(K + 2, 2 * K + 5)
    return poly.gauss_legendre_rule((n_int + 2) // 2)


def _native_flux_projection(state, problem, dofs,
                            flux: NumericalFluxSpec | None) -> FluxProjection1D:
    """For linear scalar problems the flux projection is u times the
    reconstruction; nonlinear interior moments are not determined by the
    AF dofs and must be supplied by the caller."""
    if not (problem.linear and problem.is_scalar):
        raise ValueError("the flux-mirroring update needs explicit flux "
                         "projection data for nonlinear problems")
    if flux is None:
        raise ValueError("dg_inspired variant needs the mirrored flux spec")
    u = problem.advection_speed
    ap, am = flux.advection_weights(u)
    n_if = state.point_values.shape[0]
    return FluxProjection1D(F_dofs=u * dofs,
                            A=np.full(n_if, float(u)),
                            dfdql=np.full(n_if, ap * u),
                            dfdqr=np.full(n_if, am * u))


def af_rhs_1d_dg_inspired_point(state: AfState1D, problem: ProblemSpec,
                                flux: NumericalFluxSpec,
                                flux_projection: FluxProjection1D | None = None
                                ) -> np.ndarray:
    """Point-value derivatives of the flux-mirroring update only."""
    ops = af_ops(state.K)
    if flux_projection is None:
        dofs = cell_dof_tensor_1d(state)
        flux_projection = _native_flux_projection(state, problem, dofs, flux)
    return _point_rhs_from_projection(state, ops, state.grid.dx, flux_projection)


def _point_rhs_from_projection(state, ops, dx, fp: FluxProjection1D) -> np.ndarray:
    if np.any(np.abs(fp.A) < 1e-12):
        raise ZeroDivisionError("sonic state: flux derivative vanishes at an "
                                "interface; the identification is undefined")
    df_plus = np.einsum("p,ipc->ic", ops.d_plus, fp.F_dofs) / dx
    df_minus = np.einsum("p,ipc->ic", ops.d_minus, fp.F_dofs) / dx
    dfl = np.roll(df_plus, 1, axis=0)
    dfr = df_minus
    return -(fp.dfdql[:, None] * dfl + fp.dfdqr[:, None] * dfr) / fp.A[:, None]


def _rhs_from_flux_projection(state, ops, dx, fp: FluxProjection1D) -> AfState1D:
    dpts = _point_rhs_from_projection(state, ops, dx, fp)
    dmo = -(1.0 / dx) * np.einsum("kp,ipc->ikc", ops.mom_w, fp.F_dofs)
    return state.with_arrays([dpts, dmo])


# ---------------------------------------------------------------------------
# 2-d tensorial right-hand side


def af_rhs_2d_tensorial(state: AfState2D, ux: float, uy: float,
                        alpha: tuple[float, float] = None,
                        beta: tuple[float, float] = None,
                        impl: str = "auto") -> AfState2D:
    """Tensorial AF update for 2-d linear advection, any K >= 1.

    alpha/beta are the one-sided weights of the point updates per axis;
    omitted weights mean pure upwinding by the sign of the speed.  A
    zero-speed axis contributes nothing.  ``impl`` selects the compiled
    cell-loop kernel ('kernel'), the vectorized reference path ('numpy'),
    or whichever is available ('auto'); both produce the same numbers.
    """
    if state.variant != "tensorial":
        raise ValueError("tensorial right-hand side needs a tensorial state")
    if not state.periodic:
        raise NotImplementedError("use the padded driver path for Dirichlet runs")
    if alpha is None:
        alpha = (1.0, 0.0) if ux >= 0 else (0.0, 1.0)
    if beta is None:
        beta = (1.0, 0.0) if uy >= 0 else (0.0, 1.0)
    _check_weights(alpha)
    _check_weights(beta)

    ops = af_ops(state.K)

    if impl not in ("auto", "kernel", "numpy"):
        raise ValueError(f"unknown impl {impl!r}")
    if impl != "numpy":
        if kernels.HAVE_NUMBA:
            dN = np.empty_like(state.node_values)
            dEx = np.empty_like(state.x_edge)
            dEy = np.empty_like(state.y_edge)
            dMo = np.empty_like(state.cell_moments)
            kernels.af_rhs_2d_kernel(
                state.node_values, state.x_edge, state.y_edge,
                state.cell_moments, ops.d_plus, ops.d_minus, ops.mom_w,
                float(ux), float(uy), alpha[0], alpha[1], beta[0], beta[1],
                state.grid.dx, state.grid.dy, dN, dEx, dEy, dMo)
            return state.with_arrays([dN, dEx, dEy, dMo])
        if impl == "kernel":
            raise RuntimeError("numba is not available for the kernel path")
    dx, dy = state.grid.dx, state.grid.dy
    K = state.K
    N, Ex, Ey, Mo = state.node_values, state.x_edge, state.y_edge, state.cell_moments

    # trace bundles along interfaces and moment rows inside cells:
    # TX[a, j] are the 1-d dofs of vertical interface a over y-cell j,
    # XR[i, j, :, n] the x-direction dofs of cell (i, j)'s n-th moment row.
    TX = np.concatenate([N[:, :, None], Ex,
                         np.roll(N, -1, axis=1)[:, :, None]], axis=2)
    TY = np.concatenate([N[:, :, None], Ey,
                         np.roll(N, -1, axis=0)[:, :, None]], axis=2)
    XR = np.concatenate([Ex[:, :, None, :], Mo,
                         np.roll(Ex, -1, axis=0)[:, :, None, :]], axis=2)
    YR = np.concatenate([Ey[:, :, None, :], np.swapaxes(Mo, 2, 3),
                         np.roll(Ey, -1, axis=1)[:, :, None, :]], axis=2)

    dN = np.zeros_like(N)
    dEx = np.zeros_like(Ex)
    dEy = np.zeros_like(Ey)
    dMo = np.zeros_like(Mo)

    if ux != 0.0:
        ap, am = alpha
        # nodes: one-sided x-derivatives of the horizontal-interface traces
        dty_p = np.einsum("ibp,p->ib", TY, ops.d_plus) / dx
        dty_m = np.einsum("ibp,p->ib", TY, ops.d_minus) / dx
        dN -= ux * (ap * np.roll(dty_p, 1, axis=0) + am * dty_m)
        # x-edge moments: one-sided x-derivatives of the moment rows
        dxr_p = np.einsum("ijpk,p->ijk", XR, ops.d_plus) / dx
        dxr_m = np.einsum("ijpk,p->ijk", XR, ops.d_minus) / dx
        dEx -= ux * (ap * np.roll(dxr_p, 1, axis=0) + am * dxr_m)
        # y-edge moments and interior moments: transverse moment stencil
        dEy -= (ux / dx) * np.einsum("kp,ibp->ibk", ops.mom_w, TY)
        dMo -= (ux / dx) * np.einsum("mp,ijpn->ijmn", ops.mom_w, XR)

    if uy != 0.0:
        bp, bm = beta
        dtx_p = np.einsum("ajp,p->aj", TX, ops.d_plus) / dy
        dtx_m = np.einsum("ajp,p->aj", TX, ops.d_minus) / dy
        dN -= uy * (bp * np.roll(dtx_p, 1, axis=1) + bm * dtx_m)
        dyr_p = np.einsum("ijpk,p->ijk", YR, ops.d_plus) / dy
        dyr_m = np.einsum("ijpk,p->ijk", YR, ops.d_minus) / dy
        dEy -= uy * (bp * np.roll(dyr_p, 1, axis=1) + bm * dyr_m)
        dEx -= (uy / dy) * np.einsum("kp,ajp->ajk", ops.mom_w, TX)
        dMo -= (uy / dy) * np.einsum("np,ijpm->ijmn", ops.mom_w, YR)

    return state.with_arrays([dN, dEx, dEy, dMo])


def _check_weights(w):
    if abs(w[0] + w[1] - 1.0) > 1e-13:
        raise ValueError("one-sided weights must sum to 1")


# ---------------------------------------------------------------------------
# classical 2-d variant (edge midpoints), K = 1, upwind, nonnegative speeds


_LAGR = None


def _lagrange_quadratic():
    """1-d quadratic Lagrange basis on {-1/2, 0, 1/2} plus mean weights."""
    global _LAGR
    if _LAGR is None:
        l_l = poly.PolySpec([0.0, -1.0, 2.0])
        l_0 = poly.PolySpec([1.0, 0.0, -4.0])
        l_r = poly.PolySpec([0.0, 1.0, 2.0])
        w = np.array([p.cell_integral() for p in (l_l, l_0, l_r)])
        _LAGR = ((l_l, l_0, l_r), w)
    return _LAGR


def classical_cell_values(state: AfState2D) -> np.ndarray:
    """3x3 point values per cell (corners, edge midpoints, center).

    The center value is recovered from the stored cell average through the
    tensor-Lagrange mean weights.
    """
    if state.variant != "classical_midpoint":
        raise ValueError("expects the classical midpoint variant")
    _, w = _lagrange_quadratic()
    N, Ex, Ey = state.node_values, state.x_edge[..., 0], state.y_edge[..., 0]
    avg = state.cell_moments[..., 0, 0]
    if not state.periodic:
        raise NotImplementedError("classical variant is periodic-only")
    V = np.zeros(N.shape + (3, 3))
    V[:, :, 0, 0] = N
    V[:, :, 2, 0] = np.roll(N, -1, axis=0)
    V[:, :, 0, 2] = np.roll(N, -1, axis=1)
    V[:, :, 2, 2] = np.roll(np.roll(N, -1, axis=0), -1, axis=1)
    V[:, :, 0, 1] = Ex
    V[:, :, 2, 1] = np.roll(Ex, -1, axis=0)
    V[:, :, 1, 0] = Ey
    V[:, :, 1, 2] = np.roll(Ey, -1, axis=1)
    # center value from the average: subtract the 8 boundary contributions
    partial = np.einsum("ijab,a,b->ij", V, w, w)
    V[:, :, 1, 1] = (avg - partial) / (w[1] * w[1])
    return V


def _classical_derivatives(V, dx, dy, xi, eta):
    """(d/dx, d/dy) of the Lagrange-tensor cell polynomial at (xi, eta)."""
    (basis, _) = _lagrange_quadratic()
    bx = np.array([p(xi) for p in basis])
    by = np.array([p(eta) for p in basis])
    dbx = np.array([p.derivative()(xi) for p in basis])
    dby = np.array([p.derivative()(eta) for p in basis])
    ddx = np.einsum("ijab,a,b->ij", V, dbx, by) / dx
    ddy = np.einsum("ijab,a,b->ij", V, bx, dby) / dy
    return ddx, ddy


def af_rhs_2d_classical(state: AfState2D, ux: float, uy: float) -> AfState2D:
    """Point updates at nodes and edge midpoints plus the average update.

    Every point is advected with the one-sided derivatives of its fully
    upwind cell; the average uses Simpson-converted edge averages.  Only
    nonnegative speeds are supported (sufficient for the midpoint-versus-
    edge-average comparison).
    """
    if ux < 0 or uy < 0:
        raise NotImplementedError("classical update implemented for "
                                  "nonnegative speeds")
    dx, dy = state.grid.dx, state.grid.dy
    V = classical_cell_values(state)

    # nodes: upwind cell is the lower-left neighbour
    ddx, ddy = _classical_derivatives(V, dx, dy, 0.5, 0.5)
    dN = -(ux * np.roll(ddx, (1, 1), axis=(0, 1))
           + uy * np.roll(ddy, (1, 1), axis=(0, 1)))

    # x-edge midpoints: upwind cell sits left of the interface
    ddx, ddy = _classical_derivatives(V, dx, dy, 0.5, 0.0)
    dEx = -(ux * np.roll(ddx, 1, axis=0) + uy * np.roll(ddy, 1, axis=0))

    # y-edge midpoints: upwind cell sits below
    ddx, ddy = _classical_derivatives(V, dx, dy, 0.0, 0.5)
    dEy = -(ux * np.roll(ddx, 1, axis=1) + uy * np.roll(ddy, 1, axis=1))

    # average: convert midpoints to edge averages, then difference them
    N = state.node_values
    ex_avg = simpson_edge_average(N, state.x_edge[..., 0], np.roll(N, -1, axis=1))
    ey_avg = simpson_edge_average(N, state.y_edge[..., 0], np.roll(N, -1, axis=0))
    davg = -(ux * (np.roll(ex_avg, -1, axis=0) - ex_avg) / dx
             + uy * (np.roll(ey_avg, -1, axis=1) - ey_avg) / dy)

    return state.with_arrays([dN, dEx[..., None], dEy[..., None],
                              davg[..., None, None]])
