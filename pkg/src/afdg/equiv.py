"""Dof mappings between DG and AF and the semi-discrete equivalence verifier.

The mapping sends a DG state to AF dofs (interface values from the
numerical flux, moments by exact modal transfer).  The verifier then
compares, family by family,

  (a) the time derivatives of the mapped dofs induced by the DG
      right-hand side (moments via modal transfer, interface/edge/node
      values via the flux-partial chain rule or weighted trace
      derivatives extracted with the Riesz endpoint functionals), and
  (b) the native AF right-hand side evaluated on the mapped state.

Both sides are independently implemented, so machine-precision agreement
is a strong mutual oracle.  All transfer matrices are precomputed from
exact polynomial integrals; the only inexactness is roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import af, dg, poly
from .mesh import (AfState1D, AfState2D, DgState1D, DgState2D, Grid1D, Grid2D,
                   simpson_edge_average, simpson_midpoint)
from .problems import (NumericalFluxSpec, ProblemSpec, builtin_problems,
                       flux_partials, invert_flux, lax_friedrichs_speed)

__all__ = [
    "moment_transfer_matrix", "map_dg_to_af_1d", "augment_reconstruction_1d",
    "project_flux_F", "dg_induced_af_derivative_1d",
    "map_dg_to_af_2d", "reconstruct_af_2d_from_dg",
    "dg_induced_af_derivative_2d", "lemma_checks",
    "EquivSetting", "EquivalenceReport", "FamilyResult", "verify_equivalence",
]


@lru_cache(maxsize=None)
def moment_transfer_matrix(K: int) -> np.ndarray:
    """T[k, n] = A_k * integral of (2 xi)^k phi_n over the cell (exact)."""
    basis = dg.dg_basis(K)
    T = np.zeros((K, K + 1))
    for k in range(K):
        a_k = poly.moment_normalization(k)
        w = poly.moment_weight(k)
        for n in range(K + 1):
            T[k, n] = a_k * (w * basis.phi[n]).cell_integral()
    return T


# ---------------------------------------------------------------------------
# 1-d mapping and induced derivatives


def map_dg_to_af_1d(state: DgState1D, flux: NumericalFluxSpec,
                    problem: ProblemSpec) -> AfState1D:
    """Interface values from the numerical flux, moments by modal transfer."""
    fhat = dg.interface_fluxes_1d(state, problem, flux)
    pts = dg.interface_states_from_fluxes(fhat, problem)
    T = moment_transfer_matrix(state.K)
    moments = np.einsum("kn,inc->ikc", T, state.coeffs)
    return AfState1D(state.grid, state.K, pts, moments, state.periodic)


def augment_reconstruction_1d(state: DgState1D, problem: ProblemSpec,
                              flux: NumericalFluxSpec) -> np.ndarray:
    """Monomial coefficients of the flux-corrected continuous field,
    shape (n_cells, K+2, m)."""
    return dg.augmented_coefficients_1d(state, problem, flux)


def project_flux_F(state: DgState1D, problem: ProblemSpec,
                   flux: NumericalFluxSpec,
                   rule: poly.QuadratureRule | None = None
                   ) -> af.FluxProjection1D:
    """Degree-(K+1) flux projection per cell plus interface chain-rule data.

    Endpoint dofs equal the interface numerical fluxes; interior moments
    match the flux composed with the broken DG polynomial under the same
    quadrature the DG volume term uses, which is what makes the mirrored
    AF update reproduce the DG trace derivatives exactly.
    """
    if not problem.is_scalar:
        raise ValueError("flux projection is defined for scalar problems")
    K = state.K
    rule = rule or dg.quad_rule_for_order("dg", K + 1)
    basis = dg.dg_basis(K)
    fhat = dg.interface_fluxes_1d(state, problem, flux)          # (n_if, 1)
    q_minus, q_plus = dg.trace_values_1d(state)
    q_l = np.roll(q_plus, 1, axis=0)
    q_r = q_minus

    dl, dr = flux_partials(flux, problem, q_l, q_r)
    dfdql = np.asarray(dl)[:, 0]
    dfdqr = np.asarray(dr)[:, 0]
    A = np.asarray(problem.jacobian(invert_flux(problem, fhat)))[:, 0]

    phi_vals = np.array([p(rule.nodes) for p in basis.phi])      # (K+1, nq)
    qvals = np.einsum("inc,nq->iqc", state.coeffs, phi_vals)
    fvals = problem.flux(qvals)                                  # (n, nq, 1)
    n_cells = state.grid.n_cells
    F_dofs = np.empty((n_cells, K + 2, 1))
    F_dofs[:, 0, :] = fhat
    F_dofs[:, -1, :] = np.roll(fhat, -1, axis=0)
    for k in range(K):
        bw = poly.moment_normalization(k) * poly.moment_weight(k)(rule.nodes) \
            * rule.weights
        F_dofs[:, 1 + k, :] = np.einsum("iqc,q->ic", fvals, bw)
    return af.FluxProjection1D(F_dofs=F_dofs, A=A, dfdql=dfdql, dfdqr=dfdqr)


def dg_induced_af_derivative_1d(state: DgState1D, problem: ProblemSpec,
                                flux: NumericalFluxSpec):
    """Time derivatives of the mapped AF dofs implied by the DG method.

    Moments transfer modally; interface values follow the chain rule
    through the numerical flux, with the trace time derivatives extracted
    by the Riesz endpoint functionals.
    """
    dstate = dg.dg_rhs_1d(state, problem, flux, assembly="weak")
    dc = dstate.coeffs
    T = moment_transfer_matrix(state.K)
    dmo = np.einsum("kn,inc->ikc", T, dc)

    riesz = dg.riesz_endpoint_functionals(state.K)
    dq_plus = np.einsum("inc,n->ic", dc, riesz.weights_right)
    dq_minus = np.einsum("inc,n->ic", dc, riesz.weights_left)
    dql = np.roll(dq_plus, 1, axis=0)          # d/dt q_{a-1}^+
    dqr = dq_minus                             # d/dt q_a^-

    if problem.linear and problem.is_scalar:
        u = problem.advection_speed
        ap, am = flux.advection_weights(u)
        dpts = ap * dql + am * dqr
    elif problem.linear:
        J = problem.jacobian(None)
        Jp, Jm = problem.split(None)
        Jinv = np.linalg.inv(J)
        dpts = np.einsum("cd,ad->ac", Jinv,
                         np.einsum("cd,ad->ac", Jp, dql)
                         + np.einsum("cd,ad->ac", Jm, dqr))
    else:
        fhat = dg.interface_fluxes_1d(state, problem, flux)
        q_l = np.roll(dg.trace_values_1d(state)[1], 1, axis=0)
        q_r = dg.trace_values_1d(state)[0]
        dl, dr = flux_partials(flux, problem, q_l, q_r)
        A = problem.jacobian(invert_flux(problem, fhat))
        dpts = (np.asarray(dl) * dql + np.asarray(dr) * dqr) / np.asarray(A)
    return dpts, dmo


# ---------------------------------------------------------------------------
# 2-d mapping (K = 1 identification), reconstruction, induced derivatives


def _corner_values(coeffs: np.ndarray, basis: dg.DgBasis):
    vr, vl = basis.value_right, basis.value_left
    v_pp = np.einsum("ijmn,m,n->ij", coeffs, vr, vr)
    v_mp = np.einsum("ijmn,m,n->ij", coeffs, vl, vr)
    v_pm = np.einsum("ijmn,m,n->ij", coeffs, vr, vl)
    v_mm = np.einsum("ijmn,m,n->ij", coeffs, vl, vl)
    return v_pp, v_mp, v_pm, v_mm


def map_dg_to_af_2d(state: DgState2D, alpha: tuple[float, float],
                    beta: tuple[float, float],
                    check_consistency: bool = True) -> AfState2D:
    """Corner/edge/average dofs of tensorial AF from the DG approximation.

    Corners combine the four one-sided corner traces with the alpha/beta
    products; edge dofs are tangential moments of the weighted interface
    traces; interior moments transfer tensor-modally.  The two ways of
    evaluating a corner through the weighted edge traces must agree
    (consistency of the corner definition); a violation is an internal
    error.  The identification is stated for K = 1; the tensor form here
    extends it verbatim to K >= 2 and the verifier confirms the update
    equations still agree (an open question answered numerically).
    """
    if state.K < 1:
        raise ValueError("the 2-d identification needs K >= 1")
    _check_consistent(alpha)
    _check_consistent(beta)
    ap, am = alpha
    bp, bm = beta
    basis = dg.dg_basis(state.K)
    c = state.coeffs
    K = state.K

    v_pp, v_mp, v_pm, v_mm = _corner_values(c, basis)
    nodes = (ap * bp * np.roll(v_pp, (1, 1), axis=(0, 1))
             + am * bp * np.roll(v_mp, (0, 1), axis=(0, 1))
             + ap * bm * np.roll(v_pm, (1, 0), axis=(0, 1))
             + am * bm * v_mm)

    qhat_x, qhat_y = dg.qhat_interfaces_2d(state, alpha, beta)
    T = moment_transfer_matrix(K)
    x_edge = np.einsum("kn,ajn->ajk", T, qhat_x)
    y_edge = np.einsum("km,ibm->ibk", T, qhat_y)
    cell_moments = np.einsum("km,ln,ijmn->ijkl",
                             T, T, c)

    out = AfState2D(state.grid, K, nodes, x_edge, y_edge, cell_moments,
                    "tensorial", state.periodic)
    if check_consistency:
        res = corner_consistency_residual(state, alpha, beta, nodes)
        if res > 1e-12:
            raise RuntimeError(f"corner consistency violated: {res:.3e}")
    return out


def corner_consistency_residual(state: DgState2D, alpha, beta,
                                nodes: np.ndarray | None = None) -> float:
    """Max gap between the two weighted-trace expressions for the corner."""
    ap, am = alpha
    bp, bm = beta
    basis = dg.dg_basis(state.K)
    qhat_x, qhat_y = dg.qhat_interfaces_2d(state, alpha, beta)
    # evaluate qhat_y (an x-polynomial on horizontal interfaces) at x=+-1/2
    qy_r = np.einsum("ibm,m->ib", qhat_y, basis.value_right)
    qy_l = np.einsum("ibm,m->ib", qhat_y, basis.value_left)
    expr1 = ap * np.roll(qy_r, 1, axis=0) + am * qy_l
    qx_t = np.einsum("ajn,n->aj", qhat_x, basis.value_right)
    qx_b = np.einsum("ajn,n->aj", qhat_x, basis.value_left)
    expr2 = bp * np.roll(qx_t, 1, axis=1) + bm * qx_b
    res = np.max(np.abs(expr1 - expr2))
    if nodes is not None:
        res = max(res, np.max(np.abs(expr1 - nodes)))
    return float(res)


def _check_consistent(w):
    if abs(w[0] + w[1] - 1.0) > 1e-13:
        raise ValueError("flux weights must sum to 1 (consistency)")


@dataclass(frozen=True)
class TensorReconstruction2D:
    """Per-cell corrected DG fields: q + r^x + r^y + corner terms.

    Stored as the pieces needed for evaluation: modal blocks, interface
    trace polynomials, and corner constants C[i, j, (L/R)x, (L/R)y].
    """

    state: DgState2D
    qhat_x: np.ndarray
    qhat_y: np.ndarray
    corners: np.ndarray       # (nx, ny, 2, 2)

    def evaluate(self, xi: np.ndarray, eta: np.ndarray) -> np.ndarray:
        """Values on the tensor grid xi x eta, shape (nx, ny, nxi, neta)."""
        st = self.state
        basis = dg.dg_basis(st.K)
        r_l, r_r = poly.radau_pair(st.K)
        phx = np.array([p(xi) for p in basis.phi])       # (K+1, nxi)
        phy = np.array([p(eta) for p in basis.phi])
        rlx, rrx = r_l(xi), r_r(xi)
        rly, rry = r_l(eta), r_r(eta)

        vals = np.einsum("ijmn,ma,nb->ijab", st.coeffs, phx, phy)
        # r^x: (qhat - own trace) against the x-Radau pair
        tr_r = np.einsum("ijmn,m,nb->ijb", st.coeffs, basis.value_right, phy)
        tr_l = np.einsum("ijmn,m,nb->ijb", st.coeffs, basis.value_left, phy)
        qx_r = np.einsum("ajn,nb->ajb", np.roll(self.qhat_x, -1, axis=0), phy)
        qx_l = np.einsum("ajn,nb->ajb", self.qhat_x, phy)
        vals += np.einsum("ijb,a->ijab", qx_r - tr_r, rrx)
        vals += np.einsum("ijb,a->ijab", qx_l - tr_l, rlx)
        # r^y
        tr_t = np.einsum("ijmn,ma,n->ija", st.coeffs, phx, basis.value_right)
        tr_b = np.einsum("ijmn,ma,n->ija", st.coeffs, phx, basis.value_left)
        qy_t = np.einsum("ibm,ma->iba", np.roll(self.qhat_y, -1, axis=1), phx)
        qy_b = np.einsum("ibm,ma->iba", self.qhat_y, phx)
        vals += np.einsum("ija,b->ijab", qy_t - tr_t, rry)
        vals += np.einsum("ija,b->ijab", qy_b - tr_b, rly)
        # corner corrections
        for sx, rx in ((0, rlx), (1, rrx)):
            for sy, ry in ((0, rly), (1, rry)):
                vals += np.einsum("ij,a,b->ijab", self.corners[:, :, sx, sy],
                                  rx, ry)
        return vals


def reconstruct_af_2d_from_dg(state: DgState2D, alpha, beta
                              ) -> TensorReconstruction2D:
    """Build q + r^x + r^y plus the four corner constants per cell."""
    if state.K != 1:
        raise ValueError("the 2-d reconstruction identity is built for K = 1")
    basis = dg.dg_basis(state.K)
    mapped = map_dg_to_af_2d(state, alpha, beta, check_consistency=False)
    qhat_x, qhat_y = dg.qhat_interfaces_2d(state, alpha, beta)
    v_pp, v_mp, v_pm, v_mm = _corner_values(state.coeffs, basis)

    qx_t = np.einsum("ajn,n->aj", qhat_x, basis.value_right)
    qx_b = np.einsum("ajn,n->aj", qhat_x, basis.value_left)
    qy_r = np.einsum("ibm,m->ib", qhat_y, basis.value_right)
    qy_l = np.einsum("ibm,m->ib", qhat_y, basis.value_left)

    nodes = mapped.node_values
    nx, ny = state.coeffs.shape[:2]
    corners = np.empty((nx, ny, 2, 2))
    # corner (R, R): node at (i+1, j+1) wraps with roll(-1)
    corners[:, :, 1, 1] = (np.roll(nodes, (-1, -1), axis=(0, 1))
                           - np.roll(qx_t, -1, axis=0)
                           - np.roll(qy_r, -1, axis=1) + v_pp)
    corners[:, :, 0, 1] = (np.roll(nodes, (0, -1), axis=(0, 1))
                           - qx_t - np.roll(qy_l, -1, axis=1) + v_mp)
    corners[:, :, 1, 0] = (np.roll(nodes, (-1, 0), axis=(0, 1))
                           - np.roll(qx_b, -1, axis=0) - qy_r + v_pm)
    corners[:, :, 0, 0] = nodes - qx_b - qy_l + v_mm
    return TensorReconstruction2D(state, qhat_x, qhat_y, corners)


def dg_induced_af_derivative_2d(state: DgState2D, ux: float, uy: float,
                                flux_x: NumericalFluxSpec,
                                flux_y: NumericalFluxSpec):
    """DG-induced time derivatives of the mapped tensorial dofs."""
    alpha = flux_x.advection_weights(ux) if ux != 0 else (1.0, 0.0)
    beta = flux_y.advection_weights(uy) if uy != 0 else (1.0, 0.0)
    dstate = dg.dg_rhs_2d(state, ux, uy, flux_x, flux_y)
    return map_dg_to_af_2d(dstate, alpha, beta, check_consistency=False)


# ---------------------------------------------------------------------------
# identity checks on the proofs' intermediate objects


def lemma_checks(state: DgState2D, ux: float, uy: float,
                 flux_x: NumericalFluxSpec, flux_y: NumericalFluxSpec,
                 n_samples: int = 7, tol: float = 1e-12) -> dict[str, float]:
    """Residuals of the reconstruction/update identities on a given state.

    Checks the corner-consistency identity, the average/edge/corner
    matches of the corrected field, the edge-trace combination identity,
    and the three trace-derivative update identities for random weights.
    All residuals are relative to the state scale and must sit at
    roundoff for the equivalence theorem to hold.
    """
    if state.K != 1:
        raise ValueError("identity checks are built for K = 1")
    alpha = flux_x.advection_weights(ux) if ux != 0 else (1.0, 0.0)
    beta = flux_y.advection_weights(uy) if uy != 0 else (1.0, 0.0)
    basis = dg.dg_basis(state.K)
    scale = max(1e-300, float(np.max(np.abs(state.coeffs))))
    res: dict[str, float] = {}

    mapped = map_dg_to_af_2d(state, alpha, beta, check_consistency=False)
    rec = reconstruct_af_2d_from_dg(state, alpha, beta)

    res["corner_consistency"] = corner_consistency_residual(
        state, alpha, beta, mapped.node_values) / scale

    # corrected field equals the AF reconstruction of the mapped dofs
    xi = np.linspace(-0.5, 0.5, n_samples)
    eta = np.linspace(-0.5, 0.5, n_samples)
    built = rec.evaluate(xi, eta)
    direct = af.af_eval_2d(mapped, xi, eta)
    res["reconstruction_match"] = float(np.max(np.abs(built - direct))) / scale

    # average match: cell mean of the corrected field equals the DG mean
    rule = poly.gauss_legendre_rule(3)
    built_q = rec.evaluate(rule.nodes, rule.nodes)
    mean_built = np.einsum("ijab,a,b->ij", built_q, rule.weights, rule.weights)
    res["average_match"] = float(
        np.max(np.abs(mean_built - state.coeffs[:, :, 0, 0]))) / scale

    # edge-average match: mean of the corrected field along the right edge
    # equals the mean of qhat on that interface
    edge_vals = rec.evaluate(np.array([0.5]), rule.nodes)[:, :, 0, :]
    mean_edge = edge_vals @ rule.weights
    qhat_mean = rec.qhat_x[:, :, 0]
    res["edge_average_match"] = float(
        np.max(np.abs(mean_edge - np.roll(qhat_mean, -1, axis=0)))) / scale

    # corner match: corrected field at (+1/2, +1/2) equals the mapped node
    corner_vals = rec.evaluate(np.array([0.5]), np.array([0.5]))[:, :, 0, 0]
    res["corner_match"] = float(np.max(np.abs(
        corner_vals - np.roll(mapped.node_values, (-1, -1), axis=(0, 1))))) / scale

    # edge-trace combination identity (both sides along horizontal edges)
    res["edge_trace_combination"] = _edge_trace_identity_residual(
        state, rec, mapped, alpha, beta, xi) / scale

    # trace-derivative update identities with random weights
    res.update({k: v / scale for k, v in _update_identity_residuals(
        state, rec, ux, uy, flux_x, flux_y, alpha, beta).items()})
    return res


def _edge_trace_identity_residual(state, rec, mapped, alpha, beta, xi):
    """beta-weighted x-corrected traces along a horizontal interface equal
    the (continuous) mapped reconstruction trace; alpha-weighted mirror."""
    bp, bm = beta
    ap, am = alpha
    worst = 0.0
    top = rec.evaluate(xi, np.array([0.5]))
    # q + r^x alone: subtract r^y and corner contributions
    qrx_top = _q_plus_rx(state, rec, xi, 0.5)
    qrx_bot = _q_plus_rx(state, rec, xi, -0.5)
    af_trace = af.af_eval_2d(mapped, xi, np.array([0.5]))[:, :, :, 0]
    lhs = bp * qrx_top + bm * np.roll(qrx_bot, -1, axis=1)
    worst = max(worst, float(np.max(np.abs(lhs - af_trace))))

    eta = xi
    qry_r = _q_plus_ry(state, rec, 0.5, eta)
    qry_l = _q_plus_ry(state, rec, -0.5, eta)
    af_trace_x = af.af_eval_2d(mapped, np.array([0.5]), eta)[:, :, 0, :]
    lhs = ap * qry_r + am * np.roll(qry_l, -1, axis=0)
    worst = max(worst, float(np.max(np.abs(lhs - af_trace_x))))
    return worst


def _q_plus_rx(state, rec, xi, eta_val):
    basis = dg.dg_basis(state.K)
    r_l, r_r = poly.radau_pair(state.K)
    phx = np.array([p(xi) for p in basis.phi])
    phy = np.array([p(eta_val) for p in basis.phi])
    q = np.einsum("ijmn,ma,n->ija", state.coeffs, phx, phy)
    tr_r = np.einsum("ijmn,m,n->ij", state.coeffs, basis.value_right, phy)
    tr_l = np.einsum("ijmn,m,n->ij", state.coeffs, basis.value_left, phy)
    qx_r = np.einsum("ajn,n->aj", np.roll(rec.qhat_x, -1, axis=0), phy)
    qx_l = np.einsum("ajn,n->aj", rec.qhat_x, phy)
    q += np.einsum("ij,a->ija", qx_r - tr_r, r_r(xi))
    q += np.einsum("ij,a->ija", qx_l - tr_l, r_l(xi))
    return q


def _q_plus_ry(state, rec, xi_val, eta):
    basis = dg.dg_basis(state.K)
    r_l, r_r = poly.radau_pair(state.K)
    phx = np.array([p(xi_val) for p in basis.phi])
    phy = np.array([p(eta) for p in basis.phi])
    q = np.einsum("ijmn,m,nb->ijb", state.coeffs, phx, phy)
    tr_t = np.einsum("ijmn,m,n->ij", state.coeffs, phx, basis.value_right)
    tr_b = np.einsum("ijmn,m,n->ij", state.coeffs, phx, basis.value_left)
    qy_t = np.einsum("ibm,m->ib", np.roll(rec.qhat_y, -1, axis=1), phx)
    qy_b = np.einsum("ibm,m->ib", rec.qhat_y, phx)
    q += np.einsum("ij,b->ijb", qy_t - tr_t, r_r(eta))
    q += np.einsum("ij,b->ijb", qy_b - tr_b, r_l(eta))
    return q


def _update_identity_residuals(state, rec, ux, uy, flux_x, flux_y,
                               alpha, beta):
    """The three weighted trace-derivative identities on a random pair."""
    rng = np.random.default_rng(1234)
    a_w, b_w = rng.uniform(-1, 1, 2)
    out = {}
    out["edge_update_identity_x"] = _x_edge_identity(
        state, rec, ux, uy, flux_x, flux_y, a_w, b_w)

    # the perpendicular-edge identity is the same computation on the
    # transposed state with the axes and fluxes swapped
    grid_t = Grid2D(state.grid.y_min, state.grid.y_max, state.grid.n_cells_y,
                    state.grid.x_min, state.grid.x_max, state.grid.n_cells_x)
    state_t = DgState2D(grid_t, state.K,
                        np.swapaxes(np.swapaxes(state.coeffs, 0, 1), 2, 3),
                        state.periodic)
    alpha_t = flux_y.advection_weights(uy) if uy != 0 else (1.0, 0.0)
    beta_t = flux_x.advection_weights(ux) if ux != 0 else (1.0, 0.0)
    rec_t = reconstruct_af_2d_from_dg(state_t, alpha_t, beta_t)
    out["edge_update_identity_y"] = _x_edge_identity(
        state_t, rec_t, uy, ux, flux_y, flux_x, a_w, b_w)

    out["corner_update_identity"] = _corner_identity(
        state, rec, ux, uy, flux_x, flux_y, rng.uniform(-1, 1, 4))
    return out


def _x_edge_identity(state, rec, ux, uy, flux_x, flux_y, a_w, b_w) -> float:
    basis = dg.dg_basis(state.K)
    rule = poly.gauss_legendre_rule(3)
    dstate = dg.dg_rhs_2d(state, ux, uy, flux_x, flux_y)
    dc = dstate.coeffs
    dx, dy = state.grid.dx, state.grid.dy
    mean_mode = np.zeros(state.K + 1)
    mean_mode[0] = 1.0
    dtr_r = np.einsum("ijmn,m,n->ij", dc, basis.value_right, mean_mode)
    dtr_l = np.einsum("ijmn,m,n->ij", dc, basis.value_left, mean_mode)
    lhs = a_w * dtr_r + b_w * np.roll(dtr_l, -1, axis=0)
    mean_dqrx_r = _dx_q_plus_rx(state, rec, 0.5, rule) @ rule.weights / dx
    mean_dqrx_l = _dx_q_plus_rx(state, rec, -0.5, rule) @ rule.weights / dx
    lhs += ux * (a_w * mean_dqrx_r + b_w * np.roll(mean_dqrx_l, -1, axis=0))
    qy_r = np.einsum("ibm,m->ib", rec.qhat_y, basis.value_right)
    qy_l = np.einsum("ibm,m->ib", rec.qhat_y, basis.value_left)
    jump = (a_w * (np.roll(qy_r, -1, axis=1) - qy_r)
            + b_w * np.roll(np.roll(qy_l, -1, axis=1) - qy_l, -1, axis=0))
    lhs += uy * jump / dy
    return float(np.max(np.abs(lhs)))


def _corner_identity(state, rec, ux, uy, flux_x, flux_y, g) -> float:
    """d/dt of a weighted corner combination balances the weighted
    one-sided derivatives of the corrected fields at the shared node."""
    basis = dg.dg_basis(state.K)
    dstate = dg.dg_rhs_2d(state, ux, uy, flux_x, flux_y)
    dc = dstate.coeffs
    dx, dy = state.grid.dx, state.grid.dy
    v_pp, v_mp, v_pm, v_mm = _corner_values(dc, basis)
    lhs = (g[0] * v_pp + g[1] * np.roll(v_mp, -1, axis=0)
           + g[2] * np.roll(v_pm, -1, axis=1)
           + g[3] * np.roll(np.roll(v_mm, -1, axis=0), -1, axis=1))
    dxq_pp = _dx_q_plus_rx_at(state, rec, 0.5, 0.5) / dx
    dxq_mp = _dx_q_plus_rx_at(state, rec, -0.5, 0.5) / dx
    dxq_pm = _dx_q_plus_rx_at(state, rec, 0.5, -0.5) / dx
    dxq_mm = _dx_q_plus_rx_at(state, rec, -0.5, -0.5) / dx
    lhs += ux * (g[0] * dxq_pp + g[1] * np.roll(dxq_mp, -1, axis=0)
                 + g[2] * np.roll(dxq_pm, -1, axis=1)
                 + g[3] * np.roll(np.roll(dxq_mm, -1, axis=0), -1, axis=1))
    dyq_pp = _dy_q_plus_ry_at(state, rec, 0.5, 0.5) / dy
    dyq_mp = _dy_q_plus_ry_at(state, rec, -0.5, 0.5) / dy
    dyq_pm = _dy_q_plus_ry_at(state, rec, 0.5, -0.5) / dy
    dyq_mm = _dy_q_plus_ry_at(state, rec, -0.5, -0.5) / dy
    lhs += uy * (g[0] * dyq_pp + g[1] * np.roll(dyq_mp, -1, axis=0)
                 + g[2] * np.roll(dyq_pm, -1, axis=1)
                 + g[3] * np.roll(np.roll(dyq_mm, -1, axis=0), -1, axis=1))
    return float(np.max(np.abs(lhs)))


def _dx_q_plus_rx(state, rec, xi_val, rule):
    """d/dxi of (q + r^x) at xi_val, sampled at the rule's eta nodes."""
    basis = dg.dg_basis(state.K)
    r_l, r_r = poly.radau_pair(state.K)
    dphx = np.array([p.derivative()(xi_val) for p in basis.phi])
    phy = np.array([p(rule.nodes) for p in basis.phi])
    dq = np.einsum("ijmn,m,nb->ijb", state.coeffs, dphx, phy)
    tr_r = np.einsum("ijmn,m,nb->ijb", state.coeffs, basis.value_right, phy)
    tr_l = np.einsum("ijmn,m,nb->ijb", state.coeffs, basis.value_left, phy)
    qx_r = np.einsum("ajn,nb->ajb", np.roll(rec.qhat_x, -1, axis=0), phy)
    qx_l = np.einsum("ajn,nb->ajb", rec.qhat_x, phy)
    dq += (qx_r - tr_r) * r_r.derivative()(xi_val)
    dq += (qx_l - tr_l) * r_l.derivative()(xi_val)
    return dq


def _dx_q_plus_rx_at(state, rec, xi_val, eta_val):
    rule = poly.QuadratureRule(np.array([eta_val]), np.array([1.0]), 0)
    return _dx_q_plus_rx(state, rec, xi_val, rule)[:, :, 0]


def _dy_q_plus_ry_at(state, rec, xi_val, eta_val):
    basis = dg.dg_basis(state.K)
    r_l, r_r = poly.radau_pair(state.K)
    phx = np.array([p(xi_val) for p in basis.phi])
    dphy = np.array([p.derivative()(eta_val) for p in basis.phi])
    dq = np.einsum("ijmn,m,n->ij", state.coeffs, phx, dphy)
    tr_t = np.einsum("ijmn,m,n->ij", state.coeffs, phx, basis.value_right)
    tr_b = np.einsum("ijmn,m,n->ij", state.coeffs, phx, basis.value_left)
    qy_t = np.einsum("ibm,m->ib", np.roll(rec.qhat_y, -1, axis=1), phx)
    qy_b = np.einsum("ibm,m->ib", rec.qhat_y, phx)
    dq += (qy_t - tr_t) * r_r.derivative()(eta_val)
    dq += (qy_b - tr_b) * r_l.derivative()(eta_val)
    return dq


# ---------------------------------------------------------------------------
# the verifier


@dataclass(frozen=True)
class FamilyResult:
    family: str
    max_abs: float
    scale: float
    relative: float
    passed: bool


@dataclass
class EquivalenceReport:
    setting: dict
    tolerance: float
    families: list
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(f.passed for f in self.families)

    def rows(self):
        for f in self.families:
            yield (f.family, f.max_abs, f.scale, f.relative, f.passed)


@dataclass
class EquivSetting:
    """One equivalence-verification run."""

    dimension: int = 1
    problem: str = "advection1d"
    problem_params: dict = field(default_factory=dict)
    flux: str = "upwind"
    alpha_plus: float = 1.0
    beta_plus: float = 1.0
    lf_speed: float | None = None
    K: int = 1
    n_cells: int = 64
    seed: int = 0
    tolerance: float = 1e-11
    variant: str = "tensorial"
    flip_point_sign: bool = False


def _family_results(pairs: dict, tol: float) -> list:
    out = []
    for name, (da, db) in pairs.items():
        gap = float(np.max(np.abs(da - db))) if da.size else 0.0
        scale = max(float(np.max(np.abs(da))), float(np.max(np.abs(db))), 1e-300)
        rel = gap / scale
        out.append(FamilyResult(name, gap, scale, rel, rel <= tol))
    return out


def _random_dg_state_1d(K, n_cells, n_components, seed, nonlinear: bool):
    rng = np.random.default_rng(seed)
    grid = Grid1D(0.0, 1.0, n_cells)
    if not nonlinear:
        coeffs = rng.uniform(-1.0, 1.0, (n_cells, K + 1, n_components))
        return DgState1D(grid, K, coeffs)
    # smooth state bounded inside [0.5, 2] so the flux stays invertible
    phase = rng.uniform(0, 2 * np.pi, 2)
    amp = rng.uniform(0.3, 0.55)

    def init(x):
        return 1.25 + amp * np.sin(2 * np.pi * x + phase[0]) \
            + 0.1 * np.sin(4 * np.pi * x + phase[1])

    from .mesh import fill_dg_1d
    return fill_dg_1d(grid, K, init, n_components)


def _flux_spec_from_setting(s: EquivSetting, problem: ProblemSpec,
                            state=None) -> NumericalFluxSpec:
    if s.flux == "upwind":
        return NumericalFluxSpec.upwind()
    if s.flux == "central":
        return NumericalFluxSpec.central()
    if s.flux == "alpha":
        return NumericalFluxSpec.alpha(s.alpha_plus, 1.0 - s.alpha_plus)
    if s.flux == "lax_friedrichs":
        a = s.lf_speed
        if a is None and state is not None:
            a = lax_friedrichs_speed(problem, state.coeffs[:, 0, :])
        return NumericalFluxSpec.lax_friedrichs(a)
    raise ValueError(f"unknown flux {s.flux!r}")


def verify_equivalence(setting: EquivSetting) -> EquivalenceReport:
    """Run one equivalence comparison and report per-family mismatches."""
    if setting.dimension == 1:
        return _verify_1d(setting)
    if setting.dimension == 2:
        return _verify_2d(setting)
    raise ValueError("dimension must be 1 or 2")


def _verify_1d(s: EquivSetting) -> EquivalenceReport:
    problem = builtin_problems()[s.problem](**s.problem_params)
    nonlinear = not problem.linear
    state = _random_dg_state_1d(s.K, s.n_cells, problem.n_components, s.seed,
                                nonlinear)
    flux = _flux_spec_from_setting(s, problem, state)

    dpts_a, dmo_a = dg_induced_af_derivative_1d(state, problem, flux)
    mapped = map_dg_to_af_1d(state, flux, problem)

    if nonlinear:
        fp = project_flux_F(state, problem, flux)
        dmapped = af.af_rhs_1d(mapped, problem,
                               af.PointUpdateVariant.dg_inspired(flux),
                               flux_projection=fp)
    elif problem.is_scalar:
        ap, am = flux.advection_weights(problem.advection_speed)
        dmapped = af.af_rhs_1d(mapped, problem, af.PointUpdateVariant.alpha(ap, am))
    else:
        if flux.kind != "upwind":
            raise ValueError("system equivalence is verified with the "
                             "upwind flux")
        dmapped = af.af_rhs_1d(mapped, problem, af.PointUpdateVariant.upwind())
    dpts_b, dmo_b = dmapped.point_values, dmapped.moments
    if s.flip_point_sign:
        dpts_b = -dpts_b

    pairs = {"point_values": (dpts_a, dpts_b)}
    for k in range(s.K):
        pairs[f"moment_{k}"] = (dmo_a[:, k, :], dmo_b[:, k, :])
    fams = _family_results(pairs, s.tolerance)
    return EquivalenceReport(setting=vars(s).copy(), tolerance=s.tolerance,
                             families=fams,
                             metadata={"seed": s.seed, "problem": problem.name,
                                       "nonlinear": nonlinear})


def _random_dg_state_2d(K, n, seed):
    rng = np.random.default_rng(seed)
    grid = Grid2D.square(n)
    coeffs = rng.uniform(-1.0, 1.0, (n, n, K + 1, K + 1))
    return DgState2D(grid, K, coeffs)


def _verify_2d(s: EquivSetting) -> EquivalenceReport:
    problem = builtin_problems()[s.problem](**s.problem_params)
    ux = problem.advection_speed
    uy = problem.advection_speed_y
    if ux is None or uy is None:
        raise ValueError("2-d verification runs on advection2d")
    state = _random_dg_state_2d(s.K, s.n_cells, s.seed)
    if s.flux == "upwind":
        fx = fy = NumericalFluxSpec.upwind()
    elif s.flux == "central":
        fx = fy = NumericalFluxSpec.central()
    elif s.flux == "alpha":
        fx = NumericalFluxSpec.alpha(s.alpha_plus, 1.0 - s.alpha_plus)
        fy = NumericalFluxSpec.alpha(s.beta_plus, 1.0 - s.beta_plus)
    else:
        raise ValueError(f"unsupported 2-d flux {s.flux!r}")
    alpha = fx.advection_weights(ux) if ux != 0 else (1.0, 0.0)
    beta = fy.advection_weights(uy) if uy != 0 else (1.0, 0.0)

    induced = dg_induced_af_derivative_2d(state, ux, uy, fx, fy)
    mapped = map_dg_to_af_2d(state, alpha, beta)

    metadata = {"seed": s.seed, "zero_speed_axis":
                ("x" if ux == 0 else "") + ("y" if uy == 0 else "")}

    if s.variant == "tensorial":
        dmapped = af.af_rhs_2d_tensorial(mapped, ux, uy, alpha, beta)
        pairs = {
            "node_values": (induced.node_values, dmapped.node_values),
            "x_edge_averages": (induced.x_edge, dmapped.x_edge),
            "y_edge_averages": (induced.y_edge, dmapped.y_edge),
            "cell_averages": (induced.cell_moments, dmapped.cell_moments),
        }
    elif s.variant == "classical_midpoint":
        if s.K != 1:
            raise ValueError("the classical midpoint variant is K = 1 only")
        if s.flux != "upwind" or ux < 0 or uy < 0:
            raise ValueError("the classical midpoint comparison runs with "
                             "the upwind flux and nonnegative speeds")
        classical = _tensorial_to_classical(mapped)
        dclassical = af.af_rhs_2d_classical(classical, ux, uy)
        dn = dclassical.node_values
        simpson_x = simpson_edge_average(dn, dclassical.x_edge[..., 0],
                                         np.roll(dn, -1, axis=1))
        simpson_y = simpson_edge_average(dn, dclassical.y_edge[..., 0],
                                         np.roll(dn, -1, axis=0))
        pairs = {
            "node_values": (induced.node_values, dn),
            "x_edge_averages": (induced.x_edge[..., 0], simpson_x),
            "y_edge_averages": (induced.y_edge[..., 0], simpson_y),
            "cell_averages": (induced.cell_moments[..., 0, 0],
                              dclassical.cell_moments[..., 0, 0]),
        }
        metadata["note"] = "midpoint updates Simpson-combined per edge"
    else:
        raise ValueError(f"unknown 2-d variant {s.variant!r}")

    fams = _family_results(pairs, s.tolerance)
    return EquivalenceReport(setting=vars(s).copy(), tolerance=s.tolerance,
                             families=fams, metadata=metadata)


def _tensorial_to_classical(state: AfState2D) -> AfState2D:
    """Exact conversion: edge midpoints from averages and endpoint nodes."""
    N = state.node_values
    x_mid = simpson_midpoint(state.x_edge[..., 0], N, np.roll(N, -1, axis=1))
    y_mid = simpson_midpoint(state.y_edge[..., 0], N, np.roll(N, -1, axis=0))
    return AfState2D(state.grid, 1, N.copy(), x_mid[..., None],
                     y_mid[..., None], state.cell_moments[:, :, :1, :1].copy(),
                     "classical_midpoint", state.periodic)
