"""Semi-discrete Discontinuous Galerkin right-hand sides.

The 1-d assembly exists in two permanently maintained forms that must
agree to roundoff:

  * ``weak``       volume term against test-function derivatives plus
                   interface flux terms, divided by the diagonal mass;
  * ``augmented``  the flux-corrected reconstruction path: the per-cell
                   polynomial is corrected by scaled Radau polynomials so
                   that the whole update becomes the derivative of a
                   single continuous field.  This is the form the
                   equivalence verifier instruments.

The 2-d assembly is tensor-modal for linear advection; closed-form
stiffness/trace coefficients make every integral exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels, poly
from .mesh import AF_N_INT, DG_N_INT, DgState1D, DgState2D
from .problems import NumericalFluxSpec, ProblemSpec, numerical_flux

__all__ = [
    "DgBasis", "dg_basis", "dg_rhs_1d", "dg_rhs_2d",
    "traces", "trace_values_1d",
    "RieszEndpointFunctionals", "riesz_endpoint_functionals",
    "quad_rule_for_order",
]


@dataclass(frozen=True)
class DgBasis:
    """Endpoint-normalized Legendre modes with precomputed couplings."""

    K: int
    phi: tuple                 # PolySpec, degree n
    mass: np.ndarray           # diagonal entries of the mass matrix
    stiffness: np.ndarray      # stiffness[m, n] = integral phi_m' phi_n
    value_right: np.ndarray    # phi_n(+1/2) = 1
    value_left: np.ndarray     # phi_n(-1/2) = (-1)^n


@lru_cache(maxsize=None)
def dg_basis(K: int) -> DgBasis:
    phi = tuple(poly.legendre(n) for n in range(K + 1))
    mass = np.array([(p * p).cell_integral() for p in phi])
    stiff = np.array([[(pm.derivative() * pn).cell_integral() for pn in phi]
                      for pm in phi])
    vr = np.array([p(0.5) for p in phi])
    vl = np.array([p(-0.5) for p in phi])
    return DgBasis(K, phi, mass, stiff, vr, vl)


def quad_rule_for_order(family: str, order: int) -> poly.QuadratureRule:
    """Gauss rule reaching the catalog's integration order for a method."""
    table = DG_N_INT if family == "dg" else AF_N_INT
    n_int = table[order]
    return poly.gauss_legendre_rule((n_int + 2) // 2)


def trace_values_1d(state: DgState1D) -> tuple[np.ndarray, np.ndarray]:
    """(q_i^-, q_i^+) for every cell; exact modal evaluation at the faces."""
    basis = dg_basis(state.K)
    q_minus = np.tensordot(state.coeffs, basis.value_left, axes=(1, 0))
    q_plus = np.tensordot(state.coeffs, basis.value_right, axes=(1, 0))
    return q_minus, q_plus


def traces(state, cell):
    """Boundary values of one cell's polynomial.

    1-d states return the pair (q^-, q^+); 2-d states return the four
    edge-trace polynomials in the tangential reference coordinate as
    modal coefficient vectors, keyed 'left', 'right', 'bottom', 'top'.
    """
    if isinstance(state, DgState1D):
        qm, qp = trace_values_1d(state)
        return qm[cell], qp[cell]
    if isinstance(state, DgState2D):
        i, j = cell
        basis = dg_basis(state.K)
        block = state.coeffs[i, j]
        return {
            "left": basis.value_left @ block,
            "right": basis.value_right @ block,
            "bottom": block @ basis.value_left,
            "top": block @ basis.value_right,
        }
    raise TypeError("traces expects a DG state")


def interface_fluxes_1d(state: DgState1D, problem: ProblemSpec,
                        flux: NumericalFluxSpec) -> np.ndarray:
    """fhat at every interface a (between cells a-1 and a, periodic)."""
    if not state.periodic:
        raise NotImplementedError("1-d DG is periodic-only")
    q_minus, q_plus = trace_values_1d(state)
    q_l = np.roll(q_plus, 1, axis=0)     # q_{a-1}^+
    q_r = q_minus                        # q_a^-
    return numerical_flux(flux, problem, q_l, q_r)


def dg_rhs_1d(state: DgState1D, problem: ProblemSpec,
              flux: NumericalFluxSpec, quad: poly.QuadratureRule | None = None,
              assembly: str = "weak") -> DgState1D:
    """Semi-discrete time derivative of the modal coefficients.

    For linear problems the volume term uses the closed-form stiffness
    coefficients; nonlinear fluxes are integrated with the catalog rule
    for the method's order (override with ``quad``).
    """
    basis = dg_basis(state.K)
    dx = state.grid.dx
    fhat = interface_fluxes_1d(state, problem, flux)          # (n, m)
    fhat_r = np.roll(fhat, -1, axis=0)                        # at x_{i+1/2}
    c = state.coeffs

    if assembly == "weak":
        if problem.linear and problem.is_scalar:
            u = problem.advection_speed
            vol = u * np.einsum("mn,inc->imc", basis.stiffness, c)
        elif problem.linear:
            J = problem.jacobian(None)
            vol = np.einsum("mn,ind,cd->imc", basis.stiffness, c, J)
        else:
            rule = quad or quad_rule_for_order("dg", state.K + 1)
            qvals = np.einsum("inc,nq->iqc", c,
                              np.array([p(rule.nodes) for p in basis.phi]))
            fvals = problem.flux(qvals)
            dphi = np.array([p.derivative()(rule.nodes) for p in basis.phi])
            vol = np.einsum("iqc,mq,q->imc", fvals, dphi, rule.weights)
        numer = (vol
                 - np.einsum("m,ic->imc", basis.value_right, fhat_r)
                 + np.einsum("m,ic->imc", basis.value_left, fhat))
        dc = numer / (dx * basis.mass[None, :, None])
        return state.with_arrays([dc])

    if assembly == "augmented":
        aug = augmented_coefficients_1d(state, problem, flux, fhat=fhat)
        daug = _poly_derivative_modal(aug, state.K)           # (n, K+1, m)
        if problem.linear and problem.is_scalar:
            dc = -(problem.advection_speed / dx) * daug
        elif problem.linear:
            J = problem.jacobian(None)
            dc = -(1.0 / dx) * np.einsum("ind,cd->inc", daug, J)
        else:
            raise ValueError("augmented assembly applies to linear problems; "
                             "nonlinear updates go through the flux projection")
        return state.with_arrays([dc])

    raise ValueError(f"unknown assembly {assembly!r}")


def augmented_coefficients_1d(state: DgState1D, problem: ProblemSpec,
                              flux: NumericalFluxSpec,
                              fhat: np.ndarray | None = None) -> np.ndarray:
    """Per-cell monomial coefficients of q_i plus its Radau corrections.

    The corrections (qhat - trace) R at each face make the broken field
    globally continuous; degree rises from K to K+1.
    """
    K = state.K
    basis = dg_basis(K)
    if fhat is None:
        fhat = interface_fluxes_1d(state, problem, flux)
    qhat = interface_states_from_fluxes(fhat, problem)
    q_minus, q_plus = trace_values_1d(state)
    r_l, r_r = poly.radau_pair(K)

    mono = np.zeros((state.grid.n_cells, K + 2, state.n_components))
    for n in range(K + 1):
        mono[:, : n + 1, :] += state.coeffs[:, n, None, :] \
            * basis.phi[n].coefficients[None, :, None]
    corr_r = np.roll(qhat, -1, axis=0) - q_plus     # weight on R_R
    corr_l = qhat - q_minus                          # weight on R_L
    mono += corr_r[:, None, :] * r_r.coefficients[None, :, None]
    mono += corr_l[:, None, :] * r_l.coefficients[None, :, None]
    return mono


def interface_states_from_fluxes(fhat: np.ndarray,
                                 problem: ProblemSpec) -> np.ndarray:
    """Interface state values induced by the numerical flux (fhat / u for
    advection, J^-1 fhat for linear systems, the flux inverse otherwise)."""
    if problem.is_scalar and problem.linear:
        u = problem.advection_speed
        if u == 0:
            return np.zeros_like(fhat)
        return fhat / u
    if problem.linear:
        return problem.flux_inverse(fhat)
    from .problems import invert_flux
    return invert_flux(problem, fhat)


@lru_cache(maxsize=None)
def monomial_to_modal(K: int) -> np.ndarray:
    """Exact change of basis: modal = T @ monomial on P^K (triangular solve)."""
    basis = dg_basis(K)
    P = np.zeros((K + 1, K + 1))
    for n, p in enumerate(basis.phi):
        P[: n + 1, n] = p.coefficients
    return np.linalg.inv(P)


def _poly_derivative_modal(mono: np.ndarray, K: int) -> np.ndarray:
    """d/dxi of per-cell monomial blocks, re-expanded in the modal basis."""
    dmono = mono[:, 1:, :] * np.arange(1, mono.shape[1])[None, :, None]
    return np.einsum("nm,imc->inc", monomial_to_modal(K), dmono)


# ---------------------------------------------------------------------------
# Riesz endpoint functionals


@dataclass(frozen=True)
class RieszEndpointFunctionals:
    """Polynomials v_L, v_R in P^K whose cell-mean pairing evaluates the
    endpoint: (1/dx) integral v_R p dx = p(+dx/2) for every p in P^K."""

    K: int
    v_L: poly.PolySpec
    v_R: poly.PolySpec
    weights_left: np.ndarray    # pairing against modal coefficients
    weights_right: np.ndarray

    def apply_right(self, modal: np.ndarray, axis: int = -1) -> np.ndarray:
        return np.tensordot(modal, self.weights_right, axes=(axis, 0))

    def apply_left(self, modal: np.ndarray, axis: int = -1) -> np.ndarray:
        return np.tensordot(modal, self.weights_left, axes=(axis, 0))


@lru_cache(maxsize=None)
def riesz_endpoint_functionals(K: int) -> RieszEndpointFunctionals:
    if K < 1:
        raise ValueError("Riesz endpoint functionals need K >= 1")
    basis = dg_basis(K)
    v_r = poly.PolySpec(np.zeros(K + 1))
    v_l = poly.PolySpec(np.zeros(K + 1))
    for n in range(K + 1):
        v_r = v_r + basis.phi[n].scaled(basis.value_right[n] / basis.mass[n])
        v_l = v_l + basis.phi[n].scaled(basis.value_left[n] / basis.mass[n])
    w_r = np.array([(v_r * p).cell_integral() for p in basis.phi])
    w_l = np.array([(v_l * p).cell_integral() for p in basis.phi])
    return RieszEndpointFunctionals(K, v_l, v_r, w_l, w_r)


# ---------------------------------------------------------------------------
# 2-d tensor assembly (linear advection)


def interface_traces_2d(state: DgState2D):
    """Modal tangential trace polynomials on each interface.

    Returns (tx_L, tx_R, ty_B, ty_T): tx_L[a, j, n] is the trace of cell
    (a, j) at its own left face, etc.  Periodic wrap pairs face a of cell
    a with face a of cell a-1.
    """
    basis = dg_basis(state.K)
    c = state.coeffs
    tx_minus = np.einsum("ijmn,m->ijn", c, basis.value_left)
    tx_plus = np.einsum("ijmn,m->ijn", c, basis.value_right)
    ty_minus = np.einsum("ijmn,n->ijm", c, basis.value_left)
    ty_plus = np.einsum("ijmn,n->ijm", c, basis.value_right)
    return tx_minus, tx_plus, ty_minus, ty_plus


def qhat_interfaces_2d(state: DgState2D, alpha: tuple[float, float],
                       beta: tuple[float, float]):
    """Weighted interface traces qhat on x- and y-interfaces (periodic)."""
    tx_minus, tx_plus, ty_minus, ty_plus = interface_traces_2d(state)
    ap, am = alpha
    bp, bm = beta
    qhat_x = ap * np.roll(tx_plus, 1, axis=0) + am * tx_minus
    qhat_y = bp * np.roll(ty_plus, 1, axis=1) + bm * ty_minus
    return qhat_x, qhat_y


def dg_rhs_2d(state: DgState2D, ux: float, uy: float,
              flux_x: NumericalFluxSpec, flux_y: NumericalFluxSpec,
              impl: str = "auto") -> DgState2D:
    """Tensor-modal update for 2-d linear advection.

    A zero-speed axis contributes nothing (its flux terms carry the factor
    u).  Nonlinear problems are out of scope here.  ``impl`` selects the
    compiled cell-loop kernel or the vectorized reference path; see the
    AF counterpart.
    """
    if not state.periodic:
        raise NotImplementedError("use the padded driver path for Dirichlet runs")
    basis = dg_basis(state.K)
    dx, dy = state.grid.dx, state.grid.dy
    c = state.coeffs

    if impl not in ("auto", "kernel", "numpy"):
        raise ValueError(f"unknown impl {impl!r}")
    if impl != "numpy":
        if kernels.HAVE_NUMBA:
            alpha = flux_x.advection_weights(ux) if ux != 0 else (1.0, 0.0)
            beta = flux_y.advection_weights(uy) if uy != 0 else (1.0, 0.0)
            nm = state.K + 1
            nx, ny = c.shape[:2]
            dc = np.empty_like(c)
            kernels.dg_rhs_2d_kernel(
                c, basis.stiffness, basis.mass, basis.value_right,
                basis.value_left, float(ux), float(uy),
                alpha[0], alpha[1], beta[0], beta[1], dx, dy,
                np.empty((nx, ny, nm)), np.empty((nx, ny, nm)), dc)
            return state.with_arrays([dc])
        if impl == "kernel":
            raise RuntimeError("numba is not available for the kernel path")

    dc = np.zeros_like(c)

    if ux != 0.0:
        alpha = flux_x.advection_weights(ux)
        qhat_x, _ = qhat_interfaces_2d(state, alpha, (1.0, 0.0))
        qhat_x_right = np.roll(qhat_x, -1, axis=0)
        term = np.einsum("am,ijmn->ijan", basis.stiffness, c)
        term -= np.einsum("a,ijn->ijan", basis.value_right, qhat_x_right)
        term += np.einsum("a,ijn->ijan", basis.value_left, qhat_x)
        dc += (ux / dx) * term / basis.mass[None, None, :, None]

    if uy != 0.0:
        beta = flux_y.advection_weights(uy)
        _, qhat_y = qhat_interfaces_2d(state, (1.0, 0.0), beta)
        qhat_y_top = np.roll(qhat_y, -1, axis=1)
        term = np.einsum("bn,ijmn->ijmb", basis.stiffness, c)
        term -= np.einsum("b,ijm->ijmb", basis.value_right, qhat_y_top)
        term += np.einsum("b,ijm->ijmb", basis.value_left, qhat_y)
        dc += (uy / dy) * term / basis.mass[None, None, None, :]

    return state.with_arrays([dc])
