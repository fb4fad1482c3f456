"""Compiled 2-d right-hand-side kernels for the timing-sensitive paths.

The numpy implementations in :mod:`afdg.af` and :mod:`afdg.dg` stay the
reference; these loops compute the same updates cell by cell so the
per-step cost scales linearly with the cell count down to very small
grids (the array implementations are dominated by per-op overhead
there, which distorts wall-clock scaling studies).  Parity with the
reference path is asserted in the test suite; everything is
single-threaded and deterministic.
"""

from __future__ import annotations

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:                                   # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        return wrap if not (args and callable(args[0])) else args[0]


@njit(cache=True)
def af_rhs_2d_kernel(N, Ex, Ey, Mo, d_plus, d_minus, mom_w,
                     ux, uy, ap, am, bp, bm, dx, dy,
                     dN, dEx, dEy, dMo):
    nx, ny = N.shape
    K = Ex.shape[2]

    for a in range(nx):
        al = (a - 1) % nx
        ar = (a + 1) % nx
        for b in range(ny):
            bl = (b - 1) % ny
            br = (b + 1) % ny

            acc = 0.0
            if ux != 0.0:
                # one-sided x-derivatives of the horizontal-interface trace
                dl = d_plus[0] * N[al, b] + d_plus[K + 1] * N[a, b]
                dr = d_minus[0] * N[a, b] + d_minus[K + 1] * N[ar, b]
                for k in range(K):
                    dl += d_plus[1 + k] * Ey[al, b, k]
                    dr += d_minus[1 + k] * Ey[a, b, k]
                acc -= ux * (ap * dl + am * dr) / dx
            if uy != 0.0:
                db = d_plus[0] * N[a, bl] + d_plus[K + 1] * N[a, b]
                dt = d_minus[0] * N[a, b] + d_minus[K + 1] * N[a, br]
                for k in range(K):
                    db += d_plus[1 + k] * Ex[a, bl, k]
                    dt += d_minus[1 + k] * Ex[a, b, k]
                acc -= uy * (bp * db + bm * dt) / dy
            dN[a, b] = acc

            for k in range(K):
                acc = 0.0
                if ux != 0.0:
                    dl = d_plus[0] * Ex[al, b, k] + d_plus[K + 1] * Ex[a, b, k]
                    dr = d_minus[0] * Ex[a, b, k] + d_minus[K + 1] * Ex[ar, b, k]
                    for m in range(K):
                        dl += d_plus[1 + m] * Mo[al, b, m, k]
                        dr += d_minus[1 + m] * Mo[a, b, m, k]
                    acc -= ux * (ap * dl + am * dr) / dx
                if uy != 0.0:
                    s = mom_w[k, 0] * N[a, b] + mom_w[k, K + 1] * N[a, br]
                    for m in range(K):
                        s += mom_w[k, 1 + m] * Ex[a, b, m]
                    acc -= uy * s / dy
                dEx[a, b, k] = acc

                acc = 0.0
                if uy != 0.0:
                    db = d_plus[0] * Ey[a, bl, k] + d_plus[K + 1] * Ey[a, b, k]
                    dt = d_minus[0] * Ey[a, b, k] + d_minus[K + 1] * Ey[a, br, k]
                    for m in range(K):
                        db += d_plus[1 + m] * Mo[a, bl, k, m]
                        dt += d_minus[1 + m] * Mo[a, b, k, m]
                    acc -= uy * (bp * db + bm * dt) / dy
                if ux != 0.0:
                    s = mom_w[k, 0] * N[a, b] + mom_w[k, K + 1] * N[ar, b]
                    for m in range(K):
                        s += mom_w[k, 1 + m] * Ey[a, b, m]
                    acc -= ux * s / dx
                dEy[a, b, k] = acc

            for m in range(K):
                for n in range(K):
                    acc = 0.0
                    if ux != 0.0:
                        s = mom_w[m, 0] * Ex[a, b, n] \
                            + mom_w[m, K + 1] * Ex[ar, b, n]
                        for p in range(K):
                            s += mom_w[m, 1 + p] * Mo[a, b, p, n]
                        acc -= ux * s / dx
                    if uy != 0.0:
                        s = mom_w[n, 0] * Ey[a, b, m] \
                            + mom_w[n, K + 1] * Ey[a, br, m]
                        for p in range(K):
                            s += mom_w[n, 1 + p] * Mo[a, b, m, p]
                        acc -= uy * s / dy
                    dMo[a, b, m, n] = acc


@njit(cache=True)
def dg_rhs_2d_kernel(c, stiff, mass, vr, vl, ux, uy, ap, am, bp, bm,
                     dx, dy, qhx, qhy, dc):
    nx, ny, nm, _ = c.shape

    # weighted interface traces (qhat / u), tangential modal coefficients
    for i in range(nx):
        il = (i - 1) % nx
        for j in range(ny):
            for n in range(nm):
                sl = 0.0
                sr = 0.0
                for m in range(nm):
                    sl += vr[m] * c[il, j, m, n]
                    sr += vl[m] * c[i, j, m, n]
                qhx[i, j, n] = ap * sl + am * sr
    for i in range(nx):
        for j in range(ny):
            jl = (j - 1) % ny
            for m in range(nm):
                sb = 0.0
                st = 0.0
                for n in range(nm):
                    sb += vr[n] * c[i, jl, m, n]
                    st += vl[n] * c[i, j, m, n]
                qhy[i, j, m] = bp * sb + bm * st

    for i in range(nx):
        ir = (i + 1) % nx
        for j in range(ny):
            jr = (j + 1) % ny
            for a in range(nm):
                for b in range(nm):
                    acc = 0.0
                    if ux != 0.0:
                        s = 0.0
                        for m in range(nm):
                            s += stiff[a, m] * c[i, j, m, b]
                        s -= vr[a] * qhx[ir, j, b]
                        s += vl[a] * qhx[i, j, b]
                        acc += ux * s / (dx * mass[a])
                    if uy != 0.0:
                        s = 0.0
                        for n in range(nm):
                            s += stiff[b, n] * c[i, j, a, n]
                        s -= vr[b] * qhy[i, jr, a]
                        s += vl[b] * qhy[i, j, a]
                        acc += uy * s / (dy * mass[b])
                    dc[i, j, a, b] = acc
