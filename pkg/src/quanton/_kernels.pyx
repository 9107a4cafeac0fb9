# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels.

Mirrors ``quanton._kernels_py`` function by function; keep the two in
lockstep. Everything lives in C: a cyclic-Jacobi eigensolver for small
complex Hermitian matrices, a Nelder-Mead driver for the measurement-basis
search, and projected gradient descent on the isometry manifold for the
convex-roof search.
"""

import numpy as np

cimport cython
from libc.math cimport cos, exp, fabs, log, log2, sin, sqrt
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy, memset

BACKEND = "compiled"

cdef double LN2 = 0.6931471805599453
cdef double P_FLOOR = 1e-12
cdef double W_FLOOR = 1e-18


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigensolver for complex Hermitian matrices.
# ---------------------------------------------------------------------------

cdef void _heig(double complex* a, double* w, double complex* v, int n,
                bint vectors) noexcept nogil:
    """Eigenvalues (ascending) and optionally eigenvectors of a Hermitian
    matrix; ``a`` (row-major, n x n) is destroyed."""
    cdef int p, q, i, sweep
    cdef double off, scale, alpha, gamma, absb, tau, t, c, s
    cdef double complex beta, phase, zp, zq, jpq, jqq

    if vectors:
        memset(v, 0, n * n * sizeof(double complex))
        for i in range(n):
            v[i * n + i] = 1.0

    if n == 1:
        w[0] = a[0].real
        return

    scale = 0.0
    for i in range(n * n):
        scale += a[i].real * a[i].real + a[i].imag * a[i].imag
    scale = sqrt(scale)
    if scale == 0.0:
        for i in range(n):
            w[i] = 0.0
        return

    for sweep in range(60):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                beta = a[p * n + q]
                off += beta.real * beta.real + beta.imag * beta.imag
        if off <= 1e-30 * scale * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                beta = a[p * n + q]
                absb = sqrt(beta.real * beta.real + beta.imag * beta.imag)
                if absb <= 1e-18 * scale:
                    continue
                alpha = a[p * n + p].real
                gamma = a[q * n + q].real
                phase = beta.conjugate() / absb
                tau = (gamma - alpha) / (2.0 * absb)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                # J = [[c, s], [-phase*s, phase*c]] acts on columns (p, q).
                jpq = -phase * s
                jqq = phase * c
                for i in range(n):          # rows: A <- J^H A
                    zp = a[p * n + i]
                    zq = a[q * n + i]
                    a[p * n + i] = c * zp + jpq.conjugate() * zq
                    a[q * n + i] = s * zp + jqq.conjugate() * zq
                for i in range(n):          # columns: A <- A J
                    zp = a[i * n + p]
                    zq = a[i * n + q]
                    a[i * n + p] = c * zp + jpq * zq
                    a[i * n + q] = s * zp + jqq * zq
                if vectors:
                    for i in range(n):
                        zp = v[i * n + p]
                        zq = v[i * n + q]
                        v[i * n + p] = c * zp + jpq * zq
                        v[i * n + q] = s * zp + jqq * zq

    for i in range(n):
        w[i] = a[i * n + i].real

    # Insertion sort ascending, permuting eigenvector columns along.
    cdef int j, k
    cdef double wkey
    for i in range(1, n):
        wkey = w[i]
        j = i - 1
        while j >= 0 and w[j] > wkey:
            j -= 1
        j += 1
        if j != i:
            for k in range(i, j, -1):
                w[k] = w[k - 1]
            w[j] = wkey
            if vectors:
                for p in range(n):
                    zp = v[p * n + i]
                    for k in range(i, j, -1):
                        v[p * n + k] = v[p * n + k - 1]
                    v[p * n + j] = zp


def hermitian_eigvalsh(m):
    """Ascending eigenvalues via the Jacobi kernel (parity-test hook)."""
    cdef double complex[:, ::1] a = np.array(m, dtype=np.complex128, order="C")
    cdef int n = a.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] w = out
    cdef double complex* buf = <double complex*> malloc(n * n * sizeof(double complex))
    memcpy(buf, &a[0, 0], n * n * sizeof(double complex))
    _heig(buf, &w[0], NULL, n, 0)
    free(buf)
    return out


# ---------------------------------------------------------------------------
# Measurement-basis parametrization and the which-way objective.
# ---------------------------------------------------------------------------

cdef void _build_hermitian(const double* theta, double complex* h, int d) noexcept nogil:
    cdef int i, j, k
    for i in range(d * d):
        h[i] = 0.0
    for i in range(d):
        h[i * d + i] = theta[i]
    k = d
    for i in range(d):
        for j in range(i + 1, d):
            h[i * d + j] = theta[k] + 1j * theta[k + 1]
            h[j * d + i] = theta[k] - 1j * theta[k + 1]
            k += 2


cdef void _basis_unitary(const double* theta, double complex* u, int d,
                         double complex* scratch, double* wbuf) noexcept nogil:
    """u <- exp(i H(theta)): columns are the measurement vectors."""
    cdef double complex* h = scratch
    cdef double complex* v = scratch + d * d
    cdef double complex* pv = scratch + 2 * d * d
    cdef int i, j, k
    cdef double complex acc, ph
    _build_hermitian(theta, h, d)
    _heig(h, wbuf, v, d, 1)
    for j in range(d):
        ph = cos(wbuf[j]) + 1j * sin(wbuf[j])
        for i in range(d):
            pv[i * d + j] = v[i * d + j] * ph
    for i in range(d):
        for j in range(d):
            acc = 0.0
            for k in range(d):
                acc += pv[i * d + k] * v[j * d + k].conjugate()
            u[i * d + j] = acc


cdef double _dvn_eval(const double complex* psi, const double* theta,
                      int da, int db, double complex* scratch,
                      double* wbuf) noexcept nogil:
    """Entropic which-way knowledge for the basis generated by theta."""
    cdef double complex* u = scratch + 3 * db * db
    cdef int i, j, k
    cdef double complex z
    cdef double q, p, ent
    _basis_unitary(theta, u, db, scratch, wbuf)
    ent = 0.0
    for k in range(db):
        p = 0.0
        for i in range(da):
            z = 0.0
            for j in range(db):
                z += psi[i * db + j] * u[j * db + k].conjugate()
            q = z.real * z.real + z.imag * z.imag
            p += q
            if q > W_FLOOR:
                ent -= q * log2(q)
        if p > P_FLOOR:
            ent += p * log2(p)
    return log2(<double> da) - ent


def basis_from_params(theta, int d):
    """Orthonormal measurement basis exp(iH) (columns are the vectors)."""
    cdef double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    out = np.empty((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] u = out
    cdef double complex* scratch = <double complex*> malloc(3 * d * d * sizeof(double complex))
    cdef double* wbuf = <double*> malloc(d * sizeof(double))
    _basis_unitary(&th[0], &u[0, 0], d, scratch, wbuf)
    free(scratch)
    free(wbuf)
    return out


def dvn_objective(psi_mat, theta):
    cdef double complex[:, ::1] psi = np.ascontiguousarray(psi_mat, dtype=np.complex128)
    cdef double[::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef int da = psi.shape[0], db = psi.shape[1]
    cdef double complex* scratch = <double complex*> malloc(4 * db * db * sizeof(double complex))
    cdef double* wbuf = <double*> malloc(db * sizeof(double))
    cdef double val = _dvn_eval(&psi[0, 0], &th[0], da, db, scratch, wbuf)
    free(scratch)
    free(wbuf)
    return val


# ---------------------------------------------------------------------------
# Nelder-Mead driver (adaptive coefficients, scipy-style initial simplex).
# ---------------------------------------------------------------------------

cdef double _nm_dvn(const double complex* psi, int da, int db, double* x0,
                    int n, int maxfev, double fatol, double xatol,
                    double* xbest, double complex* scratch,
                    double* wbuf, double* work) noexcept nogil:
    """Minimizes -D over theta; returns best -D and writes the best point."""
    cdef double* simplex = work                       # (n+1) * n
    cdef double* fval = work + (n + 1) * n            # n+1
    cdef int* order = <int*> malloc((n + 1) * sizeof(int))
    cdef double* centroid = fval + (n + 1)            # n
    cdef double* xr = centroid + n                    # n
    cdef double* xe = xr + n                          # n
    cdef int i, j, k, nfev, worst, tmp
    cdef double rho_c = 1.0
    cdef double chi = 1.0 + 2.0 / n
    cdef double gpsi = 0.75 - 1.0 / (2.0 * n)
    cdef double sig = 1.0 - 1.0 / n
    cdef double fr, fe, fspread, xspread, d1

    for i in range(n):
        simplex[i] = x0[i]
    for k in range(n):
        for i in range(n):
            simplex[(k + 1) * n + i] = x0[i]
        if x0[k] != 0.0:
            simplex[(k + 1) * n + k] = 1.05 * x0[k]
        else:
            simplex[(k + 1) * n + k] = 0.00025

    nfev = 0
    for k in range(n + 1):
        fval[k] = -_dvn_eval(psi, simplex + k * n, da, db, scratch, wbuf)
        nfev += 1
        order[k] = k

    while nfev < maxfev:
        # insertion sort of the index array by objective value
        for i in range(1, n + 1):
            tmp = order[i]
            j = i - 1
            while j >= 0 and fval[order[j]] > fval[tmp]:
                order[j + 1] = order[j]
                j -= 1
            order[j + 1] = tmp

        fspread = fval[order[n]] - fval[order[0]]
        xspread = 0.0
        for k in range(1, n + 1):
            for i in range(n):
                d1 = fabs(simplex[order[k] * n + i] - simplex[order[0] * n + i])
                if d1 > xspread:
                    xspread = d1
        if fspread <= fatol and xspread <= xatol:
            break

        worst = order[n]
        for i in range(n):
            centroid[i] = 0.0
            for k in range(n):
                centroid[i] += simplex[order[k] * n + i]
            centroid[i] /= n

        for i in range(n):
            xr[i] = centroid[i] + rho_c * (centroid[i] - simplex[worst * n + i])
        fr = -_dvn_eval(psi, xr, da, db, scratch, wbuf)
        nfev += 1

        if fr < fval[order[0]]:
            for i in range(n):
                xe[i] = centroid[i] + rho_c * chi * (centroid[i] - simplex[worst * n + i])
            fe = -_dvn_eval(psi, xe, da, db, scratch, wbuf)
            nfev += 1
            if fe < fr:
                for i in range(n):
                    simplex[worst * n + i] = xe[i]
                fval[worst] = fe
            else:
                for i in range(n):
                    simplex[worst * n + i] = xr[i]
                fval[worst] = fr
        elif fr < fval[order[n - 1]]:
            for i in range(n):
                simplex[worst * n + i] = xr[i]
            fval[worst] = fr
        else:
            if fr < fval[worst]:
                # outside contraction
                for i in range(n):
                    xe[i] = centroid[i] + gpsi * rho_c * (centroid[i] - simplex[worst * n + i])
                fe = -_dvn_eval(psi, xe, da, db, scratch, wbuf)
                nfev += 1
                if fe <= fr:
                    for i in range(n):
                        simplex[worst * n + i] = xe[i]
                    fval[worst] = fe
                else:
                    fe = fr + 1.0   # force shrink
            else:
                # inside contraction
                for i in range(n):
                    xe[i] = centroid[i] - gpsi * (centroid[i] - simplex[worst * n + i])
                fe = -_dvn_eval(psi, xe, da, db, scratch, wbuf)
                nfev += 1
                if fe < fval[worst]:
                    for i in range(n):
                        simplex[worst * n + i] = xe[i]
                    fval[worst] = fe
                else:
                    fe = fval[worst] + 1.0   # force shrink
            if fe > fr and fe > fval[worst]:
                # shrink toward the best vertex
                for k in range(1, n + 1):
                    for i in range(n):
                        simplex[order[k] * n + i] = (
                            simplex[order[0] * n + i]
                            + sig * (simplex[order[k] * n + i] - simplex[order[0] * n + i])
                        )
                    fval[order[k]] = -_dvn_eval(psi, simplex + order[k] * n, da, db,
                                                scratch, wbuf)
                    nfev += 1

    # final best
    worst = order[0]
    for k in range(n + 1):
        if fval[k] < fval[worst]:
            worst = k
    for i in range(n):
        xbest[i] = simplex[worst * n + i]
    free(order)
    return fval[worst]


def maximize_dvn(psi_mat, starts, int maxfev, double fatol, double xatol):
    """Nelder-Mead maximization from each start; returns per-start results."""
    cdef double complex[:, ::1] psi = np.ascontiguousarray(psi_mat, dtype=np.complex128)
    cdef double[:, ::1] st = np.atleast_2d(np.ascontiguousarray(starts, dtype=np.float64))
    cdef int da = psi.shape[0], db = psi.shape[1]
    cdef int n = st.shape[1], nstarts = st.shape[0]
    vals_arr = np.empty(nstarts, dtype=np.float64)
    thetas_arr = np.empty((nstarts, n), dtype=np.float64)
    cdef double[::1] vals = vals_arr
    cdef double[:, ::1] thetas = thetas_arr
    cdef double complex* scratch = <double complex*> malloc(4 * db * db * sizeof(double complex))
    cdef double* wbuf = <double*> malloc(db * sizeof(double))
    cdef double* work = <double*> malloc(((n + 1) * n + (n + 1) + 3 * n) * sizeof(double))
    cdef double* x0 = <double*> malloc(n * sizeof(double))
    cdef int s, i
    with nogil:
        for s in range(nstarts):
            for i in range(n):
                x0[i] = st[s, i]
            vals[s] = -_nm_dvn(&psi[0, 0], da, db, x0, n, maxfev, fatol, xatol,
                               &thetas[s, 0], scratch, wbuf, work)
    free(scratch)
    free(wbuf)
    free(work)
    free(x0)
    return vals_arr, thetas_arr


# ---------------------------------------------------------------------------
# Convex-roof search: projected gradient descent over isometries.
# ---------------------------------------------------------------------------

cdef void _polar_c(double complex* x, double complex* t, int m, int r,
                   double complex* scratch, double* wbuf) noexcept nogil:
    """t <- x (x^H x)^(-1/2) via the Jacobi eigensolver on the r x r Gram."""
    cdef double complex* gram = scratch
    cdef double complex* v = scratch + r * r
    cdef double complex* isq = scratch + 2 * r * r
    cdef int i, j, k
    cdef double complex acc
    cdef double mu
    for i in range(r):
        for j in range(r):
            acc = 0.0
            for k in range(m):
                acc += x[k * r + i].conjugate() * x[k * r + j]
            gram[i * r + j] = acc
    _heig(gram, wbuf, v, r, 1)
    for i in range(r):
        for j in range(r):
            acc = 0.0
            for k in range(r):
                mu = wbuf[k]
                if mu < 1e-30:
                    mu = 1e-30
                acc += v[i * r + k] * v[j * r + k].conjugate() / sqrt(mu)
            isq[i * r + j] = acc
    for i in range(m):
        for j in range(r):
            acc = 0.0
            for k in range(r):
                acc += x[i * r + k] * isq[k * r + j]
            t[i * r + j] = acc


cdef double _roof_val_grad(const double complex* cm, const double complex* t,
                           double complex* euclid, int m, int r, int da, int db,
                           double complex* scratch, double* wbuf,
                           bint want_grad) noexcept nogil:
    """Objective (bits) and Euclidean gradient wrt the isometry entries."""
    cdef double complex* mem = scratch                     # da*db
    cdef double complex* amat = scratch + da * db          # da*da
    cdef double complex* v = amat + da * da                # da*da
    cdef double complex* gm = v + da * da                  # da*da
    cdef double complex* gmem = gm + da * da               # da*db
    cdef int j, i, a, b, k, l
    cdef double complex acc
    cdef double p, pc, wc, val, g
    val = 0.0
    for j in range(m):
        for a in range(da * db):
            acc = 0.0
            for i in range(r):
                acc += t[j * r + i] * cm[i * da * db + a]
            mem[a] = acc
        p = 0.0
        for a in range(da):
            for b in range(da):
                acc = 0.0
                for k in range(db):
                    acc += mem[a * db + k] * mem[b * db + k].conjugate()
                amat[a * da + b] = acc
            p += amat[a * da + a].real
        _heig(amat, wbuf, v, da, want_grad)
        pc = p if p > W_FLOOR else W_FLOOR
        for k in range(da):
            wc = wbuf[k]
            if wc < W_FLOOR * pc:
                wc = W_FLOOR * pc
            val += (-wc * log(wc) + wbuf[k] * log(pc)) / LN2
        if want_grad:
            # gm <- V diag(-log(wc/pc)/ln2) V^H ; gmem <- gm @ mem
            for a in range(da):
                for b in range(da):
                    acc = 0.0
                    for k in range(da):
                        wc = wbuf[k]
                        if wc < W_FLOOR * pc:
                            wc = W_FLOOR * pc
                        g = -(log(wc) - log(pc)) / LN2
                        acc += v[a * da + k] * g * v[b * da + k].conjugate()
                    gm[a * da + b] = acc
            for a in range(da):
                for k in range(db):
                    acc = 0.0
                    for b in range(da):
                        acc += gm[a * da + b] * mem[b * db + k]
                    gmem[a * db + k] = acc
            for i in range(r):
                acc = 0.0
                for a in range(da * db):
                    acc += cm[i * da * db + a].conjugate() * gmem[a]
                euclid[j * r + i] = acc
    return val


def roof_objective(cmats, t_iso):
    cdef double complex[:, :, ::1] cm = np.ascontiguousarray(cmats, dtype=np.complex128)
    cdef double complex[:, ::1] t = np.ascontiguousarray(t_iso, dtype=np.complex128)
    cdef int r = cm.shape[0], da = cm.shape[1], db = cm.shape[2], m = t.shape[0]
    cdef double complex* scratch = <double complex*> malloc(
        (2 * da * db + 3 * da * da) * sizeof(double complex))
    cdef double* wbuf = <double*> malloc(da * sizeof(double))
    cdef double val = _roof_val_grad(&cm[0, 0, 0], &t[0, 0], NULL, m, r, da, db,
                                     scratch, wbuf, 0)
    free(scratch)
    free(wbuf)
    return val


def roof_minimize(cmats, starts, int maxiter, double gtol):
    """Projected gradient descent over isometries, one run per start."""
    cdef double complex[:, :, ::1] cm = np.ascontiguousarray(cmats, dtype=np.complex128)
    st_arr = np.asarray(starts, dtype=np.complex128)
    if st_arr.ndim == 2:
        st_arr = st_arr[None]
    st_arr = np.ascontiguousarray(st_arr)
    cdef double complex[:, :, ::1] st = st_arr
    cdef int nstarts = st.shape[0], m = st.shape[1], r = st.shape[2]
    cdef int da = cm.shape[1], db = cm.shape[2]

    vals_arr = np.empty(nstarts, dtype=np.float64)
    isos_arr = np.empty((nstarts, m, r), dtype=np.complex128)
    iters_arr = np.zeros(nstarts, dtype=np.int64)
    conv_arr = np.zeros(nstarts, dtype=np.uint8)
    cdef double[::1] vals = vals_arr
    cdef double complex[:, :, ::1] isos = isos_arr
    cdef long[::1] iters = iters_arr
    cdef unsigned char[::1] conv = conv_arr

    cdef double complex* scratch = <double complex*> malloc(
        (2 * da * db + 3 * da * da + 3 * r * r) * sizeof(double complex))
    cdef double complex* pscratch = scratch + 2 * da * db + 3 * da * da
    cdef double* wbuf = <double*> malloc((da + r) * sizeof(double))
    cdef double* wbuf_r = wbuf + da
    cdef int sz = m * r
    cdef double complex* t = <double complex*> malloc(sz * sizeof(double complex))
    cdef double complex* tnew = <double complex*> malloc(sz * sizeof(double complex))
    cdef double complex* xtmp = <double complex*> malloc(sz * sizeof(double complex))
    cdef double complex* e = <double complex*> malloc(sz * sizeof(double complex))
    cdef double complex* enew = <double complex*> malloc(sz * sizeof(double complex))
    cdef double complex* rgrad = <double complex*> malloc(sz * sizeof(double complex))
    cdef double complex* sym = <double complex*> malloc(r * r * sizeof(double complex))

    cdef int s, it, i, j, k, stall
    cdef double f, fnew, eta, rnorm2
    cdef double complex acc
    cdef bint accepted

    with nogil:
        for s in range(nstarts):
            _polar_c(&st[s, 0, 0], t, m, r, pscratch, wbuf_r)
            f = _roof_val_grad(&cm[0, 0, 0], t, e, m, r, da, db, scratch, wbuf, 1)
            eta = 0.25
            it = 0
            stall = 0
            while it < maxiter:
                it += 1
                # sym <- herm(T^H E); rgrad <- E - T sym
                for i in range(r):
                    for j in range(r):
                        acc = 0.0
                        for k in range(m):
                            acc += t[k * r + i].conjugate() * e[k * r + j]
                        sym[i * r + j] = acc
                for i in range(r):
                    for j in range(i, r):
                        acc = 0.5 * (sym[i * r + j] + sym[j * r + i].conjugate())
                        sym[i * r + j] = acc
                        sym[j * r + i] = acc.conjugate()
                rnorm2 = 0.0
                for k in range(m):
                    for j in range(r):
                        acc = e[k * r + j]
                        for i in range(r):
                            acc -= t[k * r + i] * sym[i * r + j]
                        rgrad[k * r + j] = acc
                        rnorm2 += acc.real * acc.real + acc.imag * acc.imag
                if rnorm2 <= gtol * gtol:
                    conv[s] = 1
                    break
                accepted = 0
                while eta > 1e-14:
                    for k in range(sz):
                        xtmp[k] = t[k] - eta * rgrad[k]
                    _polar_c(xtmp, tnew, m, r, pscratch, wbuf_r)
                    fnew = _roof_val_grad(&cm[0, 0, 0], tnew, enew, m, r, da, db,
                                          scratch, wbuf, 1)
                    if fnew <= f - 1e-4 * eta * rnorm2:
                        accepted = 1
                        break
                    eta *= 0.5
                if not accepted:
                    conv[s] = 1
                    break
                if f - fnew <= 1e-14 * (1.0 + fabs(f)):
                    stall += 1
                else:
                    stall = 0
                memcpy(t, tnew, sz * sizeof(double complex))
                memcpy(e, enew, sz * sizeof(double complex))
                f = fnew
                if stall >= 5:
                    conv[s] = 1    # progress exhausted at float precision
                    break
                eta = eta * 1.5
                if eta > 4.0:
                    eta = 4.0
            vals[s] = f
            iters[s] = it
            memcpy(&isos[s, 0, 0], t, sz * sizeof(double complex))

    free(scratch)
    free(wbuf)
    free(t)
    free(tnew)
    free(xtmp)
    free(e)
    free(enew)
    free(rgrad)
    free(sym)
    return vals_arr, isos_arr, iters_arr, conv_arr.astype(bool)
