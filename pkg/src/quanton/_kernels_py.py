"""Pure-NumPy implementations of the hot kernels.

This module mirrors the compiled extension ``quanton._kernels`` function by
function; :mod:`quanton._backend` picks whichever is importable. Keep the two
in lockstep: the parity tests compare them directly.

Kernel surface:

* basis maximization -- Nelder-Mead over Hermitian-generator parameters of a
  measurement unitary, maximizing the entropic which-way knowledge.
* roof minimization -- projected gradient descent over isometries that label
  pure-state ensembles of a fixed mixed state, minimizing the ensemble
  average of the reduction-spectrum entropy.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

BACKEND = "python"

LN2 = float(np.log(2.0))
_P_FLOOR = 1e-12       # sub-ensembles below this weight contribute nothing
_W_FLOOR = 1e-18       # eigenvalue floor inside logs


def hermitian_from_params(theta: np.ndarray, d: int) -> np.ndarray:
    """Hermitian d x d matrix from d*d real parameters.

    Layout: first ``d`` entries fill the diagonal; the remaining pairs fill
    the strict upper triangle row-major as (real, imag).
    """
    h = np.zeros((d, d), dtype=np.complex128)
    h[np.diag_indices(d)] = theta[:d]
    k = d
    for i in range(d):
        for j in range(i + 1, d):
            h[i, j] = theta[k] + 1j * theta[k + 1]
            h[j, i] = theta[k] - 1j * theta[k + 1]
            k += 2
    return h


def basis_from_params(theta: np.ndarray, d: int) -> np.ndarray:
    """Orthonormal measurement basis exp(iH) applied to the reference basis.

    Columns are the basis vectors.
    """
    w, v = np.linalg.eigh(hermitian_from_params(np.asarray(theta, float), d))
    return (v * np.exp(1j * w)) @ v.conj().T


def dvn_from_basis(psi_mat: np.ndarray, basis: np.ndarray) -> float:
    """Entropic which-way knowledge of a joint pure state for one basis."""
    d_a = psi_mat.shape[0]
    v = psi_mat @ basis.conj()          # column k holds the unnormalized branch
    q = np.abs(v) ** 2
    p = q.sum(axis=0)
    ql = q[q > _W_FLOOR]
    ent = -(ql * np.log2(ql)).sum()
    pl = p[p > _P_FLOOR]
    ent += (pl * np.log2(pl)).sum()
    return float(np.log2(d_a) - ent)


def dvn_objective(psi_mat: np.ndarray, theta: np.ndarray) -> float:
    return dvn_from_basis(psi_mat, basis_from_params(theta, psi_mat.shape[1]))


def maximize_dvn(psi_mat, starts, maxfev: int, fatol: float, xatol: float):
    """Nelder-Mead maximization from each start; returns per-start results."""
    psi_mat = np.ascontiguousarray(psi_mat, dtype=np.complex128)
    starts = np.atleast_2d(np.asarray(starts, dtype=np.float64))
    vals = np.empty(len(starts))
    thetas = np.empty_like(starts)
    for i, x0 in enumerate(starts):
        res = minimize(
            lambda t: -dvn_objective(psi_mat, t),
            x0,
            method="Nelder-Mead",
            options={
                "maxfev": maxfev,
                "fatol": fatol,
                "xatol": xatol,
                "adaptive": True,
            },
        )
        vals[i] = -res.fun
        thetas[i] = res.x
    return vals, thetas


def _members(cmats: np.ndarray, t_iso: np.ndarray) -> np.ndarray:
    """Unnormalized member matrices M_j = sum_i T[j,i] C_i, shape (m, dA, dB)."""
    return np.tensordot(t_iso, cmats, axes=([1], [0]))


def roof_objective(cmats: np.ndarray, t_iso: np.ndarray) -> float:
    """Ensemble average of the reduction-spectrum entropy, in bits."""
    m = _members(cmats, t_iso)
    a = m @ np.conj(np.swapaxes(m, 1, 2))
    w = np.linalg.eigvalsh(a)
    p = np.trace(a, axis1=1, axis2=2).real
    total = 0.0
    for j in range(a.shape[0]):
        if p[j] <= _P_FLOOR:
            continue
        wj = w[j][w[j] > _W_FLOOR]
        total += (-(wj * np.log(wj)).sum() + p[j] * np.log(p[j])) / LN2
    return float(total)


def _roof_value_grad(cmats: np.ndarray, t_iso: np.ndarray):
    m = _members(cmats, t_iso)
    a = m @ np.conj(np.swapaxes(m, 1, 2))
    w, v = np.linalg.eigh(a)
    p = np.trace(a, axis1=1, axis2=2).real
    pc = np.maximum(p, _W_FLOOR)
    wc = np.maximum(w, _W_FLOOR * pc[:, None])
    val = float(np.sum(-wc * np.log(wc) + w * np.log(pc)[:, None]) / LN2)
    # dF/dM*_j = -log(A_j / p_j) M_j / ln 2, evaluated in the eigenbasis
    g = -(np.log(wc) - np.log(pc)[:, None]) / LN2
    grad_m = (v * g[:, None, :]) @ np.conj(np.swapaxes(v, 1, 2)) @ m
    euclid = np.einsum("jab,iab->ji", grad_m, cmats.conj())
    return val, euclid


def _polar(x: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(x, full_matrices=False)
    return u @ vh


def roof_minimize(cmats, starts, maxiter: int, gtol: float):
    """Projected gradient descent over isometries, one run per start.

    Returns per-start (value, isometry, iterations, converged).
    """
    cmats = np.ascontiguousarray(cmats, dtype=np.complex128)
    starts = np.asarray(starts, dtype=np.complex128)
    if starts.ndim == 2:
        starts = starts[None]
    n = len(starts)
    vals = np.empty(n)
    isos = np.empty_like(starts)
    iters = np.zeros(n, dtype=np.int64)
    conv = np.zeros(n, dtype=bool)
    for s in range(n):
        t = _polar(starts[s])
        f, e = _roof_value_grad(cmats, t)
        eta = 0.25
        it = 0
        stall = 0
        while it < maxiter:
            it += 1
            sym = t.conj().T @ e
            r = e - t @ (0.5 * (sym + sym.conj().T))
            rnorm2 = float(np.sum(np.abs(r) ** 2))
            if rnorm2 <= gtol * gtol:
                conv[s] = True
                break
            accepted = False
            while eta > 1e-14:
                t_new = _polar(t - eta * r)
                f_new, e_new = _roof_value_grad(cmats, t_new)
                if f_new <= f - 1e-4 * eta * rnorm2:
                    accepted = True
                    break
                eta *= 0.5
            if not accepted:
                conv[s] = True     # no descent direction left at float precision
                break
            stall = stall + 1 if f - f_new <= 1e-14 * (1.0 + abs(f)) else 0
            t, f, e = t_new, f_new, e_new
            if stall >= 5:
                conv[s] = True     # progress exhausted at float precision
                break
            eta = min(eta * 1.5, 4.0)
        vals[s] = f
        isos[s] = t
        iters[s] = it
    return vals, isos, iters, conv
