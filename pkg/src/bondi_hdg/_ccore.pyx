# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Fused reconstruction + weak-form residual (compiled backend).

Same arithmetic as ``operator.rhs_numpy``; see that module for the formulas.
"""
import numpy as np
from libc.math cimport exp, sqrt, fmin, fmax, log
from libc.float cimport DBL_MIN


def rhs(const double[:, ::1] C, const double[::1] nodes, double Ub,
        const double[::1] rec_xi, const double[:, ::1] rec_psi,
        const double[:, ::1] rec_anti, const double[:, ::1] q_origin,
        const double[::1] wr, const double[:, ::1] rec_upper,
        const double[::1] vol_xi, const double[:, ::1] vol_psi,
        const double[:, ::1] vol_dpsi, const double[:, ::1] vol_anti,
        const double[:, ::1] vol_origin, const double[::1] wv,
        const double[:, ::1] vol_upper, const double[:, ::1] vol_lower,
        const double[::1] psiL, const double[::1] psiR,
        double[:, ::1] dC, double[::1] gt_nodes, double[::1] log_g_nodes,
        double[::1] u_left, double[::1] u_right):
    cdef Py_ssize_t N = C.shape[0], K = C.shape[1]
    cdef Py_ssize_t Qr = rec_psi.shape[0], Qv = vol_psi.shape[0]
    cdef Py_ssize_t i, j, l, m
    cdef double log_tiny = log(DBL_MIN)
    cdef int deep = 0
    cdef double a, h, s2h, shh, w_left, z_left, r, uval, wval, tu, acc, qv, t
    cdef double lg, lg_l, lg_r, g_l, g_r, g, z, gt, gtr, flux_l, flux_r, elem

    phi_arr = np.empty((N, Qr))
    integ_arr = np.empty(N)
    w_nodes_arr = np.empty(N + 1)
    grec_arr = np.empty(Qr)
    cdef double[:, ::1] phi = phi_arr
    cdef double[::1] integ = integ_arr
    cdef double[::1] w_nodes = w_nodes_arr
    cdef double[::1] grec = grec_arr

    # pass 1: w sweep, endpoint values, Phi samples
    w_nodes[0] = 0.0
    for i in range(N):
        a = nodes[i]
        h = nodes[i + 1] - a
        s2h = sqrt(2.0 / h)
        shh = sqrt(0.5 * h)
        acc = 0.0
        uval = 0.0
        for m in range(K):
            acc += C[i, m] * psiL[m]
            uval += C[i, m] * psiR[m]
        u_left[i] = s2h * acc
        u_right[i] = s2h * uval
        w_left = w_nodes[i]
        w_nodes[i + 1] = w_left + sqrt(h) * C[i, 0]
        elem = 0.0
        for j in range(Qr):
            if i == 0:
                qv = 0.0
                for m in range(K):
                    qv += q_origin[j, m] * C[0, m]
                phi[i, j] = (4.0 / (h * h)) * (1.0 + rec_xi[j]) * qv * qv
            else:
                r = a + 0.5 * h * (rec_xi[j] + 1.0)
                uval = 0.0
                acc = 0.0
                for m in range(K):
                    uval += C[i, m] * rec_psi[j, m]
                    acc += C[i, m] * rec_anti[j, m]
                uval *= s2h
                tu = (w_left + shh * acc) / r
                phi[i, j] = (uval - tu) * (uval - tu) / r
            elem += wr[j] * phi[i, j]
        integ[i] = 0.5 * h * elem

    # pass 2: log g traces, right to left
    log_g_nodes[N] = 0.0
    acc = 0.0
    for i in range(N - 1, -1, -1):
        acc += integ[i]
        log_g_nodes[i] = -acc
    gt_nodes[0] = exp(fmax(log_g_nodes[0], log_tiny))
    if log_g_nodes[0] < log_tiny:
        deep = 1

    # pass 3: g, z, g~ and the weak form, left to right
    z_left = 0.0
    for i in range(N):
        a = nodes[i]
        h = nodes[i + 1] - a
        s2h = sqrt(2.0 / h)
        shh = sqrt(0.5 * h)
        lg_l = log_g_nodes[i]
        lg_r = log_g_nodes[i + 1]
        g_l = exp(fmax(lg_l, log_tiny))
        g_r = exp(fmax(lg_r, log_tiny))
        elem = 0.0
        for j in range(Qr):
            acc = 0.0
            for l in range(Qr):
                acc += rec_upper[j, l] * phi[i, l]
            lg = fmin(fmax(lg_r - 0.5 * h * acc, lg_l), lg_r)
            if lg < log_tiny:
                deep = 1
            grec[j] = exp(fmax(lg, log_tiny))
            elem += wr[j] * grec[j]
        for m in range(K):
            dC[i, m] = 0.0
        for j in range(Qv):
            r = a + 0.5 * h * (vol_xi[j] + 1.0)
            acc = 0.0
            z = 0.0
            for l in range(Qr):
                acc += vol_upper[j, l] * phi[i, l]
                z += vol_lower[j, l] * grec[l]
            lg = fmin(fmax(lg_r - 0.5 * h * acc, lg_l), lg_r)
            if lg < log_tiny:
                deep = 1
            g = exp(fmax(lg, log_tiny))
            # monotone g: int_a^r g lies in [g(a), g(r)] * (r - a)
            z = z_left + fmin(fmax(0.5 * h * z, (r - a) * g_l), (r - a) * g)
            gt = z / r
            gtr = (g - gt) / r
            uval = 0.0
            if i == 0:
                tu = 0.0
                for m in range(K):
                    uval += C[i, m] * vol_psi[j, m]
                    tu += C[i, m] * vol_origin[j, m]
                tu *= s2h
            else:
                acc = 0.0
                for m in range(K):
                    uval += C[i, m] * vol_psi[j, m]
                    acc += C[i, m] * vol_anti[j, m]
                tu = (w_nodes[i] + shh * acc) / r
            uval *= s2h
            t = wv[j] * 0.5 * gt * uval
            qv = 0.5 * h * wv[j] * 0.5 * gtr * tu
            for m in range(K):
                dC[i, m] -= t * vol_dpsi[j, m] + qv * vol_psi[j, m]
        z_left = z_left + fmin(fmax(0.5 * h * elem, h * g_l), h * g_r)
        gt_nodes[i + 1] = z_left / nodes[i + 1]
        flux_l = 0.5 * gt_nodes[i] * u_left[i]
        if i + 1 < N:
            uval = C[i + 1, 0] * psiL[0]
            for m in range(1, K):
                uval += C[i + 1, m] * psiL[m]
            flux_r = 0.5 * gt_nodes[i + 1] * sqrt(2.0 / (nodes[i + 2] - nodes[i + 1])) * uval
        else:
            flux_r = 0.5 * gt_nodes[i + 1] * Ub
        for m in range(K):
            dC[i, m] = s2h * (dC[i, m] + flux_r * psiR[m] - flux_l * psiL[m])
    return deep
