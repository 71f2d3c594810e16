# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the per-step hot kernels (see numpy_impl for the
reference semantics). All functions mutate their leading arguments in place."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"


def lif_step(double[::1] v, double[::1] s, double[::1] s_hat,
             double[::1] s_bar, double[:, ::1] w_rec, double[::1] current,
             double alpha_s, double alpha_m, double alpha_star,
             double v_rest, double v_th, double w_res):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i, j
    cdef double acc, one_m_s = 1.0 - alpha_s, one_m_m = 1.0 - alpha_m
    cdef double one_m_star = 1.0 - alpha_star
    for j in range(n):
        s_hat[j] = alpha_s * s_hat[j] + one_m_s * s[j]
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += w_rec[i, j] * s_hat[j]
        v[i] = alpha_m * v[i] + one_m_m * (acc + current[i] + v_rest) \
            - w_res * s[i]
    for i in range(n):
        s[i] = 1.0 if v[i] >= v_th else 0.0
        s_bar[i] = alpha_star * s_bar[i] + one_m_star * s[i]


def eligibility_step(double[::1] e, double[::1] s_hat, double alpha_m):
    cdef Py_ssize_t n = e.shape[0]
    cdef Py_ssize_t j
    cdef double one_m = 1.0 - alpha_m
    for j in range(n):
        e[j] = alpha_m * e[j] + one_m * s_hat[j]


def add_outer(double[:, ::1] buf, double[::1] a, double[::1] b,
              double scale=1.0):
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0]
    cdef Py_ssize_t i, j
    cdef double ai
    for i in range(n):
        ai = scale * a[i]
        for j in range(m):
            buf[i, j] += ai * b[j]


def policy_trace_step(double[:, :, ::1] z_w, double[:, ::1] z_r,
                      double[::1] g, double[::1] p, double[::1] e,
                      double[::1] s_bar, double gamma):
    cdef Py_ssize_t k_n = z_w.shape[0], n = p.shape[0]
    cdef Py_ssize_t k, i, j
    cdef double gk, gp
    for k in range(k_n):
        gk = g[k]
        for i in range(n):
            gp = gk * p[i]
            for j in range(n):
                z_w[k, i, j] = gamma * z_w[k, i, j] + gp * e[j]
            z_r[k, i] = gamma * z_r[k, i] + gk * s_bar[i]


def policy_buffer_add(double[:, ::1] buf_w, double[:, ::1] buf_r,
                      double[:, :, ::1] z_w, double[:, ::1] z_r,
                      double[:, ::1] r_pi, double reward):
    cdef Py_ssize_t k_n = z_w.shape[0], n = z_w.shape[1]
    cdef Py_ssize_t k, i, j
    cdef double w
    for k in range(k_n):
        for i in range(n):
            w = reward * r_pi[k, i]
            for j in range(n):
                buf_w[i, j] += w * z_w[k, i, j]
            buf_r[k, i] += reward * z_r[k, i]
