# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled residual-product accumulator.

Same contract as kernels._reference.accumulate.  Residual matrices are
computed upstream (shared with the fallback); this loop replaces the eight
full-size temporaries the NumPy path allocates per scale.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def accumulate(const double[:, ::1] res_x, const double[:, ::1] res_y):
    cdef Py_ssize_t count = res_x.shape[0]
    cdef Py_ssize_t scale = res_x.shape[1]
    if res_y.shape[0] != count or res_y.shape[1] != scale:
        raise ValueError("residual matrices differ in shape")

    cov_a = np.empty(count)
    sum_plus_a = np.empty(count)
    sum_minus_a = np.empty(count)
    n_plus_a = np.empty(count, dtype=np.int64)
    n_minus_a = np.empty(count, dtype=np.int64)
    n_pp_a = np.empty(count, dtype=np.int64)
    n_pm_a = np.empty(count, dtype=np.int64)
    n_mp_a = np.empty(count, dtype=np.int64)
    n_mm_a = np.empty(count, dtype=np.int64)
    s_pp_a = np.empty(count)
    s_pm_a = np.empty(count)
    s_mp_a = np.empty(count)
    s_mm_a = np.empty(count)

    cdef double[::1] cov = cov_a
    cdef double[::1] sum_plus = sum_plus_a
    cdef double[::1] sum_minus = sum_minus_a
    cdef long long[::1] n_plus = n_plus_a
    cdef long long[::1] n_minus = n_minus_a
    cdef long long[::1] n_pp = n_pp_a
    cdef long long[::1] n_pm = n_pm_a
    cdef long long[::1] n_mp = n_mp_a
    cdef long long[::1] n_mm = n_mm_a
    cdef double[::1] s_pp = s_pp_a
    cdef double[::1] s_pm = s_pm_a
    cdef double[::1] s_mp = s_mp_a
    cdef double[::1] s_mm = s_mm_a

    cdef Py_ssize_t nu, k
    cdef double rx, ry, prod
    cdef double sp, sm, qpp, qpm, qmp, qmm
    cdef long long cp, cpp, cpm, cmp_, cmm
    cdef bint xp, yp

    for nu in range(count):
        sp = 0.0
        sm = 0.0
        qpp = 0.0
        qpm = 0.0
        qmp = 0.0
        qmm = 0.0
        cp = 0
        cpp = 0
        cpm = 0
        cmp_ = 0
        cmm = 0
        for k in range(scale):
            rx = res_x[nu, k]
            ry = res_y[nu, k]
            prod = rx * ry
            if prod >= 0:
                sp += prod
                cp += 1
            else:
                sm += prod
            xp = rx <= 0
            yp = ry <= 0
            if xp and yp:
                qpp += prod
                cpp += 1
            elif xp:
                qpm += prod
                cpm += 1
            elif yp:
                qmp += prod
                cmp_ += 1
            else:
                qmm += prod
                cmm += 1
        cov[nu] = (sp + sm) / scale
        sum_plus[nu] = sp
        sum_minus[nu] = sm
        n_plus[nu] = cp
        n_minus[nu] = scale - cp
        n_pp[nu] = cpp
        n_pm[nu] = cpm
        n_mp[nu] = cmp_
        n_mm[nu] = cmm
        s_pp[nu] = qpp
        s_pm[nu] = qpm
        s_mp[nu] = qmp
        s_mm[nu] = qmm

    return (cov_a, sum_plus_a, sum_minus_a, n_plus_a, n_minus_a,
            n_pp_a, n_pm_a, n_mp_a, n_mm_a, s_pp_a, s_pm_a, s_mp_a, s_mm_a)
