# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pointwise surface kernels.

Same signatures and semantics as :mod:`gomboc._pykernels`; the numpy
module is the fallback used when this extension is not built.
"""

import numpy as np
from libc.math cimport sin, cos, sqrt, hypot


cdef inline void _quartic(double beta, double theta, double phi, double p,
                          double dp, double d2p, double* out) noexcept nogil:
    cdef double s = sin(theta)
    cdef double ct = cos(theta)
    cdef double u = phi - p
    cdef double c = cos(u)
    cdef double sn = sin(u)
    cdef double b4 = 4.0 * beta
    out[0] = 1.0 + b4 * s * c
    out[1] = b4 * (ct * c + s * sn * dp)
    out[2] = -b4 * s * sn
    out[3] = b4 * (-s * c * (1.0 + dp * dp) + 2.0 * ct * sn * dp + s * sn * d2p)
    out[4] = -b4 * s * c
    out[5] = b4 * (-ct * sn + s * c * dp)


cdef inline void _radius(double beta, double theta, double phi, double p,
                         double dp, double d2p, double* out) noexcept nogil:
    cdef double q[6]
    _quartic(beta, theta, phi, p, dp, d2p, q)
    cdef double f = sqrt(sqrt(q[0]))
    cdef double f3 = f * f * f
    cdef double a = 1.0 / (4.0 * f3)
    cdef double b = 3.0 / (16.0 * f3 * f3 * f)
    out[0] = f
    out[1] = q[1] * a
    out[2] = q[2] * a
    out[3] = q[3] * a - q[1] * q[1] * b
    out[4] = q[4] * a - q[2] * q[2] * b
    out[5] = q[5] * a - q[1] * q[2] * b


def quartic_jet(double beta, const double[::1] theta, const double[::1] phi,
                const double[::1] p, const double[::1] dp, const double[::1] d2p):
    cdef Py_ssize_t n = theta.shape[0], i, k
    out = np.empty((6, n))
    cdef double[:, ::1] o = out
    cdef double q[6]
    with nogil:
        for i in range(n):
            _quartic(beta, theta[i], phi[i], p[i], dp[i], d2p[i], q)
            for k in range(6):
                o[k, i] = q[k]
    return out


def radius_jet(double beta, const double[::1] theta, const double[::1] phi,
               const double[::1] p, const double[::1] dp, const double[::1] d2p):
    cdef Py_ssize_t n = theta.shape[0], i, k
    out = np.empty((6, n))
    cdef double[:, ::1] o = out
    cdef double r[6]
    with nogil:
        for i in range(n):
            _radius(beta, theta[i], phi[i], p[i], dp[i], d2p[i], r)
            for k in range(6):
                o[k, i] = r[k]
    return out


def principal_curvatures(double beta, const double[::1] theta, const double[::1] phi,
                         const double[::1] p, const double[::1] dp, const double[::1] d2p):
    cdef Py_ssize_t n = theta.shape[0], i
    out = np.empty((2, n))
    cdef double[:, ::1] o = out
    cdef double j[6]
    cdef double f, ft, fp, ftt, fpp, ftp, s, ct, nr, nt, nph, inv
    cdef double e, fm, g, det, ll, mm, nn, r, a, b, c, half, rad
    with nogil:
        for i in range(n):
            _radius(beta, theta[i], phi[i], p[i], dp[i], d2p[i], j)
            f = j[0]; ft = j[1]; fp = j[2]; ftt = j[3]; fpp = j[4]; ftp = j[5]
            s = sin(theta[i])
            ct = cos(theta[i])
            nr = f * s
            nt = -ft * s
            nph = -fp
            inv = -1.0 / sqrt(nr * nr + nt * nt + nph * nph)
            nr = nr * inv
            nt = nt * inv
            nph = nph * inv
            e = ft * ft + f * f
            fm = ft * fp
            g = fp * fp + f * f * s * s
            det = e * g - fm * fm
            ll = (ftt - f) * nr + 2.0 * ft * nt
            mm = ftp * nr + fp * nt + (ft * s + f * ct) * nph
            nn = (fpp - f * s * s) * nr - f * s * ct * nt + 2.0 * fp * s * nph
            r = fm / e
            a = ll / e
            b = (mm - ll * r) / sqrt(det)
            c = (nn - 2.0 * mm * r + ll * r * r) * e / det
            half = 0.5 * (a + c)
            rad = hypot(0.5 * (a - c), b)
            o[0, i] = half - rad
            o[1, i] = half + rad
    return out
