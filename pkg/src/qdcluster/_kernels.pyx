# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled diagonal-phase kernels.  Same contracts as ``_fallback``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef void _fill_phases(const double[:, ::1] theta, double[::1] out, double[::1] field) noexcept nogil:
    cdef Py_ssize_t n = theta.shape[0]
    cdef Py_ssize_t q, p, i, half
    cdef unsigned long long low
    out[0] = 0.0
    for q in range(n):
        half = (<Py_ssize_t>1) << q
        field[0] = 0.0
        for i in range(1, half):
            # drop the lowest set bit; its qubit index is the trailing-zero count
            low = <unsigned long long>i & (<unsigned long long>i - 1)
            p = __builtin_ctzll(<unsigned long long>i)
            field[i] = field[<Py_ssize_t>low] + theta[p, q]
        for i in range(half):
            out[half + i] = out[i] + field[i]


def diagonal_phases(theta):
    """phase[z] = sum_{p<q} theta[p, q] z_p z_q for every basis index z."""
    cdef double[:, ::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t n = th.shape[0]
    out = np.empty((<Py_ssize_t>1) << n, dtype=np.float64)
    field = np.empty(max((<Py_ssize_t>1) << max(n - 1, 0), 1), dtype=np.float64)
    cdef double[::1] o = out
    cdef double[::1] f = field
    with nogil:
        _fill_phases(th, o, f)
    return out


def apply_diagonal(amplitudes, theta):
    """Multiply amplitudes in place by exp(i phase[z])."""
    cdef double complex[::1] amp = amplitudes
    cdef double[::1] ph = diagonal_phases(theta)
    cdef Py_ssize_t i
    cdef double c, s, re, im
    with nogil:
        for i in range(amp.shape[0]):
            c = cos(ph[i])
            s = sin(ph[i])
            re = amp[i].real
            im = amp[i].imag
            amp[i] = (re * c - im * s) + 1j * (re * s + im * c)
    return amplitudes
