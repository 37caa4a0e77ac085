# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled state-vector kernels; contract mirrors ``_kernels_py``."""


def apply_ctrl_2x2(double complex[::1] amps, long long ctrl_mask, long long targ_mask,
                   double complex g00, double complex g01,
                   double complex g10, double complex g11):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef long long both = ctrl_mask | targ_mask
    cdef Py_ssize_t i, j
    cdef double complex a0, a1
    for i in range(dim):
        if (i & both) == ctrl_mask:
            j = i | targ_mask
            a0 = amps[i]
            a1 = amps[j]
            amps[i] = g00 * a0 + g01 * a1
            amps[j] = g10 * a0 + g11 * a1


def apply_xlayer(double complex[::1] amps, long long xmask):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t i, j
    cdef double complex tmp
    if xmask == 0:
        return
    for i in range(dim):
        j = i ^ xmask
        if j > i:
            tmp = amps[i]
            amps[i] = amps[j]
            amps[j] = tmp


def bit0_and_total_sq(const double complex[::1] amps, long long targ_mask):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t i
    cdef double p0 = 0.0, total = 0.0, sq
    cdef double complex a
    for i in range(dim):
        a = amps[i]
        sq = a.real * a.real + a.imag * a.imag
        total += sq
        if (i & targ_mask) == 0:
            p0 += sq
    return p0, total


def project_bit(double complex[::1] amps, long long targ_mask, int bit):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t i
    cdef long long want = targ_mask if bit else 0
    for i in range(dim):
        if (i & targ_mask) != want:
            amps[i] = 0.0
