# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled enumeration kernels. Same signatures as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int8_t, uint8_t

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


def spectrum(const uint8_t[:, ::1] bits, Py_ssize_t shift):
    """+-1 keystream value of one string for every key, canonical key order."""
    cdef Py_ssize_t k = bits.shape[0], n = bits.shape[1]
    cdef Py_ssize_t K = n ** k
    cdef Py_ssize_t t, j
    cdef int parity
    out_arr = np.empty(K, dtype=np.int8)
    cdef int8_t[::1] out = out_arr
    digits_arr = np.zeros(k, dtype=np.intp)
    cdef Py_ssize_t[::1] digits = digits_arr
    # cols[j] tracks (digits[j] + shift) mod n
    cols_arr = np.full(k, shift % n, dtype=np.intp)
    cdef Py_ssize_t[::1] cols = cols_arr
    with nogil:
        for t in range(K):
            parity = 0
            for j in range(k):
                parity ^= bits[j, cols[j]]
            out[t] = 1 - 2 * parity
            j = 0
            while j < k:
                digits[j] += 1
                cols[j] += 1
                if cols[j] == n:
                    cols[j] = 0
                if digits[j] < n:
                    break
                digits[j] = 0
                j += 1
    return out_arr


def parity_sums(const uint64_t[::1] alphas, const uint64_t[::1] masks, weights=None):
    """sum_t w_t * (-1)^popcount(alpha & mask_t) for every alpha."""
    cdef Py_ssize_t na = alphas.shape[0], nm = masks.shape[0]
    cdef Py_ssize_t a, t
    cdef uint64_t x
    cdef int64_t acc
    out_arr = np.empty(na, dtype=np.int64)
    cdef int64_t[::1] out = out_arr
    cdef const int64_t[::1] w
    if weights is None:
        with nogil:
            for a in range(na):
                x = alphas[a]
                acc = 0
                for t in range(nm):
                    acc += 1 - 2 * (__builtin_popcountll(x & masks[t]) & 1)
                out[a] = acc
    else:
        w = np.ascontiguousarray(weights, dtype=np.int64)
        if w.shape[0] != nm:
            raise ValueError("weights and masks differ in length")
        with nogil:
            for a in range(na):
                x = alphas[a]
                acc = 0
                for t in range(nm):
                    if __builtin_popcountll(x & masks[t]) & 1:
                        acc -= w[t]
                    else:
                        acc += w[t]
                out[a] = acc
    return out_arr


def parity_signs(const uint64_t[::1] alphas, const uint64_t[::1] masks):
    """Matrix of (-1)^popcount(alpha_a & mask_t), shape (len(alphas), len(masks))."""
    cdef Py_ssize_t na = alphas.shape[0], nm = masks.shape[0]
    cdef Py_ssize_t a, t
    cdef uint64_t x
    out_arr = np.empty((na, nm), dtype=np.int8)
    cdef int8_t[:, ::1] out = out_arr
    with nogil:
        for a in range(na):
            x = alphas[a]
            for t in range(nm):
                out[a, t] = 1 - 2 * (__builtin_popcountll(x & masks[t]) & 1)
    return out_arr
