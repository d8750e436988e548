# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled mod-p dense elimination kernel.

Row reduction over F_p is the hot inner loop of the whole package (Hom-space
solves, census enumeration, exactness checks all funnel into it), so it lives
here as a C loop.  quivertilt._fpkernel_py provides the same interface in
pure Python.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

KERNEL_NAME = "compiled"


cdef long long _inv_mod(long long a, long long p):
    # extended Euclid; a is assumed nonzero mod p, p prime
    cdef long long t = 0, newt = 1
    cdef long long r = p, newr = a % p
    cdef long long q, tmp
    while newr != 0:
        q = r / newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


def rref_mod(cnp.int64_t[:, ::1] a, long long p):
    """Reduce ``a`` in place to reduced row echelon form over F_p.

    Entries must already lie in [0, p).  Returns the list of pivot columns.
    """
    cdef Py_ssize_t rows = a.shape[0]
    cdef Py_ssize_t cols = a.shape[1]
    cdef Py_ssize_t r = 0, i, j, k, piv
    cdef long long inv, factor, v
    pivots = []
    for j in range(cols):
        if r == rows:
            break
        piv = -1
        for i in range(r, rows):
            if a[i, j] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for k in range(j, cols):
                v = a[r, k]
                a[r, k] = a[piv, k]
                a[piv, k] = v
        if a[r, j] != 1:
            inv = _inv_mod(a[r, j], p)
            for k in range(j, cols):
                a[r, k] = (a[r, k] * inv) % p
        for i in range(rows):
            if i != r and a[i, j] != 0:
                factor = a[i, j]
                for k in range(j, cols):
                    v = (a[i, k] - factor * a[r, k]) % p
                    if v < 0:
                        v += p
                    a[i, k] = v
        pivots.append(j)
        r += 1
    return pivots
