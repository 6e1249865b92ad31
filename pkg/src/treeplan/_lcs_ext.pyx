# cython: boundscheck=False, wraparound=False, cdivision=True
"""C kernel for longest-common-subsequence lengths over str code points."""
from libc.stdlib cimport malloc, free


cdef Py_ssize_t _lcs(str a, str b, Py_ssize_t* row, Py_UCS4* bbuf) noexcept:
    cdef Py_ssize_t n = len(a), m = len(b), i, j, prev, tmp
    cdef Py_UCS4 ai
    for j in range(m):
        bbuf[j] = b[j]
    for j in range(m + 1):
        row[j] = 0
    for i in range(n):
        ai = a[i]
        prev = 0
        for j in range(1, m + 1):
            tmp = row[j]
            if ai == bbuf[j - 1]:
                row[j] = prev + 1
            elif row[j - 1] > tmp:
                row[j] = row[j - 1]
            prev = tmp
    return row[m]


def lcs_str(str a, str b):
    """Length of the longest common subsequence of two strings."""
    if len(a) < len(b):
        a, b = b, a
    cdef Py_ssize_t m = len(b)
    if m == 0:
        return 0
    cdef Py_ssize_t* row = <Py_ssize_t*> malloc((m + 1) * sizeof(Py_ssize_t))
    cdef Py_UCS4* bbuf = <Py_UCS4*> malloc(m * sizeof(Py_UCS4))
    if row == NULL or bbuf == NULL:
        free(row)
        free(bbuf)
        raise MemoryError()
    try:
        return _lcs(a, b, row, bbuf)
    finally:
        free(row)
        free(bbuf)


def best_ratio_index(str query, list candidates):
    """Index and value of the candidate maximizing lcs/min(len); first wins ties."""
    cdef Py_ssize_t best = -1, idx, width = len(query), length, shorter
    cdef double best_ratio = -1.0, ratio
    cdef str cand, a, b
    for cand in candidates:
        if len(cand) > width:
            width = len(cand)
    cdef Py_ssize_t* row = <Py_ssize_t*> malloc((width + 1) * sizeof(Py_ssize_t))
    cdef Py_UCS4* bbuf = <Py_UCS4*> malloc((width + 1) * sizeof(Py_UCS4))
    if row == NULL or bbuf == NULL:
        free(row)
        free(bbuf)
        raise MemoryError()
    try:
        for idx in range(len(candidates)):
            cand = candidates[idx]
            if len(cand) < len(query):
                a, b = query, cand
            else:
                a, b = cand, query
            shorter = len(b)
            if shorter == 0:
                ratio = 0.0
            else:
                length = _lcs(a, b, row, bbuf)
                ratio = <double> length / <double> shorter
            if ratio > best_ratio:
                best_ratio = ratio
                best = idx
    finally:
        free(row)
        free(bbuf)
    if best < 0:
        return -1, 0.0
    return best, best_ratio
