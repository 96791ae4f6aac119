# cython: language_level=3
"""Compiled skip-gram negative-sampling inner loop.

Mirrors _pure.train_chunk: identical LCG draw sequence, sequential float32
updates. Releases the GIL for the whole chunk so multiple workers can train
hogwild-style on the shared matrices.
"""

from libc.math cimport exp, log1p

import numpy as np

ctypedef unsigned long long u64

cdef u64 LCG_MULT = 25214903917
cdef u64 LCG_INC = 11


cdef inline double softplus(double x) nogil:
    if x > 0:
        return x + log1p(exp(-x))
    return log1p(exp(x))


cdef inline Py_ssize_t bisect_left_u32(const unsigned int[::1] table, u64 value,
                                       Py_ssize_t size) nogil:
    cdef Py_ssize_t lo = 0, hi = size, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if table[mid] < value:
            lo = mid + 1
        else:
            hi = mid
    return lo


def train_chunk(float[:, ::1] syn0, float[:, ::1] syn1,
                const int[::1] data, const long long[::1] offsets,
                const double[::1] keep_prob, const unsigned int[::1] cum_table,
                Py_ssize_t window, Py_ssize_t negatives,
                double initial_lr, double min_alpha,
                int subsample_enabled,
                state_in, long long processed, long long total_planned):
    cdef u64 state = <u64>state_in
    cdef Py_ssize_t n_sent = offsets.shape[0] - 1
    cdef Py_ssize_t dim = syn0.shape[1]
    cdef Py_ssize_t vocab_size = cum_table.shape[0]
    cdef u64 domain = <u64>cum_table[vocab_size - 1]
    cdef double obj_sum = 0.0
    cdef long long obj_terms = 0

    cdef Py_ssize_t max_len = 1, s, length
    for s in range(n_sent):
        length = <Py_ssize_t>(offsets[s + 1] - offsets[s])
        if length > max_len:
            max_len = length
    kept_buf = np.empty(max_len, dtype=np.int64)
    neu_buf = np.zeros(dim, dtype=np.float32)
    cdef long long[::1] kept = kept_buf
    cdef float[::1] neu1e = neu_buf

    cdef Py_ssize_t start, end, i, n, pos, j, lo, hi, k, target, center, context
    cdef Py_ssize_t radius, d
    cdef double alpha, score, sig, grad, label
    cdef float grad_f, tmp
    cdef float *in_row
    cdef float *out_row

    with nogil:
        for s in range(n_sent):
            start = <Py_ssize_t>offsets[s]
            end = <Py_ssize_t>offsets[s + 1]
            alpha = initial_lr * (1.0 - (<double>processed) / (<double>total_planned + 1.0))
            if alpha < min_alpha:
                alpha = min_alpha
            n = 0
            if subsample_enabled:
                for i in range(start, end):
                    state = state * LCG_MULT + LCG_INC
                    if keep_prob[data[i]] >= <double>(state & 0xFFFF) / 65536.0:
                        kept[n] = data[i]
                        n += 1
            else:
                for i in range(start, end):
                    kept[n] = data[i]
                    n += 1
            processed += end - start

            for pos in range(n):
                center = <Py_ssize_t>kept[pos]
                state = state * LCG_MULT + LCG_INC
                radius = window - <Py_ssize_t>(state % <u64>window)
                lo = pos - radius
                if lo < 0:
                    lo = 0
                hi = pos + radius + 1
                if hi > n:
                    hi = n
                for j in range(lo, hi):
                    if j == pos:
                        continue
                    context = <Py_ssize_t>kept[j]
                    in_row = &syn0[context, 0]
                    for d in range(dim):
                        neu1e[d] = 0.0
                    for k in range(negatives + 1):
                        if k == 0:
                            target = center
                            label = 1.0
                        else:
                            state = state * LCG_MULT + LCG_INC
                            target = bisect_left_u32(cum_table, (state >> 16) % domain,
                                                     vocab_size)
                            if target == center:
                                continue
                            label = 0.0
                        out_row = &syn1[target, 0]
                        score = 0.0
                        for d in range(dim):
                            score += <double>in_row[d] * <double>out_row[d]
                        sig = 1.0 / (1.0 + exp(-score))
                        grad = (label - sig) * alpha
                        if label > 0.5:
                            obj_sum += -softplus(-score)
                        else:
                            obj_sum += -softplus(score)
                        obj_terms += 1
                        grad_f = <float>grad
                        for d in range(dim):
                            tmp = out_row[d]
                            neu1e[d] += grad_f * tmp
                            out_row[d] = tmp + grad_f * in_row[d]
                    for d in range(dim):
                        in_row[d] += neu1e[d]

    return int(state), processed, obj_sum, obj_terms
