# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling kernels; bit-identical twin of ``_purepy``."""
import numpy as np

from libc.math cimport cos, exp, fabs, floor, log, sqrt
from libc.stdint cimport int64_t, uint64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double TWO_PI = 6.283185307179586
cdef double INV_2_53 = 1.0 / 9007199254740992.0

cdef double[10] _FC
_FC[:] = [
    0.08106146679532726,
    0.04134069595540929,
    0.02767792568499834,
    0.02079067210376509,
    0.01664469118982119,
    0.01387612882307075,
    0.01189670994589177,
    0.01041126526197209,
    0.009255462182712733,
    0.008330563433362871,
]


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t batch_state(uint64_t key, uint64_t batch) noexcept nogil:
    return hash2(key, batch)


cdef inline uint64_t hash2(uint64_t a, uint64_t b) noexcept nogil:
    return mix64((a ^ mix64(b + GOLDEN)) + GOLDEN)


def derive_keys(uint64_t master_seed, uint64_t trial_index, Py_ssize_t n):
    cdef uint64_t base = hash2(hash2(0, master_seed), trial_index)
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[:] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            o[i] = hash2(base, <uint64_t>i)
    return out


cdef inline double next_uniform(uint64_t* s) noexcept nogil:
    s[0] += GOLDEN
    return (<double>(mix64(s[0]) >> 11) + 0.5) * INV_2_53


cdef inline double fc(double k) noexcept nogil:
    cdef double kp1sq
    if k <= 9:
        return _FC[<int>k]
    kp1sq = (k + 1.0) * (k + 1.0)
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / 1260.0 / kp1sq) / kp1sq) / (k + 1.0)


cdef int64_t binomial_inversion(int64_t n, double p, uint64_t* s) noexcept nogil:
    cdef double q = 1.0 - p
    cdef double qn = exp(n * log(q))
    cdef double r = p / q
    cdef double g = r * (n + 1.0)
    cdef double bound = floor(n * p + 10.0 * sqrt(n * p * q + 1.0))
    cdef double u, px
    cdef int64_t x
    cdef bint restart
    if <double>n < bound:
        bound = <double>n
    while True:
        x = 0
        px = qn
        u = next_uniform(s)
        restart = False
        while u > px:
            x += 1
            if x > bound:
                restart = True
                break
            u -= px
            px *= g / x - r
        if not restart:
            return x


cdef int64_t binomial_btrs(int64_t n, double p, uint64_t* s) noexcept nogil:
    cdef double spq = sqrt(n * p * (1.0 - p))
    cdef double b = 1.15 + 2.53 * spq
    cdef double a = -0.0873 + 0.0248 * b + 0.01 * p
    cdef double c = n * p + 0.5
    cdef double v_r = 0.92 - 4.2 / b
    cdef double r = p / (1.0 - p)
    cdef double alpha = (2.83 + 5.1 / b) * spq
    cdef double m = floor((n + 1.0) * p)
    cdef double nm = n - m + 1.0
    cdef double h = (m + 0.5) * log((m + 1.0) / (r * nm)) + fc(m) + fc(n - m)
    cdef double u, v, us, k, nk, bound
    while True:
        u = next_uniform(s) - 0.5
        v = next_uniform(s)
        us = 0.5 - fabs(u)
        k = floor((2.0 * a / us + b) * u + c)
        if k < 0 or k > n:
            continue
        if us >= 0.07 and v <= v_r:
            return <int64_t>k
        v = log(v * alpha / (a / (us * us) + b))
        nk = n - k + 1.0
        bound = h + (n + 1.0) * log(nm / nk) + (k + 0.5) * log(nk * r / (k + 1.0)) - fc(k) - fc(n - k)
        if v <= bound:
            return <int64_t>k


cdef int64_t binomial(int64_t n, double p, uint64_t* s) noexcept nogil:
    cdef bint flip
    cdef double q
    cdef int64_t k
    if n <= 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    flip = p > 0.5
    q = 1.0 - p if flip else p
    if n * q < 10.0:
        k = binomial_inversion(n, q, s)
    else:
        k = binomial_btrs(n, q, s)
    return n - k if flip else k


def bernoulli_sums(const uint64_t[:] keys, const uint64_t[:] batches, const double[:] probs, int64_t count):
    cdef Py_ssize_t i, m = keys.shape[0]
    out = np.empty(m, dtype=np.int64)
    cdef int64_t[:] o = out
    cdef uint64_t s
    with nogil:
        for i in range(m):
            s = batch_state(keys[i], batches[i])
            o[i] = binomial(count, probs[i], &s)
    return out


def gaussian_sums(const uint64_t[:] keys, const uint64_t[:] batches, const double[:] mus,
                  const double[:] sigmas, int64_t count):
    cdef Py_ssize_t i, m = keys.shape[0]
    out = np.zeros(m, dtype=np.float64)
    cdef double[:] o = out
    cdef uint64_t s
    cdef double u1, u2, z, root
    if count <= 0:
        return out
    root = sqrt(<double>count)
    with nogil:
        for i in range(m):
            s = batch_state(keys[i], batches[i])
            u1 = next_uniform(&s)
            u2 = next_uniform(&s)
            z = sqrt(-2.0 * log(u1)) * cos(TWO_PI * u2)
            o[i] = count * mus[i] + sigmas[i] * root * z
    return out


def uniforms(uint64_t key, uint64_t batch, Py_ssize_t size):
    cdef uint64_t s = batch_state(key, batch)
    out = np.empty(size, dtype=np.float64)
    cdef double[:] o = out
    cdef Py_ssize_t i
    for i in range(size):
        o[i] = next_uniform(&s)
    return out
