"""Pure-Python sampling kernels.

Reference twin of ``_kernels.pyx``; both must produce bit-identical output for
the same keys, so every floating point expression here is written in the same
order as in the Cython source.
"""
import math

import numpy as np

MASK = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15
TWO_PI = 6.283185307179586
INV_2_53 = 1.0 / 9007199254740992.0

_FC = (
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
)


def mix64(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def batch_state(key, batch):
    return hash2(key, batch)


def hash2(a, b):
    return mix64(((a ^ mix64((b + GOLDEN) & MASK)) + GOLDEN) & MASK)


def derive_keys(master_seed, trial_index, n):
    base = hash2(hash2(0, master_seed & MASK), trial_index & MASK)
    # vectorized hash2(base, arm); uint64 arithmetic wraps like the C code
    u = np.uint64
    with np.errstate(over="ignore"):
        z = np.arange(n, dtype=np.uint64) + u(GOLDEN)
        z = _mix64_np(z)
        z = (z ^ u(base)) + u(GOLDEN)
        return _mix64_np(z)


def _mix64_np(z):
    u = np.uint64
    z = (z ^ (z >> u(30))) * u(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> u(27))) * u(0x94D049BB133111EB)
    return z ^ (z >> u(31))


class _Stream:
    __slots__ = ("s",)

    def __init__(self, s):
        self.s = s

    def uniform(self):
        self.s = (self.s + GOLDEN) & MASK
        return ((mix64(self.s) >> 11) + 0.5) * INV_2_53


def _fc(k):
    if k <= 9:
        return _FC[int(k)]
    kp1sq = (k + 1.0) * (k + 1.0)
    return (1.0 / 12.0 - (1.0 / 360.0 - 1.0 / 1260.0 / kp1sq) / kp1sq) / (k + 1.0)


def _binomial_inversion(n, p, rng):
    q = 1.0 - p
    qn = math.exp(n * math.log(q))
    r = p / q
    g = r * (n + 1.0)
    bound = min(float(n), math.floor(n * p + 10.0 * math.sqrt(n * p * q + 1.0)))
    while True:
        x = 0
        px = qn
        u = rng.uniform()
        while u > px:
            x += 1
            if x > bound:
                break
            u -= px
            px *= g / x - r
        else:
            return x


def _binomial_btrs(n, p, rng):
    spq = math.sqrt(n * p * (1.0 - p))
    b = 1.15 + 2.53 * spq
    a = -0.0873 + 0.0248 * b + 0.01 * p
    c = n * p + 0.5
    v_r = 0.92 - 4.2 / b
    r = p / (1.0 - p)
    alpha = (2.83 + 5.1 / b) * spq
    m = math.floor((n + 1.0) * p)
    nm = n - m + 1.0
    h = (m + 0.5) * math.log((m + 1.0) / (r * nm)) + _fc(m) + _fc(n - m)
    while True:
        u = rng.uniform() - 0.5
        v = rng.uniform()
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + c)
        if k < 0 or k > n:
            continue
        if us >= 0.07 and v <= v_r:
            return k
        v = math.log(v * alpha / (a / (us * us) + b))
        nk = n - k + 1.0
        bound = h + (n + 1.0) * math.log(nm / nk) + (k + 0.5) * math.log(nk * r / (k + 1.0)) - _fc(k) - _fc(n - k)
        if v <= bound:
            return k


def binomial(n, p, rng):
    if n <= 0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return n
    flip = p > 0.5
    q = 1.0 - p if flip else p
    if n * q < 10.0:
        k = _binomial_inversion(n, q, rng)
    else:
        k = _binomial_btrs(n, q, rng)
    return n - k if flip else k


def bernoulli_sums(keys, batches, probs, count):
    out = np.empty(len(keys), dtype=np.int64)
    for i in range(len(keys)):
        rng = _Stream(batch_state(int(keys[i]), int(batches[i])))
        out[i] = binomial(count, float(probs[i]), rng)
    return out


def gaussian_sums(keys, batches, mus, sigmas, count):
    out = np.empty(len(keys), dtype=np.float64)
    if count <= 0:
        out[:] = 0.0
        return out
    root = math.sqrt(count)
    for i in range(len(keys)):
        rng = _Stream(batch_state(int(keys[i]), int(batches[i])))
        u1 = rng.uniform()
        u2 = rng.uniform()
        z = math.sqrt(-2.0 * math.log(u1)) * math.cos(TWO_PI * u2)
        out[i] = count * float(mus[i]) + float(sigmas[i]) * root * z
    return out


def uniforms(key, batch, size):
    """First `size` uniforms of one (arm, batch) stream; used by tests."""
    rng = _Stream(batch_state(int(key), int(batch)))
    return np.array([rng.uniform() for _ in range(size)])
