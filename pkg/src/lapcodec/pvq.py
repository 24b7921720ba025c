"""Unit-pulse codebook for the innovation: search, gain, and indexing.

A codeword is an integer vector ``y`` of length N with sum(|y_i|) == K.
The search places pulses greedily against a cost that accounts for the
adaptive-codebook contribution, and every codeword maps to a unique
integer below V(N, K) for transmission as one uniform range-coder
symbol.  All counts are exact big integers; nothing here may overflow.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def codebook_size(n, k):
    """Number of distinct pulse vectors: V(N,K), exact."""
    if k == 0:
        return 1
    if n == 0:
        return 0
    return codebook_size(n - 1, k) + codebook_size(n, k - 1) + codebook_size(n - 1, k - 1)


def codebook_bits(n, k):
    """log2 V(N,K) as a float (index cost in bits)."""
    v = codebook_size(n, k)
    e = max(0, v.bit_length() - 53)
    return math.log2(v >> e) + e


def max_pulses_for_bits8(n, bits8):
    """Largest K whose index fits in bits8/8 bits.

    Exact integer predicate: log2 V <= bits8/8  <=>  V**8 <= 2**bits8.
    """
    if bits8 <= 0 or n <= 0:
        return 0
    limit = 1 << bits8
    k = 0
    while codebook_size(n, k + 1) ** 8 <= limit:
        k += 1
    return k


def encode_index(y):
    """Map a pulse vector to its index in [0, V(N,K))."""
    y = [int(v) for v in y]
    n = len(y)
    k = sum(abs(v) for v in y)
    index = 0
    for i in range(n):
        rest = n - 1 - i
        v = y[i]
        # Blocks ordered: 0, +1, -1, +2, -2, ... for the leading element.
        index += codebook_size(rest, k) if v != 0 else 0
        for j in range(1, abs(v)):
            index += 2 * codebook_size(rest, k - j)
        if v < 0:
            index += codebook_size(rest, k - abs(v))
        k -= abs(v)
        if k == 0:
            break
    return index


def decode_index(index, n, k):
    """Inverse of :func:`encode_index`."""
    total = codebook_size(n, k)
    if not 0 <= index < total:
        raise ValueError(f"index {index} out of range for V({n},{k})={total}")
    y = [0] * n
    for i in range(n):
        if k == 0:
            break
        rest = n - 1 - i
        block = codebook_size(rest, k)
        if index < block:
            continue
        index -= block
        for j in range(1, k + 1):
            block = codebook_size(rest, k - j)
            if index < block:
                y[i] = j
                k -= j
                break
            index -= block
            if index < block:
                y[i] = -j
                k -= j
                break
            index -= block
        else:
            raise AssertionError("index walk exhausted pulse magnitudes")
    return y


def fixed_gain(ga, ryp, ryy):
    """Innovation gain that restores unit norm after mixing.

    With unit-norm adaptive vector p and quantized gain ga, solves
    ||ga*p + gf*y|| = 1 for gf >= 0, given yTp and yTy.
    """
    if ryy <= 0.0:
        return 0.0
    disc = ga * ga * ryp * ryp + ryy * (1.0 - ga * ga)
    return (math.sqrt(max(disc, 0.0)) - ga * ryp) / ryy


def search(r, p, ga, k):
    """Greedy one-pulse-at-a-time search with the full cost function.

    Returns (y, gf).  Signs follow the residual; ties break toward the
    lowest position so the encoder is deterministic.
    """
    r = np.asarray(r, dtype=np.float64)
    n = r.shape[0]
    if p is None:
        p = np.zeros(n)
    else:
        p = np.asarray(p, dtype=np.float64)
    y = np.zeros(n, dtype=np.int64)
    if k == 0:
        return y, 0.0
    signs = np.where(r >= 0.0, 1.0, -1.0)
    ryp = 0.0
    rry = 0.0
    ryy = 0.0
    for _ in range(k):
        c_ryp = ryp + signs * p
        c_rry = rry + signs * r
        c_ryy = ryy + 2.0 * np.abs(y) + 1.0
        disc = ga * ga * c_ryp * c_ryp + c_ryy * (1.0 - ga * ga)
        gf = (np.sqrt(np.maximum(disc, 0.0)) - ga * c_ryp) / c_ryy
        cost = -2.0 * gf * c_rry + gf * gf * c_ryy
        i = int(np.argmin(cost))
        y[i] += int(signs[i])
        ryp = float(c_ryp[i])
        rry = float(c_rry[i])
        ryy = float(c_ryy[i])
    return y, fixed_gain(ga, ryp, ryy)


def search_fast(r, p, ga, k):
    """Reduced-complexity search used on the production path.

    Places max((K - assigned) // N, 1) pulses per step with the simple
    correlation cost, switching to the full cost for the step that
    assigns the final pulse.
    """
    r = np.asarray(r, dtype=np.float64)
    n = r.shape[0]
    if p is None:
        p = np.zeros(n)
    else:
        p = np.asarray(p, dtype=np.float64)
    y = np.zeros(n, dtype=np.int64)
    if k == 0:
        return y, 0.0
    signs = np.where(r >= 0.0, 1.0, -1.0)
    ryp = 0.0
    rry = 0.0
    ryy = 0.0
    assigned = 0
    while assigned < k:
        np_step = max((k - assigned) // n, 1)
        c_ryp = ryp + np_step * signs * p
        c_rry = rry + np_step * signs * r
        c_ryy = ryy + 2.0 * np_step * np.abs(y) + float(np_step) ** 2
        if assigned + np_step >= k:
            disc = ga * ga * c_ryp * c_ryp + c_ryy * (1.0 - ga * ga)
            gf = (np.sqrt(np.maximum(disc, 0.0)) - ga * c_ryp) / c_ryy
            cost = -2.0 * gf * c_rry + gf * gf * c_ryy
        else:
            cost = -c_rry / np.sqrt(c_ryy)
        i = int(np.argmin(cost))
        y[i] += int(np_step * signs[i])
        ryp = float(c_ryp[i])
        rry = float(c_rry[i])
        ryy = float(c_ryy[i])
        assigned += np_step
    return y, fixed_gain(ga, ryp, ryy)


def mix(p, ga, y, gf):
    """Combine adaptive and innovation contributions: ga*p + gf*y."""
    out = gf * np.asarray(y, dtype=np.float64)
    if p is not None and ga != 0.0:
        out = out + ga * np.asarray(p, dtype=np.float64)
    return out
