"""
numba kernels for stub pairing.

The swap-remove pool keeps the set of unmatched stubs in pool[:size] with
pos[s] giving the slot of stub s, so removal and uniform choice are O(1).
"""

import numpy as np
from numba import njit

UNMATCHED = -1


@njit(cache=True)
def swap_remove(pool, pos, size, s):
    """Remove stub s from pool[:size]; caller decrements size."""
    i = pos[s]
    last = pool[size - 1]
    pool[i] = last
    pos[last] = i
    pool[size - 1] = s
    pos[s] = size - 1


@njit(cache=True)
def pick(u, size):
    j = int(u * size)
    if j >= size:
        j = size - 1
    return j


@njit(cache=True)
def pair_stubs(stubs, uniforms):
    """
    Sequential pass: the lowest unmatched stub is paired with a partner drawn
    uniformly from the other unmatched stubs. Consumes one uniform per pair.
    """
    partner = np.full(stubs, UNMATCHED, np.int64)
    pair_of = np.full(stubs, UNMATCHED, np.int64)
    pool = np.arange(stubs)
    pos = np.arange(stubs)
    size = stubs
    k = 0
    for s in range(stubs):
        if partner[s] != UNMATCHED:
            continue
        swap_remove(pool, pos, size, s)
        size -= 1
        t = pool[pick(uniforms[k], size)]
        swap_remove(pool, pos, size, t)
        size -= 1
        partner[s] = t
        partner[t] = s
        pair_of[s] = k
        pair_of[t] = k
        k += 1
    return partner, pair_of
