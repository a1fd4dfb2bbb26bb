"""
Compiled exploration for the Monte Carlo hot loop.

Same state machine and the same uniform-consumption order as
exploration.process.explore, but only component sizes are kept.
The active container is one array: FIFO reads at `head`, LIFO pops at
`top`; stale entries are skipped exactly as the deque in process.py does.
"""

import numpy as np
from numba import njit

from src.graph.kernels import pick, swap_remove

_ACTIVE = 0
_UNSEEN = 1
_EXPLORED = 2


@njit(cache=True)
def explore_sizes(
    n,
    d,
    p,
    start,
    lifo,
    stop_first,
    threshold,
    partner,
    pair_of,
    retained,
    uniforms,
):
    """
    Returns (phase-one size, max phase size, steps, uniforms used).

    start < 0 draws a uniform start vertex. An empty `partner` array means
    LAZY mode. With threshold >= 0 the run stops as soon as the current
    phase's size exceeds it.
    """
    stubs = n * d
    lazy = partner.shape[0] == 0
    status = np.full(stubs, _UNSEEN, np.int8)
    unseen_count = np.full(n, d, np.int64)
    pool = np.arange(stubs)
    pos = np.arange(stubs)
    size = stubs
    queue = np.empty(stubs, np.int64)
    head = 0
    top = 0
    cursor = 0

    if start < 0:
        v0 = pick(uniforms[cursor], n)
        cursor += 1
    else:
        v0 = start

    for s in range(v0 * d, v0 * d + d):
        status[s] = _ACTIVE
        queue[top] = s
        top += 1
    active = d
    unseen_count[v0] = 0

    phase = 0
    first_size = -1
    max_size = 1
    sigma_ur = 0
    steps = 0

    while True:
        if active == 0:
            if sigma_ur + 1 > max_size:
                max_size = sigma_ur + 1
            if phase == 0:
                first_size = sigma_ur + 1
                if stop_first:
                    break
            if size == 0:
                break
            s = pool[pick(uniforms[cursor], size)]
            cursor += 1
            v = s // d
            for w in range(v * d, v * d + d):
                if status[w] == _UNSEEN:
                    status[w] = _ACTIVE
                    queue[top] = w
                    top += 1
            active += unseen_count[v]
            unseen_count[v] = 0
            sigma_ur = 0
            phase += 1
            continue

        e = -1
        while e < 0:
            if lifo:
                top -= 1
                cand = queue[top]
            else:
                cand = queue[head]
                head += 1
            if status[cand] == _ACTIVE:
                e = cand

        swap_remove(pool, pos, size, e)
        size -= 1
        if lazy:
            h = pool[pick(uniforms[cursor], size)]
            r = uniforms[cursor + 1] < p
            cursor += 2
        else:
            h = partner[e]
            r = retained[pair_of[e]]
        swap_remove(pool, pos, size, h)
        size -= 1
        status[e] = _EXPLORED
        steps += 1

        if status[h] == _ACTIVE:
            status[h] = _EXPLORED
            active -= 2
            continue

        status[h] = _EXPLORED
        v = h // d
        m = unseen_count[v]
        active -= 1
        unseen_count[v] = m - 1
        if r:
            sigma_ur += 1
            for w in range(v * d, v * d + d):
                if status[w] == _UNSEEN:
                    status[w] = _ACTIVE
                    queue[top] = w
                    top += 1
            active += m - 1
            unseen_count[v] = 0
            if threshold >= 0 and sigma_ur + 1 > threshold:
                if sigma_ur + 1 > max_size:
                    max_size = sigma_ur + 1
                if phase == 0:
                    first_size = sigma_ur + 1
                break

    return first_size, max_size, steps, cursor
