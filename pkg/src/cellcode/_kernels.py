"""Compiled inner loops of the surface trackers.

Cells are signed codes held in ``int64``. The layout arrives as plain
arrays: ``units[i] = 1 << shift[i]``, ``parity[t, j]`` = parity of the
number of open axes of topology ``t`` above ``j``, ``orth[t]`` = closed
axis of surfel topology ``t`` (or -1). The object is a spel bit array
indexed by packed coordinates.
"""

import numpy as np
from numba import njit, types
from numba.typed import Dict

TRACK_B = 0
TRACK_C = 1
TRACK_A = 2

_U1 = np.uint64(1)


@njit(cache=True, inline="always")
def _member(words, idx):
    return (words[idx >> 6] >> np.uint64(idx & 63)) & _U1 == _U1


@njit(cache=True, inline="always")
def _test_and_set(words, idx):
    w = idx >> 6
    bit = _U1 << np.uint64(idx & 63)
    if words[w] & bit:
        return True
    words[w] |= bit
    return False


@njit(cache=True)
def followers(b, j, n, cw, units, parity, orth):
    """Ordered direct followers of bel ``b`` along ``j`` and the two probe spels.

    Returns ``(f1, f2, f3, p_next, q_next)`` where ``p_next``/``q_next`` are the
    interior/exterior spels translated one step in the direct direction.
    """
    cmask = (1 << cw) - 1
    alpha = b >> (cw + 1)
    s = (b >> cw) & 1
    x = b & cmask
    k = orth[alpha]
    if (s ^ ((n - 1 - k) & 1)) == 0:
        p = x
        q = x - units[k]
    else:
        p = x - units[k]
        q = x
    tj = (n - 1 - j) & 1
    base = (((1 << n) - 1) ^ (1 << j)) << (cw + 1)
    if (s ^ parity[alpha, j]) == 0:
        f1 = base | (tj << cw) | p
        f3 = base | ((tj ^ 1) << cw) | q
        step = -units[j]
    else:
        f1 = base | ((tj ^ 1) << cw) | (p + units[j])
        f3 = base | (tj << cw) | (q + units[j])
        step = units[j]
    return f1, b + step, f3, p + step, q + step


@njit(cache=True)
def direct_adjacent(b, j, n, cw, units, parity, orth, adj, obj):
    """Direct adjacent bel of ``b`` along ``j`` and the rank (0, 1, 2) of the chosen follower."""
    f1, f2, f3, pn, qn = followers(b, j, n, cw, units, parity, orth)
    k = orth[b >> (cw + 1)]
    if adj[k, j]:
        if not _member(obj, pn):
            return f1, 0
        if not _member(obj, qn):
            return f2, 1
        return f3, 2
    if _member(obj, qn):
        return f3, 2
    if _member(obj, pn):
        return f2, 1
    return f1, 0


@njit(cache=True)
def is_bel(b, n, cw, units, orth, obj):
    cmask = (1 << cw) - 1
    alpha = b >> (cw + 1)
    s = (b >> cw) & 1
    x = b & cmask
    k = orth[alpha]
    if (s ^ ((n - 1 - k) & 1)) == 0:
        return _member(obj, x) and not _member(obj, x - units[k])
    return _member(obj, x - units[k]) and not _member(obj, x)


@njit(cache=True)
def indirect_adjacent(b, j, n, cw, units, parity, orth, adj, obj):
    """Bel ``c`` whose direct adjacent bel in the plane ``{orth(b), j}`` is ``b``, or -1."""
    sbit = 1 << cw
    k = orth[b >> (cw + 1)]
    g1, g2, g3, _, _ = followers(b ^ sbit, j, n, cw, units, parity, orth)
    for g in (g1 ^ sbit, g2 ^ sbit, g3 ^ sbit):
        if not is_bel(g, n, cw, units, orth, obj):
            continue
        axis = j if orth[g >> (cw + 1)] == k else k
        back, _ = direct_adjacent(g, axis, n, cw, units, parity, orth, adj, obj)
        if back == b:
            return g
    return -1


@njit(cache=True)
def _vis_index(c, cw, vis_lut, vis_signed):
    if vis_signed:
        return vis_lut[c >> (cw + 1)] + (c & ((1 << (cw + 1)) - 1))
    return vis_lut[c >> (cw + 1)] + (c & ((1 << cw) - 1))


@njit(cache=True, inline="always")
def _push(queue, tail, c):
    if tail == queue.size:
        grown = np.empty(queue.size * 2, dtype=np.int64)
        grown[:tail] = queue[:tail]
        queue = grown
    queue[tail] = c
    return queue, tail + 1


@njit(cache=True)
def track(kind, start, n, cw, units, parity, orth, adj, obj, vis, vis_lut, vis_signed):
    """Breadth-first tracking from bel ``start``; marks every reached bel in ``vis``.

    Returns ``(processed, hits, moves, tail_left)``: number of bels popped,
    re-encounters of already known bels, counts of moves to the first,
    second and third follower, and occurrences left in the tail multiset
    (Track C only).
    """
    queue = np.empty(1 << 12, dtype=np.int64)
    head = 0
    tail = 0
    queue[tail] = start
    tail += 1
    _test_and_set(vis, _vis_index(start, cw, vis_lut, vis_signed))
    moves = np.zeros(3, dtype=np.int64)
    hits = 0
    processed = 0
    tails = Dict.empty(key_type=types.int64, value_type=types.int64)
    if kind == TRACK_C and n > 1:
        tails[start] = n - 1
    while head < tail:
        p = queue[head]
        head += 1
        processed += 1
        k = orth[p >> (cw + 1)]
        for j in range(n):
            if j == k:
                continue
            q, m = direct_adjacent(p, j, n, cw, units, parity, orth, adj, obj)
            moves[m] += 1
            if kind == TRACK_C:
                left = tails.get(q, 0)
                if left > 0:
                    hits += 1
                    if left == 1:
                        del tails[q]
                    else:
                        tails[q] = left - 1
                else:
                    _test_and_set(vis, _vis_index(q, cw, vis_lut, vis_signed))
                    queue, tail = _push(queue, tail, q)
                    if n > 2:
                        tails[q] = n - 2
                continue
            if _test_and_set(vis, _vis_index(q, cw, vis_lut, vis_signed)):
                hits += 1
            else:
                queue, tail = _push(queue, tail, q)
            if kind == TRACK_A:
                r = indirect_adjacent(p, j, n, cw, units, parity, orth, adj, obj)
                if r >= 0:
                    if _test_and_set(vis, _vis_index(r, cw, vis_lut, vis_signed)):
                        hits += 1
                    else:
                        queue, tail = _push(queue, tail, r)
    left_total = 0
    for v in tails.values():
        left_total += v
    return processed, hits, moves, left_total
