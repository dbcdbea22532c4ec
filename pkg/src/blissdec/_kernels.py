"""Numba kernels for the min-sum decoder.

Kept separate so the readable reference paths in :mod:`blissdec.ldpc` and
:mod:`blissdec.constraints` stay free of jit plumbing.  Every kernel mirrors
the pure-Python reference bit-for-bit: same summation order (channel term,
then check messages in column order, then constraint arms in ascending node
order), same single clamp after each sum, one multiply by alpha/beta.  The
test suite asserts the bit-exact match.

Graph layout shared by all kernels
----------------------------------
Edges are numbered row-major: edge ``row_ptr[m] + i`` is the i-th variable of
check ``m``.  ``col_eid`` lists, per variable, its incident edge ids sorted by
check index.  Constraint node ``p`` is centered on variable
``first_center + p`` and owns three output arms ``b[p, 0..2]`` aimed at the
center-1, center, center+1 variables.
"""

from __future__ import annotations

import numpy as np
from numba import njit

BIG = 1e300


@njit(cache=True, inline="always")
def _clamp(x, bound):
    if x > bound:
        return bound
    if x < -bound:
        return -bound
    return x


@njit(cache=True, inline="always")
def _b_sum(b, n_nodes, first_center, q, exclude):
    # Constraint-node arms incident at variable q, ascending node order.
    # exclude: node index whose arm is dropped (extrinsic rule), -1 for none.
    acc = 0.0
    p = q - 1 - first_center  # node centered at q-1 reaches q via arm 2
    if 0 <= p < n_nodes and p != exclude:
        acc += b[p, 2]
    p = q - first_center  # node centered at q, arm 1
    if 0 <= p < n_nodes and p != exclude:
        acc += b[p, 1]
    p = q + 1 - first_center  # node centered at q+1, arm 0
    if 0 <= p < n_nodes and p != exclude:
        acc += b[p, 0]
    return acc


@njit(cache=True, inline="always")
def _u_message(t, v, col_ptr, col_eid, b, n_nodes, first_center, n, skip_eid, bound):
    acc = t[n]
    for k in range(col_ptr[n], col_ptr[n + 1]):
        e = col_eid[k]
        if e != skip_eid:
            acc += v[e]
    acc += _b_sum(b, n_nodes, first_center, n, -1)
    return _clamp(acc, bound)


@njit(cache=True, inline="always")
def _a_message(t, v, col_ptr, col_eid, b, n_nodes, first_center, q, own_node, bound):
    # Variable -> constraint-node message: all check messages, other arms.
    acc = t[q]
    for k in range(col_ptr[q], col_ptr[q + 1]):
        acc += v[col_eid[k]]
    acc += _b_sum(b, n_nodes, first_center, q, own_node)
    return _clamp(acc, bound)


@njit(cache=True, inline="always")
def _co_arm(arm, x, y, beta):
    # Output function of one constraint-node arm; LLR > 0 means bit 0.
    # arm 0: inputs (a_center, a_right), output toward the left variable.
    # arm 1: inputs (a_left, a_right), output toward the center variable.
    # arm 2: inputs (a_left, a_center), output toward the right variable.
    if x == 0.0 or y == 0.0:
        return 0.0
    mag = beta * min(abs(x), abs(y))
    xp = x > 0.0
    yp = y > 0.0
    if arm == 1:
        if xp and yp:
            return mag
        if not xp and not yp:
            return -mag
        return 0.0
    if arm == 2:
        if xp and not yp:
            return -mag
        if not xp and yp:
            return mag
        return 0.0
    if xp and not yp:
        return mag
    if not xp and yp:
        return -mag
    return 0.0


@njit(cache=True, inline="always")
def _check_min_pass(u_row, deg, lo, alpha, v):
    # Second half of a check update: emit v from the row's u messages using
    # the min1/min2 trick (selection only, so bit-exact vs direct exclusion).
    min1 = BIG
    min2 = BIG
    arg = -1
    parity = 0
    for i in range(deg):
        mag = abs(u_row[i])
        if mag < min1:
            min2 = min1
            min1 = mag
            arg = i
        elif mag < min2:
            min2 = mag
        if u_row[i] < 0.0:
            parity ^= 1
    for i in range(deg):
        mag = min2 if i == arg else min1
        out = alpha * mag
        if out == 0.0:
            v[lo + i] = 0.0
        else:
            s = parity
            if u_row[i] < 0.0:
                s ^= 1
            v[lo + i] = -out if s else out


@njit(cache=True, inline="always")
def _constraint_node(t, v, col_ptr, col_eid, b, a, n_nodes, first_center, beta, bound, p):
    c = first_center + p
    al = _a_message(t, v, col_ptr, col_eid, b, n_nodes, first_center, c - 1, p, bound)
    ac = _a_message(t, v, col_ptr, col_eid, b, n_nodes, first_center, c, p, bound)
    ar = _a_message(t, v, col_ptr, col_eid, b, n_nodes, first_center, c + 1, p, bound)
    a[p, 0] = al
    a[p, 1] = ac
    a[p, 2] = ar
    b[p, 0] = _co_arm(0, ac, ar, beta)
    b[p, 1] = _co_arm(1, al, ar, beta)
    b[p, 2] = _co_arm(2, al, ac, beta)


@njit(cache=True)
def iterate_serial(t, v, b, a, row_ptr, row_idx, col_ptr, col_eid,
                   n_nodes, first_center, alpha, beta, bound, scratch):
    # One full serial iteration: check m, then the constraint nodes in the
    # proportional window [n_nodes*m/M, n_nodes*(m+1)/M), all with immediate
    # effect (later nodes see messages updated by earlier ones).
    n_checks = row_ptr.shape[0] - 1
    for m in range(n_checks):
        lo = row_ptr[m]
        deg = row_ptr[m + 1] - lo
        for i in range(deg):
            n = row_idx[lo + i]
            scratch[i] = _u_message(t, v, col_ptr, col_eid, b, n_nodes,
                                    first_center, n, lo + i, bound)
        _check_min_pass(scratch, deg, lo, alpha, v)
        if n_nodes > 0:
            p_lo = (n_nodes * m) // n_checks
            p_hi = (n_nodes * (m + 1)) // n_checks
            for p in range(p_lo, p_hi):
                _constraint_node(t, v, col_ptr, col_eid, b, a, n_nodes,
                                 first_center, beta, bound, p)


@njit(cache=True)
def iterate_flooding(t, v, b, a, row_ptr, row_idx, col_ptr, col_eid,
                     n_nodes, first_center, alpha, beta, bound, u_all):
    # One flooding iteration: every u and a from the previous iteration's
    # v/b, then every v and b from those.
    n_checks = row_ptr.shape[0] - 1
    for m in range(n_checks):
        lo = row_ptr[m]
        for i in range(row_ptr[m + 1] - lo):
            n = row_idx[lo + i]
            u_all[lo + i] = _u_message(t, v, col_ptr, col_eid, b, n_nodes,
                                       first_center, n, lo + i, bound)
    for p in range(n_nodes):
        c = first_center + p
        a[p, 0] = _a_message(t, v, col_ptr, col_eid, b, n_nodes, first_center, c - 1, p, bound)
        a[p, 1] = _a_message(t, v, col_ptr, col_eid, b, n_nodes, first_center, c, p, bound)
        a[p, 2] = _a_message(t, v, col_ptr, col_eid, b, n_nodes, first_center, c + 1, p, bound)
    for m in range(n_checks):
        lo = row_ptr[m]
        _check_min_pass(u_all[lo:row_ptr[m + 1]], row_ptr[m + 1] - lo, lo, alpha, v)
    for p in range(n_nodes):
        b[p, 0] = _co_arm(0, a[p, 1], a[p, 2], beta)
        b[p, 1] = _co_arm(1, a[p, 0], a[p, 2], beta)
        b[p, 2] = _co_arm(2, a[p, 0], a[p, 1], beta)


@njit(cache=True)
def outputs_and_syndrome(t, v, row_ptr, row_idx, col_ptr, col_eid, bound, w, hard):
    # w_n = clamp(t_n + sum of all v into n); hard decision; syndrome weight.
    n_vars = w.shape[0]
    for n in range(n_vars):
        acc = t[n]
        for k in range(col_ptr[n], col_ptr[n + 1]):
            acc += v[col_eid[k]]
        acc = _clamp(acc, bound)
        w[n] = acc
        hard[n] = 1 if acc < 0.0 else 0
    weight = 0
    for m in range(row_ptr.shape[0] - 1):
        s = 0
        for k in range(row_ptr[m], row_ptr[m + 1]):
            s ^= hard[row_idx[k]]
        weight += s
    return weight


@njit(cache=True)
def decode_run(t, row_ptr, row_idx, col_ptr, col_eid, n_nodes, first_center,
               serial, alpha, beta, bound, max_iter, early_exit,
               v, b, a, w, hard, scratch, u_all):
    # Full decode. v/b/a must arrive zeroed. Returns (iterations, weight).
    weight = -1
    iters = 0
    for it in range(max_iter):
        if serial:
            iterate_serial(t, v, b, a, row_ptr, row_idx, col_ptr, col_eid,
                           n_nodes, first_center, alpha, beta, bound, scratch)
        else:
            iterate_flooding(t, v, b, a, row_ptr, row_idx, col_ptr, col_eid,
                             n_nodes, first_center, alpha, beta, bound, u_all)
        iters = it + 1
        if early_exit:
            weight = outputs_and_syndrome(t, v, row_ptr, row_idx, col_ptr,
                                          col_eid, bound, w, hard)
            if weight == 0:
                break
    if weight < 0 or not early_exit:
        weight = outputs_and_syndrome(t, v, row_ptr, row_idx, col_ptr,
                                      col_eid, bound, w, hard)
    return iters, weight
