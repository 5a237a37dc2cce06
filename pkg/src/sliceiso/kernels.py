"""Hot loops: per-slice product enumeration and simplex pivoting.

Every kernel exists twice.  The ``*_nb`` variant is a scalar loop compiled
with numba; the ``*_np`` variant is the vectorized numpy equivalent.  The
unsuffixed names point at one or the other depending on
``SLICEISO_DISABLE_JIT`` (see ``_jit``).  Both variants must return
identical results; the test-suite runs them side by side.

Layer choice tables are passed flattened: ``vals[offsets[k] + j]`` is the
value of choice ``j`` on layer ``k`` (layers in stack order).  A candidate is
a mixed-radix index with the first layer most significant, so ascending
candidate index is lexicographic order over layers.
"""

import numpy as np

from ._jit import JIT_ENABLED, njit

STATUS_OPTIMAL = 0
STATUS_UNBOUNDED = 2
STATUS_ITERLIMIT = 3

# ---------------------------------------------------------------- enumeration


@njit
def _prefix(vals, offsets, digits, partial, start):
    # partial[k] = layers 0..k summed left to right, the same order numpy uses
    for k in range(start, digits.shape[0]):
        prev = partial[k - 1] if k > 0 else 0.0
        partial[k] = prev + vals[offsets[k] + digits[k]]


@njit
def _advance(digits, counts):
    """Increment the mixed-radix counter; return the highest layer whose digit changed, -1 on wrap."""
    k = digits.shape[0] - 1
    while k >= 0:
        digits[k] += 1
        if digits[k] < counts[k]:
            return k
        digits[k] = 0
        k -= 1
    return -1


@njit
def _scan(cost, q, s, offsets, counts, q_min, s_min, tol, limit):
    """Walk candidates in index order, the last layer as the inner loop.

    Returns (-1, min feasible cost) when nothing costs at most ``limit``,
    else (index, cost) of the first feasible candidate that does.
    """
    nl = counts.shape[0]
    head = nl - 1
    last, width = offsets[head], counts[head]
    # digits of the leading layers; the last layer's digit stays 0 here
    digits = np.zeros(nl, dtype=np.int64)
    pc = np.zeros(nl)
    pq = np.zeros(nl)
    ps = np.zeros(nl)
    best = np.inf
    base = 0
    changed = 0
    while changed >= 0:
        if head > 0:
            _prefix(cost, offsets, digits[:head], pc, changed)
            _prefix(q, offsets, digits[:head], pq, changed)
            _prefix(s, offsets, digits[:head], ps, changed)
        c0 = pc[head - 1] if head > 0 else 0.0
        q0 = pq[head - 1] if head > 0 else 0.0
        s0 = ps[head - 1] if head > 0 else 0.0
        for j in range(width):
            if q0 + q[last + j] >= q_min - tol and s0 + s[last + j] >= s_min - tol:
                c = c0 + cost[last + j]
                if c <= limit:
                    return base + j, c
                if c < best:
                    best = c
        base += width
        changed = _advance(digits[:head], counts[:head]) if head > 0 else -1
    return -1, best


@njit
def best_product_nb(cost, q, s, offsets, counts, q_min, s_min, tol):
    total = 1
    for k in range(counts.shape[0]):
        total *= counts[k]
    _, best = _scan(cost, q, s, offsets, counts, q_min, s_min, tol, -np.inf)
    if best == np.inf:
        return -1, total
    # second pass: lexicographically first candidate within tol of the minimum
    idx, _ = _scan(cost, q, s, offsets, counts, q_min, s_min, tol, best + tol)
    return idx, total


def _outer_sums(vals, offsets, counts):
    acc = np.zeros(1)
    for k in range(len(counts)):
        layer = vals[offsets[k] : offsets[k] + counts[k]]
        acc = np.add.outer(acc, layer).reshape(-1)
    return acc


def best_product_np(cost, q, s, offsets, counts, q_min, s_min, tol):
    total = int(np.prod(counts))
    c = _outer_sums(cost, offsets, counts)
    ok = (_outer_sums(q, offsets, counts) >= q_min - tol) & (_outer_sums(s, offsets, counts) >= s_min - tol)
    if not ok.any():
        return -1, total
    best = c[ok].min()
    hits = np.flatnonzero(ok & (c <= best + tol))
    return int(hits[0]), total


@njit
def collect_product_nb(cost, q, s, offsets, counts, q_min, s_min, tol):
    nl = counts.shape[0]
    head = nl - 1
    last, width = offsets[head], counts[head]
    total = 1
    for k in range(nl):
        total *= counts[k]
    idx_out = np.empty(total, dtype=np.int64)
    c_out = np.empty(total)
    q_out = np.empty(total)
    s_out = np.empty(total)
    digits = np.zeros(nl, dtype=np.int64)
    pc = np.zeros(nl)
    pq = np.zeros(nl)
    ps = np.zeros(nl)
    m = 0
    base = 0
    changed = 0
    while changed >= 0:
        if head > 0:
            _prefix(cost, offsets, digits[:head], pc, changed)
            _prefix(q, offsets, digits[:head], pq, changed)
            _prefix(s, offsets, digits[:head], ps, changed)
        c0 = pc[head - 1] if head > 0 else 0.0
        q0 = pq[head - 1] if head > 0 else 0.0
        s0 = ps[head - 1] if head > 0 else 0.0
        for j in range(width):
            qq = q0 + q[last + j]
            ss = s0 + s[last + j]
            if qq >= q_min - tol and ss >= s_min - tol:
                idx_out[m] = base + j
                c_out[m] = c0 + cost[last + j]
                q_out[m] = qq
                s_out[m] = ss
                m += 1
        base += width
        changed = _advance(digits[:head], counts[:head]) if head > 0 else -1
    return idx_out[:m], c_out[:m], q_out[:m], s_out[:m]


def collect_product_np(cost, q, s, offsets, counts, q_min, s_min, tol):
    c = _outer_sums(cost, offsets, counts)
    qq = _outer_sums(q, offsets, counts)
    ss = _outer_sums(s, offsets, counts)
    idx = np.flatnonzero((qq >= q_min - tol) & (ss >= s_min - tol))
    return idx.astype(np.int64), c[idx], qq[idx], ss[idx]


def decode_index(idx, counts):
    """Mixed-radix digits of candidate ``idx`` (first layer most significant)."""
    digits = []
    for n in reversed(counts):
        idx, d = divmod(int(idx), int(n))
        digits.append(d)
    return digits[::-1]


# -------------------------------------------------------------------- simplex
#
# Tableau layout: rows 0..m-1 are constraints, row m holds reduced costs,
# the last column is the right-hand side (objective row carries -z).
# Entering and leaving choices follow Bland's rule, so no cycling.


@njit
def simplex_iterate_nb(T, basis, n_enter, tol, max_iter):
    m = T.shape[0] - 1
    ncol = T.shape[1]
    for it in range(max_iter):
        enter = -1
        for j in range(n_enter):
            if T[m, j] < -tol:
                enter = j
                break
        if enter < 0:
            return STATUS_OPTIMAL, it
        best_ratio = np.inf
        for r in range(m):
            a = T[r, enter]
            if a > tol:
                ratio = T[r, ncol - 1] / a
                if ratio < best_ratio:
                    best_ratio = ratio
        if best_ratio == np.inf:
            return STATUS_UNBOUNDED, it
        leave = -1
        for r in range(m):
            a = T[r, enter]
            if a > tol and abs(T[r, ncol - 1] / a - best_ratio) <= 1e-12:
                if leave < 0 or basis[r] < basis[leave]:
                    leave = r
        piv = T[leave, enter]
        for j in range(ncol):
            T[leave, j] /= piv
        for r in range(m + 1):
            if r != leave:
                f = T[r, enter]
                if f != 0.0:
                    for j in range(ncol):
                        T[r, j] -= f * T[leave, j]
        basis[leave] = enter
    return STATUS_ITERLIMIT, max_iter


def pivot_np(T, row, col):
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])


def simplex_iterate_np(T, basis, n_enter, tol, max_iter):
    m = T.shape[0] - 1
    for it in range(max_iter):
        neg = np.flatnonzero(T[m, :n_enter] < -tol)
        if neg.size == 0:
            return STATUS_OPTIMAL, it
        enter = int(neg[0])
        col = T[:m, enter]
        rows = np.flatnonzero(col > tol)
        if rows.size == 0:
            return STATUS_UNBOUNDED, it
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        tied = rows[np.abs(ratios - best) <= 1e-12]
        leave = int(tied[np.argmin(basis[tied])])
        pivot_np(T, leave, enter)
        basis[leave] = enter
    return STATUS_ITERLIMIT, max_iter


if JIT_ENABLED:
    best_product = best_product_nb
    collect_product = collect_product_nb
    simplex_iterate = simplex_iterate_nb
else:
    best_product = best_product_np
    collect_product = collect_product_np
    simplex_iterate = simplex_iterate_np
