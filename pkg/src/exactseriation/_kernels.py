"""Hot loops: stress/ME evaluation, exhaustive search, subset DPs, branch and bound.

Every public function here dispatches to a numba-compiled kernel when
:data:`exactseriation._accel.HAVE_NUMBA` is true, and to a numpy (or plain
Python) implementation otherwise. Both paths return identical optima; witness
permutations agree because tie-breaking is defined on values within
:func:`tie_tol` of the optimum, not on summation order.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from ._accel import HAVE_NUMBA, njit

INF = np.inf


def tie_tol(value: float) -> float:
    """Slack under which two objective values count as a tie."""
    return 1e-10 * max(1.0, abs(value))


# --------------------------------------------------------------------------
# evaluation


@njit()
def _stress_nb(b, offs, p):
    n, m = b.shape
    total = 0.0
    for i in range(n):
        for j in range(m):
            x = b[i, j]
            for t in range(offs.shape[0]):
                k = i + offs[t, 0]
                l = j + offs[t, 1]
                if 0 <= k < n and 0 <= l < m:
                    d = abs(x - b[k, l])
                    if p == 1.0:
                        total += d
                    elif p == 2.0:
                        total += d * d
                    else:
                        total += d**p
    return total


@njit()
def _me_nb(b):
    n, m = b.shape
    total = 0.0
    for i in range(n):
        for j in range(m):
            if j + 1 < m:
                total += b[i, j] * b[i, j + 1]
            if i + 1 < n:
                total += b[i, j] * b[i + 1, j]
    return total


def _stress_np(b, offs, p):
    """Batched stress over the last two axes of ``b``."""
    n, m = b.shape[-2:]
    total = np.zeros(b.shape[:-2])
    for dr, dc in offs:
        i0, i1 = max(0, -dr), min(n, n - dr)
        j0, j1 = max(0, -dc), min(m, m - dc)
        if i0 >= i1 or j0 >= j1:
            continue
        d = np.abs(b[..., i0:i1, j0:j1] - b[..., i0 + dr : i1 + dr, j0 + dc : j1 + dc])
        if p == 1:
            total = total + d.sum(axis=(-2, -1))
        elif p == 2:
            total = total + (d * d).sum(axis=(-2, -1))
        else:
            total = total + (d**p).sum(axis=(-2, -1))
    return total


def _me_np(b):
    return (b[..., :, :-1] * b[..., :, 1:]).sum(axis=(-2, -1)) + (b[..., :-1, :] * b[..., 1:, :]).sum(
        axis=(-2, -1)
    )


def stress_value(b: np.ndarray, offs: np.ndarray, p: float) -> float:
    if HAVE_NUMBA:
        return float(_stress_nb(np.ascontiguousarray(b, dtype=np.float64), offs, float(p)))
    return float(_stress_np(b, [tuple(o) for o in offs], p))


def me_value(b: np.ndarray) -> float:
    if HAVE_NUMBA:
        return float(_me_nb(np.ascontiguousarray(b, dtype=np.float64)))
    return float(_me_np(b))


# --------------------------------------------------------------------------
# exhaustive search over (row mapping, column mapping), lexicographic


@njit()
def _next_perm(a):
    n = a.size
    i = n - 2
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while a[j] <= a[i]:
        j -= 1
    t = a[i]
    a[i] = a[j]
    a[j] = t
    lo = i + 1
    hi = n - 1
    while lo < hi:
        t = a[lo]
        a[lo] = a[hi]
        a[hi] = t
        lo += 1
        hi -= 1
    return True


@njit()
def _brute_scan_nb(a, offs, p, is_me, coordinated, find_first, target):
    # find_first == False: return the minimum of the (sign-adjusted) objective.
    # find_first == True: return the first mapping pair whose value <= target.
    n, m = a.shape
    sr = np.arange(n)
    rowed = np.empty((n, m))
    b = np.empty((n, m))
    best = np.inf
    best_r = sr.copy()
    best_c = np.arange(m)
    while True:
        for i in range(n):
            for j in range(m):
                rowed[sr[i], j] = a[i, j]
        sc = sr.copy() if coordinated else np.arange(m)
        while True:
            for i in range(n):
                for j in range(m):
                    b[i, sc[j]] = rowed[i, j]
            if is_me:
                v = -_me_nb(b)
            else:
                v = _stress_nb(b, offs, p)
            if find_first:
                if v <= target:
                    return v, sr, sc
            elif v < best:
                best = v
                best_r[:] = sr
                best_c[:] = sc
            if coordinated or not _next_perm(sc):
                break
        if not _next_perm(sr):
            break
    return best, best_r, best_c


def _brute_np(a, offs, p, is_me, coordinated):
    n, m = a.shape
    offs_t = [tuple(o) for o in offs]

    def evaluate(batch):
        return -_me_np(batch) if is_me else _stress_np(batch, offs_t, p)

    row_maps = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    row_orders = np.argsort(row_maps, axis=1)
    if coordinated:
        vals = np.concatenate(
            [
                evaluate(a[row_orders[s : s + 4096, :, None], row_orders[s : s + 4096, None, :]])
                for s in range(0, len(row_orders), 4096)
            ]
        )
        opt = vals.min()
        k = int(np.flatnonzero(vals <= opt + tie_tol(opt))[0])
        return opt, row_maps[k], row_maps[k]
    col_maps = np.array(list(itertools.permutations(range(m))), dtype=np.int64)
    col_orders = np.argsort(col_maps, axis=1)
    vals = np.empty((len(row_maps), len(col_maps)))
    for r, order in enumerate(row_orders):
        vals[r] = evaluate(a[order][:, col_orders].transpose(1, 0, 2))
    opt = vals.min()
    k = int(np.flatnonzero(vals.ravel() <= opt + tie_tol(opt))[0])
    r, c = divmod(k, len(col_maps))
    return opt, row_maps[r], col_maps[c]


def brute_force_search(a, offs, p, is_me, coordinated):
    """Optimal (value, row mapping, col mapping) by enumerating all mappings.

    Stress is minimized; for ``is_me`` the effectiveness is maximized and the
    returned value is the effectiveness itself. Among ties the lexicographically
    smallest (row mapping, column mapping) wins.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    offs = np.ascontiguousarray(offs, dtype=np.int64).reshape(-1, 2)
    if HAVE_NUMBA:
        opt, _, _ = _brute_scan_nb(a, offs, float(p), is_me, coordinated, False, 0.0)
        _, r, c = _brute_scan_nb(a, offs, float(p), is_me, coordinated, True, opt + tie_tol(opt))
    else:
        opt, r, c = _brute_np(a, offs, p, is_me, coordinated)
    return (-opt if is_me else opt), np.array(r), np.array(c)


# --------------------------------------------------------------------------
# Held-Karp over Hamiltonian paths: f[S, v] = cheapest path covering S that starts at v


@njit()
def _hk_table_nb(w):
    n = w.shape[0]
    full = 1 << n
    f = np.full((full, n), np.inf)
    for v in range(n):
        f[1 << v, v] = 0.0
    for s in range(1, full):
        for v in range(n):
            if not (s >> v) & 1:
                continue
            rest = s ^ (1 << v)
            if rest == 0:
                continue
            best = np.inf
            for u in range(n):
                if (rest >> u) & 1:
                    c = w[v, u] + f[rest, u]
                    if c < best:
                        best = c
            f[s, v] = best
    return f


def _hk_table_np(w):
    n = w.shape[0]
    idx = np.arange(n)
    f = np.full((1 << n, n), np.inf)
    f[1 << idx, idx] = 0.0
    for s in range(1, 1 << n):
        members = idx[((s >> idx) & 1) == 1]
        if members.size < 2:
            continue
        rest = s ^ (1 << members)
        cand = w[np.ix_(members, members)] + f[rest][:, members]
        f[s, members] = cand.min(axis=1)
    return f


def held_karp_min(w: np.ndarray) -> list[int]:
    """Lexicographically smallest minimum-weight Hamiltonian path of symmetric ``w``."""
    w = np.ascontiguousarray(w, dtype=np.float64)
    n = w.shape[0]
    if n == 1:
        return [0]
    f = _hk_table_nb(w) if HAVE_NUMBA else _hk_table_np(w)
    full = (1 << n) - 1
    opt = float(f[full].min())
    thr = tie_tol(opt)
    v = int(np.flatnonzero(f[full] <= opt + thr)[0])
    order = [v]
    s = full
    while s != (1 << v):
        rest = s ^ (1 << v)
        target = f[s, v] + thr
        for u in range(n):
            if (rest >> u) & 1 and w[v, u] + f[rest, u] <= target:
                break
        order.append(u)
        s, v = rest, u
    return order


# --------------------------------------------------------------------------
# second-order paths: cost = sum w1 over consecutive pairs + sum w2 over pairs two apart
# g[S, v, u] = cheapest path covering S whose first two nodes are v, u


@njit()
def _hk2_table_nb(w1, w2):
    n = w1.shape[0]
    full = 1 << n
    g = np.full((full, n, n), np.inf)
    for v in range(n):
        for u in range(n):
            if u != v:
                g[(1 << v) | (1 << u), v, u] = w1[v, u]
    for s in range(1, full):
        cnt = 0
        t = s
        while t:
            cnt += t & 1
            t >>= 1
        if cnt < 3:
            continue
        for v in range(n):
            if not (s >> v) & 1:
                continue
            rest = s ^ (1 << v)
            for u in range(n):
                if not (rest >> u) & 1:
                    continue
                best = np.inf
                for x in range(n):
                    if x != u and (rest >> x) & 1:
                        c = w2[v, x] + g[rest, u, x]
                        if c < best:
                            best = c
                g[s, v, u] = w1[v, u] + best
    return g


def _hk2_table_np(w1, w2):
    n = w1.shape[0]
    idx = np.arange(n)
    g = np.full((1 << n, n, n), np.inf)
    for v in range(n):
        for u in range(n):
            if u != v:
                g[(1 << v) | (1 << u), v, u] = w1[v, u]
    for s in range(1, 1 << n):
        members = idx[((s >> idx) & 1) == 1]
        if members.size < 3:
            continue
        rest = s ^ (1 << members)
        sub = g[rest][:, members][:, :, members]  # [a, b, c] = g[rest_a, m_b, m_c]
        cand = w2[np.ix_(members, members)][:, None, :] + sub
        g[np.ix_([s], members, members)] = (w1[np.ix_(members, members)] + cand.min(axis=2))[None]
    return g


def held_karp2_min(w1: np.ndarray, w2: np.ndarray) -> list[int]:
    """Lexicographically smallest optimal path under consecutive plus skip-one costs."""
    w1 = np.ascontiguousarray(w1, dtype=np.float64)
    w2 = np.ascontiguousarray(w2, dtype=np.float64)
    n = w1.shape[0]
    if n == 1:
        return [0]
    if n == 2:
        return [0, 1]
    g = _hk2_table_nb(w1, w2) if HAVE_NUMBA else _hk2_table_np(w1, w2)
    full = (1 << n) - 1
    top = g[full]
    opt = float(top.min())
    thr = tie_tol(opt)
    flat = int(np.flatnonzero(top.ravel() <= opt + thr)[0])
    v, u = divmod(flat, n)
    order = [v, u]
    s = full
    while s != (1 << v) | (1 << u):
        rest = s ^ (1 << v)
        target = g[s, v, u] + thr
        for x in range(n):
            if x != u and (rest >> x) & 1 and w1[v, u] + w2[v, x] + g[rest, u, x] <= target:
                break
        order.append(x)
        s, v, u = rest, u, x
    return order


# --------------------------------------------------------------------------
# 2-opt descent on an open path


@njit()
def _two_opt_nb(w, order, tol):
    n = order.size
    improved = True
    while improved:
        improved = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                # reverse order[i..j]
                delta = 0.0
                if i > 0:
                    delta += w[order[i - 1], order[j]] - w[order[i - 1], order[i]]
                if j < n - 1:
                    delta += w[order[i], order[j + 1]] - w[order[j], order[j + 1]]
                if delta < -tol:
                    lo = i
                    hi = j
                    while lo < hi:
                        t = order[lo]
                        order[lo] = order[hi]
                        order[hi] = t
                        lo += 1
                        hi -= 1
                    improved = True
    return order


def two_opt(w: np.ndarray, order) -> np.ndarray:
    w = np.ascontiguousarray(w, dtype=np.float64)
    order = np.array(order, dtype=np.int64)
    scale = float(np.abs(w).max()) if w.size else 0.0
    return _two_opt_nb(w, order, 1e-12 * max(1.0, scale))


# --------------------------------------------------------------------------
# depth-first branch and bound on open paths (minimization)


@njit()
def _completion_lb(w, used, last, nodes, key, in_tree):
    # lower bound on a path that starts at `last` and visits every unused node
    n = w.shape[0]
    k = 0
    nodes[0] = last
    for v in range(n):
        if not used[v]:
            k += 1
            nodes[k] = v
    if k == 0:
        return 0.0
    if k == 1:
        return w[last, nodes[1]]
    size = k + 1
    for a in range(size):
        key[a] = np.inf
        in_tree[a] = False
    key[0] = 0.0
    mst = 0.0
    for _ in range(size):
        best = np.inf
        pick = -1
        for a in range(size):
            if not in_tree[a] and key[a] < best:
                best = key[a]
                pick = a
        in_tree[pick] = True
        mst += best
        for b in range(size):
            if not in_tree[b]:
                c = w[nodes[pick], nodes[b]]
                if c < key[b]:
                    key[b] = c
    # degree relaxation: `last` has degree 1, one unknown endpoint has degree 1
    c1_last = np.inf
    for b in range(1, size):
        c = w[last, nodes[b]]
        if c < c1_last:
            c1_last = c
    deg = c1_last
    max_c2 = -np.inf
    for a in range(1, size):
        c1 = np.inf
        c2 = np.inf
        for b in range(size):
            if b != a:
                c = w[nodes[a], nodes[b]]
                if c < c1:
                    c2 = c1
                    c1 = c
                elif c < c2:
                    c2 = c
        deg += c1 + c2
        if c2 > max_c2:
            max_c2 = c2
    deg = 0.5 * (deg - max_c2)
    return mst if mst > deg else deg


@njit()
def _bnb_run(w, path, used, cand, pcost, state, inc_val, inc_path, budget, tol, nodes_buf, key, in_tree):
    # state[0] = current depth (-1 when the tree is exhausted)
    n = w.shape[0]
    depth = state[0]
    count = 0
    while depth >= 0:
        if count >= budget:
            state[0] = depth
            return count, False
        v = cand[depth]
        while v < n and used[v]:
            v += 1
        if depth == 0 and v >= n - 1:
            v = n  # the first node must be smaller than the last one
        if v >= n:
            depth -= 1
            if depth >= 0:
                used[path[depth]] = False
            continue
        cand[depth] = v + 1
        cost = 0.0 if depth == 0 else pcost[depth] + w[path[depth - 1], v]
        if depth == n - 1:
            if v > path[0] and cost < inc_val[0] - tol:
                inc_val[0] = cost
                for t in range(n - 1):
                    inc_path[t] = path[t]
                inc_path[n - 1] = v
            continue
        used[v] = True
        path[depth] = v
        count += 1
        first = path[0]
        feasible = False
        for u in range(first + 1, n):
            if not used[u]:
                feasible = True
                break
        if feasible:
            lb = cost + _completion_lb(w, used, v, nodes_buf, key, in_tree)
            feasible = lb < inc_val[0] - tol
        if not feasible:
            used[v] = False
            continue
        pcost[depth + 1] = cost
        depth += 1
        cand[depth] = 0
    state[0] = -1
    return count, True


class PathSearch:
    """Resumable branch-and-bound state for a minimum-weight open path."""

    def __init__(self, w: np.ndarray, incumbent_order):
        self.w = np.ascontiguousarray(w, dtype=np.float64)
        n = self.w.shape[0]
        self.n = n
        self.path = np.zeros(n, dtype=np.int64)
        self.used = np.zeros(n, dtype=np.bool_)
        self.cand = np.zeros(n, dtype=np.int64)
        self.pcost = np.zeros(n + 1)
        self.state = np.zeros(1, dtype=np.int64)
        order = np.array(incumbent_order, dtype=np.int64)
        if order[0] > order[-1]:
            order = order[::-1].copy()
        self.inc_path = order
        self.inc_val = np.array([path_cost(self.w, order)])
        scale = float(np.abs(self.w).max()) if n > 1 else 0.0
        self.tol = 1e-12 * max(1.0, scale) * n
        self._buf = (np.zeros(n + 1, dtype=np.int64), np.zeros(n + 1), np.zeros(n + 1, dtype=np.bool_))
        self.nodes = 0
        self.done = n <= 2

    def run(self, budget: int) -> bool:
        if self.done:
            return True
        count, finished = _bnb_run(
            self.w, self.path, self.used, self.cand, self.pcost, self.state,
            self.inc_val, self.inc_path, int(budget), self.tol, *self._buf,
        )
        self.nodes += int(count)
        self.done = bool(finished)
        return self.done

    def lower_bound(self) -> float:
        """Valid bound on the optimum given the unexplored part of the tree."""
        inc = float(self.inc_val[0])
        if self.done:
            return inc
        root = _mst_value(self.w)
        depth = int(self.state[0])
        best = inc
        used = np.zeros(self.n, dtype=np.bool_)
        for level in range(depth + 1):
            if level == 0:
                lb = root
            else:
                used[self.path[level - 1]] = True
                lb = self.pcost[level] + _completion_lb(
                    self.w, used, self.path[level - 1], *self._buf
                )
            best = min(best, max(lb, root))
        return float(best)


def _mst_value(w: np.ndarray) -> float:
    n = w.shape[0]
    if n < 2:
        return 0.0
    key = np.full(n, np.inf)
    key[0] = 0.0
    in_tree = np.zeros(n, dtype=bool)
    total = 0.0
    for _ in range(n):
        a = int(np.argmin(np.where(in_tree, np.inf, key)))
        in_tree[a] = True
        total += key[a]
        key = np.where(in_tree, key, np.minimum(key, w[a]))
    return float(total)


def path_cost(w: np.ndarray, order) -> float:
    order = np.asarray(order, dtype=np.int64)
    if order.size < 2:
        return 0.0
    total = 0.0
    for a, b in zip(order[:-1], order[1:]):
        total += w[a, b]
    return float(total)


def path2_cost(w1: np.ndarray, w2: np.ndarray, order) -> float:
    order = np.asarray(order, dtype=np.int64)
    total = path_cost(w1, order)
    for a, b in zip(order[:-2], order[2:]):
        total += w2[a, b]
    return float(total)


def log_factorial(k: int) -> float:
    return math.lgamma(k + 1)
