"""Compiled inner loops for the evolutionary engine.

All random draws are made by the caller and passed in as arrays, so results
are reproducible regardless of JIT state, call batching, or worker count.
The objective code mirrors evaluate.decode plus geometry.interception_time
arithmetic; the equivalence is pinned by tests, and node values here are
row indices into the instance's node table, not raw customer ids.
"""

from __future__ import annotations

import numpy as np
from numba import njit

TIME_EPS = 1e-9
_DEGENERATE_REL = 1e-12


@njit(cache=True)
def _chase_time(ex, ey, vx, vy, jx, jy, v_d):
    """Earliest t >= 0 with |truck(t) - drone| = v_d*t, or -1 when none exists."""
    rx = ex - jx
    ry = ey - jy
    c = rx * rx + ry * ry
    if c == 0.0:
        return 0.0
    b = 2.0 * (rx * vx + ry * vy)
    a = vx * vx + vy * vy - v_d * v_d
    if abs(a) <= _DEGENERATE_REL * (vx * vx + vy * vy + v_d * v_d):
        if b >= 0.0:
            return -1.0
        return c / -b
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return -1.0
    sq = np.sqrt(disc)
    if b != 0.0:
        q = -0.5 * (b + (sq if b > 0.0 else -sq))
    else:
        q = -0.5 * sq
    if q == 0.0:
        return 0.0
    best = -1.0
    r1 = q / a
    r2 = c / q
    if r1 >= 0.0:
        best = r1
    if r2 >= 0.0 and (best < 0.0 or r2 < best):
        best = r2
    return best


@njit(cache=True)
def _objective(nodes, tags, bounds, dist, xs, ys, v_t, v_d, omega, sigma, max_dd):
    """(makespan, truck_distance, drone_distance) of one feasible member."""
    total = 0.0
    truck_d = 0.0
    drone_d = 0.0
    start = 0
    for s in range(bounds.shape[0]):
        end = bounds[s]
        if end == start:
            continue
        t = 0.0
        cur = 0
        ended_at_depot = False
        i = start
        while i < end:
            node = nodes[i]
            if tags[i] == 0:
                truck_d += dist[cur, node]
                t += dist[cur, node] / v_t + omega
                cur = node
                i += 1
                continue
            nxt = nodes[i + 1] if i + 1 < end else 0
            launch_len = dist[cur, node]
            drone_d += launch_len
            free = t + launch_len / v_d + sigma
            seg_len = dist[cur, nxt]
            truck_d += seg_len
            arr = t + seg_len / v_t
            direct = dist[node, nxt]
            drone_at_node = free + direct / v_d
            direct_join = arr if arr > drone_at_node else drone_at_node
            joined = direct_join
            flight = direct
            if seg_len > 0.0 and direct > 0.0 and free < arr - TIME_EPS:
                dt = free - t
                vx = v_t * (xs[nxt] - xs[cur]) / seg_len
                vy = v_t * (ys[nxt] - ys[cur]) / seg_len
                ex = xs[cur] + vx * dt
                ey = ys[cur] + vy * dt
                chase = _chase_time(ex, ey, vx, vy, xs[node], ys[node], v_d)
                if chase >= 0.0:
                    meet = free + chase
                    if meet <= arr + TIME_EPS and meet < direct_join - TIME_EPS:
                        chase_len = v_d * chase
                        if max_dd <= 0.0 or chase_len <= max_dd:
                            joined = arr
                            flight = chase_len
            drone_d += flight
            cur = nxt
            if nxt == 0:
                t = arr if arr > joined else joined
                ended_at_depot = True
            else:
                ready = arr + omega
                t = ready if ready > joined else joined
            i += 2
        if not ended_at_depot:
            truck_d += dist[cur, 0]
            t += dist[cur, 0] / v_t
        if t > total:
            total = t
        start = end
    return total, truck_d, drone_d


@njit(cache=True)
def _rows_equal(nodes_a, tags_a, nodes_b, tags_b):
    for k in range(nodes_a.shape[0]):
        if nodes_a[k] != nodes_b[k] or tags_a[k] != tags_b[k]:
            return False
    return True


@njit(cache=True)
def _pmx_fill(out_nodes, out_tags, a_nodes, a_tags, b_nodes, b_tags, lo, hi, present):
    """Window [lo, hi) from parent A, the rest from B in B's order."""
    n = a_nodes.shape[0]
    present[:] = 0
    for i in range(lo, hi):
        out_nodes[i] = a_nodes[i]
        out_tags[i] = a_tags[i]
        present[a_nodes[i]] = 1
    pos = 0
    if pos == lo:
        pos = hi
    for i in range(n):
        v = b_nodes[i]
        if present[v] == 0:
            out_nodes[pos] = v
            out_tags[pos] = b_tags[i]
            present[v] = 1
            pos += 1
            if pos == lo:
                pos = hi


@njit(cache=True)
def _mutate_inplace(nodes, tags, swap_u, target_u, flip_u, gamma, allow_flip):
    n = nodes.shape[0]
    if n > 1:
        for i in range(n):
            if swap_u[i] < gamma:
                s = int(target_u[i] * (n - 1))
                if s >= i:
                    s += 1
                tmp_n = nodes[i]
                nodes[i] = nodes[s]
                nodes[s] = tmp_n
                tmp_t = tags[i]
                tags[i] = tags[s]
                tags[s] = tmp_t
    if allow_flip:
        for i in range(n):
            if flip_u[i] < gamma:
                tags[i] = 1 - tags[i]


@njit(cache=True)
def _repair_inplace(nodes, tags, bounds, dist, max_dd):
    """Second of two consecutive drones becomes a truck delivery; with a
    range cap, any drone whose launch or return leg is too long as well."""
    start = 0
    for s in range(bounds.shape[0]):
        end = bounds[s]
        launch = 0
        prev_drone = False
        for i in range(start, end):
            if tags[i] == 1:
                flip = prev_drone
                if not flip and max_dd > 0.0:
                    nxt = nodes[i + 1] if i + 1 < end else 0
                    if dist[launch, nodes[i]] > max_dd or dist[nodes[i], nxt] > max_dd:
                        flip = True
                if flip:
                    tags[i] = 0
                    launch = nodes[i]
                    prev_drone = False
                else:
                    prev_drone = True
            else:
                launch = nodes[i]
                prev_drone = False
        start = end


@njit(cache=True)
def repair_members(nodes, tags, bounds, dist, max_dd):
    for m in range(nodes.shape[0]):
        _repair_inplace(nodes[m], tags[m], bounds, dist, max_dd)


@njit(cache=True)
def evaluate_members(nodes, tags, bounds, dist, xs, ys, v_t, v_d, omega, sigma, max_dd, out):
    for m in range(nodes.shape[0]):
        z, td, dd = _objective(nodes[m], tags[m], bounds, dist, xs, ys,
                               v_t, v_d, omega, sigma, max_dd)
        out[m, 0] = z
        out[m, 1] = td
        out[m, 2] = dd


@njit(cache=True)
def breed_generation(pool_nodes, pool_tags, a_idx, b_idx, b_retry, cuts,
                     swap_u, target_u, flip_u, gamma, allow_flip,
                     bounds, dist, xs, ys, v_t, v_d, omega, sigma, max_dd,
                     child_nodes, child_tags, out):
    """One full generation: mate choice, crossover, mutation, repair, evaluation.

    Mate b is re-drawn from b_retry while it equals parent a by value, then
    scanned cyclically; if the pool holds one unique member the crossover
    degenerates to a copy.
    """
    pop = child_nodes.shape[0]
    pool = pool_nodes.shape[0]
    present = np.zeros(child_nodes.shape[1] + 1, dtype=np.uint8)
    for m in range(pop):
        a = a_idx[m]
        b = b_idx[m]
        if _rows_equal(pool_nodes[a], pool_tags[a], pool_nodes[b], pool_tags[b]):
            found = False
            for r in range(b_retry.shape[1]):
                cand = b_retry[m, r]
                if not _rows_equal(pool_nodes[a], pool_tags[a],
                                   pool_nodes[cand], pool_tags[cand]):
                    b = cand
                    found = True
                    break
            if not found:
                for step in range(1, pool):
                    cand = (b + step) % pool
                    if not _rows_equal(pool_nodes[a], pool_tags[a],
                                       pool_nodes[cand], pool_tags[cand]):
                        b = cand
                        break
        lo = cuts[m, 0]
        hi = cuts[m, 1]
        if lo > hi:
            lo, hi = hi, lo
        _pmx_fill(child_nodes[m], child_tags[m], pool_nodes[a], pool_tags[a],
                  pool_nodes[b], pool_tags[b], lo, hi, present)
        _mutate_inplace(child_nodes[m], child_tags[m], swap_u[m], target_u[m],
                        flip_u[m], gamma, allow_flip)
        _repair_inplace(child_nodes[m], child_tags[m], bounds, dist, max_dd)
        z, td, dd = _objective(child_nodes[m], child_tags[m], bounds, dist, xs, ys,
                               v_t, v_d, omega, sigma, max_dd)
        out[m, 0] = z
        out[m, 1] = td
        out[m, 2] = dd
