"""Brute-force ground truth for tiny instances.

Walks every feasible genotype: permutations of the customers (lexicographic
by id), times every way to split them into contiguous positive-size
segments (lexicographic by part sizes), times every delivery-tag string
with no two consecutive drone genes inside a segment (lexicographic with
truck before drone). The first genotype in that order achieving the best
objective is returned, so ties break deterministically.

The scan itself runs through the same compiled objective code the search
engine uses; the winner is re-decoded through the reference evaluator
before being returned.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from numba import njit

from ._kernels import _objective
from .engine import Mode
from .evaluate import DeliveryType, Gene, Genotype, check_feasibility, decode
from .model import Instance, distance_matrix

EVAL_CAP = 35_000_000
_CHUNK = 4096


class SearchSpaceError(ValueError):
    """The instance is too large to enumerate."""

    def __init__(self, size: int, cap: int = EVAL_CAP):
        super().__init__(
            f"search space holds {size} genotypes, beyond the enumeration cap of {cap}"
        )
        self.size = size
        self.cap = cap


def _compositions(n: int, k: int):
    """Ways to write n as k positive parts, lexicographic by parts."""
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _feasible_tag_count(length: int) -> int:
    # strings of truck/drone with no two adjacent drones: Fibonacci growth
    a, b = 1, 2
    for _ in range(length - 1):
        a, b = b, a + b
    return b if length > 0 else 1


def search_space_size(customer_count: int, pair_count: int, mode: Mode | str) -> int:
    """Number of genotypes the oracle would visit, before capacity or
    range filtering."""
    mode = Mode(mode)
    n = customer_count
    if n < 1:
        raise ValueError("need at least one customer")
    if pair_count < 1 or pair_count > n:
        raise ValueError("pair_count must lie in [1, customer_count]")
    total_tags = 0
    for comp in _compositions(n, pair_count):
        if mode is Mode.VRP:
            total_tags += 1
        else:
            prod = 1
            for part in comp:
                prod *= _feasible_tag_count(part)
            total_tags += prod
    return math.factorial(n) * total_tags


def _tag_rows(n: int, bounds: tuple[int, ...], drones: bool) -> np.ndarray:
    if not drones:
        return np.zeros((1, n), dtype=np.uint8)
    rows = []
    for mask in range(1 << n):
        bits = [(mask >> (n - 1 - i)) & 1 for i in range(n)]
        ok = True
        start = 0
        for end in bounds:
            for i in range(start + 1, end):
                if bits[i] and bits[i - 1]:
                    ok = False
                    break
            if not ok:
                break
            start = end
        if ok:
            rows.append(bits)
    return np.array(rows, dtype=np.uint8)


@njit(cache=True)
def _scan_chunk(perms, all_bounds, tag_rows, tag_offsets, demands, capacity,
                dist, xs, ys, v_t, v_d, omega, sigma, max_dd, best_start):
    """Scan perms x splits x tags in order; report the first strict improver
    over best_start as (objective, perm row, split index, tag row)."""
    best = best_start
    bp, bc, bt = -1, -1, -1
    for p in range(perms.shape[0]):
        perm = perms[p]
        for ci in range(all_bounds.shape[0]):
            bounds = all_bounds[ci]
            ok = True
            start = 0
            for s in range(bounds.shape[0]):
                end = bounds[s]
                load = 0
                for i in range(start, end):
                    load += demands[perm[i]]
                if load > capacity:
                    ok = False
                    break
                start = end
            if not ok:
                continue
            for trow in range(tag_offsets[ci], tag_offsets[ci + 1]):
                tags = tag_rows[trow]
                if max_dd > 0.0:
                    feasible = True
                    start = 0
                    for s in range(bounds.shape[0]):
                        end = bounds[s]
                        launch = 0
                        for i in range(start, end):
                            node = perm[i]
                            if tags[i] == 1:
                                nxt = perm[i + 1] if i + 1 < end else 0
                                if dist[launch, node] > max_dd or dist[node, nxt] > max_dd:
                                    feasible = False
                                    break
                            else:
                                launch = node
                        if not feasible:
                            break
                        start = end
                    if not feasible:
                        continue
                z, _, _ = _objective(perm, tags, bounds, dist, xs, ys,
                                     v_t, v_d, omega, sigma, max_dd)
                if z < best:
                    best = z
                    bp, bc, bt = p, ci, trow
    return best, bp, bc, bt


def enumerate_optimum(instance: Instance, pair_count: int = 1,
                      mode: Mode | str = Mode.VRPDI) -> tuple[Genotype, float]:
    """Globally optimal genotype and objective for a tiny instance.

    Refuses instances whose genotype count exceeds EVAL_CAP; raises
    ValueError when no genotype is feasible (capacity or range too tight).
    """
    mode = Mode(mode)
    n = len(instance.customers)
    size = search_space_size(n, pair_count, mode)
    if size > EVAL_CAP:
        raise SearchSpaceError(size)

    ordered = sorted(instance.customers, key=lambda c: c.id)
    row_of_id = {node.id: r for r, node in enumerate(instance.nodes)}
    rows_by_id = [row_of_id[c.id] for c in ordered]

    comp_list = list(_compositions(n, pair_count))
    bounds_list = [tuple(itertools.accumulate(c)) for c in comp_list]
    all_bounds = np.array(bounds_list, dtype=np.int64)
    tag_blocks = [_tag_rows(n, b, mode is Mode.VRPDI) for b in bounds_list]
    tag_rows = np.concatenate(tag_blocks, axis=0)
    tag_offsets = np.zeros(len(tag_blocks) + 1, dtype=np.int64)
    np.cumsum([b.shape[0] for b in tag_blocks], out=tag_offsets[1:])

    dist = distance_matrix(instance)
    coords = instance.coordinates()
    xs = np.ascontiguousarray(coords[:, 0])
    ys = np.ascontiguousarray(coords[:, 1])
    demands = np.array([node.demand for node in instance.nodes], dtype=np.int64)
    v_t, v_d = instance.truck_speed, instance.drone_speed
    omega, sigma = instance.truck_delivery_time, instance.drone_delivery_time
    max_dd = instance.max_drone_distance if instance.max_drone_distance is not None else 0.0

    best = math.inf
    winner = None
    perm_iter = itertools.permutations(rows_by_id)
    while True:
        chunk = list(itertools.islice(perm_iter, _CHUNK))
        if not chunk:
            break
        perms = np.array(chunk, dtype=np.int64)
        z, bp, bc, bt = _scan_chunk(perms, all_bounds, tag_rows, tag_offsets,
                                    demands, instance.capacity, dist, xs, ys,
                                    v_t, v_d, omega, sigma, max_dd, best)
        if bp >= 0:
            best = z
            winner = (perms[bp].copy(), bounds_list[bc], tag_rows[bt].copy())
    if winner is None:
        raise ValueError("no feasible genotype exists for this instance")

    perm_rows, bounds, tags = winner
    id_of_row = [node.id for node in instance.nodes]
    genes = tuple(
        Gene(id_of_row[int(r)], DeliveryType.DRONE if tags[i] else DeliveryType.TRUCK)
        for i, r in enumerate(perm_rows)
    )
    genotype = Genotype(genes=genes, segment_bounds=bounds)
    objective = decode(genotype, instance).system_time
    if abs(objective - best) > 1e-9:
        raise RuntimeError(
            f"fast scan ({best}) and reference decoder ({objective}) disagree"
        )
    return genotype, objective


def enumerate_objectives(instance: Instance, pair_count: int = 1,
                         mode: Mode | str = Mode.VRPDI):
    """Yield (genotype, objective) for every feasible genotype, in the same
    canonical order the optimum scan uses. Pure reference-decoder path;
    meant for debugging and cross-checks on very small instances."""
    mode = Mode(mode)
    n = len(instance.customers)
    ids = sorted(c.id for c in instance.customers)
    for perm in itertools.permutations(ids):
        for comp in _compositions(n, pair_count):
            bounds = tuple(itertools.accumulate(comp))
            for mask in range(1 << n if mode is Mode.VRPDI else 1):
                bits = [(mask >> (n - 1 - i)) & 1 for i in range(n)]
                genes = tuple(
                    Gene(perm[i], DeliveryType.DRONE if bits[i] else DeliveryType.TRUCK)
                    for i in range(n)
                )
                genotype = Genotype(genes=genes, segment_bounds=bounds)
                if check_feasibility(genotype, instance):
                    continue
                yield genotype, decode(genotype, instance).system_time
