"""Independent oracles and scenario generators shared by the test modules.

Everything in here deliberately avoids the closed-form machinery under test:
roots are located by interval search, schedules are replayed by a
discrete-event simulation, and optima are found by exhaustive listing.
"""

from __future__ import annotations

import math

import numpy as np

# ---------------------------------------------------------------------------
# Interception oracle: bisection on the gap function
# f(t) = |truck(t) - drone_pos| - v_d * t, which is convex with f(0) >= 0.


def _gap(drone_pos, truck, drone_speed, t):
    px = truck.position[0] + truck.velocity[0] * t
    py = truck.position[1] + truck.velocity[1] * t
    return math.hypot(px - drone_pos[0], py - drone_pos[1]) - drone_speed * t


def bisection_interception_time(drone_pos, truck, drone_speed):
    """First nonnegative root of the gap function, or None, found by search.

    Any root satisfies v_d*t = |r + v*t|, which the triangle inequality
    confines to t <= |r| / ||v| - v_d|, so the search domain is finite.
    Exactly equal speeds make the squared equation affine and are solved
    from that reduction directly (no discriminants anywhere).
    """
    rx = truck.position[0] - drone_pos[0]
    ry = truck.position[1] - drone_pos[1]
    gap0 = math.hypot(rx, ry)
    if gap0 == 0.0:
        return 0.0
    speed = truck.speed
    if abs(speed - drone_speed) <= 1e-9 * max(speed, drone_speed):
        # |r + vt|^2 = (v_d t)^2 collapses to |r|^2 + 2(r.v)t = 0
        approach = 2.0 * (rx * truck.velocity[0] + ry * truck.velocity[1])
        if approach >= 0.0:
            return None
        return gap0 * gap0 / -approach

    hi = gap0 / abs(speed - drone_speed) * (1.0 + 1e-12) + 1e-12
    if drone_speed > speed:
        # f(hi) <= 0 by the triangle inequality: exactly one sign change
        lo = 0.0
    else:
        # truck at least as fast: ternary-search the convex minimum first
        a_lo, a_hi = 0.0, hi
        for _ in range(200):
            m1 = a_lo + (a_hi - a_lo) / 3.0
            m2 = a_hi - (a_hi - a_lo) / 3.0
            if _gap(drone_pos, truck, drone_speed, m1) <= _gap(drone_pos, truck, drone_speed, m2):
                a_hi = m2
            else:
                a_lo = m1
        t_min = 0.5 * (a_lo + a_hi)
        if _gap(drone_pos, truck, drone_speed, t_min) > 0.0:
            return None
        lo, hi = 0.0, t_min

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _gap(drone_pos, truck, drone_speed, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return hi


# ---------------------------------------------------------------------------
# Decoder oracle: discrete-event replay of the pair rules, chases solved by
# bisection, meeting points by linear interpolation along the truck segment.


def simulate_schedule(genotype, instance):
    """Step-by-step replay of a genotype; returns (time, truck_dist, drone_dist).

    Shares no code with the evaluator's decoder or the closed-form root
    solver: rendezvous chases are located by bisection_interception_time
    and truck positions by segment interpolation.
    """
    from tandemroute.evaluate import DeliveryType
    from tandemroute.geometry import TruckState

    pts = instance.node_points()
    v_t, v_d = instance.truck_speed, instance.drone_speed
    omega, sigma = instance.truck_delivery_time, instance.drone_delivery_time
    bound = instance.max_drone_distance

    def d(a, b):
        return math.hypot(pts[a][0] - pts[b][0], pts[a][1] - pts[b][1])

    completions = []
    truck_dist = 0.0
    drone_dist = 0.0
    for segment in genotype.segments():
        genes = list(segment)
        t = 0.0
        cur = 0
        ended_at_depot = False
        i = 0
        while i < len(genes):
            node, kind = genes[i]
            if kind is DeliveryType.TRUCK:
                truck_dist += d(cur, node)
                t += d(cur, node) / v_t + omega
                cur = node
                i += 1
                continue
            nxt = genes[i + 1].node if i + 1 < len(genes) else 0
            drone_dist += d(cur, node)
            free = t + d(cur, node) / v_d + sigma
            seg_len = d(cur, nxt)
            truck_dist += seg_len
            arr = t + seg_len / v_t
            direct_join = max(arr, free + d(node, nxt) / v_d)
            joined = direct_join
            flight = d(node, nxt)
            if seg_len > 0.0 and d(node, nxt) > 0.0 and free < arr - 1e-9:
                frac = (free - t) / (arr - t)
                here = (
                    pts[cur][0] + (pts[nxt][0] - pts[cur][0]) * frac,
                    pts[cur][1] + (pts[nxt][1] - pts[cur][1]) * frac,
                )
                vel = (
                    (pts[nxt][0] - pts[cur][0]) / seg_len * v_t,
                    (pts[nxt][1] - pts[cur][1]) / seg_len * v_t,
                )
                chase = bisection_interception_time(pts[node], TruckState(here, vel, free), v_d)
                if chase is not None:
                    meet = free + chase
                    usable = meet <= arr + 1e-9 and meet < direct_join - 1e-9
                    if usable and bound is not None and v_d * chase > bound:
                        usable = False
                    if usable:
                        joined = arr
                        flight = v_d * chase
            drone_dist += flight
            cur = nxt
            t = max(arr, joined) if nxt == 0 else max(arr + omega, joined)
            ended_at_depot = nxt == 0
            i += 2
        if genes and not ended_at_depot:
            truck_dist += d(cur, 0)
            t += d(cur, 0) / v_t
        completions.append(t if genes else 0.0)
    return max(completions), truck_dist, drone_dist


def random_instance(rng, n_customers, *, truck_speed=1.0, drone_speed=2.0, capacity=40,
                    omega=0.0, sigma=0.0, name=None, span=50.0):
    from tandemroute.model import Instance, Node

    nodes = [Node(0, round(float(rng.uniform(-span, span)), 3),
                  round(float(rng.uniform(-span, span)), 3), 0)]
    for k in range(1, n_customers + 1):
        nodes.append(Node(k, round(float(rng.uniform(-span, span)), 3),
                          round(float(rng.uniform(-span, span)), 3), 1))
    return Instance(
        name=name or f"random-{n_customers}",
        nodes=tuple(nodes),
        truck_speed=truck_speed,
        drone_speed=drone_speed,
        truck_delivery_time=omega,
        drone_delivery_time=sigma,
        capacity=capacity,
    )


def random_feasible_genotype(rng, instance, pairs, drone_prob=0.5):
    """Random permutation with tags drawn to respect the consecutive-drone rule."""
    from tandemroute.evaluate import DeliveryType, Gene, Genotype, even_segment_bounds

    ids = [c.id for c in instance.customers]
    order = [ids[k] for k in rng.permutation(len(ids))]
    bounds = even_segment_bounds(len(order), pairs)
    genes = []
    start = 0
    for end in bounds:
        prev_drone = False
        for pos in range(start, end):
            drone = (not prev_drone) and rng.random() < drone_prob
            genes.append(Gene(order[pos], DeliveryType.DRONE if drone else DeliveryType.TRUCK))
            prev_drone = drone
        start = end
    return Genotype(tuple(genes), bounds)


def interception_scenarios(seed, count):
    """Deterministic battery of (drone_pos, truck, drone_speed) triples.

    Cycles through six regimes: generic heading, parked truck, exactly equal
    speeds, collinear chase, guaranteed receding, and coincident start.
    Coordinates sit on a 1e-3 grid and speeds on a 1e-2 grid so that regime
    boundaries (equal speeds, zero gap) are hit exactly rather than within
    float fuzz. Unequal speeds are kept at least 0.25 apart: closer pairs
    make root sizes and conditioning blow up to where one-nanosecond
    agreement is beyond float64 for any method, closed form or search.
    """
    from tandemroute.geometry import TruckState

    rng = np.random.default_rng(seed)
    px = np.round(rng.uniform(-100.0, 100.0, count), 3)
    py = np.round(rng.uniform(-100.0, 100.0, count), 3)
    dx = np.round(rng.uniform(-100.0, 100.0, count), 3)
    dy = np.round(rng.uniform(-100.0, 100.0, count), 3)
    truck_speed = np.round(rng.uniform(0.1, 10.0, count), 2)
    drone_speed = np.round(rng.uniform(0.1, 10.0, count), 2)
    theta = rng.uniform(0.0, 2.0 * np.pi, count)

    scenarios = []
    for k in range(count):
        pos = (float(px[k]), float(py[k]))
        drone = (float(dx[k]), float(dy[k]))
        v_t = float(truck_speed[k])
        v_d = float(drone_speed[k])
        if abs(v_d - v_t) < 0.25:
            bump = 0.25 + abs(v_d) % 0.5
            v_d = round(v_t + bump, 2) if v_t + bump <= 10.0 else round(max(0.1, v_t - bump), 2)
        heading = (math.cos(float(theta[k])), math.sin(float(theta[k])))
        regime = k % 6
        if regime == 1:
            vel = (0.0, 0.0)
        elif regime == 3 or regime == 4:
            gx, gy = pos[0] - drone[0], pos[1] - drone[1]
            norm = math.hypot(gx, gy)
            if norm == 0.0:
                vel = (v_t * heading[0], v_t * heading[1])
            else:
                # truck driving straight away from the drone along their line
                vel = (v_t * gx / norm, v_t * gy / norm)
                if regime == 4:  # and the drone too slow to ever catch it
                    v_d = round(v_t - 0.25, 2) if v_t >= 0.35 else v_t
        else:
            vel = (v_t * heading[0], v_t * heading[1])
        if regime == 2:
            v_d = v_t
        if regime == 5:
            drone = pos
        scenarios.append((drone, TruckState(pos, vel), v_d))
    return scenarios


# ---------------------------------------------------------------------------
# Rank-test oracle: the exact permutation distribution of the U statistic,
# computed by dynamic programming over rank-subset sums (tie-free samples).


def u_statistic(sample_a, sample_b):
    """U of sample A: pairs where A's value exceeds B's, ties counting half."""
    u = 0.0
    for x in sample_a:
        for y in sample_b:
            if x > y:
                u += 1.0
            elif x == y:
                u += 0.5
    return u


def exact_mwu_p(sample_a, sample_b):
    """Two-sided exact p-value: the probability, over all ways to regroup
    the pooled values, of a U at least as far from its mean as observed.
    Requires all pooled values distinct."""
    pooled = list(sample_a) + list(sample_b)
    if len(set(pooled)) != len(pooled):
        raise ValueError("exact enumeration here assumes tie-free samples")
    n1, n2 = len(sample_a), len(sample_b)
    n = n1 + n2
    u_obs = u_statistic(sample_a, sample_b)
    # U depends only on which ranks go to A, so count n1-subsets of
    # {1..n} by their sum
    max_sum = sum(range(n - n1 + 1, n + 1))
    table = np.zeros((n1 + 1, max_sum + 1))
    table[0, 0] = 1.0
    for r in range(1, n + 1):
        for k in range(min(n1, r), 0, -1):
            table[k, r:] += table[k - 1, :-r or None]
    counts = table[n1]
    u_values = np.arange(max_sum + 1) - n1 * (n1 + 1) / 2.0
    mean = n1 * n2 / 2.0
    dev = abs(u_obs - mean)
    hits = counts[np.abs(u_values - mean) >= dev - 1e-12].sum()
    return float(hits / counts.sum())
