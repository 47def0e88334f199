"""Genotypes, feasibility rules, and decoding into timed schedules.

A genotype is a permutation of all customers, each tagged Truck or Drone,
cut into contiguous segments: segment k is the workload of truck-drone
pair k. Decoding simulates every pair from the depot: Truck genes are
drive-and-deliver hops; a Drone gene launches the drone from the truck's
current node while the truck drives on to the next stop, and the two
rejoin per the rendezvous rules. The objective is the completion time of
the slowest pair.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, NamedTuple

from tandemroute.geometry import (
    Point,
    Rendezvous,
    RendezvousKind,
    TruckState,
    resolve_rendezvous,
)
from tandemroute.model import Instance, euclidean_distance


class DeliveryType(Enum):
    TRUCK = "truck"
    DRONE = "drone"


class Gene(NamedTuple):
    node: int
    delivery: DeliveryType


# feasibility rule names
VISIT_ONCE = "visit_once"
CONSECUTIVE_DRONE = "consecutive_drone"
SEGMENT_CAPACITY = "segment_capacity"
MAX_DRONE_DISTANCE = "max_drone_distance"


@dataclass(frozen=True, slots=True)
class Violation:
    rule: str
    gene_index: int | None = None
    node: int | None = None
    message: str = ""


class InfeasibleGenotypeError(ValueError):
    """Raised when decoding a genotype that breaks a feasibility rule."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        detail = "; ".join(v.message for v in self.violations[:3])
        super().__init__(detail or "infeasible genotype")


@dataclass(frozen=True)
class Genotype:
    """Tagged customer permutation with per-pair segment bounds.

    segment_bounds holds the exclusive end index of each segment in gene
    order; the last bound equals len(genes). Segment k belongs to pair k.
    """

    genes: tuple[Gene, ...]
    segment_bounds: tuple[int, ...]

    def __post_init__(self):
        if not self.segment_bounds:
            raise ValueError("at least one segment is required")
        prev = 0
        for bound in self.segment_bounds:
            if bound < prev:
                raise ValueError(f"segment bounds must be non-decreasing: {self.segment_bounds}")
            prev = bound
        if prev != len(self.genes):
            raise ValueError(
                f"last bound {prev} must equal the gene count {len(self.genes)}"
            )

    @property
    def pair_count(self) -> int:
        return len(self.segment_bounds)

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(g.node for g in self.genes)

    def segments(self) -> Iterator[tuple[Gene, ...]]:
        start = 0
        for end in self.segment_bounds:
            yield self.genes[start:end]
            start = end


def even_segment_bounds(gene_count: int, pairs: int) -> tuple[int, ...]:
    """Near-equal contiguous split; the first (gene_count mod pairs) segments get one extra."""
    if pairs < 1:
        raise ValueError("need at least one pair")
    if pairs > gene_count:
        raise ValueError(f"cannot split {gene_count} genes into {pairs} non-empty segments")
    base, extra = divmod(gene_count, pairs)
    bounds = []
    end = 0
    for k in range(pairs):
        end += base + (1 if k < extra else 0)
        bounds.append(end)
    return tuple(bounds)


class Actor(Enum):
    TRUCK = "truck"
    DRONE = "drone"


class LegPurpose(Enum):
    DELIVERY = "delivery"
    INTERCEPTION = "interception"
    RETURN_TO_DEPOT = "return_to_depot"
    # the drone riding on its truck; keeps each actor's leg chain contiguous
    TRANSIT = "transit"


@dataclass(frozen=True, slots=True)
class Leg:
    actor: Actor
    origin: Point
    target: Point
    depart: float
    arrive: float
    purpose: LegPurpose

    @property
    def length(self) -> float:
        return euclidean_distance(self.origin, self.target)


@dataclass(frozen=True)
class PairSchedule:
    index: int
    legs: tuple[Leg, ...]
    rendezvous: tuple[Rendezvous, ...]
    completion: float


@dataclass(frozen=True)
class Schedule:
    pairs: tuple[PairSchedule, ...]
    system_time: float
    truck_distance: float
    drone_distance: float

    def to_json(self) -> str:
        def leg_dict(leg: Leg) -> dict:
            return {
                "actor": leg.actor.value,
                "from": list(leg.origin),
                "to": list(leg.target),
                "depart": leg.depart,
                "arrive": leg.arrive,
                "purpose": leg.purpose.value,
            }

        payload = {
            "system_time": self.system_time,
            "truck_distance": self.truck_distance,
            "drone_distance": self.drone_distance,
            "pairs": [
                {
                    "index": p.index,
                    "completion": p.completion,
                    "legs": [leg_dict(leg) for leg in p.legs],
                    "rendezvous": [
                        {
                            "kind": r.kind.value,
                            "point": list(r.point),
                            "time": r.time,
                            "truck_wait": r.truck_wait,
                            "drone_wait": r.drone_wait,
                        }
                        for r in p.rendezvous
                    ],
                }
                for p in self.pairs
            ],
        }
        return json.dumps(payload, indent=2)


def check_feasibility(genotype: Genotype, instance: Instance) -> list[Violation]:
    """All rule violations, empty iff the genotype is feasible.

    Rules: every customer exactly once; no two consecutive Drone genes
    within a segment; segment demand within truck capacity; and, when the
    instance caps drone range, both flight legs of every drone delivery
    (launch node to customer, customer to the next stop) within the cap.
    """
    violations = []
    known = {n.id: n for n in instance.nodes}
    counts = Counter(g.node for g in genotype.genes)

    seen: set[int] = set()
    for i, gene in enumerate(genotype.genes):
        if gene.node == 0 or gene.node not in known:
            violations.append(
                Violation(VISIT_ONCE, gene_index=i, node=gene.node,
                          message=f"gene {i} names unknown customer {gene.node}")
            )
        elif gene.node in seen:
            violations.append(
                Violation(VISIT_ONCE, gene_index=i, node=gene.node,
                          message=f"customer {gene.node} visited more than once")
            )
        seen.add(gene.node)
    for node_id in sorted(n.id for n in instance.customers if n.id not in counts):
        violations.append(
            Violation(VISIT_ONCE, node=node_id, message=f"customer {node_id} is never visited")
        )

    bound = instance.max_drone_distance
    start = 0
    for end in genotype.segment_bounds:
        segment = genotype.genes[start:end]
        demand = sum(known[g.node].demand for g in segment if g.node in known)
        if demand > instance.capacity:
            violations.append(
                Violation(SEGMENT_CAPACITY, gene_index=start,
                          message=f"segment demand {demand} exceeds capacity {instance.capacity}")
            )
        launch = 0
        prev_drone = False
        for offset, gene in enumerate(segment):
            i = start + offset
            if gene.delivery is DeliveryType.TRUCK:
                launch = gene.node
                prev_drone = False
                continue
            if prev_drone:
                violations.append(
                    Violation(CONSECUTIVE_DRONE, gene_index=i,
                              message=f"gene {i} is a second consecutive drone delivery")
                )
            prev_drone = True
            if bound is not None and gene.node in known and launch in known:
                next_stop = 0
                if offset + 1 < len(segment) and segment[offset + 1].node in known:
                    next_stop = segment[offset + 1].node
                out_leg = euclidean_distance(known[launch].point, known[gene.node].point)
                back_leg = euclidean_distance(known[gene.node].point, known[next_stop].point)
                if out_leg > bound:
                    violations.append(
                        Violation(MAX_DRONE_DISTANCE, gene_index=i, node=gene.node,
                                  message=f"gene {i} launch leg {out_leg:.2f} exceeds {bound:.2f}")
                    )
                if back_leg > bound:
                    violations.append(
                        Violation(MAX_DRONE_DISTANCE, gene_index=i, node=gene.node,
                                  message=f"gene {i} return leg {back_leg:.2f} exceeds {bound:.2f}")
                    )
        start = end
    return violations


def decode(genotype: Genotype, instance: Instance) -> Schedule:
    """Simulate every truck-drone pair and return the timed Schedule.

    Raises InfeasibleGenotypeError when any feasibility rule fails; callers
    breeding genotypes are expected to repair before decoding.
    """
    violations = check_feasibility(genotype, instance)
    if violations:
        raise InfeasibleGenotypeError(violations)

    pairs = tuple(
        _decode_segment(k, segment, instance) for k, segment in enumerate(genotype.segments())
    )
    truck_distance = 0.0
    drone_distance = 0.0
    for pair in pairs:
        for leg in pair.legs:
            if leg.actor is Actor.TRUCK:
                truck_distance += leg.length
            elif leg.purpose is not LegPurpose.TRANSIT:
                drone_distance += leg.length
    return Schedule(
        pairs=pairs,
        system_time=max(p.completion for p in pairs),
        truck_distance=truck_distance,
        drone_distance=drone_distance,
    )


def _decode_segment(index: int, genes: tuple[Gene, ...], instance: Instance) -> PairSchedule:
    points = instance.node_points()
    v_t, v_d = instance.truck_speed, instance.drone_speed
    omega, sigma = instance.truck_delivery_time, instance.drone_delivery_time
    bound = instance.max_drone_distance

    legs: list[Leg] = []
    meets: list[Rendezvous] = []
    t = 0.0  # truck ready-to-depart clock at the current node
    cur = 0
    drone_aboard = True
    ended_at_depot = False

    def truck_hop(dest: int, purpose: LegPurpose) -> float:
        """Drive cur -> dest departing at t; returns the arrival time."""
        origin, target = points[cur], points[dest]
        arrive = t + euclidean_distance(origin, target) / v_t
        legs.append(Leg(Actor.TRUCK, origin, target, t, arrive, purpose))
        if drone_aboard:
            legs.append(Leg(Actor.DRONE, origin, target, t, arrive, LegPurpose.TRANSIT))
        return arrive

    i = 0
    while i < len(genes):
        node, kind = genes[i]
        if kind is DeliveryType.TRUCK:
            t = truck_hop(node, LegPurpose.DELIVERY) + omega
            cur = node
            i += 1
            continue

        # launch: the drone flies to its customer while the truck drives on
        next_id = genes[i + 1].node if i + 1 < len(genes) else 0
        launch_point, customer = points[cur], points[node]
        fly_out = euclidean_distance(launch_point, customer) / v_d
        drone_aboard = False
        legs.append(Leg(Actor.DRONE, launch_point, customer, t, t + fly_out, LegPurpose.DELIVERY))
        free = t + fly_out + sigma

        seg = euclidean_distance(launch_point, points[next_id])
        if seg > 0.0:
            velocity = (
                v_t * (points[next_id][0] - launch_point[0]) / seg,
                v_t * (points[next_id][1] - launch_point[1]) / seg,
            )
        else:
            velocity = (0.0, 0.0)
        truck_arrive = truck_hop(
            next_id, LegPurpose.DELIVERY if next_id != 0 else LegPurpose.RETURN_TO_DEPOT
        )

        meet = resolve_rendezvous(customer, free, TruckState(launch_point, velocity, t),
                                  points[next_id], v_d)
        if (
            meet.kind is RendezvousKind.EN_ROUTE_INTERCEPT
            and bound is not None
            and euclidean_distance(customer, meet.point) > bound
        ):
            # under a drone range cap an over-long chase is not available
            direct = euclidean_distance(customer, points[next_id])
            node_time = max(truck_arrive, free + direct / v_d)
            meet = Rendezvous(
                RendezvousKind.MEET_AT_NODE,
                points[next_id],
                node_time,
                truck_wait=max(0.0, node_time - truck_arrive),
                drone_wait=max(0.0, truck_arrive - (free + direct / v_d)),
            )
        meets.append(meet)

        if meet.kind is RendezvousKind.EN_ROUTE_INTERCEPT:
            flight = euclidean_distance(customer, meet.point)
            legs.append(Leg(Actor.DRONE, customer, meet.point, free, free + flight / v_d,
                            LegPurpose.INTERCEPTION))
            if meet.point != points[next_id]:
                legs.append(Leg(Actor.DRONE, meet.point, points[next_id], meet.time,
                                truck_arrive, LegPurpose.TRANSIT))
            joined = truck_arrive
        else:
            flight = euclidean_distance(customer, points[next_id])
            if flight > 0.0:
                legs.append(Leg(Actor.DRONE, customer, points[next_id], free,
                                free + flight / v_d, LegPurpose.INTERCEPTION))
            joined = meet.time
        drone_aboard = True

        cur = next_id
        if next_id == 0:
            t = max(truck_arrive, joined)
            ended_at_depot = True
        else:
            t = max(truck_arrive + omega, joined)
        i += 2

    if genes and not ended_at_depot:
        t = truck_hop(0, LegPurpose.RETURN_TO_DEPOT)

    return PairSchedule(index=index, legs=tuple(legs), rendezvous=tuple(meets),
                        completion=t if genes else 0.0)


def objective(schedule: Schedule) -> float:
    """The makespan: completion time of the slowest truck-drone pair."""
    return schedule.system_time


def improvement(vrp_time: float, vrpdi_time: float) -> float:
    """Percentage gain of the interception variant over truck-only routing."""
    if vrp_time <= 0 or vrpdi_time <= 0:
        raise ValueError("times must be strictly positive")
    return (vrp_time - vrpdi_time) / vrpdi_time * 100.0
