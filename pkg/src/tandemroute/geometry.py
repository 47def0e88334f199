"""Closed-form kinematics for a drone intercepting a truck in the plane.

The truck drives with constant velocity; the drone flies at constant speed
in whatever direction it likes. The earliest meeting time solves

    |truck.position + truck.velocity*t - drone_pos| = drone_speed * t,

a quadratic in t once squared. These helpers return that root, the meeting
point, and the full rendezvous decision (chase the moving truck versus fly
to the next node and let the earlier party wait).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

Point = tuple[float, float]

# Tolerance for comparing absolute times when choosing between rendezvous
# options; ties within this margin go to the node meeting.
TIME_EPS = 1e-9

# |a| below this fraction of the squared-speed scale means the quadratic is
# numerically linear (speeds effectively equal). Distinct real-world speeds
# keep |a| many orders of magnitude above it.
_DEGENERATE_REL = 1e-12


class RendezvousKind(Enum):
    EN_ROUTE_INTERCEPT = "en_route_intercept"
    MEET_AT_NODE = "meet_at_node"


@dataclass(frozen=True, slots=True)
class TruckState:
    """Truck position and constant velocity, anchored at absolute time state_time."""

    position: Point
    velocity: Point
    state_time: float = 0.0

    @property
    def speed(self) -> float:
        return math.hypot(self.velocity[0], self.velocity[1])


@dataclass(frozen=True, slots=True)
class Rendezvous:
    """How, where and when a drone rejoins its truck."""

    kind: RendezvousKind
    point: Point
    time: float
    truck_wait: float = 0.0
    drone_wait: float = 0.0


def interception_time(drone_pos: Point, truck: TruckState, drone_speed: float) -> float | None:
    """Earliest t >= 0 at which a drone launched now from drone_pos meets the truck.

    Times are relative to the truck state: the truck sits at truck.position
    at t = 0 and keeps its velocity forever. Returns None when no
    nonnegative root exists (the drone can never close the gap).

    Args:
        drone_pos: launch point of the drone.
        truck: straight-line truck motion to intercept.
        drone_speed: drone speed, must be positive.
    """
    if drone_speed <= 0.0:
        raise ValueError(f"drone_speed must be positive, got {drone_speed}")

    rx = truck.position[0] - drone_pos[0]
    ry = truck.position[1] - drone_pos[1]
    vx, vy = truck.velocity

    c = rx * rx + ry * ry
    if c == 0.0:
        return 0.0
    b = 2.0 * (rx * vx + ry * vy)
    a = vx * vx + vy * vy - drone_speed * drone_speed

    if abs(a) <= _DEGENERATE_REL * (vx * vx + vy * vy + drone_speed * drone_speed):
        # equal speeds: the squared equation is affine, root only when closing
        if b >= 0.0:
            return None
        return c / -b

    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    # stable root pair: q keeps the same sign as b so no cancellation occurs
    q = -0.5 * (b + math.copysign(sq, b)) if b != 0.0 else -0.5 * sq
    roots = (q / a, c / q) if q != 0.0 else (0.0, 0.0)

    best = None
    for t in roots:
        if t >= 0.0 and (best is None or t < best):
            best = t
    return best


def interception_point(truck: TruckState, t: float) -> Point:
    """Where the truck (and hence the meeting) is after driving for t >= 0."""
    return (
        truck.position[0] + truck.velocity[0] * t,
        truck.position[1] + truck.velocity[1] * t,
    )


def resolve_rendezvous(
    drone_pos: Point,
    drone_free_time: float,
    truck: TruckState,
    next_node: Point,
    drone_speed: float,
) -> Rendezvous:
    """Pick the cheaper rejoin for a drone that becomes free at drone_free_time.

    Option 1 chases the truck while it is still driving toward next_node and
    counts only if the meet happens on that segment. Option 2 flies straight
    to next_node, joined at max(truck arrival, drone arrival), with the
    earlier party waiting. The earlier joined time wins; ties and all
    degenerate cases (parked truck, drone already at the node) go to the
    node meeting. Times in and out are absolute.

    The truck is assumed to be heading straight for next_node (or parked at
    it), and drone_free_time must not precede truck.state_time.
    """
    speed = truck.speed
    seg_len = math.hypot(next_node[0] - truck.position[0], next_node[1] - truck.position[1])
    if speed <= 0.0 or seg_len <= 0.0:
        truck_arrival = truck.state_time
    else:
        truck_arrival = truck.state_time + seg_len / speed

    direct_len = math.hypot(next_node[0] - drone_pos[0], next_node[1] - drone_pos[1])
    drone_arrival = drone_free_time + direct_len / drone_speed
    node_time = max(truck_arrival, drone_arrival)

    if direct_len > 0.0 and speed > 0.0 and drone_free_time < truck_arrival - TIME_EPS:
        dt = drone_free_time - truck.state_time
        chase_from = TruckState(
            (truck.position[0] + truck.velocity[0] * dt, truck.position[1] + truck.velocity[1] * dt),
            truck.velocity,
            drone_free_time,
        )
        chase = interception_time(drone_pos, chase_from, drone_speed)
        if chase is not None:
            meet_time = drone_free_time + chase
            if meet_time <= truck_arrival + TIME_EPS and meet_time < node_time - TIME_EPS:
                return Rendezvous(
                    RendezvousKind.EN_ROUTE_INTERCEPT,
                    interception_point(chase_from, chase),
                    meet_time,
                )

    return Rendezvous(
        RendezvousKind.MEET_AT_NODE,
        next_node,
        node_time,
        truck_wait=max(0.0, drone_arrival - truck_arrival),
        drone_wait=max(0.0, truck_arrival - drone_arrival),
    )
