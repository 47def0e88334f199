"""Problem instances: dataset files, distance matrices, and fleet sizing."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Any

import numpy as np


class ParseError(ValueError):
    """Malformed instance text; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


@dataclass(frozen=True, slots=True)
class Node:
    id: int
    x: float
    y: float
    demand: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"node {self.id} has non-finite coordinates")
        if self.demand < 0:
            raise ValueError(f"node {self.id} has negative demand")

    @property
    def point(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Instance:
    """One routing scenario: a depot, customers, speeds, and service times.

    Nodes are ordered with the depot (id 0, demand 0) first. Delivery times
    are uniform scalars: omega-style truck service and sigma-style drone
    service, both defaulting to zero. max_drone_distance, when set, caps the
    length of every single drone flight leg.
    """

    name: str
    nodes: tuple[Node, ...]
    truck_speed: float
    drone_speed: float
    truck_delivery_time: float = 0.0
    drone_delivery_time: float = 0.0
    capacity: int = 40
    max_drone_distance: float | None = None

    def __post_init__(self):
        if len(self.nodes) < 2:
            raise ValueError("instance needs a depot and at least one customer")
        depot = self.nodes[0]
        if depot.id != 0 or depot.demand != 0:
            raise ValueError("first node must be the depot: id 0, demand 0")
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("node ids must be unique")
        if self.truck_speed <= 0 or self.drone_speed <= 0:
            raise ValueError("speeds must be strictly positive")
        if self.truck_delivery_time < 0 or self.drone_delivery_time < 0:
            raise ValueError("delivery times cannot be negative")
        if self.capacity < 1:
            raise ValueError("capacity must be a positive integer")
        if self.max_drone_distance is not None and self.max_drone_distance <= 0:
            raise ValueError("max_drone_distance must be strictly positive when set")

    @property
    def customers(self) -> tuple[Node, ...]:
        return self.nodes[1:]

    def total_demand(self) -> int:
        return sum(n.demand for n in self.customers)

    def coordinates(self) -> np.ndarray:
        """(n+1, 2) array of node coordinates in id-independent file order."""
        return np.array([[n.x, n.y] for n in self.nodes], dtype=np.float64)

    def node_points(self) -> dict[int, tuple[float, float]]:
        return {n.id: n.point for n in self.nodes}

    def with_max_drone_fraction(self, fraction: float) -> "Instance":
        """Copy of this instance with the drone cap at fraction x max pairwise distance."""
        if fraction <= 0:
            raise ValueError("fraction must be strictly positive")
        bound = fraction * float(distance_matrix(self).max())
        return replace(self, max_drone_distance=bound)

    def to_json(self) -> str:
        payload: dict[str, Any] = {
            "name": self.name,
            "truck_speed": self.truck_speed,
            "drone_speed": self.drone_speed,
            "truck_delivery_time": self.truck_delivery_time,
            "drone_delivery_time": self.drone_delivery_time,
            "capacity": self.capacity,
            "max_drone_distance": self.max_drone_distance,
            "nodes": [[n.id, n.x, n.y, n.demand] for n in self.nodes],
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        raw = json.loads(text)
        nodes = tuple(Node(int(i), float(x), float(y), int(d)) for i, x, y, d in raw["nodes"])
        return cls(
            name=raw["name"],
            nodes=nodes,
            truck_speed=float(raw["truck_speed"]),
            drone_speed=float(raw["drone_speed"]),
            truck_delivery_time=float(raw["truck_delivery_time"]),
            drone_delivery_time=float(raw["drone_delivery_time"]),
            capacity=int(raw["capacity"]),
            max_drone_distance=(
                None if raw["max_drone_distance"] is None else float(raw["max_drone_distance"])
            ),
        )


def euclidean_distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def distance_matrix(instance: Instance) -> np.ndarray:
    """Symmetric (n+1, n+1) matrix of pairwise Euclidean distances."""
    coords = instance.coordinates()
    deltas = coords[:, None, :] - coords[None, :, :]
    return np.sqrt((deltas * deltas).sum(axis=2))


def fleet_size(instance: Instance) -> int:
    """Truck-drone pair count: total demand over capacity, rounded up."""
    demand = instance.total_demand()
    if demand <= 0:
        raise ValueError("total demand must be positive to size a fleet")
    return -(-demand // instance.capacity)


def default_capacity(customer_count: int) -> int:
    # benchmark rule: 40 up to 100 customers, 100 beyond
    return 40 if customer_count <= 100 else 100


def parse_instance(
    text: str,
    *,
    name: str = "instance",
    capacity: int | None = None,
    delivery_times: tuple[float, float] | None = None,
    max_drone_distance_fraction: float | None = None,
    unit_demand: bool = True,
) -> Instance:
    """Parse the plain-text instance format into an Instance.

    The format interleaves /* ... */ comment lines with numeric lines; the
    numeric token order is truck speed, drone speed, location count n+1,
    then n+1 coordinate lines (x y, optionally a demand) with the depot
    first. Customer demands are forced to 1 unless unit_demand is False, in
    which case a third column is honored.

    Keyword overrides: capacity (else 40 for up to 100 customers, 100
    beyond), delivery_times as (truck, drone), and
    max_drone_distance_fraction applied to the max pairwise distance.
    """
    header: list[float] = []
    coord_rows: list[tuple[int, list[float]]] = []
    in_comment = False
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if in_comment:
            if "*/" in stripped:
                in_comment = False
            continue
        if stripped.startswith("/*"):
            if not stripped.endswith("*/"):
                in_comment = True
            continue
        if not stripped:
            continue
        values = []
        for token in stripped.split():
            try:
                values.append(float(token))
            except ValueError:
                raise ParseError(f"bad numeric token {token!r}", line_no) from None
        while len(header) < 3 and values:
            header.append(values.pop(0))
        if values:
            coord_rows.append((line_no, values))

    if len(header) < 3:
        raise ParseError("missing header: expected truck speed, drone speed, location count")
    truck_speed, drone_speed, count_raw = header
    if truck_speed <= 0 or drone_speed <= 0:
        raise ParseError(f"speeds must be positive, got {truck_speed} and {drone_speed}")
    if count_raw != int(count_raw) or int(count_raw) < 2:
        raise ParseError(f"location count must be an integer >= 2, got {count_raw}")
    count = int(count_raw)

    if len(coord_rows) < count:
        raise ParseError(f"declared {count} locations but found {len(coord_rows)} coordinate lines")

    nodes = []
    for idx, (line_no, values) in enumerate(coord_rows[:count]):
        if len(values) not in (2, 3):
            raise ParseError(f"expected 'x y' or 'x y demand', got {len(values)} values", line_no)
        if idx == 0:
            demand = 0
        elif unit_demand or len(values) == 2:
            demand = 1
        else:
            demand = int(values[2])
        nodes.append(Node(idx, values[0], values[1], demand))

    omega, sigma = delivery_times if delivery_times is not None else (0.0, 0.0)
    instance = Instance(
        name=name,
        nodes=tuple(nodes),
        truck_speed=truck_speed,
        drone_speed=drone_speed,
        truck_delivery_time=omega,
        drone_delivery_time=sigma,
        capacity=capacity if capacity is not None else default_capacity(count - 1),
    )
    if max_drone_distance_fraction is not None:
        instance = instance.with_max_drone_fraction(max_drone_distance_fraction)
    return instance


def format_instance_text(instance: Instance, comment: str = "") -> str:
    """Render an Instance back into the plain-text format parse_instance reads."""
    lines = []
    if comment:
        lines.append(f"/* {comment} */")
    lines.append("/* truck speed, drone speed */")
    lines.append(repr(instance.truck_speed))
    lines.append(repr(instance.drone_speed))
    lines.append("/* number of locations */")
    lines.append(str(len(instance.nodes)))
    lines.append("/* x y per line, depot first */")
    for node in instance.nodes:
        lines.append(f"{node.x!r} {node.y!r}")
    return "\n".join(lines) + "\n"
