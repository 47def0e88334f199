"""Route plots as standalone SVG documents.

A plot shows one solid polyline per truck, the dashed flight paths of each
drone collected in one group per drone, a dot per node, and a square at
every point where a drone rejoins its truck.  The drawing is built with
:mod:`xml.etree.ElementTree`, so the output is well-formed XML and its
structure stays machine-checkable:

* ``polyline.truck``       one per pair
* ``g.drone``              one per pair (empty when the drone never flies)
* ``rect.interception``    one per rendezvous
* ``circle.customer`` / ``circle.depot``  the node markers
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .evaluate import Actor, LegPurpose, Schedule
from .model import Instance

__all__ = ["render_svg"]

SVG_NS = "http://www.w3.org/2000/svg"

# one colour per pair, cycled when the fleet outgrows the palette
_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#17becf",
    "#8c564b",
    "#e377c2",
)

_FLIGHT = (LegPurpose.DELIVERY, LegPurpose.INTERCEPTION)


def _fmt(value: float) -> str:
    return f"{value:.2f}"


class _Projection:
    """World coordinates to SVG pixels, y flipped, aspect preserved."""

    def __init__(self, points, width, height, margin):
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        self.min_x, self.min_y = min(xs), min(ys)
        span_x = max(max(xs) - self.min_x, 1e-9)
        span_y = max(max(ys) - self.min_y, 1e-9)
        self.scale = min((width - 2 * margin) / span_x, (height - 2 * margin) / span_y)
        # centre the drawing inside the viewport
        self.off_x = (width - self.scale * span_x) / 2
        self.off_y = (height - self.scale * span_y) / 2
        self.height = height

    def __call__(self, point) -> tuple[float, float]:
        x = self.off_x + self.scale * (point[0] - self.min_x)
        y = self.off_y + self.scale * (point[1] - self.min_y)
        return x, self.height - y


def _polyline_points(points, project) -> str:
    return " ".join("{},{}".format(*map(_fmt, project(p))) for p in points)


def _truck_path(legs) -> list:
    path = []
    for leg in legs:
        if leg.actor is not Actor.TRUCK:
            continue
        if not path:
            path.append(leg.origin)
        path.append(leg.target)
    return path


def _drone_excursions(legs) -> list[list]:
    """Chains of drone flight legs; transit legs split the chains."""
    excursions: list[list] = []
    current: list = []
    for leg in legs:
        if leg.actor is not Actor.DRONE or leg.purpose not in _FLIGHT:
            continue
        if not current or current[-1] != leg.origin:
            current = [leg.origin]
            excursions.append(current)
        current.append(leg.target)
    return excursions


def render_svg(
    schedule: Schedule,
    instance: Instance | None = None,
    *,
    width: int = 640,
    height: int = 640,
    margin: float = 30.0,
    title: str | None = None,
) -> str:
    """Draw a schedule as an SVG document and return it as a string.

    When ``instance`` is given its nodes supply the dot markers; otherwise
    the node set is recovered from the truck stops plus the drone delivery
    targets, which together cover every visited node.
    """
    if width <= 2 * margin or height <= 2 * margin:
        raise ValueError("viewport must be larger than twice the margin")
    truck_paths = [_truck_path(p.legs) for p in schedule.pairs]
    excursions = [_drone_excursions(p.legs) for p in schedule.pairs]
    meets = [r.point for p in schedule.pairs for r in p.rendezvous]

    if instance is not None:
        depot = instance.nodes[0].point
        customers = [n.point for n in instance.customers]
    else:
        seen = {pt for path in truck_paths for pt in path}
        seen.update(
            leg.target
            for p in schedule.pairs
            for leg in p.legs
            if leg.actor is Actor.DRONE and leg.purpose is LegPurpose.DELIVERY
        )
        depot = truck_paths[0][0] if truck_paths and truck_paths[0] else (0.0, 0.0)
        customers = sorted(seen - {depot})

    everything = [depot, *customers, *meets]
    everything += [pt for path in truck_paths for pt in path]
    everything += [pt for per_pair in excursions for path in per_pair for pt in path]
    project = _Projection(everything, width, height, margin)

    svg = ET.Element(
        "svg",
        {
            "xmlns": SVG_NS,
            "width": str(width),
            "height": str(height),
            "viewBox": f"0 0 {width} {height}",
        },
    )
    if title:
        ET.SubElement(svg, "title").text = title
    ET.SubElement(
        svg, "rect",
        {"width": str(width), "height": str(height), "fill": "white"},
    )

    routes = ET.SubElement(svg, "g", {"class": "routes", "fill": "none"})
    for idx, path in enumerate(truck_paths):
        colour = _PALETTE[idx % len(_PALETTE)]
        ET.SubElement(
            routes, "polyline",
            {
                "class": "truck",
                "points": _polyline_points(path, project),
                "stroke": colour,
                "stroke-width": "1.6",
            },
        )
    for idx, per_pair in enumerate(excursions):
        colour = _PALETTE[idx % len(_PALETTE)]
        group = ET.SubElement(
            routes, "g",
            {
                "class": "drone",
                "stroke": colour,
                "stroke-width": "1.1",
                "stroke-dasharray": "5 4",
            },
        )
        for path in per_pair:
            ET.SubElement(
                group, "polyline", {"points": _polyline_points(path, project)}
            )

    nodes = ET.SubElement(svg, "g", {"class": "nodes", "fill": "black"})
    for point in customers:
        x, y = project(point)
        ET.SubElement(
            nodes, "circle",
            {"class": "customer", "cx": _fmt(x), "cy": _fmt(y), "r": "3"},
        )
    x, y = project(depot)
    ET.SubElement(
        nodes, "circle",
        {
            "class": "depot",
            "cx": _fmt(x),
            "cy": _fmt(y),
            "r": "5",
            "fill": "white",
            "stroke": "black",
            "stroke-width": "1.5",
        },
    )

    marks = ET.SubElement(svg, "g", {"class": "interceptions", "fill": "black"})
    side = 6.0
    for point in meets:
        x, y = project(point)
        ET.SubElement(
            marks, "rect",
            {
                "class": "interception",
                "x": _fmt(x - side / 2),
                "y": _fmt(y - side / 2),
                "width": _fmt(side),
                "height": _fmt(side),
            },
        )

    return ET.tostring(svg, encoding="unicode")
