# Copyright (c) 2022 Google LLC
#
# Permission is hereby granted, free of charge, to any person obtaining a copy of
# this software and associated documentation files (the "Software"), to deal in
# the Software without restriction, including without limitation the rights to
# use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of
# the Software, and to permit persons to whom the Software is furnished to do so,
# subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY, FITNESS
# FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE AUTHORS OR
# COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER
# IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN
# CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE SOFTWARE.

"""Network descriptions, failure events and event-to-node distances.

A network is an undirected graph of junction nodes joined by pipes (links). Every link
yields one failure event, placed at the centre of the pipe unless told otherwise.
Distances between an event and a node are shortest-path lengths through the pipe
network, with the event treated as a temporary vertex splitting its link in two.
"""

import functools as ft
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

import networkx as nx

from .errors import NetworkFormatError


logger = logging.getLogger(__name__)

UNREACHABLE = math.inf


@dataclass(frozen=True)
class Node:
    id: str
    elevation_m: float = 0.0
    x: Optional[float] = None
    y: Optional[float] = None


@dataclass(frozen=True)
class Link:
    id: str
    from_node: str
    to_node: str
    length_m: float
    diameter_m: Optional[float] = None
    wave_speed_m_s: Optional[float] = None
    friction: Optional[float] = None


@dataclass(frozen=True)
class EventPoint:
    event_id: str
    link_id: str
    offset_fraction: float = 0.5


@dataclass(frozen=True)
class Network:
    """An immutable, validated pipe network.

    **Arguments:**

    - `nodes`: the junction nodes. Ids are unique.
    - `links`: the pipes. Ids are unique, endpoints must exist, lengths are strictly
        positive and self-loops are rejected. Parallel links are fine.
    """

    nodes: Tuple[Node, ...] = ()
    links: Tuple[Link, ...] = ()
    _node_index: Dict[str, Node] = field(init=False, repr=False, compare=False)
    _link_index: Dict[str, Link] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "links", tuple(self.links))
        node_index = {}
        for node in self.nodes:
            if node.id in node_index:
                raise NetworkFormatError(f"duplicate node id {node.id!r}")
            if not node.elevation_m >= 0:
                raise NetworkFormatError(
                    f"node {node.id!r} has elevation {node.elevation_m}; "
                    "elevations must be non-negative"
                )
            node_index[node.id] = node
        link_index = {}
        for link in self.links:
            if link.id in link_index:
                raise NetworkFormatError(f"duplicate link id {link.id!r}")
            for endpoint in (link.from_node, link.to_node):
                if endpoint not in node_index:
                    raise NetworkFormatError(
                        f"link {link.id!r} references missing node {endpoint!r}"
                    )
            if link.from_node == link.to_node:
                raise NetworkFormatError(
                    f"link {link.id!r} is a self-loop on node {link.from_node!r}"
                )
            if not link.length_m > 0:
                raise NetworkFormatError(
                    f"link {link.id!r} has length {link.length_m}; lengths must be "
                    "strictly positive"
                )
            for name in ("diameter_m", "wave_speed_m_s"):
                value = getattr(link, name)
                if value is not None and not value > 0:
                    raise NetworkFormatError(
                        f"link {link.id!r} has {name}={value}; must be positive"
                    )
            if link.friction is not None and not link.friction >= 0:
                raise NetworkFormatError(
                    f"link {link.id!r} has friction {link.friction}; must be "
                    "non-negative"
                )
            link_index[link.id] = link
        object.__setattr__(self, "_node_index", node_index)
        object.__setattr__(self, "_link_index", link_index)

    def node(self, node_id: str) -> Node:
        try:
            return self._node_index[node_id]
        except KeyError:
            raise NetworkFormatError(f"unknown node id {node_id!r}") from None

    def link(self, link_id: str) -> Link:
        try:
            return self._link_index[link_id]
        except KeyError:
            raise NetworkFormatError(f"unknown link id {link_id!r}") from None

    @property
    def node_ids(self) -> List[str]:
        return [node.id for node in self.nodes]

    @ft.cached_property
    def graph(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.node_ids)
        for link in self.links:
            graph.add_edge(link.from_node, link.to_node, key=link.id, length_m=link.length_m)
        return graph


def _number(value: Any, where: str, *, optional: bool = False) -> Optional[float]:
    if value is None and optional:
        return None
    # bool is an int subclass.
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise NetworkFormatError(f"{where} must be a number, got {value!r}")
    return float(value)


def _identifier(value: Any, where: str) -> str:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise NetworkFormatError(f"{where} must be a string, got {value!r}")
    return str(value)


def _parse_node(entry: Any, position: int) -> Node:
    if not isinstance(entry, Mapping):
        raise NetworkFormatError(f"nodes[{position}] must be an object")
    if "id" not in entry:
        raise NetworkFormatError(f"nodes[{position}] has no 'id'")
    node_id = _identifier(entry["id"], f"nodes[{position}].id")
    elevation = _number(entry.get("elevation_m", 0.0), f"node {node_id!r} elevation_m")
    return Node(
        id=node_id,
        elevation_m=elevation,
        x=_number(entry.get("x"), f"node {node_id!r} x", optional=True),
        y=_number(entry.get("y"), f"node {node_id!r} y", optional=True),
    )


def _parse_link(entry: Any, position: int) -> Link:
    if not isinstance(entry, Mapping):
        raise NetworkFormatError(f"links[{position}] must be an object")
    for key in ("id", "from", "to", "length_m"):
        if key not in entry:
            raise NetworkFormatError(f"links[{position}] has no {key!r}")
    link_id = _identifier(entry["id"], f"links[{position}].id")
    where = f"link {link_id!r}"
    return Link(
        id=link_id,
        from_node=_identifier(entry["from"], f"{where} from"),
        to_node=_identifier(entry["to"], f"{where} to"),
        length_m=_number(entry["length_m"], f"{where} length_m"),
        diameter_m=_number(entry.get("diameter_m"), f"{where} diameter_m", optional=True),
        wave_speed_m_s=_number(
            entry.get("wave_speed_m_s"), f"{where} wave_speed_m_s", optional=True
        ),
        friction=_number(entry.get("friction"), f"{where} friction", optional=True),
    )


def parse_network(text: str) -> Network:
    """Parse a JSON network document.

    The document has top-level keys `"nodes"` and `"links"`; unknown keys are ignored
    and optional keys may be absent.

    **Raises:**

    `NetworkFormatError` for malformed JSON, duplicate ids, dangling endpoint
    references, self-loops and non-positive lengths.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise NetworkFormatError(f"network document is not valid JSON: {e}") from e
    if not isinstance(document, Mapping):
        raise NetworkFormatError("network document must be a JSON object")
    nodes = document.get("nodes", [])
    links = document.get("links", [])
    if not isinstance(nodes, list) or not isinstance(links, list):
        raise NetworkFormatError("'nodes' and 'links' must be arrays")
    network = Network(
        nodes=tuple(_parse_node(entry, i) for i, entry in enumerate(nodes)),
        links=tuple(_parse_link(entry, i) for i, entry in enumerate(links)),
    )
    logger.debug(
        "Parsed network with %d nodes and %d links", len(network.nodes), len(network.links)
    )
    return network


def load_network(path) -> Network:
    with open(path, "r", encoding="utf-8") as f:
        return parse_network(f.read())


def dump_network(net: Network) -> str:
    """Serialise a network to the JSON format read by `parse_network`."""
    nodes = []
    for node in net.nodes:
        entry = {"id": node.id, "elevation_m": node.elevation_m}
        if node.x is not None:
            entry["x"] = node.x
        if node.y is not None:
            entry["y"] = node.y
        nodes.append(entry)
    links = []
    for link in net.links:
        entry = {
            "id": link.id,
            "from": link.from_node,
            "to": link.to_node,
            "length_m": link.length_m,
        }
        for name in ("diameter_m", "wave_speed_m_s", "friction"):
            value = getattr(link, name)
            if value is not None:
                entry[name] = value
        links.append(entry)
    return json.dumps({"nodes": nodes, "links": links}, indent=2)


def event_locations(
    net: Network, links: Optional[Iterable[str]] = None
) -> List[EventPoint]:
    """One failure event at the centre of each link, in link declaration order.

    **Arguments:**

    - `net`: the network.
    - `links`: optionally, the ids of the links allowed to fail (e.g. to leave out pump
        or valve links). Declaration order is kept regardless of the order given here.
    """
    if links is None:
        return [EventPoint(event_id=link.id, link_id=link.id) for link in net.links]
    allowed = set(links)
    for link_id in allowed:
        net.link(link_id)
    return [
        EventPoint(event_id=link.id, link_id=link.id)
        for link in net.links
        if link.id in allowed
    ]


def distances_from(net: Network, node_id: str) -> Dict[str, float]:
    """Shortest-path distances in metres from `node_id` to every reachable node."""
    net.node(node_id)
    return nx.single_source_dijkstra_path_length(net.graph, node_id, weight="length_m")


def _event_distance(link: Link, offset: float, distances: Mapping[str, float]) -> float:
    via_from = distances.get(link.from_node, UNREACHABLE)
    via_to = distances.get(link.to_node, UNREACHABLE)
    return min(offset * link.length_m + via_from, (1 - offset) * link.length_m + via_to)


def event_node_distance(net: Network, e: EventPoint, node_id: str) -> float:
    """Shortest-path distance in metres between a failure event and a node.

    Returns `UNREACHABLE` (positive infinity) when the node lies in a different
    connected component from the event.
    """
    link = net.link(e.link_id)
    if not 0 <= e.offset_fraction <= 1:
        raise NetworkFormatError(
            f"event {e.event_id!r} has offset {e.offset_fraction}; must lie in [0, 1]"
        )
    return _event_distance(link, e.offset_fraction, distances_from(net, node_id))


def event_distances(
    net: Network, events: List[EventPoint], node_id: str
) -> List[float]:
    """Distances from one node to many events, from a single shortest-path search."""
    distances = distances_from(net, node_id)
    out = []
    for e in events:
        link = net.link(e.link_id)
        out.append(_event_distance(link, e.offset_fraction, distances))
    return out
