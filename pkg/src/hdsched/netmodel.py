"""Network model for half-duplex 1-2-1 relay networks.

Nodes are ``0..N+1``: node 0 is the source, node ``N+1`` the destination and
the rest are relays. A link ``(i, j)`` means ``i -> j`` and carries a capacity
in bits per channel use.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Any, Mapping

import numpy as np

from .flowgraph import WeightedGraph

Link = tuple[int, int]
Edge = tuple[int, int]


class NetworkFormatError(ValueError):
    """Raised when a network document or link set is invalid."""


def link_capacity(h: complex, power: float) -> float:
    """Point-to-point capacity ``log2(1 + P |h|^2)`` of a link with gain ``h``."""
    if power < 0:
        raise ValueError(f"transmit power must be nonnegative, got {power}")
    return math.log2(1.0 + power * abs(h) ** 2)


@dataclass(frozen=True)
class Network:
    """An N-relay 1-2-1 network. ``capacities`` maps ``(from, to)`` to capacity."""

    n_relays: int
    capacities: Mapping[Link, float]

    def __post_init__(self):
        if not isinstance(self.n_relays, (int, np.integer)) or self.n_relays < 0:
            raise NetworkFormatError(f"n_relays must be a nonnegative integer, got {self.n_relays!r}")
        dest = int(self.n_relays) + 1
        clean = {}
        for (i, j), c in self.capacities.items():
            i, j = int(i), int(j)
            _check_link(i, j, dest)
            c = float(c)
            if math.isnan(c) or math.isinf(c):
                raise NetworkFormatError(f"link ({i},{j}): capacity must be finite, got {c}")
            if c < 0:
                raise NetworkFormatError(f"link ({i},{j}): negative capacity {c}")
            clean[(i, j)] = c
        object.__setattr__(self, "n_relays", int(self.n_relays))
        object.__setattr__(self, "capacities", MappingProxyType(dict(sorted(clean.items()))))

    @property
    def n_nodes(self) -> int:
        return self.n_relays + 2

    @property
    def source(self) -> int:
        return 0

    @property
    def destination(self) -> int:
        return self.n_relays + 1

    @property
    def links(self) -> list[Link]:
        return list(self.capacities)

    @property
    def support_edges(self) -> list[Edge]:
        """Undirected edges ``(i, j)``, ``i < j``, with a link in either direction."""
        return sorted({(min(i, j), max(i, j)) for i, j in self.capacities})

    def has_link(self, i: int, j: int) -> bool:
        return (i, j) in self.capacities

    def is_degenerate(self) -> bool:
        """True when no link leaves the source or none enters the destination."""
        d = self.destination
        return not any(i == 0 for i, _ in self.capacities) or not any(
            j == d for _, j in self.capacities
        )

    def support(self, weights: Mapping[Edge, float] | None = None) -> WeightedGraph:
        """Undirected support graph, each edge weighted by ``weights`` (default 0)."""
        weights = weights or {}
        return WeightedGraph(
            self.n_nodes, tuple((i, j, weights.get((i, j), 0.0)) for i, j in self.support_edges)
        )

    def digest(self) -> str:
        import hashlib

        return hashlib.sha256(serialize_network(self).encode()).hexdigest()


def _check_link(i: int, j: int, dest: int) -> None:
    if i == j:
        raise NetworkFormatError(f"link ({i},{j}): self-loop")
    if j == 0:
        raise NetworkFormatError(f"link ({i},{j}): link into source")
    if i == dest:
        raise NetworkFormatError(f"link ({i},{j}): link out of destination")
    if not (0 <= i <= dest and 0 <= j <= dest):
        raise NetworkFormatError(f"link ({i},{j}): node out of range [0:{dest}]")


def parse_network(text: str | bytes | Mapping[str, Any]) -> Network:
    """Parse and validate a network document (JSON text or an already-decoded dict).

    Each link gives either ``capacity`` directly or a channel gain
    ``h_re``/``h_im`` together with ``power``.
    """
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise NetworkFormatError(f"invalid JSON: {exc}") from None
    else:
        doc = text
    if not isinstance(doc, dict):
        raise NetworkFormatError("document must be a JSON object")
    n = doc.get("n_relays")
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise NetworkFormatError("'n_relays' must be a nonnegative integer")
    links = doc.get("links")
    if not isinstance(links, list):
        raise NetworkFormatError("'links' must be a list")

    dest = n + 1
    caps: dict[Link, float] = {}
    for k, item in enumerate(links):
        if not isinstance(item, dict):
            raise NetworkFormatError(f"links[{k}] must be an object")
        i, j = item.get("from"), item.get("to")
        if any(isinstance(x, bool) or not isinstance(x, int) for x in (i, j)):
            raise NetworkFormatError(f"links[{k}]: 'from' and 'to' must be integers")
        _check_link(i, j, dest)
        if (i, j) in caps:
            raise NetworkFormatError(f"link ({i},{j}): duplicate link")
        if "capacity" in item:
            c = item["capacity"]
            if isinstance(c, bool) or not isinstance(c, (int, float)):
                raise NetworkFormatError(f"link ({i},{j}): capacity must be a number")
        elif {"h_re", "h_im", "power"} <= item.keys():
            vals = [item["h_re"], item["h_im"], item["power"]]
            if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in vals):
                raise NetworkFormatError(f"link ({i},{j}): h_re, h_im, power must be numbers")
            if vals[2] < 0:
                raise NetworkFormatError(f"link ({i},{j}): negative power {vals[2]}")
            c = link_capacity(complex(vals[0], vals[1]), vals[2])
        else:
            raise NetworkFormatError(
                f"link ({i},{j}): needs 'capacity' or all of 'h_re', 'h_im', 'power'"
            )
        if c < 0:
            raise NetworkFormatError(f"link ({i},{j}): negative capacity {c}")
        caps[(i, j)] = float(c)
    return Network(n, caps)


def network_to_dict(net: Network) -> dict[str, Any]:
    return {
        "n_relays": net.n_relays,
        "links": [{"from": i, "to": j, "capacity": c} for (i, j), c in net.capacities.items()],
    }


def serialize_network(net: Network) -> str:
    """JSON text with links sorted by ``(from, to)``; floats use ``repr`` so
    parsing the text back gives an identical network."""
    return json.dumps(network_to_dict(net), indent=2) + "\n"


def permitted_links(n_relays: int) -> list[Link]:
    dest = n_relays + 1
    return [(i, j) for i in range(dest) for j in range(1, dest + 1) if i != j]


def generate_random_network(n_relays: int, density: float, seed: int) -> Network:
    """Random network: each permitted ordered pair is present with probability
    ``density`` and gets a capacity uniform on ``[0.1, 10]``.

    When ``density > 0`` the result always has a source-out and a
    destination-in link (one is added at random if the draw produced none).
    """
    if n_relays < 0:
        raise ValueError("n_relays must be nonnegative")
    rng = np.random.default_rng(seed)
    pairs = permitted_links(n_relays)
    keep = rng.random(len(pairs)) < density
    caps_draw = rng.uniform(0.1, 10.0, size=len(pairs))
    chosen = {p: float(c) for p, c, k in zip(pairs, caps_draw, keep) if k}
    if density > 0:
        dest = n_relays + 1
        if not any(i == 0 for i, _ in chosen):
            opts = [p for p in pairs if p[0] == 0]
            p = opts[int(rng.integers(len(opts)))]
            chosen[p] = float(rng.uniform(0.1, 10.0))
        if not any(j == dest for _, j in chosen):
            opts = [p for p in pairs if p[1] == dest]
            p = opts[int(rng.integers(len(opts)))]
            chosen[p] = float(rng.uniform(0.1, 10.0))
    return Network(n_relays, chosen)
