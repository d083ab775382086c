"""Problem instances, directed tree topologies, flows, and topology enumeration.

Node indexing convention used throughout the package: for an instance with
n sources and j Steiner slots, nodes 0..n-1 are the sources, node n is the
sink, and nodes n+1..n+j are the Steiner slots.  A topology is stored as a
parent array in which every node except the sink names its unique
out-neighbour, so the one-out-edge rule cannot be violated by construction.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import TopologyError
from .geometry import Point
from .strategies import BoundStrategy, DegreeBound, ExplicitBound, NodeWeighted

NO_PARENT = -1  # parent entry of the sink slot


@dataclass(frozen=True)
class Instance:
    """Sources with positive supplies and a single sink."""

    sources: tuple[Point, ...]
    supplies: tuple[float, ...]
    sink: Point

    def __post_init__(self) -> None:
        if len(self.sources) < 1:
            raise ValueError("an instance needs at least one source")
        if len(self.supplies) != len(self.sources):
            raise ValueError(
                f"{len(self.supplies)} supplies for {len(self.sources)} sources"
            )
        if not self.sink.is_finite():
            raise ValueError("sink has non-finite coordinates")
        for i, p in enumerate(self.sources):
            if not p.is_finite():
                raise ValueError(f"source {i} has non-finite coordinates")
            if p == self.sink:
                raise ValueError(f"source {i} coincides with the sink")
        for i, w in enumerate(self.supplies):
            if not w > 0.0:
                raise ValueError(f"supply of source {i} must be positive, got {w}")

    @classmethod
    def with_unit_supplies(
        cls, sources: Sequence[Point], sink: Point
    ) -> "Instance":
        return cls(tuple(sources), (1.0,) * len(sources), sink)

    @property
    def n_sources(self) -> int:
        return len(self.sources)

    def has_unit_supplies(self) -> bool:
        return all(w == 1.0 for w in self.supplies)

    def total_supply(self) -> float:
        return sum(self.supplies)


@dataclass(frozen=True)
class Topology:
    """A directed labelled tree on source slots, Steiner slots, and the sink.

    Every directed path follows parent links and terminates at the sink.
    """

    n_sources: int
    n_steiner: int
    parents: tuple[int, ...]

    def __post_init__(self) -> None:
        n_nodes = self.n_sources + 1 + self.n_steiner
        if self.n_sources < 1 or self.n_steiner < 0:
            raise TopologyError("need at least one source and a nonnegative Steiner count")
        if len(self.parents) != n_nodes:
            raise TopologyError(
                f"parent array has {len(self.parents)} entries for {n_nodes} nodes"
            )
        sink = self.n_sources
        for node, parent in enumerate(self.parents):
            if node == sink:
                if parent != NO_PARENT:
                    raise TopologyError("the sink must not have an out-edge")
            elif not (0 <= parent < n_nodes) or parent == node:
                raise TopologyError(f"node {node} has invalid parent {parent}")

    @property
    def n_nodes(self) -> int:
        return self.n_sources + 1 + self.n_steiner

    @property
    def sink(self) -> int:
        return self.n_sources

    def is_source(self, node: int) -> bool:
        return node < self.n_sources

    def is_steiner(self, node: int) -> bool:
        return node > self.n_sources

    def is_terminal(self, node: int) -> bool:
        return node <= self.n_sources

    def steiner_slots(self) -> range:
        return range(self.n_sources + 1, self.n_nodes)

    def edge_children(self) -> list[int]:
        """Non-sink nodes in ascending order; node i stands for the edge i -> parents[i]."""
        return [i for i in range(self.n_nodes) if i != self.sink]

    def children_lists(self) -> list[list[int]]:
        children: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for node, parent in enumerate(self.parents):
            if parent != NO_PARENT:
                children[parent].append(node)
        return children

    def degrees(self) -> list[int]:
        deg = [0] * self.n_nodes
        for node, parent in enumerate(self.parents):
            if parent != NO_PARENT:
                deg[node] += 1
                deg[parent] += 1
        return deg

    def order_from_sink(self) -> list[int]:
        """All nodes in breadth-first order from the sink (parents before children).

        Raises TopologyError when some node cannot reach the sink, which is
        exactly the cycle / disconnection case for a parent array.
        """
        children = self.children_lists()
        order = [self.sink]
        seen = [False] * self.n_nodes
        seen[self.sink] = True
        head = 0
        while head < len(order):
            node = order[head]
            head += 1
            for child in children[node]:
                if seen[child]:
                    raise TopologyError(f"node {child} is reached twice; not a tree")
                seen[child] = True
                order.append(child)
        if len(order) != self.n_nodes:
            missing = [i for i in range(self.n_nodes) if not seen[i]]
            raise TopologyError(f"nodes {missing} cannot reach the sink (cycle or disconnection)")
        return order

    def structural_violations(self) -> list[str]:
        try:
            self.order_from_sink()
        except TopologyError as exc:
            return [str(exc)]
        return []

    def is_full(self) -> bool:
        """True when every terminal has degree 1 and every Steiner slot degree > 1."""
        deg = self.degrees()
        for node in range(self.n_nodes):
            if self.is_terminal(node):
                if deg[node] != 1:
                    return False
            elif deg[node] <= 1:
                return False
        return True


def compute_flows(topology: Topology, supplies: Sequence[float]) -> tuple[float, ...]:
    """The unique edge flows for the given supplies.

    flows[i] is the flow on node i's out-edge; the sink entry is 0.  Flows are
    accumulated child-first: a node's out-flow is its supply plus the flows
    entering it.
    """
    if len(supplies) != topology.n_sources:
        raise TopologyError(
            f"{len(supplies)} supplies for {topology.n_sources} source slots"
        )
    order = topology.order_from_sink()
    acc = [0.0] * topology.n_nodes
    for i, w in enumerate(supplies):
        if not w > 0.0:
            raise TopologyError(f"supply of source {i} must be positive, got {w}")
        acc[i] = w
    flows = [0.0] * topology.n_nodes
    parents = topology.parents
    sink = topology.sink
    for node in reversed(order):
        if node == sink:
            continue
        f = acc[node]
        if f <= 0.0:
            raise TopologyError(f"Steiner slot {node} has no inflow; its out-edge would carry zero flow")
        flows[node] = f
        acc[parents[node]] += f
    return tuple(flows)


def validate_topology(topology: Topology, strategy: BoundStrategy) -> list[str]:
    """Structural and strategy-specific violations; an empty list means ok."""
    violations = topology.structural_violations()
    if violations:
        return violations
    deg = topology.degrees()
    for s in topology.steiner_slots():
        if deg[s] < 2:
            violations.append(f"Steiner slot {s} has degree {deg[s]} < 2 (no inflow)")
    if isinstance(strategy, DegreeBound):
        for s in topology.steiner_slots():
            if deg[s] < strategy.phi:
                violations.append(
                    f"Steiner degree < phi: slot {s} has degree {deg[s]} < {strategy.phi}"
                )
    elif isinstance(strategy, ExplicitBound):
        if topology.n_steiner > strategy.k:
            violations.append(
                f"Steiner count exceeds k: {topology.n_steiner} > {strategy.k}"
            )
    elif isinstance(strategy, NodeWeighted):
        pass  # the degree >= 2 baseline above is the whole constraint
    else:
        raise TypeError(f"unknown strategy {strategy!r}")
    return violations


def canonical_form(topology: Topology) -> tuple[int, ...]:
    """Minimum lexicographic parent array over all Steiner-slot relabellings.

    Sources and the sink keep their labels; Steiner slots are interchangeable.
    Intended for small trees (cost grows as n_steiner factorial).
    """
    slots = list(topology.steiner_slots())
    n_nodes = topology.n_nodes
    best: tuple[int, ...] | None = None
    for perm in itertools.permutations(slots):
        relabel = list(range(n_nodes))
        for old, new in zip(slots, perm):
            relabel[old] = new
        arr = [0] * n_nodes
        for node, parent in enumerate(topology.parents):
            arr[relabel[node]] = NO_PARENT if parent == NO_PARENT else relabel[parent]
        key = tuple(arr)
        if best is None or key < best:
            best = key
    assert best is not None
    return best


def rooted_encoding(topology: Topology) -> tuple:
    """Canonical sink-rooted encoding, invariant under Steiner relabelling.

    Terminals keep their identities, Steiner slots are anonymous, and child
    encodings are sorted, so two topologies get equal encodings exactly when
    one is a Steiner relabelling of the other.  Cheap enough to dedup
    enumeration streams (no factorial blow-up).
    """
    children = topology.children_lists()
    sink = topology.sink

    def encode(node: int) -> tuple:
        label = node if node <= sink else -2
        return (label, tuple(sorted(encode(c) for c in children[node])))

    return encode(sink)


def _orient_toward_sink(n_sources: int, n_steiner: int, edges: Sequence[tuple[int, int]]) -> Topology:
    """Build a Topology from an undirected edge list by rooting at the sink."""
    n_nodes = n_sources + 1 + n_steiner
    adjacency: list[list[int]] = [[] for _ in range(n_nodes)]
    for u, v in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    parents = [NO_PARENT] * n_nodes
    sink = n_sources
    seen = [False] * n_nodes
    seen[sink] = True
    queue = [sink]
    head = 0
    while head < len(queue):
        node = queue[head]
        head += 1
        for nb in adjacency[node]:
            if not seen[nb]:
                seen[nb] = True
                parents[nb] = node
                queue.append(nb)
    if len(queue) != n_nodes:
        raise TopologyError("edge list does not span all nodes")
    return Topology(n_sources, n_steiner, tuple(parents))


def enumerate_full_topologies(n_sources: int) -> Iterator[Topology]:
    """Every full topology on n sources plus the sink, with n-1 degree-3
    Steiner slots, each exactly once up to Steiner relabelling.

    Built by the recursive edge-insertion construction: the base joins the
    first two sources and the sink to one Steiner slot, and each further
    source is attached by subdividing one existing edge.  This yields each
    topology exactly once, so no dedup pass is needed.
    """
    if n_sources < 2:
        raise TopologyError("no full topology exists with fewer than two sources")
    sink = n_sources
    first_steiner = n_sources + 1
    base = [(0, first_steiner), (1, first_steiner), (sink, first_steiner)]

    def insert(edges: list[tuple[int, int]], next_source: int, next_steiner: int) -> Iterator[Topology]:
        if next_source == n_sources:
            yield _orient_toward_sink(n_sources, n_sources - 1, edges)
            return
        for i in range(len(edges)):
            u, v = edges[i]
            s = next_steiner
            grown = edges[:i] + edges[i + 1 :] + [(u, s), (v, s), (next_source, s)]
            yield from insert(grown, next_source + 1, next_steiner + 1)

    yield from insert(base, 2, first_steiner + 1)


def _prufer_decode(seq: Sequence[int], n_nodes: int) -> list[tuple[int, int]]:
    degree = [1] * n_nodes
    for x in seq:
        degree[x] += 1
    leaves = [i for i in range(n_nodes) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u = heapq.heappop(leaves)
    v = heapq.heappop(leaves)
    edges.append((u, v))
    return edges


def enumerate_bounded_topologies(
    n_sources: int, max_steiner: int, min_steiner_degree: int = 3
) -> Iterator[Topology]:
    """Every topology on n sources + sink + j Steiner slots for 0 <= j <=
    max_steiner, with each Steiner slot of degree >= min_steiner_degree and
    terminals of any degree, deduplicated under Steiner relabelling.

    Enumerates labelled trees through degree-constrained Pruefer sequences
    (a node of degree d appears d-1 times) and drops relabelled repeats via
    the sink-rooted canonical encoding.
    """
    if n_sources < 1:
        raise TopologyError("need at least one source")
    if max_steiner < 0:
        raise TopologyError("max Steiner count must be nonnegative")
    if min_steiner_degree < 2:
        raise ValueError(
            "Steiner slots of degree < 2 carry no flow; the minimum supported degree is 2"
        )
    for j in range(max_steiner + 1):
        yield from _enumerate_with_steiner_count(n_sources, j, min_steiner_degree)


def _enumerate_with_steiner_count(
    n_sources: int, n_steiner: int, min_steiner_degree: int
) -> Iterator[Topology]:
    n_nodes = n_sources + 1 + n_steiner
    if n_nodes == 2:
        yield Topology(1, 0, (1, NO_PARENT))
        return
    length = n_nodes - 2
    need = min_steiner_degree - 1  # occurrences every Steiner label must reach
    if n_steiner * need > length:
        return
    steiner_start = n_sources + 1
    counts = [0] * n_steiner
    seq = [0] * length
    # Orbits under Steiner relabelling have more than one member only when
    # j >= 2, so the dedup set can be skipped below that.
    seen: set | None = set() if n_steiner >= 2 else None

    def emit() -> Iterator[Topology]:
        edges = _prufer_decode(seq, n_nodes)
        topology = _orient_toward_sink(n_sources, n_steiner, edges)
        if seen is not None:
            key = rooted_encoding(topology)
            if key in seen:
                return
            seen.add(key)
        yield topology

    def fill(pos: int, deficit: int) -> Iterator[Topology]:
        if pos == length:
            yield from emit()
            return
        remaining = length - pos
        for symbol in range(n_nodes):
            if symbol >= steiner_start:
                slot = symbol - steiner_start
                shrink = 1 if counts[slot] < need else 0
                if deficit - shrink > remaining - 1:
                    continue
                counts[slot] += 1
                seq[pos] = symbol
                yield from fill(pos + 1, deficit - shrink)
                counts[slot] -= 1
            else:
                if deficit > remaining - 1:
                    continue
                seq[pos] = symbol
                yield from fill(pos + 1, deficit)

    yield from fill(0, n_steiner * need)
