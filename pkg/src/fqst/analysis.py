"""Cost functions, structural optimality certificates, splits, and bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from . import algebraic_solver
from .errors import TopologyError
from .geometry import MassPoint, Point, angle_at, centroid, lerp, sq_dist
from .strategies import BoundStrategy, DegreeBound
from .topology import NO_PARENT, Instance, Topology, compute_flows
from .trees import SolvedTree, build_solved_tree, embedded_cost

OVERLAP_ANGLE_TOLERANCE = 1e-7
CERTIFICATE_TOLERANCE = 1e-9


def cost(tree: SolvedTree) -> float:
    """Sum over edges of flow * squared length, recomputed from the fields."""
    return embedded_cost(tree.instance, tree.topology, tree.steiner_positions, tree.flows)


def cost_node_weighted(tree: SolvedTree, c: float) -> float:
    """cost(tree) plus c per Steiner point."""
    if not c > 0.0:
        raise ValueError(f"node weight must be positive, got {c}")
    return cost(tree) + c * tree.topology.n_steiner


def centroid_deviations(tree: SolvedTree) -> dict[int, float]:
    """Distance of each Steiner point from the centre of mass of its
    neighbours, where in-neighbours weigh their in-edge flows and the
    out-neighbour weighs the out-edge flow."""
    children = tree.topology.children_lists()
    parents = tree.topology.parents
    deviations: dict[int, float] = {}
    for slot in tree.topology.steiner_slots():
        masses = [MassPoint(tree.position(c), tree.flows[c]) for c in children[slot]]
        masses.append(MassPoint(tree.position(parents[slot]), tree.flows[slot]))
        deviations[slot] = math.sqrt(sq_dist(tree.position(slot), centroid(masses)))
    return deviations


def check_centroid_certificate(tree: SolvedTree, tol: float = CERTIFICATE_TOLERANCE) -> dict[int, bool]:
    """Local-minimality decision: a tree is locally minimal exactly when every
    Steiner point sits at the centre of mass of its neighbours."""
    return {slot: dev <= tol for slot, dev in centroid_deviations(tree).items()}


@dataclass(frozen=True, slots=True)
class AngleViolation:
    node: int
    in_neighbour: int
    angle: float


def check_angles(tree: SolvedTree, tol_radians: float = CERTIFICATE_TOLERANCE) -> list[AngleViolation]:
    """In-edge/out-edge pairs meeting at less than a right angle.

    Screens node-weighted and explicitly bounded candidates for global
    optimality; zero-length edges carry no direction and are skipped.
    """
    children = tree.topology.children_lists()
    parents = tree.topology.parents
    violations = []
    threshold = math.pi / 2.0 - tol_radians
    for node in range(tree.topology.n_nodes):
        parent = parents[node]
        if parent == NO_PARENT:
            continue
        here = tree.position(node)
        out_pos = tree.position(parent)
        if sq_dist(here, out_pos) == 0.0:
            continue
        for child in children[node]:
            in_pos = tree.position(child)
            if sq_dist(here, in_pos) == 0.0:
                continue
            angle = angle_at(here, in_pos, out_pos)
            if angle < threshold:
                violations.append(AngleViolation(node, child, angle))
    return violations


@dataclass(frozen=True, slots=True)
class DegreeViolation:
    kind: str  # "steiner-degree" | "source-degree" | "source-midpoint"
    node: int
    detail: str


def check_degree_window(
    tree: SolvedTree, phi: int, tol: float = CERTIFICATE_TOLERANCE
) -> list[DegreeViolation]:
    """Degree-bounded optimality screens.

    Steiner degrees must lie in [phi, 2*phi - 3] and source degrees must stay
    below phi.  A source of degree exactly phi - 1 must additionally sit at
    the midpoint of its out-neighbour and the centre of mass of itself and
    its in-neighbours (the no-beneficial-split condition at that source).
    """
    if phi < 3:
        raise ValueError(f"phi must be at least 3, got {phi}")
    topo = tree.topology
    deg = topo.degrees()
    children = topo.children_lists()
    violations = []
    high = 2 * phi - 3
    for slot in topo.steiner_slots():
        if not (phi <= deg[slot] <= high):
            violations.append(
                DegreeViolation(
                    "steiner-degree",
                    slot,
                    f"degree {deg[slot]} outside [{phi}, {high}]",
                )
            )
    for source in range(topo.n_sources):
        if deg[source] > phi - 1:
            violations.append(
                DegreeViolation(
                    "source-degree",
                    source,
                    f"degree {deg[source]} exceeds {phi - 1}",
                )
            )
        elif deg[source] == phi - 1 and children[source]:
            mass_points = [MassPoint(tree.position(source), tree.instance.supplies[source])]
            mass_points += [
                MassPoint(tree.position(c), tree.flows[c]) for c in children[source]
            ]
            merged = centroid(mass_points)
            out_pos = tree.position(topo.parents[source])
            expected = lerp(merged, out_pos, 0.5)
            offset = math.sqrt(sq_dist(tree.position(source), expected))
            if offset > tol:
                violations.append(
                    DegreeViolation(
                        "source-midpoint",
                        source,
                        f"offset {offset:.3e} from the midpoint position",
                    )
                )
    return violations


@dataclass(frozen=True, slots=True)
class EdgeOverlap:
    node: int
    first_neighbour: int
    second_neighbour: int
    angle: float
    degenerate: bool
    degree_phi_caveat: bool


def check_overlapping_edges(
    tree: SolvedTree,
    tol: float = OVERLAP_ANGLE_TOLERANCE,
    strategy: BoundStrategy | None = None,
) -> list[EdgeOverlap]:
    """Incident edge pairs where one lies inside the other.

    Edges sharing a node overlap exactly when the angle between them vanishes
    (the shorter then lies in the longer); zero-length edges overlap
    degenerately with everything at their node.  Any hit rules out global
    optimality, except that under a degree bound the argument does not apply
    when the common node is a Steiner point of degree exactly phi, which the
    caveat flag reports.
    """
    topo = tree.topology
    children = topo.children_lists()
    deg = topo.degrees()
    overlaps = []
    for node in range(topo.n_nodes):
        neighbours = list(children[node])
        if topo.parents[node] != NO_PARENT:
            neighbours.append(topo.parents[node])
        if len(neighbours) < 2:
            continue
        here = tree.position(node)
        caveat = (
            isinstance(strategy, DegreeBound)
            and topo.is_steiner(node)
            and deg[node] == strategy.phi
        )
        for i in range(len(neighbours)):
            for j in range(i + 1, len(neighbours)):
                a, b = neighbours[i], neighbours[j]
                pa, pb = tree.position(a), tree.position(b)
                if sq_dist(here, pa) == 0.0 or sq_dist(here, pb) == 0.0:
                    overlaps.append(EdgeOverlap(node, a, b, 0.0, True, caveat))
                    continue
                angle = angle_at(here, pa, pb)
                if angle <= tol:
                    overlaps.append(EdgeOverlap(node, a, b, angle, False, caveat))
    return overlaps


@dataclass(frozen=True, slots=True)
class SplitSpec:
    """Reroute the in-neighbours in `members` through a new Steiner point that
    feeds `target`."""

    target: int
    members: tuple[int, ...]


def split_topology(topology: Topology, spec: SplitSpec) -> Topology:
    """The topology after rerouting spec.members through a new Steiner slot."""
    children = set(topology.children_lists()[spec.target])
    if not spec.members:
        raise ValueError("a split needs at least one in-neighbour")
    if not set(spec.members) <= children:
        raise ValueError(
            f"{sorted(set(spec.members) - children)} are not in-neighbours of node {spec.target}"
        )
    new_slot = topology.n_nodes
    parents = list(topology.parents) + [spec.target]
    for member in spec.members:
        parents[member] = new_slot
    return Topology(topology.n_sources, topology.n_steiner + 1, tuple(parents))


def apply_split(tree: SolvedTree, spec: SplitSpec) -> SolvedTree:
    """The re-solved tree after splitting; beneficial when its cost is lower.

    All Steiner points (old and new) are re-placed by the algebraic solver.
    """
    return algebraic_solver.solve_topology(
        tree.instance, split_topology(tree.topology, spec)
    )


def optimal_bead_count(f: float, length: float, c: float) -> int:
    """The integer bead count minimising f*length^2/(p+1) + c*p, ties toward
    smaller p.

    The minimiser satisfies p(p+1) <= f*length^2/c <= (p+1)(p+2).
    """
    if not (f > 0.0 and length > 0.0 and c > 0.0):
        raise ValueError("flow, length, and bead cost must all be positive")
    base = f * length * length

    def total(p: int) -> float:
        return base / (p + 1) + c * p

    p = max(0, int(math.sqrt(base / c)) - 1)
    while p > 0 and total(p - 1) <= total(p):
        p -= 1
    while total(p + 1) < total(p):
        p += 1
    return p


def lower_bound_path(instance: Instance, k: int) -> float:
    """Cost lower bound for any tree on the instance with at most k Steiner
    points: each unit of flow travels at least the straight beaded path."""
    if k < 0:
        raise ValueError(f"Steiner budget must be nonnegative, got {k}")
    total = sum(sq_dist(z, instance.sink) for z in instance.sources)
    return total / (instance.n_sources + k + 1)


def _prim_spanning_tree(points: Sequence[Point]) -> list[tuple[int, int]]:
    """Minimum spanning tree edges over the points (greedy, quadratic)."""
    m = len(points)
    in_tree = [False] * m
    in_tree[0] = True
    best_dist = [sq_dist(points[0], p) for p in points]
    best_link = [0] * m
    edges = []
    for _ in range(m - 1):
        pick = -1
        pick_dist = math.inf
        for i in range(m):
            if not in_tree[i] and best_dist[i] < pick_dist:
                pick = i
                pick_dist = best_dist[i]
        in_tree[pick] = True
        edges.append((pick, best_link[pick]))
        for i in range(m):
            if not in_tree[i]:
                d = sq_dist(points[pick], points[i])
                if d < best_dist[i]:
                    best_dist[i] = d
                    best_link[i] = pick
    return edges


def expand_beads(topology: Topology, bead_counts: Sequence[int]) -> Topology:
    """Subdivide each edge with the given number of degree-2 Steiner slots.

    bead_counts aligns with topology.edge_children(); new slots are appended
    after the existing Steiner slots.
    """
    edge_children = topology.edge_children()
    if len(bead_counts) != len(edge_children):
        raise TopologyError(
            f"{len(bead_counts)} bead counts for {len(edge_children)} edges"
        )
    parents = list(topology.parents)
    next_slot = topology.n_nodes
    added = 0
    for child, p in zip(edge_children, bead_counts):
        if p < 0:
            raise TopologyError("bead counts must be nonnegative")
        if p == 0:
            continue
        tail = parents[child]
        for _ in range(p):
            parents.append(tail)
            tail = next_slot
            next_slot += 1
            added += 1
        parents[child] = tail
    return Topology(topology.n_sources, topology.n_steiner + added, tuple(parents))


def beaded_spanning_tree(instance: Instance, c: float) -> SolvedTree:
    """Minimum spanning tree on sources plus sink, directed toward the sink,
    with the cost-minimising bead count inserted on every edge.

    Its node-weighted cost upper-bounds the node-weighted optimum.
    """
    if not c > 0.0:
        raise ValueError(f"node weight must be positive, got {c}")
    terminals = [*instance.sources, instance.sink]
    mst_edges = _prim_spanning_tree(terminals)
    base = Topology(instance.n_sources, 0, _parents_from_edges(instance.n_sources, mst_edges))
    flows = compute_flows(base, instance.supplies)

    bead_counts = []
    for child in base.edge_children():
        length = math.sqrt(sq_dist(terminals[child], terminals[base.parents[child]]))
        if length == 0.0:
            bead_counts.append(0)
        else:
            bead_counts.append(optimal_bead_count(flows[child], length, c))

    expanded = expand_beads(base, bead_counts)
    # expand_beads creates each edge's chain slots from the parent side
    # toward the child, so positions go farthest-first
    positions: list[Point] = []
    for child, p in zip(base.edge_children(), bead_counts):
        start = terminals[child]
        end = terminals[base.parents[child]]
        for i in range(p):
            positions.append(lerp(start, end, (p - i) / (p + 1)))
    expanded_flows = compute_flows(expanded, instance.supplies)
    return build_solved_tree(instance, expanded, positions, expanded_flows)


def _parents_from_edges(n_sources: int, edges: Sequence[tuple[int, int]]) -> tuple[int, ...]:
    n_nodes = n_sources + 1
    adjacency: list[list[int]] = [[] for _ in range(n_nodes)]
    for u, v in edges:
        adjacency[u].append(v)
        adjacency[v].append(u)
    parents = [NO_PARENT] * n_nodes
    seen = [False] * n_nodes
    seen[n_sources] = True
    queue = [n_sources]
    head = 0
    while head < len(queue):
        node = queue[head]
        head += 1
        for nb in adjacency[node]:
            if not seen[nb]:
                seen[nb] = True
                parents[nb] = node
                queue.append(nb)
    return tuple(parents)


def steiner_count_bound(instance: Instance, c: float) -> int:
    """Upper bound B on the Steiner count of a node-weighted optimum.

    The optimum satisfies c*k <= U - Q/(n+k+1) with U the beaded spanning
    tree's node-weighted cost and Q the summed squared source-sink distances;
    clearing the denominator gives c*k^2 + (c*(n+1) - U)*k + (Q - (n+1)*U) <= 0
    and B is the floor of the larger root (k = 0 always satisfies the
    inequality because Q/(n+1) <= U, so the root is real and >= 0).
    """
    n = instance.n_sources
    upper = cost_node_weighted(beaded_spanning_tree(instance, c), c)
    q_total = sum(sq_dist(z, instance.sink) for z in instance.sources)
    b_lin = c * (n + 1) - upper
    b_const = q_total - (n + 1) * upper
    disc = b_lin * b_lin - 4.0 * c * b_const
    root = (-b_lin + math.sqrt(max(disc, 0.0))) / (2.0 * c)
    return max(0, math.floor(root + 1e-9))


__all__ = [
    "AngleViolation",
    "DegreeViolation",
    "EdgeOverlap",
    "SplitSpec",
    "apply_split",
    "beaded_spanning_tree",
    "centroid_deviations",
    "check_angles",
    "check_centroid_certificate",
    "check_degree_window",
    "check_overlapping_edges",
    "cost",
    "cost_node_weighted",
    "expand_beads",
    "lower_bound_path",
    "optimal_bead_count",
    "split_topology",
    "steiner_count_bound",
]
