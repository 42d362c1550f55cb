"""
Provide CAT(-1) spaces other than the hyperbolic plane, and compare their chains with chains in the plane.
"""
import math
from collections import deque
from enum import Enum
from typing import Any, Dict, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from avalanche.chains import Chain, GoodPair, tension, trace, vertex_angles, draw_chain_data, sample_good_chain
from avalanche.error import InvalidPoint, InvalidSides, DegenerateTriple, UnknownNode, InvalidTree
from avalanche.hyp2 import SMALL_SEPARATION, MetricSpace, HPoint, H2, lay_out, angle_from_sides, rotate, \
    advance, angle_between, heading_frame, frame_point, reflect_across
from avalanche.oracle import SeedStream

# Collinear vertices of trees may be off by this much.
TREE_SLACK = 1e-12


class H3Point:
    """
    A point (x, y, z) of the upper half-space.
    """

    __slots__ = ('_x', '_y', '_z')

    def __init__(self, x: float, y: float, z: float):
        x, y, z = float(x), float(y), float(z)
        if not all(math.isfinite(coordinate) for coordinate in (x, y, z)):
            raise InvalidPoint('Point coordinates must be finite, but got (%r, %r, %r).' % (x, y, z))
        if z <= 0:
            raise InvalidPoint('Points of the upper half-space must have a strictly positive height, but got %r.' % z)
        self._x = x
        self._y = y
        self._z = z

    @property
    def x(self) -> float:
        return self._x

    @property
    def y(self) -> float:
        return self._y

    @property
    def z(self) -> float:
        return self._z

    @property
    def w(self) -> complex:
        """
        The horizontal coordinates as a complex number.
        """
        return complex(self._x, self._y)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, H3Point):
            return NotImplemented
        return (self._x, self._y, self._z) == (other._x, other._y, other._z)

    def __hash__(self) -> int:
        return hash((self._x, self._y, self._z))

    def __repr__(self) -> str:
        return '<%s.%s(%r, %r, %r)>' % (self.__class__.__module__, self.__class__.__name__, self._x, self._y, self._z)


def h3_dist(p: H3Point, q: H3Point) -> float:
    horizontal = abs(p.w - q.w)
    separation = math.hypot(horizontal, p.z - q.z)
    if separation == 0:
        return 0.0
    root = math.sqrt(p.z) * math.sqrt(q.z)
    if separation < SMALL_SEPARATION:
        return max(0.0, 2 * math.log((separation + math.hypot(horizontal, p.z + q.z)) / (2 * root)))
    return 2 * math.asinh(separation / root / 2)


class UpperHalfSpace(MetricSpace):
    name = 'H3'

    def dist(self, u: H3Point, v: H3Point) -> float:
        return h3_dist(u, v)

    def contains(self, point: Any) -> bool:
        return isinstance(point, H3Point)

    def __repr__(self) -> str:
        return '<%s.%s()>' % (self.__class__.__module__, self.__class__.__name__)


H3 = UpperHalfSpace()


def h3_frame_point(frame: np.ndarray) -> H3Point:
    """
    Return the image of (0, 0, 1) under a complex frame.
    """
    a, b, c, d = (complex(entry) for entry in frame.ravel())
    norm = abs(c) ** 2 + abs(d) ** 2
    w = (a * c.conjugate() + b * d.conjugate()) / norm
    return H3Point(w.real, w.imag, 1 / norm)


def spin(beta: float) -> np.ndarray:
    """
    Build the rotation about the vertical axis through (0, 0, 1) by beta.
    """
    return np.array([[complex(math.cos(beta / 2), math.sin(beta / 2)), 0], [0, complex(math.cos(beta / 2), -math.sin(beta / 2))]])


def turn(psi: float, beta: float) -> np.ndarray:
    """
    Build the frame change that turns the heading by psi, towards the direction at azimuth beta.

    Azimuth 0 turns left within the vertical plane y = 0, and azimuth π turns right within it.
    """
    return spin(beta) @ rotate(psi).astype(complex) @ spin(-beta)


def trace_h3(steps: Sequence[float], angles: Sequence[float], azimuths: Sequence[float]) -> Chain:
    """
    Build the chain in the upper half-space with the given step lengths, interior angles, and turn azimuths.
    """
    turns = [turn(math.pi - angle, beta) for angle, beta in zip(angles, azimuths)]
    return Chain([H3Point(w.real, w.imag, h) for w, h in lay_out(steps, turns)], H3)


Node = Hashable


def _path(adjacency: Dict[Any, Dict[Any, float]], u: Any, v: Any) -> List[Any]:
    parents: Dict[Any, Optional[Any]] = {v: None}
    queue = deque([v])
    while queue:
        node = queue.popleft()
        for neighbor in adjacency[node]:
            if neighbor not in parents:
                parents[neighbor] = node
                queue.append(neighbor)
    path = [u]
    while path[-1] != v:
        parent = parents[path[-1]]
        assert parent is not None
        path.append(parent)
    return path


class MetricTree(MetricSpace):
    """
    A finite tree with positive edge lengths, measuring distances along its unique paths.
    """

    name = 'tree'

    def __init__(self, nodes: Iterable[Node], edges: Iterable[Tuple[Node, Node, float]]):
        self._nodes = tuple(nodes)
        self._edges = tuple((u, v, float(length)) for u, v, length in edges)
        if len(set(self._nodes)) != len(self._nodes):
            raise InvalidTree('Tree nodes must be unique.')
        if not self._nodes:
            raise InvalidTree('A tree needs at least one node.')
        self._adjacency: Dict[Node, Dict[Node, float]] = {node: {} for node in self._nodes}
        for u, v, length in self._edges:
            for node in (u, v):
                if node not in self._adjacency:
                    raise InvalidTree('Edge (%r, %r) ends in unknown node %r.' % (u, v, node))
            if not (math.isfinite(length) and length > 0):
                raise InvalidTree('Edge (%r, %r) must have a positive length, but has %r.' % (u, v, length))
            if u == v or v in self._adjacency[u]:
                raise InvalidTree('Edge (%r, %r) is a loop or a duplicate.' % (u, v))
            self._adjacency[u][v] = length
            self._adjacency[v][u] = length
        if len(self._edges) != len(self._nodes) - 1:
            raise InvalidTree('A tree with %d nodes has %d edges, but got %d.' % (len(self._nodes), len(self._nodes) - 1, len(self._edges)))
        if len(self._distances_from(self._nodes[0])) != len(self._nodes):
            raise InvalidTree('Trees must be connected.')
        self._distances: Dict[Node, Dict[Node, float]] = {}

    @property
    def nodes(self) -> Tuple[Node, ...]:
        return self._nodes

    @property
    def edges(self) -> Tuple[Tuple[Node, Node, float], ...]:
        return self._edges

    def _distances_from(self, source: Node) -> Dict[Node, float]:
        distances = {source: 0.0}
        queue = deque([source])
        while queue:
            node = queue.popleft()
            for neighbor, length in self._adjacency[node].items():
                if neighbor not in distances:
                    distances[neighbor] = distances[node] + length
                    queue.append(neighbor)
        return distances

    def _assert_node(self, node: Node) -> None:
        if node not in self._adjacency:
            raise UnknownNode('%r is not a node of this tree.' % (node,))

    def dist(self, u: Node, v: Node) -> float:
        self._assert_node(u)
        self._assert_node(v)
        if u not in self._distances:
            self._distances[u] = self._distances_from(u)
        return self._distances[u][v]

    def path(self, u: Node, v: Node) -> List[Node]:
        """
        Return the nodes on the path from u to v, both included.
        """
        self._assert_node(u)
        self._assert_node(v)
        return _path(self._adjacency, u, v)

    def contains(self, point: Any) -> bool:
        try:
            return point in self._adjacency
        except TypeError:
            return False

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, MetricTree):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __repr__(self) -> str:
        return '<%s.%s(%d nodes)>' % (self.__class__.__module__, self.__class__.__name__, len(self._nodes))


def tree_dist(tree: MetricTree, u: Node, v: Node) -> float:
    return tree.dist(u, v)


def four_point_holds(tree: MetricTree, u: Node, v: Node, w: Node, x: Node) -> bool:
    """
    Check d(u, v) + d(w, x) <= max(d(u, w) + d(v, x), d(u, x) + d(v, w)).
    """
    return tree.dist(u, v) + tree.dist(w, x) <= max(
        tree.dist(u, w) + tree.dist(v, x),
        tree.dist(u, x) + tree.dist(v, w),
    ) + TREE_SLACK


class _TreeBuilder:
    def __init__(self, root: str):
        self._nodes = [root]
        self._adjacency: Dict[str, Dict[str, float]] = {root: {}}
        self._branches = 0

    def attach(self, parent: str, child: str, length: float) -> None:
        self._nodes.append(child)
        self._adjacency[child] = {parent: length}
        self._adjacency[parent][child] = length

    def point_towards(self, u: str, v: str, distance: float) -> str:
        """
        Return the node at the given distance from u on the path towards v, subdividing an edge if needed.
        """
        path = _path(self._adjacency, u, v)
        for start, end in zip(path, path[1:]):
            length = self._adjacency[start][end]
            if distance <= TREE_SLACK:
                return start
            if distance >= length - TREE_SLACK:
                distance -= length
                continue
            self._branches += 1
            branch = 'b%d' % self._branches
            del self._adjacency[start][end]
            del self._adjacency[end][start]
            self._nodes.append(branch)
            self._adjacency[branch] = {start: distance, end: length - distance}
            self._adjacency[start][branch] = distance
            self._adjacency[end][branch] = length - distance
            return branch
        return path[-1]

    def build(self) -> MetricTree:
        edges = []
        seen = set()
        for node in self._nodes:
            for neighbor, length in self._adjacency[node].items():
                if neighbor not in seen:
                    edges.append((node, neighbor, length))
            seen.add(node)
        return MetricTree(self._nodes, edges)


def tree_chain(steps: Sequence[float], gromovs: Sequence[float]) -> Chain:
    """
    Grow a tree along a chain with the given step lengths and interior Gromov products.

    Each xj+1 branches off the path from xj back to xj-1 at distance gj from xj.
    """
    builder = _TreeBuilder('x0')
    builder.attach('x0', 'x1', steps[0])
    for j in range(1, len(steps)):
        fork = builder.point_towards('x%d' % j, 'x%d' % (j - 1), gromovs[j - 1])
        builder.attach(fork, 'x%d' % (j + 1), steps[j] - gromovs[j - 1])
    tree = builder.build()
    return Chain(['x%d' % j for j in range(len(steps) + 1)], tree)


class Backend(Enum):
    H2 = 'h2'
    H3 = 'h3'
    TREE = 'tree'


def sample_good_chain_in(backend: Backend, pair: GoodPair, n: int, seed: Union[int, SeedStream]) -> Chain:
    """
    Draw a random good chain with n steps in a CAT(-1) space.

    Chains in the hyperbolic plane turn to random sides, chains in the upper half-space turn towards random azimuths,
    and chains in trees come with a tree grown for them.
    """
    if n < 2:
        raise ValueError('Sampled chains need at least two steps, but got %d.' % n)
    stream = seed if isinstance(seed, SeedStream) else SeedStream(seed)
    if backend is Backend.H2:
        return sample_good_chain(pair, n, stream, convex=False)
    rng = stream.generator()
    steps, gromovs, _ = draw_chain_data(rng, pair, n)
    if backend is Backend.TREE:
        return tree_chain(steps, gromovs)
    azimuths = [float(beta) for beta in rng.uniform(0.0, 2 * math.pi, size=n - 1)]
    angles = [
        angle_from_sides(steps[j], steps[j + 1], steps[j] + steps[j + 1] - 2 * gromovs[j])
        for j in range(n - 1)
    ]
    return trace_h3(steps, angles, azimuths)


class ComparisonChain(NamedTuple):
    source: Chain
    image: Chain


def comparison_chain(chain: Chain) -> ComparisonChain:
    """
    Build the convex chain in the hyperbolic plane with the same steps and the same consecutive triples.
    """
    if chain.n < 2:
        raise DegenerateTriple('Comparison chains need at least two steps, but got %d.' % chain.n)
    try:
        angles = vertex_angles(chain)
    except InvalidSides as error:
        raise DegenerateTriple('A consecutive triple violates the triangle inequality: %s' % error) from error
    return ComparisonChain(chain, trace(chain.steps, angles))


class ComparisonReport(NamedTuple):
    source_tension: float
    image_tension: float
    ok: bool
    source_span: float
    image_span: float
    span_ok: bool


def verify_cat_comparison(chain: Chain) -> ComparisonReport:
    """
    Compare a chain's tension with that of its comparison chain, whose tension bounds it in absolute value.

    The report also holds the distances between the end points of both chains.
    """
    image = comparison_chain(chain).image
    source_tension = tension(chain)
    image_tension = tension(image)
    source_span = chain.dist(0, chain.n)
    image_span = image.dist(0, image.n)
    return ComparisonReport(
        source_tension,
        image_tension,
        abs(source_tension) <= image_tension + 1e-9 * chain.n,
        source_span,
        image_span,
        source_span >= image_span - 1e-9,
    )


def reflected_end(chain: Chain, gamma: float) -> Tuple[HPoint, HPoint]:
    """
    Move x3 of a chain x0, x1, x2, x3 so that the angle at x1 between x2 and x3 is gamma, keeping d(x1, x3) and
    keeping x3 on the side of x0. Return the moved point and its reflection across the geodesic through x1 and x2.
    """
    if chain.n != 3 or chain.space is not H2:
        raise ValueError('Reflections need a chain of four points in the hyperbolic plane.')
    x0, x1, x2, _ = chain.points
    side = 1 if angle_between(x1, x2, x0) >= 0 else -1
    moved = frame_point(heading_frame(x1, x2) @ rotate(side * gamma) @ advance(chain.dist(1, 3)))
    return moved, reflect_across(moved, x1, x2)


def reflection_tension_sum(chain: Chain, gamma: float) -> float:
    """
    Return τ(x0, x1, x2, x3(gamma)) + τ(x0, x1, x2, y3(gamma)), with x3(gamma) and its reflection y3(gamma) as
    reflected_end() builds them.
    """
    moved, reflected = reflected_end(chain, gamma)
    x0, x1, x2, _ = chain.points
    return tension(Chain([x0, x1, x2, moved])) + tension(Chain([x0, x1, x2, reflected]))
