"""
Provide reproducible random streams, and reference computations that check the main code paths by other routes.
"""
import hashlib
import math
from typing import Any, Callable, Optional, Sequence, Tuple, Union, List

import numpy as np

from avalanche.hyp2 import HPoint, to_klein

Label = Union[int, str]

# Euclidean tolerance for Klein disk coordinates.
KLEIN_TOLERANCE = 1e-12


def _label_key(label: Label) -> int:
    if isinstance(label, int):
        if label < 0:
            raise ValueError('Integer labels must be non-negative, but got %d.' % label)
        return label
    return int.from_bytes(hashlib.blake2b(label.encode('utf-8'), digest_size=4).digest(), 'big')


class SeedStream:
    """
    A seed derived from a root seed along a path of labels.

    Streams with equal root seeds and paths produce equal draws, and distinct paths produce independent draws.
    """

    def __init__(self, root_seed: int, path: Sequence[Label] = ()):
        root_seed = int(root_seed)
        if root_seed < 0:
            raise ValueError('Root seeds must be non-negative, but got %d.' % root_seed)
        self._root_seed = root_seed
        self._path = tuple(path)

    @property
    def root_seed(self) -> int:
        return self._root_seed

    @property
    def path(self) -> Tuple[Label, ...]:
        return self._path

    def child(self, label: Label) -> 'SeedStream':
        return SeedStream(self._root_seed, self._path + (label,))

    def sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=self._root_seed, spawn_key=tuple(_label_key(label) for label in self._path))

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self.sequence())

    def seed(self) -> int:
        """
        Condense the stream into a single 63-bit seed.
        """
        return int(self.sequence().generate_state(1, dtype=np.uint64)[0]) & (2 ** 63 - 1)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, SeedStream):
            return NotImplemented
        return (self._root_seed, self._path) == (other._root_seed, other._path)

    def __hash__(self) -> int:
        return hash((self._root_seed, self._path))

    def __repr__(self) -> str:
        return '<%s.%s(%d, %r)>' % (self.__class__.__module__, self.__class__.__name__, self._root_seed, self._path)


def oracle_tension(points: Sequence[Any], dist_fn: Callable[[Any, Any], float]) -> float:
    """
    Compute the tension of a chain term by term, with exactly rounded summation.
    """
    n = len(points) - 1
    if n < 1:
        raise ValueError('A chain needs at least two points, but got %d.' % len(points))
    if n < 2:
        return 0.0
    terms = [dist_fn(points[j - 1], points[j + 1]) for j in range(1, n)]
    terms += [-dist_fn(points[j - 1], points[j]) for j in range(2, n)]
    terms.append(-dist_fn(points[0], points[n]))
    return math.fsum(terms)


Vector = Tuple[float, float]


def _cross(o: Vector, a: Vector, b: Vector) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull(coordinates: Sequence[Vector]) -> List[int]:
    """
    Return the indices of the strict convex hull's vertices in counterclockwise order.
    """
    order = sorted(range(len(coordinates)), key=lambda index: coordinates[index])

    def half(indices: Sequence[int]) -> List[int]:
        stack: List[int] = []
        for index in indices:
            while len(stack) >= 2 and _cross(coordinates[stack[-2]], coordinates[stack[-1]], coordinates[index]) <= KLEIN_TOLERANCE:
                stack.pop()
            stack.append(index)
        return stack

    lower = half(order)
    upper = half(list(reversed(order)))
    return lower[:-1] + upper[:-1]


def _perimeter_parameter(point: Vector, hull: Sequence[Vector]) -> Optional[float]:
    """
    Locate a point on the hull's boundary as a hull vertex index plus the fraction of the following edge.
    """
    size = len(hull)
    for k in range(size):
        start = hull[k]
        end = hull[(k + 1) % size]
        edge = (end[0] - start[0], end[1] - start[1])
        length_squared = edge[0] ** 2 + edge[1] ** 2
        offset = (point[0] - start[0], point[1] - start[1])
        if math.hypot(*offset) <= KLEIN_TOLERANCE:
            return float(k)
        if abs(_cross(start, end, point)) > KLEIN_TOLERANCE:
            continue
        fraction = (offset[0] * edge[0] + offset[1] * edge[1]) / length_squared
        if 0 <= fraction < 1:
            return k + fraction
    return None


def oracle_convex_hull_klein(points: Sequence[HPoint]) -> bool:
    """
    Check that a closed polygon is convex by comparing it with the Euclidean convex hull of its Klein disk image.

    Geodesics are straight in the Klein disk, so the polygon is convex if and only if every vertex lies on the hull's
    boundary and the polygon runs around that boundary exactly once.
    """
    vertices = list(points)
    if len(vertices) > 1 and vertices[0] == vertices[-1]:
        vertices = vertices[:-1]
    if len(vertices) <= 3:
        return True
    center = vertices[len(vertices) // 2]
    coordinates = [to_klein(vertex, center) for vertex in vertices]
    hull = [coordinates[index] for index in _hull(coordinates)]
    if len(hull) < 3:
        return True
    parameters = []
    for coordinate in coordinates:
        parameter = _perimeter_parameter(coordinate, hull)
        if parameter is None:
            return False
        parameters.append(parameter)
    differences = [parameters[(i + 1) % len(parameters)] - parameters[i] for i in range(len(parameters))]
    ascents = sum(1 for difference in differences if difference > 0)
    descents = sum(1 for difference in differences if difference < 0)
    return descents <= 1 or ascents <= 1
