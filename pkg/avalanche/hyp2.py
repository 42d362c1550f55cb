"""
Provide the hyperbolic plane in the upper half-plane model.

Points are HPoint values, isometries are Mat2 values acting by fractional linear maps. Chains are laid out with frames:
2x2 numpy arrays F of determinant 1 such that F maps 𝐢 to a vertex and the upwards direction at 𝐢 to the heading at
that vertex.
"""
import math
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from avalanche.error import InvalidPoint, InvalidMatrix, DegenerateTriangle, InvalidSides, DegenerateGeodesic

# Below this Euclidean separation, distances use the logarithmic form, which does not cancel.
SMALL_SEPARATION = 1e-4
# Arguments of inverse trigonometric functions may stray this far outside their domains before they are rejected.
BOUNDARY_SLACK = 1e-12
DETERMINANT_TOLERANCE = 1e-6
VERTICAL_TOLERANCE = 1e-12


class HPoint:
    """
    A point of the upper half-plane.
    """

    __slots__ = ('_re', '_im')

    def __init__(self, re: float, im: float):
        re = float(re)
        im = float(im)
        if not (math.isfinite(re) and math.isfinite(im)):
            raise InvalidPoint('Point coordinates must be finite, but got (%r, %r).' % (re, im))
        if im <= 0:
            raise InvalidPoint('Points of the upper half-plane must have a strictly positive imaginary part, but got %r.' % im)
        self._re = re
        self._im = im

    @classmethod
    def from_complex(cls, z: complex) -> 'HPoint':
        return cls(z.real, z.imag)

    @property
    def re(self) -> float:
        return self._re

    @property
    def im(self) -> float:
        return self._im

    @property
    def z(self) -> complex:
        return complex(self._re, self._im)

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, HPoint):
            return NotImplemented
        return self._re == other._re and self._im == other._im

    def __hash__(self) -> int:
        return hash((self._re, self._im))

    def __repr__(self) -> str:
        return '<%s.%s(%r, %r)>' % (self.__class__.__module__, self.__class__.__name__, self._re, self._im)


BASE_POINT = HPoint(0.0, 1.0)


class Mat2:
    """
    A real 2x2 matrix of determinant 1.

    Matrices whose determinant is within DETERMINANT_TOLERANCE of 1 are rescaled to determinant 1.
    """

    __slots__ = ('_a', '_b', '_c', '_d')

    def __init__(self, a: float, b: float, c: float, d: float):
        entries = tuple(float(entry) for entry in (a, b, c, d))
        if not all(math.isfinite(entry) for entry in entries):
            raise InvalidMatrix('Matrix entries must be finite, but got %r.' % (entries,))
        a, b, c, d = entries
        det = a * d - b * c
        if det <= 0 or abs(det - 1) > DETERMINANT_TOLERANCE:
            raise InvalidMatrix('Matrices must have determinant 1, but %r has determinant %r.' % (entries, det))
        scale = 1 / math.sqrt(det)
        self._a = a * scale
        self._b = b * scale
        self._c = c * scale
        self._d = d * scale

    @classmethod
    def identity(cls) -> 'Mat2':
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def diagonal(cls, t: float) -> 'Mat2':
        """
        Build diag(t, 1/t), which acts as z ↦ t²z.
        """
        return cls(t, 0.0, 0.0, 1 / t)

    @classmethod
    def rotation(cls, psi: float) -> 'Mat2':
        """
        Build the rotation about 𝐢 that turns tangent vectors at 𝐢 counterclockwise by psi.
        """
        return cls.from_array(rotate(psi))

    @classmethod
    def from_array(cls, array: np.ndarray) -> 'Mat2':
        return cls(array[0, 0], array[0, 1], array[1, 0], array[1, 1])

    @property
    def entries(self) -> Tuple[float, float, float, float]:
        return self._a, self._b, self._c, self._d

    @property
    def trace(self) -> float:
        return self._a + self._d

    def as_array(self) -> np.ndarray:
        return np.array([[self._a, self._b], [self._c, self._d]])

    def inverse(self) -> 'Mat2':
        return Mat2(self._d, -self._b, -self._c, self._a)

    def __matmul__(self, other: 'Mat2') -> 'Mat2':
        if not isinstance(other, Mat2):
            return NotImplemented
        return Mat2(
            self._a * other._a + self._b * other._c,
            self._a * other._b + self._b * other._d,
            self._c * other._a + self._d * other._c,
            self._c * other._b + self._d * other._d,
        )

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Mat2):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def __repr__(self) -> str:
        return '<%s.%s(%r, %r, %r, %r)>' % (self.__class__.__module__, self.__class__.__name__, *self.entries)


class MetricSpace:
    """
    A metric space that chains can live in.
    """

    name: str = ''

    def dist(self, u: Any, v: Any) -> float:
        raise NotImplementedError

    def gromov(self, x: Any, y: Any, z: Any) -> float:
        """
        Return the Gromov product of x and y at z.
        """
        return (self.dist(x, z) + self.dist(z, y) - self.dist(x, y)) / 2

    def contains(self, point: Any) -> bool:
        raise NotImplementedError


class HyperbolicPlane(MetricSpace):
    name = 'H2'

    def dist(self, u: HPoint, v: HPoint) -> float:
        return dist(u, v)

    def contains(self, point: Any) -> bool:
        return isinstance(point, HPoint)

    def __repr__(self) -> str:
        return '<%s.%s()>' % (self.__class__.__module__, self.__class__.__name__)


def dist(p: HPoint, q: HPoint) -> float:
    separation = abs(p.z - q.z)
    if separation == 0:
        return 0.0
    root = math.sqrt(p.im) * math.sqrt(q.im)
    if separation < SMALL_SEPARATION:
        return max(0.0, 2 * math.log((separation + abs(p.z - q.z.conjugate())) / (2 * root)))
    # arccosh(1 + r²/2), written so that r² cannot overflow.
    return 2 * math.asinh(separation / root / 2)


H2 = HyperbolicPlane()


def gromov(x: Any, y: Any, z: Any, space: MetricSpace = H2) -> float:
    return space.gromov(x, y, z)


def _log_sinh(x: float) -> float:
    if x <= 0:
        return -math.inf
    return x + math.log(-math.expm1(-2 * x)) - math.log(2)


def angle_from_sides(a: float, b: float, c: float) -> float:
    """
    Return the angle between the sides of lengths a and b of a hyperbolic triangle whose third side has length c.
    """
    if a <= 0 or b <= 0:
        raise DegenerateTriangle('The sides enclosing an angle must have positive lengths, but got %r and %r.' % (a, b))
    if c < abs(a - b) - BOUNDARY_SLACK or c > a + b + BOUNDARY_SLACK:
        raise InvalidSides('Sides %r, %r, and %r violate the triangle inequality |a - b| <= c <= a + b.' % (a, b, c))
    c = min(max(c, abs(a - b)), a + b)
    # The logarithms of sin²(γ/2) and cos²(γ/2), both scaled by sinh(a)sinh(b).
    log_sine = _log_sinh((c + a - b) / 2) + _log_sinh((c - a + b) / 2)
    log_cosine = _log_sinh((a + b + c) / 2) + _log_sinh((a + b - c) / 2)
    if log_cosine == -math.inf:
        return math.pi
    if log_sine == -math.inf:
        return 0.0
    half = (log_sine - log_cosine) / 2
    if half > 0:
        return math.pi - 2 * math.atan(math.exp(-half))
    return 2 * math.atan(math.exp(half))


def lc_length(a: float, b: float, gamma: float) -> float:
    """
    Return the length of the side opposite the angle gamma between sides of lengths a and b.
    """
    half = math.sinh((a - b) / 2) ** 2 + math.sinh(a) * math.sinh(b) * math.sin(gamma / 2) ** 2
    return 2 * math.asinh(math.sqrt(max(0.0, half)))


def law_of_sines_ratios(a: float, b: float, c: float) -> Tuple[float, float, float]:
    """
    Return sin(angle) / sinh(opposite side) for each side of a triangle, which agree for any hyperbolic triangle.
    """
    return (
        math.sin(angle_from_sides(b, c, a)) / math.sinh(a),
        math.sin(angle_from_sides(a, c, b)) / math.sinh(b),
        math.sin(angle_from_sides(a, b, c)) / math.sinh(c),
    )


def saccheri_chord(leg: float, base: float) -> float:
    """
    Return the chord joining the summit vertices of a Saccheri quadrilateral with the given legs and base.
    """
    return 2 * math.asinh(math.cosh(leg) * math.sinh(base / 2))


def curve_step(ratio: float, phi: float) -> float:
    """
    Return the distance between e^{𝐢phi} and ratio·e^{𝐢phi}.

    Both points lie at distance arccosh(csc(phi)) from the imaginary axis, so the distance is a Saccheri chord.
    """
    return saccheri_chord(math.acosh(1 / math.sin(phi)), abs(math.log(ratio)))


def curve_ratio(step: float, phi: float) -> float:
    """
    Invert curve_step(): return the ratio t > 1 for which e^{𝐢phi} and t·e^{𝐢phi} are step apart.
    """
    return math.exp(2 * math.asinh(math.sin(phi) * math.sinh(step / 2)))


def mobius_apply(matrix: Mat2, z: HPoint) -> HPoint:
    a, b, c, d = matrix.entries
    denominator = c * z.z + d
    image = (a * z.z + b) / denominator
    return HPoint(image.real, z.im / abs(denominator) ** 2)


def reflect_across(p: HPoint, g1: HPoint, g2: HPoint) -> HPoint:
    """
    Reflect p across the complete geodesic through g1 and g2.
    """
    if g1 == g2:
        raise DegenerateGeodesic('A geodesic needs two distinct points, but got %r twice.' % g1)
    if abs(g1.re - g2.re) < VERTICAL_TOLERANCE:
        axis = (g1.re + g2.re) / 2
        return HPoint(2 * axis - p.re, p.im)
    center = (g1.re + g2.re) / 2 + (g2.im - g1.im) * (g2.im + g1.im) / (2 * (g2.re - g1.re))
    radius = math.hypot(g1.re - center, g1.im)
    image = center + radius * radius / (p.z - center).conjugate()
    return HPoint(image.real, image.imag)


def bearing(p: HPoint, q: HPoint) -> float:
    """
    Return the direction at p towards q, measured counterclockwise from straight up.
    """
    if p == q:
        raise DegenerateGeodesic('A heading needs two distinct points, but got %r twice.' % p)
    # The phase of (u - 𝐢)/(u + 𝐢) for the image u of q under the isometry z ↦ (z - Re(p)) / Im(p).
    across = q.re - p.re
    return math.remainder(math.atan2(q.im - p.im, across) - math.atan2(q.im + p.im, across), 2 * math.pi)


def angle_between(p: HPoint, q: HPoint, z: HPoint) -> float:
    """
    Return the angle at p from the direction towards q to the direction towards z, counterclockwise and in [-π, π].
    """
    return math.remainder(bearing(p, z) - bearing(p, q), 2 * math.pi)


def signed_offset(p: HPoint, q: HPoint, z: HPoint) -> float:
    """
    Return sinh of the signed distance from z to the geodesic through p and q, oriented from p to q.

    Points to the left of the oriented geodesic have positive offsets.
    """
    if p == q:
        raise DegenerateGeodesic('A geodesic needs two distinct points, but got %r twice.' % p)
    if z == p:
        return 0.0
    return math.sinh(dist(p, z)) * math.sin(angle_between(p, q, z))


def advance(step: float) -> np.ndarray:
    """
    Build the frame change that moves a distance step along the current heading.
    """
    return np.array([[math.exp(step / 2), 0.0], [0.0, math.exp(-step / 2)]])


def rotate(psi: float) -> np.ndarray:
    """
    Build the frame change that turns the current heading counterclockwise by psi.
    """
    return np.array([
        [math.cos(psi / 2), math.sin(psi / 2)],
        [-math.sin(psi / 2), math.cos(psi / 2)],
    ])


_HALF_TURN = np.array([[0.0, 1.0], [-1.0, 0.0]])
_HALF_TURN_INVERSE = np.array([[0.0, -1.0], [1.0, 0.0]])
_E1 = np.array([1.0, 0.0])


def _inverse(frame: np.ndarray) -> np.ndarray:
    return np.array([[frame[1, 1], -frame[0, 1]], [-frame[1, 0], frame[0, 0]]])


def walk(
    steps: Sequence[float],
    turns: Sequence[np.ndarray],
    pivot: Optional[int] = None,
    start: Optional[np.ndarray] = None,
) -> List[np.ndarray]:
    """
    Lay out a chain as frames, starting from the start frame (the identity by default) at the pivot vertex.

    steps[j] is the length from vertex j to vertex j + 1, and turns[j - 1] is the frame change applied when leaving
    vertex j. Frame products grow like e^{L/2} over a length L, so long chains should use lay_out() instead.
    """
    n, pivot = _check_walk(steps, turns, pivot)
    if start is None:
        start = np.eye(2)
    dtype = np.result_type(start, *turns)
    start = start.astype(dtype)
    frames: List[np.ndarray] = [start] * (n + 1)

    frame = start
    for j in range(pivot, n):
        if j > pivot:
            frame = frame @ turns[j - 1]
        frame = frame @ advance(steps[j])
        frames[j + 1] = frame

    if pivot > 0:
        frame = start @ _backwards(turns, pivot, n)
        for j in range(pivot, 0, -1):
            if j < pivot:
                frame = frame @ _HALF_TURN_INVERSE @ _inverse(turns[j - 1]) @ _HALF_TURN
            frame = frame @ advance(steps[j - 1])
            frames[j - 1] = frame
    return frames


def _check_walk(steps: Sequence[float], turns: Sequence[np.ndarray], pivot: Optional[int]) -> Tuple[int, int]:
    n = len(steps)
    if len(turns) != max(n - 1, 0):
        raise ValueError('A chain with %d steps needs %d turns, but got %d.' % (n, max(n - 1, 0), len(turns)))
    if pivot is None:
        pivot = n // 2
    if not 0 <= pivot <= n:
        raise ValueError('The pivot must be a vertex between 0 and %d, but got %d.' % (n, pivot))
    return n, pivot


def _backwards(turns: Sequence[np.ndarray], pivot: int, n: int) -> np.ndarray:
    """
    Return the frame change that turns the pivot's frame around to face vertex pivot - 1.
    """
    if pivot < n:
        return _inverse(turns[pivot - 1]) @ _HALF_TURN
    return _HALF_TURN


def _unit(vector: np.ndarray) -> np.ndarray:
    return vector / np.linalg.norm(vector)


def _tail(steps: Sequence[float], turns: Sequence[np.ndarray]) -> np.ndarray:
    """
    Return the boundary point a walk runs into when it is continued straight past its last vertex.

    The point is a unit vector in the coordinates of the walk's first frame, with (1, 0) standing for ∞.
    """
    tail = _E1
    for k in range(len(steps) - 1, -1, -1):
        tail = advance(steps[k]) @ tail
        if k > 0:
            tail = turns[k - 1] @ tail
        tail = _unit(tail)
    return tail


def _aim(direction: np.ndarray) -> np.ndarray:
    """
    Return a rotation about 𝐢 that sends the boundary point with the given unit vector to ∞.
    """
    u0, u1 = direction
    return np.array([[np.conj(u0), np.conj(u1)], [-u1, u0]])


def _rotation_part(frame: np.ndarray) -> np.ndarray:
    """
    Return the rotation K such that frame = P·K for an upper triangular P with positive diagonal.
    """
    row = _unit(frame[1])
    return np.array([[np.conj(row[1]), -np.conj(row[0])], [row[0], row[1]]])


def _carry(matrix: np.ndarray, w: complex, h: float) -> Tuple[complex, float]:
    """
    Apply an isometry to the point with horizontal coordinate w and height h, without overflowing.

    Real matrices act on the upper half-plane and complex ones on upper half-space.
    """
    a, b = complex(matrix[0, 0]), complex(matrix[0, 1])
    c, d = complex(matrix[1, 0]), complex(matrix[1, 1])
    e = c * w + d
    f = c * h
    scale = max(abs(e), abs(f))
    e, f = e / scale, f / scale
    norm = abs(e) ** 2 + abs(f) ** 2
    image = ((a * w + b) / scale * e.conjugate() + a * f.conjugate() * (h / scale)) / norm
    return image, h / scale / scale / norm


class _Stepper:
    """
    Follow a walk as an upper triangular part, kept as a point, and a rotation, renormalized after every step.
    """

    def __init__(self, frame: np.ndarray):
        self.w, self.h = _carry(frame, 0j, 1.0)
        self.rotation = _rotation_part(frame)

    def turn(self, change: np.ndarray) -> None:
        self.rotation = self.rotation @ change

    def advance(self, step: float) -> Tuple[complex, float]:
        return self.move(advance(step))

    def move(self, change: np.ndarray) -> Tuple[complex, float]:
        moved = self.rotation @ change
        w, h = _carry(moved, 0j, 1.0)
        self.rotation = _rotation_part(moved)
        self.w, self.h = self.w + self.h * w, self.h * h
        return self.w, self.h


def lay_out(
    steps: Sequence[float],
    turns: Sequence[np.ndarray],
    pivot: Optional[int] = None,
) -> List[Tuple[complex, float]]:
    """
    Lay out the vertices of the walk() with the same steps and turns, up to an isometry, as (horizontal, height) pairs.

    The chain is placed so that its part after the pivot runs up towards ∞ and its part before the pivot runs down
    towards 0. Each part is then followed upwards in its own chart, where every vertex keeps its relative precision
    however far it lies from 𝐢.
    """
    n, pivot = _check_walk(steps, turns, pivot)
    real = not any(np.iscomplexobj(turn) for turn in turns)
    backward_steps = list(reversed(steps[:pivot]))
    backward_turns = [_HALF_TURN_INVERSE @ _inverse(turns[j - 1]) @ _HALF_TURN for j in range(pivot - 1, 0, -1)]
    back = _backwards(turns, pivot, n) if pivot > 0 else _HALF_TURN

    ahead = _tail(steps[pivot:], turns[pivot:])
    behind = back @ _tail(backward_steps, backward_turns)
    determinant = ahead[0] * behind[1] - ahead[1] * behind[0]
    if real and determinant < 0:
        behind, determinant = -behind, -determinant
    if abs(determinant) >= DETERMINANT_TOLERANCE:
        placement = np.array([[behind[1], -behind[0]], [-ahead[1], ahead[0]]]) / np.sqrt(determinant)
        w, h = _carry(placement, 0j, 1.0)
        scale = math.sqrt(math.hypot(abs(w), h))
        placement = np.diag([1 / scale, scale]) @ placement
        chart = _HALF_TURN_INVERSE
    else:
        # Both parts run towards the same boundary point, so the part before the pivot gets a chart of its own.
        placement = _aim(ahead)
        chart = _aim(_unit(placement @ behind))
    if real:
        placement, chart = placement.real, chart.real

    stepper = _Stepper(placement)
    points: List[Tuple[complex, float]] = [(stepper.w, stepper.h)]
    for k, step in enumerate(steps[pivot:]):
        if k > 0:
            stepper.turn(turns[pivot + k - 1])
        points.append(stepper.advance(step))

    stepper = _Stepper(chart @ placement @ back)
    homeward = _inverse(chart)
    for k, step in enumerate(backward_steps):
        if k > 0:
            stepper.turn(backward_turns[k - 1])
        points.insert(0, _carry(homeward, *stepper.advance(step)))
    return points


def orbit_points(changes: Sequence[np.ndarray]) -> List[HPoint]:
    """
    Return 𝐢 and its images under the partial products M1, M1 M2, ..., M1 M2 ⋯ Mk of real matrices.

    The products are never formed, so the points keep their relative precision however long the products grow.
    """
    stepper = _Stepper(np.eye(2))
    points = [BASE_POINT]
    for change in changes:
        w, h = stepper.move(change)
        points.append(HPoint(w.real, h))
    return points


def frame_point(frame: np.ndarray) -> HPoint:
    """
    Return the image of 𝐢 under a real frame.
    """
    a, b = float(frame[0, 0]), float(frame[0, 1])
    c, d = float(frame[1, 0]), float(frame[1, 1])
    norm = c * c + d * d
    return HPoint((a * c + b * d) / norm, 1 / norm)


def heading_frame(p: HPoint, q: HPoint) -> np.ndarray:
    """
    Return the frame at p whose heading points towards q.
    """
    return frame_to(p).as_array() @ rotate(bearing(p, q))


def frame_to(p: HPoint) -> Mat2:
    """
    Return the isometry z ↦ Re(p) + Im(p)·z, which maps 𝐢 to p without rotating.
    """
    root = math.sqrt(p.im)
    return Mat2(root, p.re / root, 0.0, 1 / root)


def from_disk(w: complex) -> HPoint:
    """
    Map a point of the Poincaré disk to the upper half-plane, sending the disk's center to 𝐢.
    """
    image = 1j * (1 + w) / (1 - w)
    return HPoint(image.real, image.imag)


def to_klein(z: HPoint, center: HPoint = BASE_POINT) -> Tuple[float, float]:
    """
    Return Klein disk coordinates of z, in the chart whose center is the given point.
    """
    moved = complex((z.re - center.re) / center.im, z.im / center.im)
    w = (moved - 1j) / (moved + 1j)
    scale = 2 / (1 + abs(w) ** 2)
    return w.real * scale, w.imag * scale
