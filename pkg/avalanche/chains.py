"""
Provide chains of points and their tension, the good pairs that bound them, and the chain families the Avalanche
Principle is proven with.
"""
import math
from typing import Any, Iterator, List, Optional, Sequence, Tuple, Union, TYPE_CHECKING

import numpy as np

from avalanche.error import DegenerateChain, NotGood, StepTooShort, AngleOutOfRange, VertexOutOfRange, \
    NotConvexInput, PreconditionFailed, InvalidPoint
from avalanche.hyp2 import H2, HPoint, MetricSpace, HyperbolicPlane, angle_from_sides, curve_ratio, \
    angle_between, rotate, lay_out, from_disk

if TYPE_CHECKING:
    from avalanche.oracle import SeedStream

SLACK = 1e-12
# Vertices seen within this many radians of a geodesic count as lying on it.
COLLINEAR = 1e-9


class Chain:
    """
    An ordered list of points x0, ..., xn in a metric space.
    """

    def __init__(self, points: Sequence[Any], space: MetricSpace = H2):
        if len(points) < 2:
            raise DegenerateChain('A chain needs at least two points, but got %d.' % len(points))
        for index, point in enumerate(points):
            if not space.contains(point):
                raise InvalidPoint('Point x%d (%r) does not belong to %s.' % (index, point, space.name))
        self._points = tuple(points)
        self._space = space
        self._steps = tuple(space.dist(points[j], points[j + 1]) for j in range(len(points) - 1))
        for j, step in enumerate(self._steps):
            if step <= 0:
                raise DegenerateChain('Consecutive points x%d and x%d coincide.' % (j, j + 1))
        self._gromovs = tuple(
            space.gromov(points[j - 1], points[j + 1], points[j])
            for j in range(1, len(points) - 1)
        )

    @property
    def points(self) -> Tuple[Any, ...]:
        return self._points

    @property
    def space(self) -> MetricSpace:
        return self._space

    @property
    def n(self) -> int:
        """
        The number of steps.
        """
        return len(self._points) - 1

    @property
    def steps(self) -> Tuple[float, ...]:
        """
        The step lengths d(xj, xj+1), for 0 <= j < n.
        """
        return self._steps

    @property
    def gromovs(self) -> Tuple[float, ...]:
        """
        The Gromov products (xj-1|xj+1) at xj for the interior vertices 1 <= j < n, in that order.
        """
        return self._gromovs

    def dist(self, i: int, j: int) -> float:
        return self._space.dist(self._points[i], self._points[j])

    def __len__(self) -> int:
        return len(self._points)

    def __iter__(self) -> Iterator[Any]:
        return iter(self._points)

    def __getitem__(self, index: int) -> Any:
        return self._points[index]

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return self._points == other._points and self._space == other._space

    def __repr__(self) -> str:
        return '<%s.%s(n=%d, space=%s)>' % (self.__class__.__module__, self.__class__.__name__, self.n, self._space.name)


class GoodPair:
    """
    A step lower bound a and a Gromov product upper bound b with sinh(a - b) > 2 sinh(a/2).

    The pair determines the translation number λ and the curvature angle φ of its canonical chain.
    """

    def __init__(self, a: float, b: float):
        a = float(a)
        b = float(b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise NotGood('A good pair must be finite, but got (%r, %r).' % (a, b))
        if a < 0 or b < 0:
            raise NotGood('A good pair must be non-negative, but got (%r, %r).' % (a, b))
        lhs = math.sinh(a - b)
        rhs = 2 * math.sinh(a / 2)
        if not lhs > rhs:
            raise NotGood('(%r, %r) is not a good pair: it must satisfy sinh(a - b) > 2 sinh(a/2), but %r <= %r.' % (a, b, lhs, rhs))
        self._a = a
        self._b = b
        self._stable_length = 2 * math.acosh(lhs / rhs)
        self._translation = math.exp(self._stable_length)
        self._curvature_angle = math.asin(min(1.0, math.sinh(self._stable_length / 2) / math.sinh(a / 2)))

    @classmethod
    def from_translation(cls, translation: float, curvature_angle: float) -> 'GoodPair':
        """
        Recover the pair whose canonical chain has the given translation number and curvature angle.
        """
        if not translation > 1:
            raise NotGood('The translation number must exceed 1, but got %r.' % translation)
        if not 0 < curvature_angle <= math.pi / 2:
            raise NotGood('The curvature angle must lie in (0, π/2], but got %r.' % curvature_angle)
        half = math.log(translation) / 2
        a = 2 * math.asinh(math.sinh(half) / math.sin(curvature_angle))
        b = a - math.asinh(2 * math.sinh(a / 2) * math.cosh(half))
        return cls(a, max(0.0, b))

    @classmethod
    def from_step(cls, a: float, curvature_angle: float) -> 'GoodPair':
        """
        Return the pair with step bound a and the given curvature angle.
        """
        if not 0 < curvature_angle <= math.pi / 2:
            raise NotGood('The curvature angle must lie in (0, π/2], but got %r.' % curvature_angle)
        half = math.asinh(math.sin(curvature_angle) * math.sinh(a / 2))
        return cls(a, max(0.0, a - math.asinh(2 * math.sinh(a / 2) * math.cosh(half))))

    @property
    def a(self) -> float:
        return self._a

    @property
    def b(self) -> float:
        return self._b

    @property
    def translation(self) -> float:
        """
        The translation number λ, with cosh(log(λ)/2) = sinh(a - b) / (2 sinh(a/2)).
        """
        return self._translation

    @property
    def curvature_angle(self) -> float:
        """
        The curvature angle φ, with sin(φ) sinh(a/2) = sinh(log(λ)/2).
        """
        return self._curvature_angle

    @property
    def stable_length(self) -> float:
        return self._stable_length

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, GoodPair):
            return NotImplemented
        return (self._a, self._b) == (other._a, other._b)

    def __hash__(self) -> int:
        return hash((self._a, self._b))

    def __repr__(self) -> str:
        return '<%s.%s(%r, %r)>' % (self.__class__.__module__, self.__class__.__name__, self._a, self._b)


def good_pair(a: float, b: float) -> GoodPair:
    return GoodPair(a, b)


def tension(chain: Chain) -> float:
    n = chain.n
    if n < 2:
        return 0.0
    skips = sum(chain.dist(j - 1, j + 1) for j in range(1, n))
    return skips - sum(chain.steps[1:n - 1]) - chain.dist(0, n)


def is_good_chain(chain: Chain, pair: GoodPair) -> bool:
    return all(step >= pair.a - SLACK for step in chain.steps) and all(g <= pair.b + SLACK for g in chain.gromovs)


def _require_plane(chain: Chain) -> None:
    if not isinstance(chain.space, HyperbolicPlane):
        raise ValueError('This operation needs a chain in the hyperbolic plane, but got one in %s.' % chain.space.name)


def _sign(value: float) -> int:
    if abs(value) <= COLLINEAR:
        return 0
    return 1 if value > 0 else -1


def _side(p: HPoint, q: HPoint, z: HPoint) -> int:
    """
    Return +1 if z lies to the left of the geodesic from p to q, -1 if it lies to the right, and 0 if it lies on it.
    """
    return _sign(math.sin(angle_between(p, q, z)))


def is_convex(chain: Chain) -> bool:
    """
    Check if the closed polygon x0, x1, ..., xn, x0 is convex.

    Every side of a convex polygon has all other vertices on one and the same side of its geodesic. Collinear vertices
    are allowed. Sides are judged by the angle they make at their first vertex with the direction towards the other
    vertex, which stays accurate however far apart the vertices are.
    """
    _require_plane(chain)
    points = chain.points
    size = len(points)
    side = 0
    for i in range(size):
        p = points[i]
        q = points[(i + 1) % size]
        if p == q:
            continue
        for z in points:
            if z == p or z == q:
                continue
            sign = _side(p, q, z)
            if sign == 0:
                continue
            if side == 0:
                side = sign
            elif sign != side:
                return False
    return True


def vertex_angles(chain: Chain) -> List[float]:
    """
    Return the comparison angles at the interior vertices x1, ..., xn-1.
    """
    return [
        angle_from_sides(chain.steps[j - 1], chain.steps[j], chain.dist(j - 1, j + 1))
        for j in range(1, chain.n)
    ]


def turn_signs(chain: Chain) -> List[int]:
    """
    Return +1 for every interior vertex at which the chain turns left, -1 for right turns, and 0 for straight vertices.
    """
    _require_plane(chain)
    points = chain.points
    return [_side(points[j - 1], points[j], points[j + 1]) for j in range(1, chain.n)]


def trace(
    steps: Sequence[float],
    angles: Sequence[float],
    sides: Optional[Sequence[int]] = None,
    pivot: Optional[int] = None,
) -> Chain:
    """
    Build the chain in the hyperbolic plane with the given step lengths and interior angles.

    sides holds +1 for vertices turning left and -1 for vertices turning right, and defaults to turning left throughout.
    """
    if len(angles) != max(len(steps) - 1, 0):
        raise ValueError('A chain with %d steps needs %d angles, but got %d.' % (len(steps), max(len(steps) - 1, 0), len(angles)))
    if sides is None:
        sides = [1] * len(angles)
    turns = [rotate(side * (math.pi - angle)) for angle, side in zip(angles, sides)]
    return Chain([HPoint(w.real, h) for w, h in lay_out(steps, turns, pivot)])


def open_angle(chain: Chain, k: int, gamma: float) -> Chain:
    """
    Open the angle at vertex k of a convex chain to gamma, keeping all steps and other angles.
    """
    n = chain.n
    if not 1 <= k <= n - 1:
        raise VertexOutOfRange('Only interior vertices 1 through %d can be opened, but got %d.' % (n - 1, k))
    angles = vertex_angles(chain)
    current = angles[k - 1]
    if not current - SLACK <= gamma <= math.pi + SLACK:
        raise AngleOutOfRange('The angle at x%d can only be opened from %r up to π, but got %r.' % (k, current, gamma))
    if not is_convex(chain):
        raise NotConvexInput('Only convex chains can have their angles opened.')
    signs = [sign for sign in turn_signs(chain) if sign]
    side = signs[0] if signs else 1
    angles[k - 1] = min(max(gamma, current), math.pi)
    return trace(chain.steps, angles, [side] * len(angles))


def canonical_chain(pair: GoodPair, n: int) -> Chain:
    """
    Build the chain xj = λ^j e^{𝐢φ}, for 0 <= j <= n.
    """
    if n < 1:
        raise ValueError('A chain needs at least one step, but got %d.' % n)
    return curve_chain([pair.translation] * n, pair.curvature_angle)


def curve_chain(lambdas: Sequence[float], alpha: float) -> Chain:
    """
    Build the chain x0 = e^{𝐢alpha}, xj = λ1⋯λj·x0 on a curve of constant geodesic curvature cos(alpha).
    """
    if not 0 < alpha <= math.pi / 2:
        raise ValueError('The curve angle must lie in (0, π/2], but got %r.' % alpha)
    logs = np.concatenate(([0.0], np.cumsum(np.log(np.asarray(lambdas, dtype=float)))))
    return Chain([HPoint(math.exp(log) * math.cos(alpha), math.exp(log) * math.sin(alpha)) for log in logs])


def distorted_chain(steps: Sequence[float], pair: GoodPair) -> Chain:
    """
    Build the chain with the given step lengths on the curve of constant geodesic curvature cos(φ) through e^{𝐢φ}.
    """
    for j, step in enumerate(steps):
        if step < pair.a - SLACK:
            raise StepTooShort('Step %d has length %r, which is shorter than a = %r.' % (j, step, pair.a))
    phi = pair.curvature_angle
    return curve_chain([curve_ratio(step, phi) for step in steps], phi)


def _log_expm1(x: float) -> float:
    if x > 30:
        return x + math.log1p(-math.exp(-x))
    return math.log(math.expm1(x))


def _validate_lambdas(lambdas: Sequence[float]) -> None:
    if len(lambdas) < 2:
        raise ValueError('Closed-form tensions need at least two ratios, but got %d.' % len(lambdas))
    for j, ratio in enumerate(lambdas):
        if not ratio > 1:
            raise ValueError('Ratio %d must exceed 1, but got %r.' % (j, ratio))


def tension_closed_form(lambdas: Sequence[float], alpha: float) -> float:
    """
    Return the tension of curve_chain(lambdas, alpha) without measuring any distances.
    """
    _validate_lambdas(lambdas)
    sine_squared = math.sin(alpha) ** 2
    logs = [0.0]
    for ratio in lambdas:
        logs.append(logs[-1] + math.log(ratio))

    def log_g(i: int, j: int) -> float:
        # g(x, y) = |y - x| + √((y - x)² + 4xy sin²(alpha)) is homogeneous, so scale by the larger point.
        low, high = sorted((logs[i], logs[j]))
        r = math.exp(low - high)
        gap = 1 - r
        return high + math.log(gap + math.sqrt(gap * gap + 4 * r * sine_squared))

    n = len(lambdas)
    skips = math.fsum(log_g(j, j + 2) for j in range(n - 1))
    interior = math.fsum(log_g(j, j + 1) for j in range(1, n - 1))
    return 2 * (skips - interior - log_g(0, n))


def tension_degenerate(lambdas: Sequence[float]) -> float:
    """
    Return the limit of tension_closed_form(lambdas, alpha) as alpha decreases to 0.
    """
    _validate_lambdas(lambdas)
    logs = [math.log(ratio) for ratio in lambdas]
    numerator = math.fsum(_log_expm1(logs[j] + logs[j + 1]) for j in range(len(logs) - 1))
    denominator = _log_expm1(math.fsum(logs)) + math.fsum(_log_expm1(log) for log in logs[1:-1])
    return 2 * (numerator - denominator)


def degenerate_bound(lambdas: Sequence[float]) -> float:
    return 2 * math.fsum(1 / (ratio - 1) for ratio in lambdas[1:-1])


def ap_bound(n: int, pair: GoodPair) -> float:
    """
    Return the Avalanche Principle's bound on the absolute tension of good chains with n steps.
    """
    return max(0, n - 2) * 2 / (pair.translation - 1)


def regular_polygon_chain(n: int, r: float) -> Chain:
    """
    Build the closed chain through the vertices of the regular n-gon inscribed in the circle of radius r around 𝐢.
    """
    if n < 4:
        raise ValueError('Regular polygon chains need at least 4 vertices, but got %d.' % n)
    if not r > 0:
        raise ValueError('The circumradius must be positive, but got %r.' % r)
    radius = math.tanh(r / 2)
    points = [from_disk(radius * complex(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n))) for k in range(n)]
    return Chain(points + [points[0]])


def sample_good_chain(pair: GoodPair, n: int, seed: Union[int, 'SeedStream'], convex: bool = True) -> Chain:
    """
    Draw a random good chain with n steps in the hyperbolic plane.

    Steps are uniform in [a, 3a] and Gromov products uniform in [0, b]. Convex chains turn left at every vertex,
    other chains turn to a random side at every vertex.
    """
    from avalanche.oracle import SeedStream

    if n < 2:
        raise ValueError('Sampled chains need at least two steps, but got %d.' % n)
    stream = seed if isinstance(seed, SeedStream) else SeedStream(seed)
    rng = stream.generator()
    steps, gromovs, sides = draw_chain_data(rng, pair, n, convex)
    angles = [
        angle_from_sides(steps[j], steps[j + 1], steps[j] + steps[j + 1] - 2 * gromovs[j])
        for j in range(n - 1)
    ]
    return trace(steps, angles, sides)


def draw_chain_data(rng: np.random.Generator, pair: GoodPair, n: int, convex: bool = True) -> Tuple[List[float], List[float], List[int]]:
    """
    Draw the steps, the interior Gromov products, and the turn sides of a random good chain.
    """
    steps = [float(step) for step in rng.uniform(pair.a, 3 * pair.a, size=n)]
    gromovs = [float(g) for g in rng.uniform(0.0, pair.b, size=n - 1)]
    if convex:
        sides = [1] * (n - 1)
    else:
        sides = [int(side) for side in rng.choice([-1, 1], size=n - 1)]
    return steps, gromovs, sides


def subchain(chain: Chain, indices: Sequence[int]) -> Chain:
    return Chain([chain[index] for index in indices], chain.space)


def tension_split(chain: Chain) -> Tuple[float, float]:
    """
    Split the tension of x0, ..., xn into the tensions of x0, x1, x2, x3 and of x0, x2, x3, ..., xn, which add up to it.
    """
    if chain.n < 3:
        raise ValueError('Splitting a tension needs at least three steps, but got %d.' % chain.n)
    return (
        tension(subchain(chain, [0, 1, 2, 3])),
        tension(subchain(chain, [0] + list(range(2, chain.n + 1)))),
    )


def tanh_inequality_holds(x: float, y: float, z: float, w: float) -> bool:
    """
    Check tanh(x) + tanh(y) <= tanh(z) + tanh(w) for x the smallest and y the largest of four non-negative reals with
    x + y <= z + w.
    """
    values = (x, y, z, w)
    if min(values) < 0 or x != min(values) or y != max(values) or x + y > z + w:
        raise PreconditionFailed('The tanh inequality needs 0 <= x = min, y = max, and x + y <= z + w, but got %r.' % (values,))
    return math.tanh(x) + math.tanh(y) <= math.tanh(z) + math.tanh(w) + SLACK
