"""
Connect products of SL(2, ℝ) matrices to chains in the hyperbolic plane.

A matrix A moves 𝐢 by d(A𝐢, 𝐢) = 2 log‖A‖, so the orbit of 𝐢 under the partial products of a matrix chain turns norm
estimates for products into tension estimates for chains.
"""
import math
from typing import Any, Iterator, List, NamedTuple, Sequence, Tuple

import numpy as np

from avalanche.chains import Chain
from avalanche.error import InvalidMatrix, PreconditionFailed
from avalanche.hyp2 import BASE_POINT, HPoint, Mat2, dist, frame_point, mobius_apply, orbit_points, rotate, advance

# Relative slack for the norm hypotheses.
SLACK = 1e-12


def _norm(a: float, b: float, c: float, d: float) -> float:
    return (math.hypot(a + d, b - c) + math.hypot(a - d, b + c)) / 2


def op_norm(matrix: Mat2) -> float:
    """
    Return the largest singular value of a matrix.
    """
    return _norm(*matrix.entries)


def _pair_norm(left: Mat2, right: Mat2) -> float:
    return _norm(*(left.as_array() @ right.as_array()).ravel())


def log_norm_of_product(factors: Sequence[Mat2]) -> float:
    """
    Return log‖F1 F2 ⋯ Fk‖, rescaling partial products so that they cannot overflow.
    """
    product = np.eye(2)
    log_scale = 0.0
    for factor in factors:
        product = product @ factor.as_array()
        scale = float(np.abs(product).max())
        product = product / scale
        log_scale += math.log(scale)
    return math.log(_norm(*product.ravel())) + log_scale


class MatChain:
    """
    Matrices A1, ..., An, with the orbit x0 = 𝐢 and xj = An An-1 ⋯ An-j+1 𝐢.
    """

    def __init__(self, mats: Sequence[Mat2]):
        if len(mats) < 1:
            raise InvalidMatrix('A matrix chain needs at least one matrix.')
        self._mats = tuple(mats)
        self._orbit = Chain(orbit_points([matrix.as_array() for matrix in reversed(self._mats)]))

    @property
    def mats(self) -> Tuple[Mat2, ...]:
        return self._mats

    @property
    def n(self) -> int:
        return len(self._mats)

    def __getitem__(self, j: int) -> Mat2:
        """
        Return Aj, counting from 1.
        """
        if not 1 <= j <= len(self._mats):
            raise IndexError('Matrix chains are indexed from 1 through %d, but got %d.' % (len(self._mats), j))
        return self._mats[j - 1]

    def __iter__(self) -> Iterator[Mat2]:
        return iter(self._mats)

    def __len__(self) -> int:
        return len(self._mats)

    @property
    def orbit(self) -> Chain:
        return self._orbit

    def __repr__(self) -> str:
        return '<%s.%s(n=%d)>' % (self.__class__.__module__, self.__class__.__name__, self.n)


def ap_residual(chain: MatChain) -> float:
    """
    Return log‖An ⋯ A1‖ + Σ log‖Ai‖ - Σ log‖Ai Ai-1‖, with 2 <= i <= n - 1 in the first sum and 2 <= i <= n in the
    second.
    """
    n = chain.n
    if n < 2:
        return 0.0
    product = log_norm_of_product(list(reversed(chain.mats)))
    norms = math.fsum(math.log(op_norm(chain[i])) for i in range(2, n))
    pairs = math.fsum(math.log(_pair_norm(chain[i], chain[i - 1])) for i in range(2, n + 1))
    return product + norms - pairs


def dk_hypotheses(chain: MatChain, kappa: float, epsilon: float) -> bool:
    """
    Check ‖Aj‖ >= κ^(-1/2) for all matrices and ‖Aj Aj-1‖ >= ε‖Aj‖‖Aj-1‖ for all consecutive pairs.
    """
    if not kappa > 0:
        raise PreconditionFailed('κ must be positive, but got %r.' % kappa)
    if not 0 < epsilon < 1:
        raise PreconditionFailed('ε must lie in (0, 1), but got %r.' % epsilon)
    threshold = kappa ** -0.5 * (1 - SLACK)
    norms = [op_norm(matrix) for matrix in chain]
    if any(norm < threshold for norm in norms):
        return False
    for j in range(2, chain.n + 1):
        if _pair_norm(chain[j], chain[j - 1]) < epsilon * norms[j - 1] * norms[j - 2] * (1 - SLACK):
            return False
    return True


class Dictionary(NamedTuple):
    kappa: float
    epsilon: float
    c0: float
    c1: float


def dictionary(a: float, b: float, c: float) -> Dictionary:
    """
    Translate a good pair into the constants of the matrix Avalanche Principle.
    """
    if not c > 1:
        raise PreconditionFailed('The constant c must exceed 1, but got %r.' % c)
    margin = math.log(4) + math.log(c / (c - 1))
    if not a - 2 * b > margin:
        raise PreconditionFailed('(%r, %r) does not satisfy a - 2b > log 4 + log(c/(c - 1)) = %r for c = %r.' % (a, b, margin, c))
    return Dictionary(math.exp(-a), math.exp(-b), (c - 1) / (4 * c), 4 * c)


def matrix_bound(n: int, a: float, b: float, c: float) -> float:
    """
    Return 8c(n - 2)e^(2b - a), the bound the dictionary gives on the absolute residual.
    """
    return 8 * c * max(0, n - 2) * math.exp(2 * b - a)


def stable_length_lb(f: Mat2) -> float:
    """
    Return d(f²𝐢, 𝐢) - d(f𝐢, 𝐢) - 2 log 2, a lower bound for the stable length of f.
    """
    square = frame_point(f.as_array() @ f.as_array())
    return dist(square, BASE_POINT) - dist(mobius_apply(f, BASE_POINT), BASE_POINT) - 2 * math.log(2)


def orbit_growth(f: Mat2, iterations: int = 64) -> float:
    """
    Return d(f^N 𝐢, 𝐢)/N for N = iterations.
    """
    if iterations < 1:
        raise ValueError('At least one iteration is needed, but got %d.' % iterations)
    return 2 * log_norm_of_product([f] * iterations) / iterations


def stable_length(f: Mat2) -> float:
    """
    Return the translation length of f, which is 0 unless f is hyperbolic.
    """
    trace = abs(f.trace)
    if trace <= 2:
        return 0.0
    return 2 * math.acosh(trace / 2)


def random_mat2(rng: np.random.Generator, spread: float) -> Mat2:
    """
    Draw a matrix that moves 𝐢 by a distance uniform in [0, spread], in a uniformly random direction.
    """
    first, second = rng.uniform(0.0, 2 * math.pi, size=2)
    length = rng.uniform(0.0, spread)
    return Mat2.from_array(rotate(float(first)) @ advance(float(length)) @ rotate(float(second)))


def mat_chain_from(chain: Chain) -> MatChain:
    """
    Build the matrix chain whose orbit is the given chain, moved so that x0 = 𝐢.
    """
    points: List[Any] = list(chain.points)
    if not all(isinstance(point, HPoint) for point in points):
        raise InvalidMatrix('Matrix chains can only be built from chains in the hyperbolic plane.')
    mats = []
    for j in range(1, len(points)):
        previous = points[j - 1]
        current = points[j]
        root = math.sqrt(previous.im) * math.sqrt(current.im)
        mats.append(Mat2(
            math.sqrt(current.im / previous.im),
            (current.re - previous.re) / root,
            0.0,
            math.sqrt(previous.im / current.im),
        ))
    # The matrix moving xj-1 to xj comes last in the product, so it is A(n-j+1).
    return MatChain(list(reversed(mats)))
