"""
Run verification sweeps: draw good chains over a grid of pairs and sizes, and check the Avalanche Principle and its
companion properties on every sample.
"""
import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, IO, Iterable, List, NamedTuple, Optional, Tuple

from avalanche.catspaces import Backend, sample_good_chain_in, verify_cat_comparison, reflection_tension_sum
from avalanche.chains import Chain, GoodPair, tension, ap_bound, sample_good_chain, is_good_chain, subchain, \
    tension_closed_form
from avalanche.cocycle import MatChain, mat_chain_from, ap_residual, dk_hypotheses, dictionary, matrix_bound
from avalanche.concurrent import ExceptionRaisingAwaitableExecutor, InlineExecutor
from avalanche.config import SweepConfiguration, ConfigurationError
from avalanche.error import UserFacingError, GeometryError, PreconditionFailed
from avalanche.hyp2 import H2, angle_from_sides, curve_ratio
from avalanche.json import Document, MatChainDocument
from avalanche.oracle import SeedStream

# Absolute slack per step for floating point comparisons.
TOLERANCE = 1e-9

# The number of curvature angles the lemmas suite sweeps.
ANGLE_GRID = 16


def getLogger() -> logging.Logger:
    return logging.getLogger(__name__)


class VerificationError(UserFacingError):
    pass


class Row(NamedTuple):
    suite: str
    seed: Optional[int]
    a: Optional[float]
    b: Optional[float]
    n: int
    translation: Optional[float]
    curvature_angle: Optional[float]
    tension: Optional[float]
    bound: Optional[float]
    margin: Optional[float]
    ok: bool


COLUMNS = Row._fields


def _row(suite: str, seed: Optional[int], pair: Optional[GoodPair], n: int, tension_value: Optional[float], bound: Optional[float], margin: Optional[float], ok: bool) -> Row:
    return Row(
        suite,
        seed,
        None if pair is None else pair.a,
        None if pair is None else pair.b,
        n,
        None if pair is None else pair.translation,
        None if pair is None else pair.curvature_angle,
        tension_value,
        bound,
        margin,
        ok,
    )


def check_ap(chain: Chain, pair: GoodPair, seed: Optional[int] = None) -> Row:
    """
    Check |τ| <= (n - 2)·2/(λ - 1) for a good chain.
    """
    value = tension(chain)
    bound = ap_bound(chain.n, pair)
    margin = bound + TOLERANCE * chain.n - abs(value)
    return _row('ap', seed, pair, chain.n, value, bound, margin, margin >= 0 and is_good_chain(chain, pair))


def check_cat(chain: Chain, pair: Optional[GoodPair], seed: Optional[int] = None) -> Row:
    """
    Check that a chain's comparison chain bounds its absolute tension and spans no further than the chain itself.
    """
    report = verify_cat_comparison(chain)
    margin = report.image_tension + TOLERANCE * chain.n - abs(report.source_tension)
    return _row('cat', seed, pair, chain.n, report.source_tension, report.image_tension, margin, report.ok and report.span_ok)


def check_mat_chain(matrices: MatChain, pair: GoodPair, c: float, seed: Optional[int] = None) -> Row:
    """
    Check the matrix Avalanche Principle on a matrix chain drawn for a good pair.

    The residual must stay within 8c(n - 2)e^(2b - a), equal -τ/2 for the tension τ of the orbit, and the matrices must
    satisfy the norm hypotheses the pair translates into.
    """
    residual = ap_residual(matrices)
    value = tension(matrices.orbit)
    bound = matrix_bound(matrices.n, pair.a, pair.b, c)
    margin = bound + TOLERANCE * matrices.n - abs(residual)
    constants = dictionary(pair.a, pair.b, c)
    ok = (
        margin >= 0
        and abs(residual + value / 2) <= TOLERANCE * matrices.n
        and dk_hypotheses(matrices, constants.kappa, constants.epsilon)
    )
    return _row('matrix', seed, pair, matrices.n, value, bound, margin, ok)


def check_matrix(chain: Chain, pair: GoodPair, c: float, seed: Optional[int] = None) -> Row:
    """
    Check the matrix Avalanche Principle on the matrices whose orbit is the chain.
    """
    return check_mat_chain(mat_chain_from(chain), pair, c, seed)


def _lemma_margins(chain: Chain, pair: GoodPair) -> Dict[str, float]:
    n = chain.n
    slack = TOLERANCE * n
    span = chain.dist(0, n)
    margins = {
        'non-negative tension': tension(chain) + slack,
        'endpoint maximality': span + slack - max(chain.dist(i, j) for i in range(n) for j in range(i + 1, n + 1)),
        'acute end angle': math.pi / 2 + TOLERANCE - angle_from_sides(chain.dist(0, 1), span, chain.dist(1, n)),
    }
    # Sub-chains are good for a pair with the same curvature angle, whose step bound is their shortest step.
    margins['sub-chain steps'] = min(chain.dist(i, j) for i in range(n) for j in range(i + 1, n + 1)) - pair.a + slack
    gromov_margins = []
    for i in range(n - 1):
        for k in range(i + 1, n):
            for j in range(k + 1, n + 1):
                shortest = min(chain.dist(i, k), chain.dist(k, j))
                bound = GoodPair.from_step(shortest, pair.curvature_angle).b
                gromov_margins.append(bound + slack - chain.space.gromov(chain[i], chain[j], chain[k]))
    margins['sub-chain Gromov products'] = min(gromov_margins)
    if n >= 3:
        head = subchain(chain, [0, 1, 2, 3])
        gamma = angle_from_sides(head.dist(1, 2), head.dist(1, 3), head.dist(2, 3))
        margins['reflection tension sum'] = reflection_tension_sum(head, gamma) + TOLERANCE
        lambdas = [curve_ratio(step, pair.curvature_angle) for step in chain.steps]
        angles = [math.pi / 2 * k / ANGLE_GRID for k in range(1, ANGLE_GRID + 1)]
        tensions = [tension_closed_form(lambdas, alpha) for alpha in angles]
        margins['tension monotone in the curvature angle'] = slack - max(
            later - earlier for earlier, later in zip(tensions, tensions[1:])
        )
    return margins


def check_lemmas(chain: Chain, pair: GoodPair, seed: Optional[int] = None) -> Row:
    """
    Check the structural properties of a convex good chain in the hyperbolic plane.

    Its tension is non-negative, its end points are its farthest pair, the angle at x0 is at most π/2, all its
    sub-chains are good, the reflection tension sum at its first four points is non-negative, and the tension of the
    chain on curves with its translation ratios does not increase with the curve angle.
    """
    margins = _lemma_margins(chain, pair)
    failed = [name for name, margin in margins.items() if margin < 0]
    for name in failed:
        getLogger().debug('The %s check failed with margin %r.' % (name, margins[name]))
    return _row('lemmas', seed, pair, chain.n, tension(chain), 0.0, min(margins.values()), not failed)


def sample_seed(root_seed: int, suite: str, pair_index: int, n: int, sample: int) -> int:
    """
    Derive the seed of a single sample, which reproduces its chain on its own.
    """
    return SeedStream(root_seed, (suite, pair_index, n, sample)).seed()


def check_sample(suite: str, backend: Backend, pair: GoodPair, n: int, seed: int, c: float = 2.0) -> Row:
    """
    Draw the chain for a seed and check it against a suite.
    """
    if suite == 'ap':
        return check_ap(sample_good_chain_in(backend, pair, n, seed), pair, seed)
    if suite == 'cat':
        return check_cat(sample_good_chain_in(backend, pair, n, seed), pair, seed)
    if suite == 'matrix':
        return check_matrix(sample_good_chain(pair, n, seed, convex=False), pair, c, seed)
    if suite == 'lemmas':
        return check_lemmas(sample_good_chain(pair, n, seed, convex=True), pair, seed)
    raise ValueError('Unknown suite "%s".' % suite)


def _run_cell(suite: str, backend: Backend, a: float, b: float, pair_index: int, n: int, samples: int, root_seed: int, c: float) -> List[Row]:
    pair = GoodPair(a, b)
    rows = []
    for sample in range(samples):
        seed = sample_seed(root_seed, suite, pair_index, n, sample)
        try:
            rows.append(check_sample(suite, backend, pair, n, seed, c))
        except (GeometryError, ArithmeticError) as e:
            getLogger().error('The %s suite could not check the chain with seed %d for (a, b) = (%r, %r) and n = %d: %s' % (suite, seed, a, b, n, e))
            rows.append(_row(suite, seed, pair, n, None, None, None, False))
    return rows


def sweep(configuration: SweepConfiguration) -> List[Row]:
    """
    Check every sample of every cell of the configured grid, in grid order.
    """
    configuration.assert_consistent()
    if configuration.jobs > 1:
        executor = ExceptionRaisingAwaitableExecutor(ProcessPoolExecutor(configuration.jobs))
    else:
        executor = ExceptionRaisingAwaitableExecutor(InlineExecutor())
    cells: List[Tuple[Tuple[float, float], int]] = []
    for pair_index, (a, b) in enumerate(configuration.pairs):
        for n in configuration.ns:
            cells.append(((a, b), n))
            executor.submit(_run_cell, configuration.suite, configuration.backend, a, b, pair_index, n, configuration.samples, configuration.seed, configuration.c)
    try:
        results = executor.results()
    finally:
        executor.shutdown()
    rows: List[Row] = []
    for ((a, b), n), cell_rows in zip(cells, results):
        violations = [row for row in cell_rows if not row.ok]
        getLogger().info('Checked %d %s samples for (a, b) = (%r, %r) and n = %d, with %d violations.' % (len(cell_rows), configuration.suite, a, b, n, len(violations)))
        for row in violations:
            if row.margin is not None:
                getLogger().error('Violation in the %s suite for (a, b) = (%r, %r) and n = %d with seed %d: the margin is %r.' % (configuration.suite, a, b, n, row.seed, row.margin))
        rows.extend(cell_rows)
    return rows


def _document_pair(pair: Optional[GoodPair], suite: str) -> GoodPair:
    if pair is None:
        raise ConfigurationError('The %s suite needs the document to declare its good pair.' % suite)
    return pair


def _matrix_pair(pair: Optional[GoodPair], c: float) -> GoodPair:
    checked = _document_pair(pair, 'matrix')
    try:
        dictionary(checked.a, checked.b, c)
    except PreconditionFailed as e:
        raise ConfigurationError('The matrix suite cannot check the document: %s' % e)
    return checked


def verify_document(document: Document, suite: str, c: float = 2.0) -> Row:
    """
    Check a single chain or matrix chain loaded from a document.
    """
    if isinstance(document, MatChainDocument):
        if suite != 'matrix':
            raise ConfigurationError('Matrix chain documents can be checked by the matrix suite, but not by the %s suite.' % suite)
        return check_mat_chain(document.mat_chain, _matrix_pair(document.pair, c), c)
    chain = document.chain
    if suite == 'ap':
        return check_ap(chain, _document_pair(document.pair, suite))
    if suite == 'cat':
        return check_cat(chain, document.pair)
    if suite == 'matrix':
        if chain.space is not H2:
            raise ConfigurationError('The matrix suite checks chains in H2, but the document holds a chain in %s.' % chain.space.name)
        return check_matrix(chain, _matrix_pair(document.pair, c), c)
    raise ConfigurationError('Documents can be checked by the ap, cat and matrix suites, but not by the %s suite.' % suite)


def _to_json_line(row: Row) -> str:
    return json.dumps(row._asdict())


def _write_jsonl(rows: Iterable[Row], f: IO[str]) -> None:
    for row in rows:
        f.write(_to_json_line(row) + '\n')


def _write_csv(rows: Iterable[Row], f: IO[str]) -> None:
    writer = csv.writer(f, lineterminator='\n')
    writer.writerow(COLUMNS)
    for row in rows:
        writer.writerow(['' if value is None else value for value in row])


_WRITERS: Dict[str, Callable[[Iterable[Row], IO[str]], None]] = {
    'jsonl': _write_jsonl,
    'csv': _write_csv,
}


def write_rows(rows: Iterable[Row], output_format: str, f: IO[str]) -> None:
    try:
        writer = _WRITERS[output_format]
    except KeyError:
        raise ConfigurationError('Unknown output format "%s". Supported formats are: %s.' % (output_format, ', '.join(_WRITERS)))
    writer(rows, f)


def assert_no_violations(rows: List[Row]) -> None:
    """
    Raise VerificationError if any row records a violation.
    """
    violations: List[Any] = [row.seed for row in rows if not row.ok]
    if violations:
        raise VerificationError('%d of %d samples violate their checks. The first offending seed is %s.' % (len(violations), len(rows), violations[0]))
