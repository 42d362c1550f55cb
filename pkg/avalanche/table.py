"""
Tabulate the illustrative computations behind the Avalanche Principle.
"""
import csv
import math
from typing import Callable, Dict, IO, List, Sequence, Tuple

from avalanche.chains import GoodPair, canonical_chain, degenerate_bound, regular_polygon_chain, tension, \
    tension_degenerate

Table = Tuple[Sequence[str], List[Sequence[object]]]

POLYGON_SIZES = tuple(range(4, 13))
POLYGON_RADII = (0.5, 1.0, 2.0, 4.0, 8.0)
CANONICAL_TRANSLATION = 1.5
CANONICAL_CURVATURE_ANGLE = math.radians(13.404)
CANONICAL_STEPS = 8
DEGENERATE_TRANSLATIONS = (1.5, 2.0, 3.0, 5.0)
DEGENERATE_SIZES = (3, 5, 10, 25)


def polygon_table() -> Table:
    """
    Tabulate the tension of regular polygons, whose tension per vertex increases with their circumradius.
    """
    rows: List[Sequence[object]] = []
    for n in POLYGON_SIZES:
        for r in POLYGON_RADII:
            chain = regular_polygon_chain(n, r)
            value = tension(chain)
            formula = (n - 1) * chain.dist(0, 2) - (n - 2) * chain.dist(0, 1)
            rows.append((n, r, value, value / n, formula))
    return ('n', 'r', 'tension', 'tension_per_vertex', 'formula'), rows


def canonical_table() -> Table:
    """
    Tabulate the canonical chain of the pair with λ = 1.5 and φ = 13.404°.
    """
    pair = GoodPair.from_translation(CANONICAL_TRANSLATION, CANONICAL_CURVATURE_ANGLE)
    chain = canonical_chain(pair, CANONICAL_STEPS)
    rows: List[Sequence[object]] = []
    for j, point in enumerate(chain.points):
        step = chain.steps[j - 1] if j > 0 else ''
        gromov = chain.gromovs[j - 1] if 0 < j < chain.n else ''
        rows.append((j, point.re, point.im, step, gromov, pair.a, pair.b))
    return ('j', 're', 'im', 'step', 'gromov', 'a', 'b'), rows


def degenerate_table() -> Table:
    """
    Tabulate the limit tension of chains on curves that tend to a horocycle, against its bound.
    """
    rows: List[Sequence[object]] = []
    for translation in DEGENERATE_TRANSLATIONS:
        for n in DEGENERATE_SIZES:
            lambdas = [translation] * n
            rows.append((n, translation, tension_degenerate(lambdas), degenerate_bound(lambdas)))
    return ('n', 'translation', 'tension', 'bound'), rows


TABLES: Dict[str, Callable[[], Table]] = {
    'polygon': polygon_table,
    'canonical': canonical_table,
    'degenerate': degenerate_table,
}


def write_table(name: str, f: IO[str]) -> None:
    header, rows = TABLES[name]()
    writer = csv.writer(f, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
