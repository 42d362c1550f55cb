from io import StringIO

from parameterized import parameterized

from avalanche.table import TABLES, polygon_table, canonical_table, degenerate_table, write_table, POLYGON_SIZES, \
    POLYGON_RADII, CANONICAL_STEPS
from avalanche.tests import TestCase


class PolygonTableTest(TestCase):
    def test_rows(self) -> None:
        header, rows = polygon_table()
        self.assertEqual(('n', 'r', 'tension', 'tension_per_vertex', 'formula'), header)
        self.assertEqual(len(POLYGON_SIZES) * len(POLYGON_RADII), len(rows))

    def test_tension_matches_the_formula(self) -> None:
        for n, r, value, per_vertex, formula in polygon_table()[1]:
            self.assertAlmostEqual(formula, value, delta=1e-9 * n * (1 + abs(formula)))
            self.assertAlmostEqual(value / n, per_vertex, delta=1e-15 + 1e-12 * abs(per_vertex))

    def test_tension_per_vertex_increases_with_the_radius(self) -> None:
        rows = polygon_table()[1]
        for n in POLYGON_SIZES:
            per_vertex = [row[3] for row in rows if row[0] == n]
            for smaller, larger in zip(per_vertex, per_vertex[1:]):
                self.assertLess(smaller, larger)

    def test_sizes(self) -> None:
        self.assertEqual(list(range(4, 13)), sorted({row[0] for row in polygon_table()[1]}))


class CanonicalTableTest(TestCase):
    def test_rows(self) -> None:
        header, rows = canonical_table()
        self.assertEqual(('j', 're', 'im', 'step', 'gromov', 'a', 'b'), header)
        self.assertEqual(CANONICAL_STEPS + 1, len(rows))
        self.assertEqual('', rows[0][3])
        self.assertEqual('', rows[0][4])
        self.assertEqual('', rows[-1][4])

    def test_steps_and_gromov_products_are_constant(self) -> None:
        rows = canonical_table()[1]
        for row in rows[1:]:
            self.assertAlmostEqual(row[5], row[3], delta=1e-9)
        for row in rows[1:-1]:
            self.assertAlmostEqual(row[6], row[4], delta=1e-9)


class DegenerateTableTest(TestCase):
    def test_tension_is_bounded(self) -> None:
        header, rows = degenerate_table()
        self.assertEqual(('n', 'translation', 'tension', 'bound'), header)
        self.assertEqual(16, len(rows))
        for n, translation, value, bound in rows:
            self.assertLessEqual(abs(value), bound + 1e-12)


class WriteTableTest(TestCase):
    @parameterized.expand([(name,) for name in TABLES])
    def test_csv(self, name: str) -> None:
        header, rows = TABLES[name]()
        f = StringIO()
        write_table(name, f)
        lines = f.getvalue().splitlines()
        self.assertEqual(','.join(header), lines[0])
        self.assertEqual(len(rows) + 1, len(lines))
