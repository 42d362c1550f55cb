import math

from parameterized import parameterized

from avalanche.catspaces import H3Point, H3, h3_dist, h3_frame_point, spin, turn, trace_h3, MetricTree, tree_dist, \
    four_point_holds, tree_chain, Backend, sample_good_chain_in, comparison_chain, verify_cat_comparison, \
    reflected_end, reflection_tension_sum
from avalanche.chains import Chain, GoodPair, is_good_chain, tension, vertex_angles, sample_good_chain, trace, \
    is_convex
from avalanche.error import InvalidPoint, InvalidTree, UnknownNode, DegenerateTriple
from avalanche.hyp2 import HPoint, dist, signed_offset
from avalanche.tests import TestCase


class H3PointTest(TestCase):
    @parameterized.expand([
        (0.0, 0.0, 0.0),
        (0.0, 0.0, -1.0),
        (math.nan, 0.0, 1.0),
        (0.0, math.inf, 1.0),
    ])
    def test_invalid(self, x: float, y: float, z: float) -> None:
        with self.assertRaises(InvalidPoint):
            H3Point(x, y, z)

    def test_w(self) -> None:
        self.assertEqual(1 + 2j, H3Point(1.0, 2.0, 3.0).w)

    def test_contains(self) -> None:
        self.assertTrue(H3.contains(H3Point(0.0, 0.0, 1.0)))
        self.assertFalse(H3.contains(HPoint(0.0, 1.0)))


class H3DistTest(TestCase):
    def test_vertical(self) -> None:
        self.assertAlmostEqual(math.log(3), h3_dist(H3Point(1.0, 1.0, 1.0), H3Point(1.0, 1.0, 3.0)), delta=1e-12)

    def test_same_point(self) -> None:
        self.assertEqual(0.0, h3_dist(H3Point(1.0, 2.0, 3.0), H3Point(1.0, 2.0, 3.0)))

    @parameterized.expand([
        (HPoint(0.0, 1.0), HPoint(2.0, 0.5)),
        (HPoint(-1.0, 3.0), HPoint(4.0, 0.1)),
        (HPoint(0.0, 1.0), HPoint(1e-6, 1.0)),
    ])
    def test_restricts_to_the_plane(self, p: HPoint, q: HPoint) -> None:
        self.assertAlmostEqual(dist(p, q), h3_dist(H3Point(p.re, 0.0, p.im), H3Point(q.re, 0.0, q.im)), delta=1e-12)

    def test_rotation_invariance(self) -> None:
        p = H3Point(1.0, 0.0, 2.0)
        q = H3Point(-1.0, 0.5, 0.3)
        rotated_p = H3Point(0.0, 1.0, 2.0)
        rotated_q = H3Point(-0.5, -1.0, 0.3)
        self.assertAlmostEqual(h3_dist(p, q), h3_dist(rotated_p, rotated_q), delta=1e-12)


class H3FrameTest(TestCase):
    def test_identity(self) -> None:
        point = h3_frame_point(spin(0.0))
        self.assertAlmostEqual(0.0, abs(point.w), delta=1e-15)
        self.assertAlmostEqual(1.0, point.z, delta=1e-15)

    def test_spin_fixes_the_base_point(self) -> None:
        point = h3_frame_point(spin(1.3))
        self.assertAlmostEqual(0.0, h3_dist(point, H3Point(0.0, 0.0, 1.0)), delta=1e-12)

    @parameterized.expand([
        ([2.0, 3.0, 1.5], [2.0, 1.0], [0.0, 0.0]),
        ([2.0, 3.0, 1.5], [2.0, 1.0], [1.0, 2.5]),
        ([1.0, 1.0, 1.0, 1.0], [2.5, 2.5, 2.5], [0.3, 4.0, 5.5]),
    ])
    def test_trace_h3(self, steps, angles, azimuths) -> None:
        chain = trace_h3(steps, angles, azimuths)
        self.assertIs(H3, chain.space)
        self.assertAllClose(steps, chain.steps, 1e-9)
        self.assertAllClose(angles, vertex_angles(chain), 1e-7)

    def test_planar_azimuths_match_the_plane(self) -> None:
        steps = [2.0, 3.0, 1.5, 2.5]
        angles = [2.0, 1.0, 2.7]
        azimuths = [0.0, math.pi, 0.0]
        planar = trace(steps, angles, [1, -1, 1])
        spatial = trace_h3(steps, angles, azimuths)
        self.assertAlmostEqual(tension(planar), tension(spatial), delta=1e-9)

    def test_turn(self) -> None:
        self.assertAllClose([1.0, 0.0, 0.0, 1.0], [abs(entry) for entry in turn(0.0, 1.0).ravel()], 1e-15)


class _StretchedTree(MetricTree):
    def __init__(self):
        super().__init__(['a', 'b', 'c'], [('a', 'b', 1.0), ('b', 'c', 1.0)])

    def dist(self, u, v):
        if {u, v} == {'a', 'c'}:
            return 5.0
        return super().dist(u, v)


class MetricTreeTest(TestCase):
    def _tree(self) -> MetricTree:
        return MetricTree(['a', 'b', 'c', 'd'], [('a', 'b', 1.0), ('b', 'c', 2.0), ('b', 'd', 3.0)])

    def test_dist(self) -> None:
        tree = self._tree()
        self.assertEqual(3.0, tree.dist('a', 'c'))
        self.assertEqual(5.0, tree_dist(tree, 'c', 'd'))
        self.assertEqual(0.0, tree.dist('d', 'd'))

    def test_path(self) -> None:
        self.assertEqual(['c', 'b', 'd'], self._tree().path('c', 'd'))
        self.assertEqual(['a'], self._tree().path('a', 'a'))

    def test_unknown_node(self) -> None:
        with self.assertRaises(UnknownNode):
            self._tree().dist('a', 'e')
        with self.assertRaises(UnknownNode):
            self._tree().path('e', 'a')

    def test_contains(self) -> None:
        tree = self._tree()
        self.assertTrue(tree.contains('a'))
        self.assertFalse(tree.contains('e'))
        self.assertFalse(tree.contains(['a']))

    def test_single_node(self) -> None:
        self.assertEqual(0.0, MetricTree(['a'], []).dist('a', 'a'))

    @parameterized.expand([
        ([], []),
        (['a', 'a'], [('a', 'a', 1.0)]),
        (['a', 'b'], [('a', 'c', 1.0)]),
        (['a', 'b'], [('a', 'b', 0.0)]),
        (['a', 'b'], [('a', 'b', -1.0)]),
        (['a', 'b'], [('a', 'b', math.inf)]),
        (['a', 'b', 'c'], [('a', 'b', 1.0)]),
        (['a', 'b', 'c'], [('a', 'b', 1.0), ('b', 'a', 1.0)]),
        (['a', 'b', 'c', 'd'], [('a', 'b', 1.0), ('b', 'c', 1.0), ('c', 'a', 1.0)]),
    ])
    def test_invalid(self, nodes, edges) -> None:
        with self.assertRaises(InvalidTree):
            MetricTree(nodes, edges)

    def test_eq(self) -> None:
        self.assertEqual(self._tree(), self._tree())

    def test_four_point_condition(self) -> None:
        tree = self._tree()
        for u in tree.nodes:
            for v in tree.nodes:
                for w in tree.nodes:
                    for x in tree.nodes:
                        self.assertTrue(four_point_holds(tree, u, v, w, x))

    def test_four_point_condition_of_sampled_trees(self) -> None:
        chain = sample_good_chain_in(Backend.TREE, GoodPair(3.0, 0.5), 6, 5)
        tree = chain.space
        nodes = chain.points
        for u in nodes:
            for v in nodes:
                for w in nodes:
                    for x in nodes:
                        self.assertTrue(four_point_holds(tree, u, v, w, x))


class TreeChainTest(TestCase):
    def test_steps_and_gromovs(self) -> None:
        steps = [3.0, 4.0, 3.5, 5.0]
        gromovs = [0.5, 0.0, 0.25]
        chain = tree_chain(steps, gromovs)
        self.assertEqual(('x0', 'x1', 'x2', 'x3', 'x4'), chain.points)
        self.assertAllClose(steps, chain.steps, 1e-12)
        self.assertAllClose(gromovs, chain.gromovs, 1e-12)

    def test_branches(self) -> None:
        chain = tree_chain([3.0, 4.0], [0.5])
        self.assertIn('b1', chain.space.nodes)
        self.assertEqual(['x1', 'b1', 'x2'], chain.space.path('x1', 'x2'))

    def test_tension(self) -> None:
        chain = tree_chain([3.0, 3.0, 3.0], [0.5, 0.5])
        self.assertAlmostEqual(5.0 + 5.0 - 3.0 - 7.0, tension(chain), delta=1e-12)


class SampleGoodChainInTest(TestCase):
    @parameterized.expand([
        (backend, a, b, n)
        for backend in Backend
        for a, b, n in ((3.0, 0.5, 3), (4.0, 1.0, 10), (5.0, 1.0, 25))
    ])
    def test_good(self, backend: Backend, a: float, b: float, n: int) -> None:
        pair = GoodPair(a, b)
        chain = sample_good_chain_in(backend, pair, n, 17)
        self.assertEqual(n, chain.n)
        self.assertTrue(is_good_chain(chain, pair))

    @parameterized.expand([(backend,) for backend in Backend])
    def test_deterministic(self, backend: Backend) -> None:
        pair = GoodPair(3.0, 0.5)
        first = sample_good_chain_in(backend, pair, 5, 3)
        second = sample_good_chain_in(backend, pair, 5, 3)
        self.assertAllClose(first.steps, second.steps, 0.0)
        self.assertAllClose(first.gromovs, second.gromovs, 0.0)

    def test_spaces(self) -> None:
        pair = GoodPair(3.0, 0.5)
        self.assertIs(H3, sample_good_chain_in(Backend.H3, pair, 3, 0).space)
        self.assertIsInstance(sample_good_chain_in(Backend.TREE, pair, 3, 0).space, MetricTree)
        self.assertEqual(sample_good_chain(pair, 3, 0, convex=False), sample_good_chain_in(Backend.H2, pair, 3, 0))

    def test_too_few_steps(self) -> None:
        with self.assertRaises(ValueError):
            sample_good_chain_in(Backend.TREE, GoodPair(3.0, 0.5), 1, 0)


class ComparisonTest(TestCase):
    @parameterized.expand([(backend,) for backend in Backend])
    def test_comparison_chain(self, backend: Backend) -> None:
        chain = sample_good_chain_in(backend, GoodPair(4.0, 1.0), 6, 2)
        comparison = comparison_chain(chain)
        self.assertIs(chain, comparison.source)
        self.assertAllClose(chain.steps, comparison.image.steps, 1e-8)
        self.assertAllClose(chain.gromovs, comparison.image.gromovs, 1e-8)
        self.assertTrue(is_convex(comparison.image))

    @parameterized.expand([
        (backend, seed)
        for backend in Backend
        for seed in range(4)
    ])
    def test_verify_cat_comparison(self, backend: Backend, seed: int) -> None:
        report = verify_cat_comparison(sample_good_chain_in(backend, GoodPair(4.0, 1.0), 10, seed))
        self.assertTrue(report.ok)
        self.assertTrue(report.span_ok)
        self.assertLessEqual(abs(report.source_tension), report.image_tension + 1e-8)
        self.assertGreaterEqual(report.source_span, report.image_span - 1e-8)

    def test_convex_chain_is_its_own_comparison(self) -> None:
        chain = sample_good_chain(GoodPair(3.0, 0.5), 5, 0)
        report = verify_cat_comparison(chain)
        self.assertAlmostEqual(report.source_tension, report.image_tension, delta=1e-8)
        self.assertAlmostEqual(report.source_span, report.image_span, delta=1e-8)

    def test_single_step(self) -> None:
        with self.assertRaises(DegenerateTriple):
            comparison_chain(Chain([HPoint(0.0, 1.0), HPoint(0.0, 2.0)]))

    def test_triangle_inequality(self) -> None:
        with self.assertRaises(DegenerateTriple):
            comparison_chain(Chain(['a', 'b', 'c'], _StretchedTree()))


class ReflectionTest(TestCase):
    def _chain(self) -> Chain:
        return trace([1.0, 1.5, 1.2], [2.0, 2.3])

    def test_actual_angle_keeps_the_end(self) -> None:
        chain = self._chain()
        gamma = vertex_angles(Chain([chain[2], chain[1], chain[3]]))[0]
        moved, _ = reflected_end(chain, gamma)
        self.assertAlmostEqual(0.0, dist(moved, chain[3]), delta=1e-8)

    def test_reflection(self) -> None:
        chain = self._chain()
        moved, reflected = reflected_end(chain, 0.7)
        self.assertAlmostEqual(chain.dist(1, 3), dist(chain[1], moved), delta=1e-9)
        self.assertAlmostEqual(dist(chain[1], moved), dist(chain[1], reflected), delta=1e-9)
        self.assertAlmostEqual(dist(chain[2], moved), dist(chain[2], reflected), delta=1e-9)
        self.assertGreater(signed_offset(chain[1], chain[2], chain[0]) * signed_offset(chain[1], chain[2], moved), 0)
        self.assertLess(signed_offset(chain[1], chain[2], chain[0]) * signed_offset(chain[1], chain[2], reflected), 0)

    @parameterized.expand([(seed,) for seed in range(5)])
    def test_tension_sum_is_non_negative(self, seed: int) -> None:
        chain = sample_good_chain(GoodPair(3.0, 0.5), 3, seed)
        gamma = vertex_angles(Chain([chain[2], chain[1], chain[3]]))[0]
        self.assertGreaterEqual(reflection_tension_sum(chain, gamma), -1e-8)

    def test_tension_sum_does_not_decrease(self) -> None:
        pair = GoodPair(3.0, 0.5)
        chain = trace([4.0, 4.0, 4.0], [2.8, 3.0])
        sums = []
        for k in range(1, 51):
            gamma = 0.004 * k
            moved, _ = reflected_end(chain, gamma)
            opened = Chain([chain[0], chain[1], chain[2], moved])
            # Only the angles up to the first that breaks goodness or convexity count.
            if not (is_good_chain(opened, pair) and is_convex(opened)):
                break
            sums.append(reflection_tension_sum(chain, gamma))
        self.assertGreaterEqual(len(sums), 5)
        self.assertNonDecreasing(sums)

    @parameterized.expand([
        (2,),
        (4,),
    ])
    def test_needs_four_points(self, n: int) -> None:
        with self.assertRaises(ValueError):
            reflected_end(sample_good_chain(GoodPair(3.0, 0.5), n, 0), 1.0)

    def test_needs_the_plane(self) -> None:
        with self.assertRaises(ValueError):
            reflected_end(tree_chain([3.0, 3.0, 3.0], [0.5, 0.5]), 1.0)
