import logging
import unittest
from typing import Iterable, Sequence


class TestCase(unittest.TestCase):
    @classmethod
    def setUpClass(cls) -> None:
        logging.disable(logging.CRITICAL)

    @classmethod
    def tearDownClass(cls) -> None:
        logging.disable(logging.NOTSET)

    def assertAllClose(self, expected: Iterable[float], actual: Iterable[float], tolerance: float = 1e-9) -> None:
        expected = list(expected)
        actual = list(actual)
        self.assertEqual(len(expected), len(actual), 'The sequences have different lengths.')
        for index, (left, right) in enumerate(zip(expected, actual)):
            if abs(left - right) > tolerance:
                self.fail('Item %d differs: %r != %r within %r.' % (index, left, right, tolerance))

    def assertNonIncreasing(self, values: Sequence[float], tolerance: float = 1e-9) -> None:
        for index in range(1, len(values)):
            if values[index] > values[index - 1] + tolerance:
                self.fail('Item %d increases from %r to %r.' % (index, values[index - 1], values[index]))

    def assertNonDecreasing(self, values: Sequence[float], tolerance: float = 1e-9) -> None:
        for index in range(1, len(values)):
            if values[index] < values[index - 1] - tolerance:
                self.fail('Item %d decreases from %r to %r.' % (index, values[index - 1], values[index]))
