import io
from logging import Logger, CRITICAL, ERROR, WARNING, INFO, DEBUG
from unittest import TestCase
from unittest.mock import patch

from parameterized import parameterized

from avalanche.logging import CliHandler, set_verbosity


class CliHandlerTest(TestCase):
    @parameterized.expand([
        ('\033[91mThe AP bound is violated!\033[0m\n',
         'The AP bound is violated!', CRITICAL),
        ('\033[91mThe AP bound is violated!\033[0m\n',
         'The AP bound is violated!', ERROR),
        ('\033[93mThe AP bound is violated!\033[0m\n',
         'The AP bound is violated!', WARNING),
        ('\033[92mThe AP bound is violated!\033[0m\n',
         'The AP bound is violated!', INFO),
        ('\033[97mThe AP bound is violated!\033[0m\n',
         'The AP bound is violated!', DEBUG),
    ])
    @patch('sys.stderr', new_callable=io.StringIO)
    def test_log(self, expected: str, message: str, level: int, stderr: io.StringIO):
        logger = Logger(__name__)
        logger.addHandler(CliHandler())
        logger.log(level, message)
        self.assertEqual(expected, stderr.getvalue())

    @patch('sys.stderr', new_callable=io.StringIO)
    def test_log_without_color(self, stderr: io.StringIO):
        logger = Logger(__name__)
        logger.addHandler(CliHandler(color=False))
        logger.error('The AP bound is violated!')
        self.assertEqual('The AP bound is violated!\n', stderr.getvalue())


class SetVerbosityTest(TestCase):
    @parameterized.expand([
        (INFO, False, False),
        (DEBUG, True, False),
        (WARNING, False, True),
    ])
    def test_set_verbosity(self, expected: int, verbose: bool, quiet: bool):
        logger = Logger(__name__)
        set_verbosity(logger, verbose, quiet)
        self.assertEqual(expected, logger.level)

    def test_verbose_and_quiet(self):
        with self.assertRaises(ValueError):
            set_verbosity(Logger(__name__), True, True)
