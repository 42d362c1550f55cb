import itertools
import json
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import yaml

from avalanche.catspaces import Backend
from avalanche.chains import GoodPair
from avalanche.error import UserFacingError, ContextError, ensure_context, NotGood

PathLike = Union[str, Path]

SUITES = ('ap', 'cat', 'matrix', 'lemmas')
FORMATS = ('jsonl', 'csv')


class ConfigurationError(UserFacingError, ContextError, ValueError):
    pass


def _dictionary_margin(c: float) -> float:
    return math.log(4) + math.log(c / (c - 1))


def _load_number(dumped: Any, minimum: Optional[float] = None) -> float:
    if isinstance(dumped, bool) or not isinstance(dumped, (int, float)):
        raise ConfigurationError('%r is not a number.' % (dumped,))
    number = float(dumped)
    if not math.isfinite(number):
        raise ConfigurationError('%r is not a finite number.' % (dumped,))
    if minimum is not None and number < minimum:
        raise ConfigurationError('%r must be at least %r.' % (dumped, minimum))
    return number


def _load_integer(dumped: Any, minimum: int) -> int:
    if isinstance(dumped, bool) or not isinstance(dumped, int):
        raise ConfigurationError('%r is not an integer.' % (dumped,))
    if dumped < minimum:
        raise ConfigurationError('%d must be at least %d.' % (dumped, minimum))
    return dumped


def _load_list(dumped: Any) -> List[Any]:
    if not isinstance(dumped, list):
        raise ConfigurationError('%r is not a list.' % (dumped,))
    if not dumped:
        raise ConfigurationError('The list must not be empty.')
    return dumped


def _load_choice(dumped: Any, choices: Sequence[str]) -> str:
    if dumped not in choices:
        raise ConfigurationError('%r is not one of %s.' % (dumped, ', '.join(choices)))
    return dumped


def load_pair(a: Any, b: Any) -> Tuple[float, float]:
    """
    Load a good pair, raising ConfigurationError if sinh(a - b) > 2 sinh(a/2) fails.
    """
    a = _load_number(a, 0.0)
    b = _load_number(b, 0.0)
    try:
        GoodPair(a, b)
    except NotGood as error:
        raise ConfigurationError(str(error)) from error
    return a, b


def _load_pairs(dumped: Any) -> List[Tuple[float, float]]:
    pairs = []
    for index, dumped_pair in enumerate(_load_list(dumped)):
        with ensure_context('at index %d' % index):
            if not isinstance(dumped_pair, list) or len(dumped_pair) != 2:
                raise ConfigurationError('A pair must be a list of two numbers, [a, b], but got %r.' % (dumped_pair,))
            pairs.append(load_pair(*dumped_pair))
    return pairs


def _load_grid(dumped: Any) -> List[Tuple[float, float]]:
    if not isinstance(dumped, dict) or set(dumped) != {'a', 'b'}:
        raise ConfigurationError('A grid must be a mapping with exactly the keys "a" and "b".')
    axes = {}
    for key in ('a', 'b'):
        with ensure_context('`%s`' % key):
            axes[key] = [_load_number(value, 0.0) for value in _load_list(dumped[key])]
    pairs = []
    for a, b in itertools.product(axes['a'], axes['b']):
        with ensure_context('at (a, b) = (%r, %r)' % (a, b)):
            pairs.append(load_pair(a, b))
    return pairs


class SweepConfiguration:
    """
    Describe a verification sweep: the good pairs and chain sizes forming its grid, and how to draw and report samples.
    """

    def __init__(self):
        self.pairs: List[Tuple[float, float]] = [(3.0, 0.5), (4.0, 0.5), (4.0, 1.0), (5.0, 1.0)]
        self.ns: List[int] = [3, 5, 10]
        self.samples = 20
        self.seed = 0
        self.backend = Backend.H2
        self.suite = 'ap'
        self.format = 'jsonl'
        self.output: Optional[Path] = None
        self.jobs = 1
        self.c = 2.0

    def load(self, dumped_configuration: Any) -> None:
        """
        Validate the dumped configuration and load it into self.

        Raises
        ------
        avalanche.config.ConfigurationError
        """
        if not isinstance(dumped_configuration, dict):
            raise ConfigurationError('A sweep configuration must be a mapping.')
        known = {'pairs', 'grid', 'ns', 'samples', 'seed', 'backend', 'suite', 'format', 'output', 'jobs', 'c'}
        unknown = set(dumped_configuration) - known
        if unknown:
            raise ConfigurationError('Unknown configuration keys: %s.' % ', '.join(sorted(map(str, unknown))))
        if 'pairs' in dumped_configuration and 'grid' in dumped_configuration:
            raise ConfigurationError('Give either `pairs` or `grid`, but not both.')

        loaders: Dict[str, Callable[[Any], None]] = {
            'pairs': self._load_pairs,
            'grid': self._load_grid,
            'ns': self._load_ns,
            'samples': self._load_samples,
            'seed': self._load_seed,
            'backend': self._load_backend,
            'suite': self._load_suite,
            'format': self._load_format,
            'output': self._load_output,
            'jobs': self._load_jobs,
            'c': self._load_c,
        }
        for key, loader in loaders.items():
            if key in dumped_configuration:
                with ensure_context('`%s`' % key):
                    loader(dumped_configuration[key])
        self.assert_consistent()

    def _load_pairs(self, dumped: Any) -> None:
        self.pairs = _load_pairs(dumped)

    def _load_grid(self, dumped: Any) -> None:
        self.pairs = _load_grid(dumped)

    def _load_ns(self, dumped: Any) -> None:
        ns = []
        for index, n in enumerate(_load_list(dumped)):
            with ensure_context('at index %d' % index):
                ns.append(_load_integer(n, 2))
        self.ns = ns

    def _load_samples(self, dumped: Any) -> None:
        self.samples = _load_integer(dumped, 1)

    def _load_seed(self, dumped: Any) -> None:
        self.seed = _load_integer(dumped, 0)

    def _load_backend(self, dumped: Any) -> None:
        self.backend = Backend(_load_choice(dumped, [backend.value for backend in Backend]))

    def _load_suite(self, dumped: Any) -> None:
        self.suite = _load_choice(dumped, SUITES)

    def _load_format(self, dumped: Any) -> None:
        self.format = _load_choice(dumped, FORMATS)

    def _load_output(self, dumped: Any) -> None:
        if dumped is None:
            self.output = None
            return
        if not isinstance(dumped, str):
            raise ConfigurationError('%r is not a file path.' % (dumped,))
        self.output = Path(dumped).expanduser()

    def _load_jobs(self, dumped: Any) -> None:
        self.jobs = _load_integer(dumped, 1)

    def _load_c(self, dumped: Any) -> None:
        c = _load_number(dumped)
        if not c > 1:
            raise ConfigurationError('The dictionary constant c must exceed 1, but got %r.' % c)
        self.c = c

    def assert_consistent(self) -> None:
        """
        Check the requirements that span several keys.
        """
        if self.suite in ('matrix', 'lemmas') and self.backend is not Backend.H2:
            raise ConfigurationError('The %s suite only runs in the hyperbolic plane, but the backend is %s.' % (self.suite, self.backend.value))
        if self.suite == 'matrix':
            margin = _dictionary_margin(self.c)
            for a, b in self.pairs:
                if not a - 2 * b > margin:
                    raise ConfigurationError('The matrix suite needs a - 2b > log 4 + log(c/(c - 1)) = %r for c = %r, but (%r, %r) fails it.' % (margin, self.c, a, b))

    def dump(self) -> Dict[str, Any]:
        """
        Dump this configuration to a portable format.
        """
        dumped: Dict[str, Any] = {
            'pairs': [[a, b] for a, b in self.pairs],
            'ns': list(self.ns),
            'samples': self.samples,
            'seed': self.seed,
            'backend': self.backend.value,
            'suite': self.suite,
            'format': self.format,
            'jobs': self.jobs,
            'c': self.c,
        }
        if self.output is not None:
            dumped['output'] = str(self.output)
        return dumped

    def read(self, configuration_file_path: PathLike) -> None:
        configuration_file_path = Path(configuration_file_path)
        if configuration_file_path.suffix not in _CONFIGURATION_FORMATS:
            raise ConfigurationError('Unknown file format "%s". Supported formats are: %s.' % (configuration_file_path.suffix, ', '.join(sorted(CONFIGURATION_FORMATS))))
        with ensure_context('in %s' % configuration_file_path.resolve()):
            with open(configuration_file_path, encoding='utf-8') as f:
                read_configuration = f.read()
            self.load(_CONFIGURATION_FORMATS[configuration_file_path.suffix].loader(read_configuration))

    def write(self, configuration_file_path: PathLike) -> None:
        configuration_file_path = Path(configuration_file_path)
        if configuration_file_path.suffix not in _CONFIGURATION_FORMATS:
            raise ConfigurationError('Unknown file format "%s". Supported formats are: %s.' % (configuration_file_path.suffix, ', '.join(sorted(CONFIGURATION_FORMATS))))
        configuration_file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(configuration_file_path, mode='w', encoding='utf-8') as f:
            f.write(_CONFIGURATION_FORMATS[configuration_file_path.suffix].dumper(self))


def _from_json(configuration_json: str) -> Any:
    try:
        return json.loads(configuration_json)
    except json.JSONDecodeError as e:
        raise ConfigurationError('Invalid JSON: %s.' % e)


def _from_yaml(configuration_yaml: str) -> Any:
    try:
        return yaml.safe_load(configuration_yaml)
    except yaml.YAMLError as e:
        raise ConfigurationError('Invalid YAML: %s.' % e)


def _to_json(configuration: SweepConfiguration) -> str:
    return json.dumps(configuration.dump(), indent=4)


def _to_yaml(configuration: SweepConfiguration) -> str:
    return yaml.safe_dump(configuration.dump())


class _Format:
    # Loaders take the configuration in its dumped format, as a string, and return the parsed document or raise
    # ConfigurationError.
    Loader = Callable[[str], Any]
    # Dumpers take a configuration and return a single string.
    Dumper = Callable[[SweepConfiguration], str]

    def __init__(self, loader: Loader, dumper: Dumper):
        self.loader = loader
        self.dumper = dumper


_CONFIGURATION_FORMATS: Dict[str, _Format] = {
    '.json': _Format(_from_json, _to_json),
    '.yaml': _Format(_from_yaml, _to_yaml),
    '.yml': _Format(_from_yaml, _to_yaml),
}

CONFIGURATION_FORMATS = set(_CONFIGURATION_FORMATS.keys())


def acceptance_configurations() -> Dict[str, SweepConfiguration]:
    """
    Load the named acceptance sweeps shipped with the package.

    Raises
    ------
    avalanche.config.ConfigurationError
    """
    file_path = Path(__file__).parent / 'assets' / 'acceptance.yaml'
    with ensure_context('in %s' % file_path):
        with open(file_path, encoding='utf-8') as f:
            dumped = _from_yaml(f.read())
        if not isinstance(dumped, dict):
            raise ConfigurationError('The acceptance sweeps must be a mapping of names to sweep configurations.')
        configurations = {}
        for name, dumped_configuration in dumped.items():
            with ensure_context('`%s`' % name):
                configuration = SweepConfiguration()
                configuration.load(dumped_configuration)
                configurations[name] = configuration
        return configurations
