import json
import logging
import os
import sys
from contextlib import contextmanager, suppress
from functools import wraps
from pathlib import Path
from typing import Any, Iterator, Optional, Sequence, Tuple

import click
from click import Context, get_current_context

from avalanche import about
from avalanche.catspaces import Backend, sample_good_chain_in
from avalanche.chains import GoodPair
from avalanche.config import ConfigurationError, SweepConfiguration, SUITES, FORMATS, load_pair
from avalanche.error import UserFacingError, ensure_context
from avalanche.cocycle import mat_chain_from
from avalanche.json import dumps, load_document
from avalanche.logging import CliHandler, set_verbosity
from avalanche.table import TABLES, write_table
from avalanche.verify import sweep, verify_document, write_rows, assert_no_violations

SEED_ENVIRONMENT_VARIABLE = 'AVK_SEED'

CONFIGURATION_FILE_NAMES = ('avalanche.json', 'avalanche.yaml', 'avalanche.yml')


@contextmanager
def catch_exceptions() -> Iterator[None]:
    try:
        yield
    except KeyboardInterrupt:
        print('Quitting...')
        sys.exit(0)
    except Exception as e:
        logger = logging.getLogger()
        if isinstance(e, UserFacingError):
            logger.error(str(e))
        else:
            logger.exception(e)
        sys.exit(2 if isinstance(e, ConfigurationError) else 1)


def global_command(f):
    @wraps(f)
    @catch_exceptions()
    def _command(*args, **kwargs):
        return f(*args, **kwargs)
    return _command


def configuration_command(f):
    @wraps(f)
    @catch_exceptions()
    def _command(*args, **kwargs):
        return f(get_current_context().obj['configuration'], *args, **kwargs)
    return _command


def _parse_pair(pair: str) -> Tuple[float, float]:
    with ensure_context('in --pair %s' % pair):
        try:
            a, b = (float(value) for value in pair.split(','))
        except ValueError:
            raise ConfigurationError('A pair must be given as a,b, for example 4,0.5.')
        return load_pair(a, b)


def _environment_seed() -> Optional[int]:
    seed = os.environ.get(SEED_ENVIRONMENT_VARIABLE)
    if seed is None:
        return None
    try:
        parsed = int(seed)
    except ValueError:
        raise ConfigurationError('%s must be a non-negative integer, but is "%s".' % (SEED_ENVIRONMENT_VARIABLE, seed))
    if parsed < 0:
        raise ConfigurationError('%s must be a non-negative integer, but is "%s".' % (SEED_ENVIRONMENT_VARIABLE, seed))
    return parsed


def _read_configuration(configuration_file_path: Optional[str]) -> SweepConfiguration:
    configuration = SweepConfiguration()
    if configuration_file_path is None:
        try_configuration_file_paths = [Path.cwd() / file_name for file_name in CONFIGURATION_FILE_NAMES]
    else:
        try_configuration_file_paths = [Path.cwd() / configuration_file_path]
    for try_configuration_file_path in try_configuration_file_paths:
        with suppress(FileNotFoundError):
            configuration.read(try_configuration_file_path)
            logging.getLogger().info('Loaded the configuration from %s.' % try_configuration_file_path)
            return configuration
    if configuration_file_path is not None:
        raise ConfigurationError('Configuration file "%s" does not exist.' % configuration_file_path)
    return configuration


@click.group()
@click.option('--configuration', '-c', 'configuration_file_path', help='The path to a sweep configuration file. Defaults to avalanche.json|yaml|yml in the current working directory.')
@click.option('--verbose', '-v', is_flag=True, help='Show debug messages.')
@click.option('--quiet', '-q', is_flag=True, help='Only show warnings and errors.')
@click.version_option(about.version(), prog_name='Avalanche')
@click.pass_context
def main(ctx: Context, configuration_file_path: Optional[str], verbose: bool, quiet: bool) -> None:
    ctx.ensure_object(dict)
    logger = logging.getLogger()
    if not any(isinstance(handler, CliHandler) for handler in logger.handlers):
        logger.addHandler(CliHandler())
    with catch_exceptions():
        if verbose and quiet:
            raise ConfigurationError('--verbose and --quiet cannot be combined.')
        set_verbosity(logger, verbose, quiet)
        ctx.obj['configuration'] = _read_configuration(configuration_file_path)


def _override(
    configuration: SweepConfiguration,
    pairs: Sequence[str],
    ns: Sequence[int],
    samples: Optional[int],
    seed: Optional[int],
    backend: Optional[str],
    suite: Optional[str] = None,
    output_format: Optional[str] = None,
    out: Optional[str] = None,
    jobs: Optional[int] = None,
) -> None:
    if pairs:
        configuration.pairs = [_parse_pair(pair) for pair in pairs]
    if ns:
        configuration.ns = list(ns)
    if samples is not None:
        configuration.samples = samples
    if seed is not None:
        configuration.seed = seed
    environment_seed = _environment_seed()
    if environment_seed is not None:
        configuration.seed = environment_seed
    if backend is not None:
        configuration.backend = Backend(backend)
    if suite is not None:
        configuration.suite = suite
    if output_format is not None:
        configuration.format = output_format
    if out is not None:
        configuration.output = Path(out)
    if jobs is not None:
        configuration.jobs = jobs


_backend_option = click.option('--backend', type=click.Choice([backend.value for backend in Backend]), help='The space to draw chains in.')
_seed_option = click.option('--seed', type=click.IntRange(min=0), help='The root seed. %s overrides it.' % SEED_ENVIRONMENT_VARIABLE)


@main.command(help='Verify the Avalanche Principle and its companion properties on sampled good chains.')
@click.option('--pair', 'pairs', multiple=True, help='A good pair a,b. Repeat for more pairs.')
@click.option('--n', 'ns', multiple=True, type=click.IntRange(min=2), help='A number of steps. Repeat for more sizes.')
@click.option('--samples', type=click.IntRange(min=1), help='The number of chains per pair and size.')
@_seed_option
@_backend_option
@click.option('--suite', type=click.Choice(SUITES), help='The properties to check.')
@click.option('--out', 'out', type=click.Path(dir_okay=False), help='The file to write results to. Defaults to standard output.')
@click.option('--format', 'output_format', type=click.Choice(FORMATS), help='The result format.')
@click.option('--jobs', type=click.IntRange(min=1), help='The number of worker processes.')
@click.option('--from-file', 'from_file', type=click.Path(exists=True, dir_okay=False), help='Verify the single chain or matrix chain in this JSON document instead of sampling.')
@configuration_command
def verify(
    configuration: SweepConfiguration,
    pairs: Tuple[str, ...],
    ns: Tuple[int, ...],
    samples: Optional[int],
    seed: Optional[int],
    backend: Optional[str],
    suite: Optional[str],
    out: Optional[str],
    output_format: Optional[str],
    jobs: Optional[int],
    from_file: Optional[str],
) -> None:
    _override(configuration, pairs, ns, samples, seed, backend, suite, output_format, out, jobs)
    logging.getLogger().debug('Verifying with %s.' % ', '.join('%s %s' % item for item in about.environment().items()))
    if from_file is None:
        rows = sweep(configuration)
    else:
        with ensure_context('in %s' % Path(from_file).resolve()):
            document = _read_document(from_file)
            rows = [verify_document(document, configuration.suite, configuration.c)]
    if configuration.output is None:
        write_rows(rows, configuration.format, sys.stdout)
    else:
        configuration.output.parent.mkdir(parents=True, exist_ok=True)
        with open(configuration.output, mode='w', encoding='utf-8', newline='') as f:
            write_rows(rows, configuration.format, f)
        logging.getLogger().info('Wrote %d rows to %s.' % (len(rows), configuration.output))
    assert_no_violations(rows)


def _read_document(file_path: str) -> Any:
    with open(file_path, encoding='utf-8') as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigurationError('Invalid JSON: %s.' % e)
    return load_document(data)


@main.command(help='Generate a good chain, or the matrix chain whose orbit it is, as JSON.')
@click.option('--pair', help='The good pair a,b. Defaults to the first configured pair.')
@click.option('--n', 'n', type=click.IntRange(min=2), help='The number of steps. Defaults to the first configured size.')
@_seed_option
@_backend_option
@click.option('--matrices', is_flag=True, help='Emit the SL(2, R) matrices whose orbit is the chain. Needs the h2 backend.')
@configuration_command
def generate(configuration: SweepConfiguration, pair: Optional[str], n: Optional[int], seed: Optional[int], backend: Optional[str], matrices: bool) -> None:
    _override(configuration, [pair] if pair else [], [n] if n else [], None, seed, backend)
    if matrices and configuration.backend is not Backend.H2:
        raise ConfigurationError('--matrices needs the h2 backend, but the backend is %s.' % configuration.backend.value)
    a, b = configuration.pairs[0]
    good_pair = GoodPair(a, b)
    chain = sample_good_chain_in(configuration.backend, good_pair, configuration.ns[0], configuration.seed)
    if matrices:
        click.echo(dumps(mat_chain_from(chain), good_pair))
    else:
        click.echo(dumps(chain, good_pair))


@main.command(help='Tabulate an illustrative example as CSV.')
@click.argument('example', type=click.Choice(list(TABLES)))
@global_command
def table(example: str) -> None:
    write_table(example, sys.stdout)
