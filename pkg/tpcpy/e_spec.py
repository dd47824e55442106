#!/usr/bin/env python

############################################################################
#
# MODULE:       e.spec
# AUTHOR(S):    tpcpy developers
# PURPOSE:      Parse, validate and echo experiment spec files.
#
# COPYRIGHT:    (C) tpcpy developers
#
#               This program is free software under the GNU General
#               Public License (>=v2).
#
#############################################################################
"""
Experiment spec files.

A spec file is flat ``key = value`` text; ``#`` starts a comment, lists are comma separated and empty
values mean "use the default". Numbers are parsed with :mod:`decimal`, so writing a spec back with
:func:`echo_spec` reproduces the values digit for digit.

Example
-------
::

    # noisy grids, 30 x 30 and 50 x 50
    preset = fig-mse
    topology = grid2d
    sizes = 900, 2500
    seed = 7
    sample_paths = 50
"""
import math
from dataclasses import dataclass, fields, replace
from decimal import Decimal, InvalidOperation

from tpcpy import messages as gs
from tpcpy.exceptions import InvalidArgumentError, SpecFileError, SpecValidationError
from tpcpy.g_graph.g_topology import CYCLE, GRID, RGG, TOPOLOGIES, rgg_squares_per_side
from tpcpy.p_protocol.p_twophase import AGGREGATE, normalize_mode

__all__ = ['ExperimentSpec', 'PRESETS', 'FIG_MSE', 'FIG_SCALING', 'SPECTRAL_REPORT', 'CUSTOM', 'RUNTIME_KEYS',
           'preset_defaults', 'parse_spec_text', 'read_spec_file', 'build_spec', 'validate_spec', 'echo_spec',
           'spec_to_dict', 'change_dict_value', 'tuple_multi_string']

FIG_MSE = 'fig-mse'
FIG_SCALING = 'fig-scaling'
SPECTRAL_REPORT = 'spectral-report'
CUSTOM = 'custom'
PRESETS = (FIG_MSE, FIG_SCALING, SPECTRAL_REPORT, CUSTOM)

# Keys that do not influence any result and stay out of result files.
RUNTIME_KEYS = ('outdir', 'workers')

_LIST_KEYS = ('topology', 'sizes')

_NAME = 'e_spec'


@dataclass(frozen=True)
class ExperimentSpec(object):
    """
    Everything needed to regenerate the results of one experiment.

    Attributes
    ----------
    preset : {'fig-mse', 'fig-scaling', 'spectral-report', 'custom'}
    topology : tuple of str
    sizes : tuple of int
        Node counts; grid sizes are perfect squares.
    c : decimal.Decimal
        Square side constant of random geometric graphs.
    delta : decimal.Decimal
    delta_prime : decimal.Decimal or None
        If set, random geometric graphs use ``delta_prime / (log n)^2`` as tolerance.
    sigma2 : decimal.Decimal
    seed : int
    sample_paths : int
    max_outer : int
    dissemination_mode : str
    lambda2_hint : decimal.Decimal
    record_every : int or None
    mc_samples : int
    retry_cap : int
    theta_mean, theta_var : decimal.Decimal
        Initial values are drawn once per ``(seed, n)`` from ``N(theta_mean, theta_var)``.
    target : decimal.Decimal or None
        MSE target of the stopping time; default ``sigma2 * delta``.
    theta_paths : int
        Sample paths, counted from path 0, whose full theta snapshots are written; 0 writes none.
    outdir : str
    workers : int or None
        Worker processes; default is the number of processors.
    """
    preset: str = FIG_MSE
    topology: tuple = (GRID,)
    sizes: tuple = (900, 2500)
    c: Decimal = Decimal('2')
    delta: Decimal = Decimal('0.1')
    delta_prime: Decimal = None
    sigma2: Decimal = Decimal('1')
    seed: int = None
    sample_paths: int = 50
    max_outer: int = 100
    dissemination_mode: str = AGGREGATE
    lambda2_hint: Decimal = Decimal('1')
    record_every: int = None
    mc_samples: int = 10000
    retry_cap: int = 20
    theta_mean: Decimal = Decimal('1')
    theta_var: Decimal = Decimal('1')
    target: Decimal = None
    theta_paths: int = 0
    outdir: str = 'results'
    workers: int = None

    def delta_for(self, topology, n):
        """Tolerance used for one graph."""
        if topology == RGG and self.delta_prime is not None:
            return float(self.delta_prime) / math.log(n) ** 2

        return float(self.delta)

    def target_for(self, topology, n):
        if self.target is not None:
            return float(self.target)

        return float(self.sigma2) * self.delta_for(topology, n)


_FIELDS = tuple(f.name for f in fields(ExperimentSpec))

_PRESETS = {
    FIG_MSE: {'topology': (GRID,), 'sizes': (900, 2500), 'sample_paths': 50, 'max_outer': 100},
    FIG_SCALING: {'topology': (GRID,), 'sizes': (1024, 2500, 4900, 10000), 'sample_paths': 50, 'max_outer': 100},
    SPECTRAL_REPORT: {'topology': (CYCLE, GRID, RGG), 'sizes': (64, 256, 1024)},
    CUSTOM: {'topology': (GRID,), 'sizes': (900,)},
}

_INTEGERS = ('seed', 'sample_paths', 'max_outer', 'record_every', 'mc_samples', 'retry_cap', 'theta_paths',
             'workers')
_DECIMALS = ('c', 'delta', 'delta_prime', 'sigma2', 'lambda2_hint', 'theta_mean', 'theta_var', 'target')


def preset_defaults(preset):
    try:
        return dict(_PRESETS[preset])
    except KeyError:
        raise InvalidArgumentError('Unknown preset <{0}>, choose one of {1}'.format(preset, ', '.join(PRESETS)))


# ----------------------------------------------------------------------------------------------------------------------
# Option dictionaries
# ----------------------------------------------------------------------------------------------------------------------
def change_dict_value(dictionary, old_value, new_value):
    """
    Replace every occurrence of a value in a dictionary.

    Parameters
    ----------
    dictionary : dict
    old_value : str, NoneType, bool
    new_value : str, NoneType, bool

    Returns
    -------
    dict
    """
    for key, value in dictionary.items():
        if value == old_value:
            dictionary[key] = new_value

    return dictionary


def tuple_multi_string(dictionary, keys=None, sep=','):
    """
    Convert values like ``'a, b'`` to ``('a', 'b')``.

    Parameters
    ----------
    dictionary : dict
    keys : sequence of str, optional
        Keys to convert; single values of these keys become one-element tuples. Without ``keys`` only
        values containing ``sep`` are converted.
    sep : str

    Returns
    -------
    dict
    """
    for key, value in dictionary.items():
        if not isinstance(value, str):
            continue

        if keys is None and sep not in value:
            continue
        if keys is not None and key not in keys:
            continue

        dictionary[key] = tuple(part.strip() for part in value.split(sep) if part.strip())

    return dictionary


# ----------------------------------------------------------------------------------------------------------------------
# Parsing
# ----------------------------------------------------------------------------------------------------------------------
def parse_spec_text(text, source='<spec>'):
    """
    Split spec file text into a raw option dictionary of strings.

    Returns
    -------
    dict

    Raises
    ------
    SpecFileError
        Malformed line or repeated key.
    """
    options = {}
    for number, line in enumerate(text.splitlines(), start=1):
        content = line.split('#', 1)[0].strip()
        if not content:
            continue

        key, sep, value = content.partition('=')
        key = key.strip()
        if not sep or not key:
            raise SpecFileError('{0}, line {1}: expected "key = value", got <{2}>'.format(source, number, line.strip()))
        if key in options:
            raise SpecFileError('{0}, line {1}: key <{2}> given twice'.format(source, number, key))

        options[key] = value.strip()

    return options


def read_spec_file(path):
    """Raw option dictionary of a spec file; read failures raise ``SpecFileError(kind='io')``."""
    try:
        with open(path) as fp:
            text = fp.read()
    except (OSError, UnicodeDecodeError) as e:
        raise SpecFileError('Cannot read spec file <{0}>: {1}'.format(path, e), kind='io')

    return parse_spec_text(text, source=str(path))


def build_spec(options=None, overrides=None):
    """
    Assemble and validate a spec.

    Precedence is ``overrides`` > ``options`` > preset defaults > field defaults. Values may be
    strings (spec file) or already typed values (command line).

    Parameters
    ----------
    options : dict, optional
        Raw options of a spec file.
    overrides : dict, optional
        Options from flags or the environment; ``None`` values are ignored.

    Returns
    -------
    ExperimentSpec

    Raises
    ------
    SpecValidationError
        With every violation found.
    """
    raw = dict(options or {})
    raw = change_dict_value(raw, '', None)
    raw = tuple_multi_string(raw, keys=_LIST_KEYS)
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})

    violations = ['unknown key <{0}>'.format(k) for k in raw if k not in _FIELDS]

    preset = raw.get('preset') or FIG_MSE
    if preset not in PRESETS:
        violations.append('preset must be one of {0}, got <{1}>'.format(', '.join(PRESETS), preset))
        preset = FIG_MSE

    values = preset_defaults(preset)
    values['preset'] = preset

    for key, value in raw.items():
        if key not in _FIELDS or key == 'preset' or value is None:
            continue
        try:
            values[key] = _convert(key, value)
        except (ValueError, InvalidOperation, TypeError):
            violations.append('{0} has an invalid value <{1}>'.format(key, value))

    spec = ExperimentSpec(**values)
    violations.extend(_violations(spec))

    if violations:
        raise SpecValidationError(violations)

    return replace(spec, dissemination_mode=normalize_mode(spec.dissemination_mode))


def validate_spec(path, overrides=None):
    """
    Read, parse and validate a spec file.

    Parameters
    ----------
    path : str or path-like
    overrides : dict, optional

    Returns
    -------
    ExperimentSpec

    Raises
    ------
    SpecFileError
        I/O (``kind == 'io'``) or syntax (``kind == 'parse'``) failure.
    SpecValidationError
        Every constraint the spec violates.
    """
    spec = build_spec(read_spec_file(path), overrides)
    gs.debug('spec <{0}> is valid'.format(path), 1, _NAME)

    return spec


def echo_spec(spec, runtime=True):
    """
    Canonical ``key = value`` lines of a spec.

    Parameters
    ----------
    spec : ExperimentSpec
    runtime : bool
        Include the keys that do not affect results (output directory, workers).

    Returns
    -------
    list of str
    """
    return ['{0} = {1}'.format(key, value) for key, value in spec_to_dict(spec, runtime).items()]


def spec_to_dict(spec, runtime=True):
    """Canonical string value of every key, in field order."""
    return {key: _format(getattr(spec, key)) for key in _FIELDS if runtime or key not in RUNTIME_KEYS}


# ----------------------------------------------------------------------------------------------------------------------
# Private Functions
# ----------------------------------------------------------------------------------------------------------------------
def _format(value):
    if value is None:
        return ''
    if isinstance(value, tuple):
        return ', '.join(str(v) for v in value)

    return str(value)


def _convert(key, value):
    if key == 'topology':
        return tuple(str(v) for v in (value if isinstance(value, (tuple, list)) else (value,)))
    if key == 'sizes':
        return tuple(_integer(v) for v in (value if isinstance(value, (tuple, list)) else (value,)))
    if key in _INTEGERS:
        return _integer(value)
    if key in _DECIMALS:
        return value if isinstance(value, Decimal) else Decimal(str(value).strip())

    return str(value).strip()


def _integer(value):
    if isinstance(value, bool):
        raise InvalidArgumentError('expected an integer, got {0!r}'.format(value))
    if isinstance(value, int):
        return value

    try:
        number = Decimal(str(value).strip())
    except InvalidOperation:
        raise InvalidArgumentError('expected an integer, got {0!r}'.format(value))

    if not number.is_finite() or number != number.to_integral_value():
        raise InvalidArgumentError('expected an integer, got {0!r}'.format(value))

    return int(number)


def _violations(spec):
    found = []

    def check(condition, text):
        if not condition:
            found.append(text)

    def finite(value):
        return isinstance(value, Decimal) and value.is_finite()

    check(spec.seed is not None, 'seed is required')
    if spec.seed is not None:
        check(0 <= spec.seed < 2 ** 64, 'seed must be in [0, 2^64)')

    check(finite(spec.delta) and 0 < spec.delta < Decimal('0.5'), 'delta must be in (0, 1/2)')
    if spec.delta_prime is not None:
        check(finite(spec.delta_prime) and spec.delta_prime > 0, 'delta_prime must be > 0')
    check(finite(spec.sigma2) and spec.sigma2 >= 0, 'sigma2 must be >= 0')
    check(finite(spec.c) and spec.c > 0, 'c must be > 0')
    check(finite(spec.lambda2_hint) and spec.lambda2_hint > 0, 'lambda2_hint must be > 0')
    check(finite(spec.theta_mean), 'theta_mean must be finite')
    check(finite(spec.theta_var) and spec.theta_var >= 0, 'theta_var must be >= 0')
    if spec.target is not None:
        check(finite(spec.target) and spec.target > 0, 'target must be > 0')

    check(spec.sample_paths >= 2, 'sample_paths must be >= 2')
    check(spec.max_outer >= 1, 'max_outer must be >= 1')
    check(spec.mc_samples >= 1, 'mc_samples must be >= 1')
    check(spec.retry_cap >= 1, 'retry_cap must be >= 1')
    check(0 <= spec.theta_paths <= spec.sample_paths, 'theta_paths must be in [0, sample_paths]')
    if spec.record_every is not None:
        check(spec.record_every >= 1, 'record_every must be >= 1')
    if spec.workers is not None:
        check(spec.workers >= 1, 'workers must be >= 1')

    try:
        normalize_mode(spec.dissemination_mode)
    except InvalidArgumentError:
        found.append('dissemination_mode must be explicit or aggregate, got <{0}>'.format(spec.dissemination_mode))

    check(len(spec.topology) > 0, 'topology needs at least one entry')
    check(len(spec.sizes) > 0, 'sizes needs at least one entry')

    for topology in spec.topology:
        if topology not in TOPOLOGIES:
            found.append('topology must be one of {0}, got <{1}>'.format(', '.join(TOPOLOGIES), topology))
            continue

        for n in spec.sizes:
            found.extend(_size_violations(topology, n, spec))

    return found


def _size_violations(topology, n, spec):
    if topology == CYCLE:
        return [] if n >= 3 else ['cycle sizes must be >= 3, got {0}'.format(n)]

    if topology == GRID:
        m = math.isqrt(n) if n >= 0 else 0
        if m * m != n or m < 2:
            return ['grid2d sizes must be squares m^2 with m >= 2, got {0}'.format(n)]
        return []

    if n < 2 or not (isinstance(spec.c, Decimal) and spec.c.is_finite() and spec.c > 0):
        return ['rgg sizes must be >= 2, got {0}'.format(n)] if n < 2 else []

    if rgg_squares_per_side(n, float(spec.c)) < 2:
        return ['rgg with n={0}, c={1} has fewer than 2 squares per side'.format(n, spec.c)]

    return []
