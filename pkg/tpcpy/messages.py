"""
Message functions used throughout tpcpy.

The functions form a small message API (``message``, ``verbose``, ``debug``, ``warning``,
``fatal``) on top of the standard :mod:`logging` package. Library code never writes to stdout; the
command module decides verbosity with :func:`set_verbosity`.
"""
import logging

TRACE = 5
logging.addLevelName(TRACE, 'TRACE')

_ROOT = 'tpcpy'

__VERBOSITY__ = {'quiet': logging.WARNING,
                 'normal': logging.INFO,
                 'verbose': logging.DEBUG,
                 'trace': TRACE}


def get_logger(name=None):
    """
    Return the logger of a tpcpy module.

    Parameters
    ----------
    name : str, optional
        Dotted module name. Names outside the ``tpcpy`` namespace are placed under it.

    Returns
    -------
    logging.Logger
    """
    if name is None or name == _ROOT:
        return logging.getLogger(_ROOT)

    if not name.startswith(_ROOT + '.'):
        name = _ROOT + '.' + name

    return logging.getLogger(name)


def set_verbosity(level='normal', stream=None):
    """
    Attach a stream handler to the tpcpy logger and set its level.

    Parameters
    ----------
    level : {'quiet', 'normal', 'verbose', 'trace'}
        Verbosity. ``verbose`` shows ``verbose()`` and ``debug(.., 1)``; ``trace`` shows every debug level.
    stream : file-like, optional
        Target stream, default ``sys.stderr``.

    Returns
    -------
    logging.Logger
    """
    try:
        value = __VERBOSITY__[level]
    except KeyError:
        raise ValueError("Unknown verbosity <{0}>, choose one of {1}".format(level, sorted(__VERBOSITY__)))

    logger = get_logger()
    logger.setLevel(value)

    if not any(getattr(h, '_tpcpy', False) for h in logger.handlers):
        handler = logging.StreamHandler(stream)
        handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
        handler._tpcpy = True
        logger.addHandler(handler)

    return logger


def message(text, name=None):
    get_logger(name).info(text)


def verbose(text, name=None):
    get_logger(name).debug(text)


def debug(text, level=1, name=None):
    """
    Log a debug message with a numeric debug level.

    Level 1 maps to ``logging.DEBUG``; higher levels map to ``TRACE``.
    """
    get_logger(name).log(logging.DEBUG if level <= 1 else TRACE, text)


def warning(text, name=None):
    get_logger(name).warning(text)


def fatal(text, exc=None, name=None):
    """
    Log an error and raise it.

    Parameters
    ----------
    text : str
        Error message.
    exc : type, optional
        Exception class to raise. Default is :class:`tpcpy.exceptions.TpcError`.
    name : str, optional
        Logger name.

    Raises
    ------
    exc
    """
    from tpcpy.exceptions import TpcError

    get_logger(name).error(text)
    raise (exc or TpcError)(text)
