import typing as TYPE

import numpy as np
from pyshared import truncstr

from . import config

NAME_WIDTH = 28


def fmt_kwh(value: float, decimals: TYPE.Optional[int] = None) -> str:
    """Fixed decimals, falling back to one significant digit for small
    non-zero values that would otherwise render as 0."""
    decimals = config.DECIMALS if decimals is None else decimals
    s = '%.*f' % (decimals, value)
    if value != 0 and float(s) == 0:
        s = '%.1g' % value
    return s


def fmt_factor(value: TYPE.Optional[float], decimals: int = 1) -> str:
    if value is None:
        return '-'
    if value != 0 and abs(value) < 10 ** -decimals:
        return '%.3gX' % value
    return '%.*fX' % (decimals, value)


def fmt_name(name: str, width: int = NAME_WIDTH) -> str:
    """Names longer than width become 'start...end'"""
    if len(name) <= width:
        return name
    return truncstr(name, start_chars=width - 7, end_chars=4)


def grid_values(
    start: float, stop: float, count: int, log: bool = False
) -> TYPE.List[float]:
    """count points from start to stop inclusive, linear or geometric"""
    if count < 1:
        raise ValueError('count must be >= 1, got %r' % count)
    if count == 1:
        return [float(start)]
    if log:
        return [float(v) for v in np.geomspace(start, stop, count)]
    return [float(v) for v in np.linspace(start, stop, count)]


def columns_table(
    rows: TYPE.Sequence[TYPE.Sequence[str]], sep: str = '    '
) -> TYPE.List[str]:
    """Left-justified columns with a dashed rule under the first row."""
    if not rows:
        return []
    ncols = max(len(r) for r in rows)
    padded = [list(r) + [''] * (ncols - len(r)) for r in rows]
    widths = [max(len(r[i]) for r in padded) for i in range(ncols)]
    lines = [sep.join(c.ljust(w) for c, w in zip(padded[0], widths)).rstrip()]
    lines.append(sep.join('-' * w for w in widths))
    for r in padded[1:]:
        lines.append(sep.join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return lines
