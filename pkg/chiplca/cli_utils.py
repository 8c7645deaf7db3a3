import logging
import os
import os.path as osp
import typing as TYPE
from pathlib import Path

logger = logging.getLogger(__name__)


def read_text(path: TYPE.Union[str, Path]) -> str:
    """Read a UTF-8 text file; CRLF is left for the parsers to handle.
    ~path (str | Path): file to read
    -> str: the file contents
    """
    with open(path, 'r', encoding='utf-8', newline='') as f:
        return f.read()


def write_output(path: TYPE.Union[str, Path], text: str) -> str:
    """Safely write text to path, replacing any previous file.
    ~path (str | Path): destination; parent directories are created
    ~text (str): contents
    -> str: the path written
    """
    path = str(path)
    parent = osp.dirname(osp.abspath(path))
    if not osp.isdir(parent):
        logger.info(f"Creating output directory '{parent}'")
        os.makedirs(parent, exist_ok=True)
    tmp = '%s.tmp' % path
    with open(tmp, 'w', encoding='utf-8', newline='') as f:
        f.write(text)
    os.replace(tmp, path)
    return path


def parse_values(raw: str) -> TYPE.List[float]:
    """'1,2, 4.5' -> [1.0, 2.0, 4.5]"""
    vals = [v.strip() for v in raw.split(',')]
    if not vals or any(v == '' for v in vals):
        raise ValueError(raw)
    return [float(v) for v in vals]


def parse_grid(raw: str) -> TYPE.Tuple[float, float, int, bool]:
    """'START:STOP:COUNT[:log]' -> (start, stop, count, log)"""
    parts = raw.split(':')
    if len(parts) not in (3, 4):
        raise ValueError(raw)
    log = False
    if len(parts) == 4:
        if parts[3].strip().lower() not in ('log', 'lin', 'linear'):
            raise ValueError(raw)
        log = parts[3].strip().lower() == 'log'
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1 or (log and (start <= 0 or stop <= 0)):
        raise ValueError(raw)
    return start, stop, count, log


def dash_arg(arg: str) -> TYPE.Set[str]:
    """Adds - and -- to possible cli arg aliases"""
    return {arg, '-%s' % arg, '--%s' % arg}


_ALIASES = {
    'validate': {'val', 'check'},
    'yield': {'y'},
    'calibrate': {'cal', 'calib'},
    'dpw': {'gross'},
    'assess': {'as'},
    'compare': {'cmp'},
    'whatif': {'wi', 'what-if'},
    'sweep': {'sw'},
    'materials': {'mat', 'inventory'},
}


def parse_cli_arg_aliases(argv_args: TYPE.List[str]) -> TYPE.List[str]:
    """Turns the subcommand alias in argv_args[0] into its canonical form."""
    if not argv_args or not isinstance(argv_args[0], str):
        return argv_args

    alias_map = {
        cmd: set().union(*[dash_arg(a) for a in aliases | {cmd}]) - {cmd}
        for cmd, aliases in _ALIASES.items()
    }
    first_arg = argv_args[0].lower()
    for cmd, aliases in alias_map.items():
        if first_arg in aliases:
            return [cmd] + list(argv_args[1:])
    return argv_args
