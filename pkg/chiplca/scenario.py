"""Scenario documents: JSON files mirroring the Scenario model.

Inventory references inside a document are resolved relative to the
directory of the document before validation.
"""

import copy
import json
import logging
import os.path as osp
import typing as TYPE

from logfunc import logf

from .cli_utils import read_text
from .common import Scenario, validate_scenario
from .ex import FieldError, ScenarioError
from .inventory import load_inventory

_log = logging.getLogger(__name__)

Document = TYPE.Dict[str, TYPE.Any]


def load_document(
    source: TYPE.Union[str, bytes, TYPE.TextIO],
    base_dir: TYPE.Optional[str] = None,
    source_name: TYPE.Optional[str] = None,
) -> Document:
    """Decode a scenario document and absolutise its inventory paths.
    ~source (str | bytes | TextIO): JSON text
    ~base_dir (str | None): directory relative inventory paths refer to
    -> dict: the raw document, not yet validated
    """
    if hasattr(source, 'read'):
        source = source.read()
    try:
        doc = json.loads(source)
    except (ValueError, UnicodeDecodeError) as e:
        raise ScenarioError(
            [FieldError('<document>', None, 'not valid JSON: %s' % e)],
            source_name,
        ) from None
    if not isinstance(doc, dict):
        raise ScenarioError(
            [
                FieldError(
                    '<document>', type(doc).__name__, 'expected a JSON object'
                )
            ],
            source_name,
        )
    chips = doc.get('chips')
    if base_dir is not None and isinstance(chips, list):
        doc = copy.deepcopy(doc)
        for entry in doc['chips']:
            ref = entry.get('inventory') if isinstance(entry, dict) else None
            if isinstance(ref, str) and not osp.isabs(ref):
                entry['inventory'] = osp.normpath(osp.join(base_dir, ref))
    return doc


def resolve_inventory(ref: str):
    return load_inventory(osp.abspath(ref))


def scenario_from_document(
    doc: TYPE.Mapping[str, TYPE.Any], source_name: TYPE.Optional[str] = None
) -> Scenario:
    return validate_scenario(doc, loader=resolve_inventory, source=source_name)


@logf(max_str_len=60)
def parse_scenario(
    source: TYPE.Union[str, bytes, TYPE.TextIO],
    base_dir: TYPE.Optional[str] = None,
    source_name: TYPE.Optional[str] = None,
) -> Scenario:
    """Deserialize a scenario document and validate it.
    -> Scenario: resolved scenario
    Raises ScenarioError listing every problem (unknown keys included).
    """
    return scenario_from_document(
        load_document(source, base_dir, source_name), source_name
    )


def read_document(path: str) -> Document:
    return load_document(read_text(path), osp.dirname(osp.abspath(path)), path)


def load_scenario(path: str) -> Scenario:
    """Read, parse and validate the scenario file at path."""
    _log.info('loading scenario %s', path)
    return scenario_from_document(read_document(path), path)
