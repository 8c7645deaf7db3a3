"""Process-inventory CSV parsing and material aggregation.

Inventory files hold one fabrication step per row:

    index,name,category,energy_kwh,materials

materials is a ';'-separated list of name:class:grams triples (may be
empty). Lines starting with '#' are comments; a '# technology: NAME'
comment names the technology.
"""

import csv
import logging
import math
import os.path as osp
import typing as TYPE
from collections import defaultdict
from functools import lru_cache

from logfunc import logf
from pydantic import Field, ValidationError

from . import config
from .cli_utils import read_text
from .common import (
    Category,
    MaterialClass,
    MaterialFlow,
    ProcessInventory,
    ProcessStep,
    _Frozen,
)
from .ex import InventoryError, LineError

_log = logging.getLogger(__name__)

_TECH_PREFIX = 'technology:'


class MaterialTotal(_Frozen):
    material: str
    material_class: MaterialClass
    grams: float = Field(ge=0)
    steps: int = Field(ge=0)


class CategoryTotal(_Frozen):
    category: Category
    steps: int = Field(ge=0)
    energy: float = Field(ge=0)


class MaterialSummary(_Frozen):
    """Per-wafer material and energy totals of an inventory."""

    technology_name: str
    materials: TYPE.Tuple[MaterialTotal, ...] = ()
    class_totals: TYPE.Dict[MaterialClass, float] = {}
    categories: TYPE.Tuple[CategoryTotal, ...] = ()
    step_count: int = 0
    total_energy: float = 0.0

    def grams(self, material: str) -> float:
        return math.fsum(
            m.grams for m in self.materials if m.material == material
        )


def _parse_materials(cell: str) -> TYPE.List[MaterialFlow]:
    flows = []
    for item in cell.split(';'):
        item = item.strip()
        if not item:
            continue
        parts = [p.strip() for p in item.split(':')]
        if len(parts) != 3:
            raise ValueError('material %r is not name:class:grams' % item)
        name, cls, grams = parts
        try:
            mass = float(grams)
        except ValueError:
            raise ValueError(
                'material %r has non-numeric grams %r' % (name, grams)
            )
        if not math.isfinite(mass) or mass < 0:
            raise ValueError(
                'material %r has invalid grams %r' % (name, grams)
            )
        try:
            mclass = MaterialClass(cls)
        except ValueError:
            raise ValueError(
                'material %r has unknown class %r (expected one of %s)'
                % (name, cls, ', '.join(c.value for c in MaterialClass))
            )
        flows.append(
            MaterialFlow(material=name, mass=mass, material_class=mclass)
        )
    return flows


def _parse_row(cells: TYPE.List[str]) -> ProcessStep:
    if len(cells) != len(config.INVENTORY_HEADER):
        raise ValueError(
            'expected %d columns, got %d'
            % (len(config.INVENTORY_HEADER), len(cells))
        )
    index, name, category, energy, materials = [c.strip() for c in cells]
    problems = []
    try:
        idx = int(index)
        if idx <= 0:
            problems.append('index must be a positive integer, got %r' % index)
    except ValueError:
        idx = None
        problems.append('index must be a positive integer, got %r' % index)
    try:
        cat = Category(category)
    except ValueError:
        cat = None
        problems.append(
            'unknown category %r (expected one of %s)'
            % (category, ', '.join(c.value for c in Category))
        )
    try:
        kwh = float(energy)
        if not math.isfinite(kwh) or kwh < 0:
            problems.append(
                'energy_kwh must be a finite value >= 0, got %r' % energy
            )
    except ValueError:
        kwh = None
        problems.append('energy_kwh is not a number: %r' % energy)
    try:
        flows = _parse_materials(materials)
    except ValueError as e:
        problems.append(str(e))
    if problems:
        raise ValueError('; '.join(problems))
    return ProcessStep(
        index=idx, name=name, category=cat, energy=kwh, materials=tuple(flows)
    )


@logf(max_str_len=60)
def parse_inventory(
    source: TYPE.Union[str, bytes, TYPE.TextIO],
    technology_name: TYPE.Optional[str] = None,
    source_name: TYPE.Optional[str] = None,
) -> ProcessInventory:
    """Parse an inventory CSV document.
    ~source (str | bytes | TextIO): the document; bytes must be UTF-8
    ~technology_name (str | None): used when the file has no
        '# technology:' comment
    ~source_name (str | None): file name quoted in errors
    -> ProcessInventory
    Raises InventoryError with every row-level problem and its line number.
    """
    if hasattr(source, 'read'):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        try:
            source = bytes(source).decode('utf-8')
        except UnicodeDecodeError as e:
            raise InventoryError(
                [LineError(0, 'not valid UTF-8: %s' % e)], source_name
            ) from None
    if source.startswith('\ufeff'):
        source = source[1:]

    errors: TYPE.List[LineError] = []
    steps: TYPE.List[ProcessStep] = []
    file_name: TYPE.Optional[str] = None
    header_seen = False
    seen_index: TYPE.Dict[int, int] = {}
    for lineno, line in enumerate(source.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith('#'):
            comment = stripped.lstrip('#').strip()
            if comment.lower().startswith(_TECH_PREFIX) and file_name is None:
                file_name = comment[len(_TECH_PREFIX):].strip() or None
            continue
        try:
            cells = next(csv.reader([line], strict=True))
        except csv.Error as e:
            errors.append(LineError(lineno, 'malformed CSV: %s' % e))
            continue
        if not header_seen:
            header_seen = True
            if tuple(c.strip() for c in cells) != config.INVENTORY_HEADER:
                errors.append(
                    LineError(
                        lineno,
                        'header must be %r, got %r'
                        % (','.join(config.INVENTORY_HEADER), line),
                    )
                )
                break
            continue
        try:
            step = _parse_row(cells)
        except (ValueError, ValidationError) as e:
            errors.append(LineError(lineno, str(e)))
            continue
        if step.index in seen_index:
            errors.append(
                LineError(
                    lineno,
                    'duplicate index %d (first on line %d)'
                    % (step.index, seen_index[step.index]),
                )
            )
            continue
        seen_index[step.index] = lineno
        steps.append(step)

    if not header_seen:
        errors.insert(0, LineError(0, 'empty inventory: no header row'))
    elif not steps and not errors:
        errors.append(LineError(0, 'inventory has no steps'))
    if errors:
        raise InventoryError(errors, source_name)
    inv = ProcessInventory(
        technology_name=file_name or technology_name or 'unnamed',
        steps=tuple(steps),
    )
    _log.debug(
        'parsed %d steps (%r kWh) from %s',
        len(inv),
        inv.total_energy,
        source_name,
    )
    return inv


@lru_cache(maxsize=32)
def load_inventory(path: str) -> ProcessInventory:
    """Parse the inventory file at path (cached per path). Files without a
    technology comment are named after their file stem."""
    stem = osp.splitext(osp.basename(path))[0]
    inv = parse_inventory(read_text(path), source_name=path)
    if inv.technology_name == 'unnamed':
        inv = inv.model_copy(update={'technology_name': stem})
    return inv


@logf()
def aggregate_materials(inv: ProcessInventory) -> MaterialSummary:
    """Sum material flows per (material, class), per class and energy per
    step category. Independent of step order."""
    grams: TYPE.Dict[
        TYPE.Tuple[MaterialClass, str], TYPE.List[float]
    ] = defaultdict(list)
    by_cat: TYPE.Dict[Category, TYPE.List[float]] = defaultdict(list)
    for step in inv.steps:
        by_cat[step.category].append(step.energy)
        for flow in step.materials:
            grams[(flow.material_class, flow.material)].append(flow.mass)

    materials = tuple(
        MaterialTotal(
            material=name, material_class=cls, grams=math.fsum(v), steps=len(v)
        )
        for (cls, name), v in sorted(
            grams.items(), key=lambda kv: (kv[0][0].value, kv[0][1])
        )
    )
    class_totals: TYPE.Dict[MaterialClass, float] = {}
    for cls in MaterialClass:
        members = [m.grams for m in materials if m.material_class is cls]
        if members:
            class_totals[cls] = math.fsum(members)
    categories = tuple(
        CategoryTotal(
            category=cat, steps=len(by_cat[cat]), energy=math.fsum(by_cat[cat])
        )
        for cat in Category
        if cat in by_cat
    )
    return MaterialSummary(
        technology_name=inv.technology_name,
        materials=materials,
        class_totals=class_totals,
        categories=categories,
        step_count=len(inv),
        total_energy=inv.total_energy,
    )
