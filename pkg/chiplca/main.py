import copy
import logging
import typing as TYPE
from concurrent.futures import ThreadPoolExecutor

from logfunc import logf
from pydantic import Field, model_validator
from pyshared import default_repr

from . import config
from . import msgs as MSGS
from .common import (
    ChipAssessment,
    ChipSpec,
    ComparisonReport,
    InventoryLoader,
    PhaseEnergies,
    Scenario,
    ScenarioChip,
    _Frozen,
    validate_scenario,
)
from .energy import (
    Policies,
    WhatIfResult,
    assess_entry,
    build_report,
    compare,
    downscale_whatif,
    improvement_factor,
)
from .ex import DomainError, SweepError
from .inventory import MaterialSummary, aggregate_materials
from .report import csv_text
from .scenario import Document, read_document, resolve_inventory
from .utils import grid_values

_log = logging.getLogger(__name__)

CHIP_FIELDS = tuple(f for f in ChipSpec.model_fields if f != 'name')
WAFER_FIELDS = ('diameter', 'manufacturing_energy')
YIELD_FIELDS = ('defect_density', 'target_yield')
SCENARIO_FIELDS = ('service_period', 'assembly_coefficient', 'hours_per_year')
CHIP_COLUMNS = (
    'yield',
    'gross_dies',
    'functional_dies',
    'manufacturing',
    'assembly',
    'use',
    'cooling',
    'total',
    'total_without_cooling',
    'front_end',
)
PAIR_COLUMNS = ('improvement', 'improvement_with_cooling')


class SweepSpec(_Frozen):
    """One scenario parameter and the values it takes, in output order."""

    parameter: str = Field(min_length=1)
    values: TYPE.Tuple[float, ...] = Field(min_length=1)
    columns: TYPE.Optional[TYPE.Tuple[str, ...]] = None

    @model_validator(mode='after')
    def _some_columns(self) -> 'SweepSpec':
        if self.columns is not None and not self.columns:
            raise ValueError('columns may not be empty')
        return self

    @classmethod
    def from_grid(
        cls,
        parameter: str,
        start: float,
        stop: float,
        count: int,
        log: bool = False,
        columns: TYPE.Optional[TYPE.Sequence[str]] = None,
    ) -> 'SweepSpec':
        if count < 1:
            raise DomainError('grid count must be >= 1, got %r' % count)
        if log and not (start > 0 and stop > 0):
            raise DomainError(
                'log grid needs positive start and stop, got %r:%r'
                % (start, stop)
            )
        return cls(
            parameter=parameter,
            values=tuple(grid_values(start, stop, count, log)),
            columns=None if columns is None else tuple(columns),
        )


class _Target(TYPE.NamedTuple):
    path: str
    section: str
    field: str
    indices: TYPE.Tuple[int, ...] = ()


def sweep_targets(
    n_chips: int, baseline_index: int = 0
) -> TYPE.Dict[str, _Target]:
    """Every sweepable parameter path of a scenario with n_chips chips"""
    every = tuple(range(n_chips))
    others = tuple(i for i in every if i != baseline_index) or every
    targets: TYPE.Dict[str, _Target] = {}

    def _add(name: str, section: str, field: str):
        for i in every:
            path = 'chips[%d].%s' % (i, name)
            targets[path] = _Target(path, section, field, (i,))
        scope = others if section == 'downscale' else every
        targets[name] = _Target(name, section, field, scope)

    for f in CHIP_FIELDS:
        _add(f, 'chip', f)
    for f in WAFER_FIELDS:
        _add('wafer.' + f, 'wafer', f)
    for f in YIELD_FIELDS:
        _add('yield.' + f, 'yield', f)
    _add('downscale', 'downscale', 'factor')
    for f in SCENARIO_FIELDS:
        targets[f] = _Target(f, 'scenario', f)
    return targets


def sweep_columns(n_chips: int) -> TYPE.List[str]:
    cols = ['value']
    for i in range(n_chips):
        cols.extend('chips[%d].%s' % (i, c) for c in CHIP_COLUMNS)
    if n_chips > 1:
        cols.extend(PAIR_COLUMNS)
    return cols


def _yield_key(entry: TYPE.Dict[str, TYPE.Any]) -> str:
    if 'yield_model' in entry and 'yield' not in entry:
        return 'yield_model'
    return 'yield'


def _apply(
    doc: Document, target: _Target, value: float
) -> TYPE.Dict[int, float]:
    """Write value into doc at target; returns pending downscale factors."""
    if target.section == 'scenario':
        doc[target.field] = value
        return {}
    if target.section == 'downscale':
        return {i: value for i in target.indices}
    for i in target.indices:
        entry = doc['chips'][i]
        if target.section == 'chip':
            entry['chip'][target.field] = value
        elif target.section == 'wafer':
            entry.setdefault('wafer', {})[target.field] = value
            if target.field == 'manufacturing_energy':
                entry['inventory'] = None
        else:
            ymodel = entry.setdefault(_yield_key(entry), {})
            ymodel[target.field] = value
            if target.field == 'target_yield':
                ymodel['defect_density'] = None
                entry.get('wafer', {}).pop('defect_density', None)
    return {}


def _pin_densities(doc: Document, resolved: Scenario) -> Document:
    """Hold every chip at its resolved defect density while other
    parameters vary."""
    doc = copy.deepcopy(doc)
    for entry, res in zip(doc['chips'], resolved.chips):
        ymodel = entry.setdefault(_yield_key(entry), {})
        ymodel['defect_density'] = res.yield_model.defect_density
    return doc


def _evaluate(
    doc: Document,
    target: _Target,
    value: float,
    loader: TYPE.Optional[InventoryLoader],
) -> TYPE.Dict[str, TYPE.Optional[float]]:
    work = copy.deepcopy(doc)
    factors = _apply(work, target, value)
    scenario = validate_scenario(
        work, loader=loader, source='%s = %r' % (target.path, value)
    )
    policies = Policies.of(scenario)
    chips = [assess_entry(e, policies) for e in scenario.chips]
    base_idx = scenario.chip_names.index(scenario.baseline_name)
    base = chips[base_idx].energies
    for i, factor in factors.items():
        entry = scenario.chips[i]
        res = downscale_whatif(
            entry.chip, entry.wafer, entry.yield_model, factor, base, policies
        )
        chips[i] = ChipAssessment(
            name=entry.name,
            energies=res.energies,
            die_area=res.chip.die_area,
            yield_fraction=res.yield_fraction,
            gross_real=res.gross_real,
            functional_dies=res.functional_dies,
            replacements=res.original.replacements,
        )

    row: TYPE.Dict[str, TYPE.Optional[float]] = {'value': value}
    for i, c in enumerate(chips):
        e = c.energies
        at = 'chips[%d].' % i
        row[at + 'yield'] = c.yield_fraction
        row[at + 'gross_dies'] = c.gross_real
        row[at + 'functional_dies'] = c.functional_dies
        row[at + 'manufacturing'] = e.manufacturing
        row[at + 'assembly'] = e.assembly
        row[at + 'use'] = e.use
        row[at + 'cooling'] = e.cooling
        row[at + 'total'] = e.total
        row[at + 'total_without_cooling'] = e.total_without_cooling
        row[at + 'front_end'] = e.front_end
    cand = next((c for i, c in enumerate(chips) if i != base_idx), None)
    if cand is not None:
        row['improvement'] = improvement_factor(
            base, cand.energies, with_cooling=False
        )
        row['improvement_with_cooling'] = improvement_factor(
            base, cand.energies
        )
    return row


@logf()
def run_sweep(
    scenario: TYPE.Union[Document, Scenario],
    sweep: SweepSpec,
    loader: TYPE.Optional[InventoryLoader] = resolve_inventory,
) -> str:
    """Evaluate the scenario at every value of sweep.parameter.
    ~scenario (dict | Scenario): raw document (inventory paths absolute)
        or a resolved Scenario, whose defaulted values are unset again so
        they follow the swept parameter as they would from the document
    ~sweep (SweepSpec): parameter path, values and optional columns
    ~loader (Callable | None): inventory loader for validation
    -> str: CSV text, one row per value in the order given
    Points are independent and run on config.SWEEP_WORKERS threads.
    """
    if isinstance(scenario, Scenario):
        doc = scenario.document()
    else:
        doc = copy.deepcopy(dict(scenario))
    resolved = validate_scenario(doc, loader=loader)
    n = len(resolved.chips)
    base_idx = resolved.chip_names.index(resolved.baseline_name)
    targets = sweep_targets(n, base_idx)
    target = targets.get(sweep.parameter)
    if target is None:
        raise SweepError(sweep.parameter, targets)
    valid_cols = sweep_columns(n)
    columns = list(sweep.columns) if sweep.columns else valid_cols
    for col in columns:
        if col not in valid_cols:
            raise SweepError(col, valid_cols, what='column')

    doc = _pin_densities(doc, resolved)
    with ThreadPoolExecutor(max_workers=config.SWEEP_WORKERS) as pool:
        rows = list(
            pool.map(lambda v: _evaluate(doc, target, v, loader), sweep.values)
        )
    _log.info('swept %s over %d point(s)', sweep.parameter, len(rows))

    return csv_text(columns, [[row.get(c) for c in columns] for row in rows])


class ChipLCA:
    """A resolved scenario plus the analyses that run over it."""

    scenario: Scenario
    document: TYPE.Optional[Document]
    source: TYPE.Optional[str]

    def __init__(
        self,
        scenario: TYPE.Union[Scenario, TYPE.Mapping[str, TYPE.Any]],
        source: TYPE.Optional[str] = None,
        loader: TYPE.Optional[InventoryLoader] = resolve_inventory,
    ):
        self.loader = loader
        self.source = source
        self.document = None
        if not isinstance(scenario, Scenario):
            self.document = copy.deepcopy(dict(scenario))
        self.scenario = validate_scenario(
            scenario, loader=loader, source=source
        )

    @classmethod
    def from_file(cls, path: str, **kwargs) -> 'ChipLCA':
        return cls(read_document(path), source=path, **kwargs)

    @property
    def policies(self) -> Policies:
        return Policies.of(self.scenario)

    def entry(self, name: str) -> ScenarioChip:
        try:
            return self.scenario.chip_named(name)
        except KeyError:
            raise DomainError(
                MSGS.UNKNOWN_CHIP.format(
                    name, ', '.join(self.scenario.chip_names)
                )
            ) from None

    def assessments(self) -> TYPE.List[ChipAssessment]:
        return [assess_entry(e, self.policies) for e in self.scenario.chips]

    @logf()
    def assess(self, baseline: TYPE.Optional[str] = None) -> ComparisonReport:
        """Assess every chip; improvements are against baseline (default:
        the scenario's baseline)."""
        base = self.entry(baseline or self.scenario.baseline_name).name
        return build_report(self.assessments(), base, self.scenario.name)

    @logf()
    def compare(self, baseline: TYPE.Optional[str] = None) -> ComparisonReport:
        if len(self.scenario.chips) < 2:
            raise DomainError(
                MSGS.COMPARE_NEEDS_TWO.format(
                    self.source or self.scenario.name or '',
                    len(self.scenario.chips),
                )
            )
        base = self.entry(baseline or self.scenario.baseline_name).name
        return compare(self.assessments(), base, self.scenario.name)

    @logf()
    def whatif(
        self,
        factor: float,
        chip: TYPE.Optional[str] = None,
        baseline: TYPE.Optional[str] = None,
        full_geometry: bool = False,
    ) -> WhatIfResult:
        """Downscale chip (default: the first non-baseline chip) by factor
        and compare it with the unscaled baseline.
        ~factor (float): area reduction
        ~full_geometry (bool): recompute gross dies from wafer geometry
        -> WhatIfResult
        """
        base = self.entry(baseline or self.scenario.baseline_name)
        if chip is None:
            others = [n for n in self.scenario.chip_names if n != base.name]
            chip = others[0] if others else base.name
        target = self.entry(chip)
        policies = self.policies
        base_energies: PhaseEnergies = assess_entry(base, policies).energies
        return downscale_whatif(
            target.chip,
            target.wafer,
            target.yield_model,
            factor,
            base_energies,
            policies,
            full_geometry=full_geometry,
        )

    def sweep(self, spec: SweepSpec) -> str:
        return run_sweep(
            self.document if self.document is not None else self.scenario,
            spec,
            self.loader,
        )

    def materials(self) -> TYPE.List[MaterialSummary]:
        """Material summaries of every chip with an inventory file"""
        if self.loader is None:
            return []
        return [
            aggregate_materials(self.loader(e.inventory))
            for e in self.scenario.chips
            if e.inventory is not None
        ]

    def __repr__(self) -> str:
        return default_repr(
            self, repr_format='<{obj_name} {attributes}>', join_attrs_on=' '
        )
