"""Domain types shared by every chiplca module.

All models are frozen pydantic models: once constructed (and, for a
Scenario, resolved by validate_scenario) they are immutable values that
can be shared between threads.
"""

import logging
import math
import typing as TYPE
from enum import Enum

from logfunc import logf
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    ValidationError,
    model_validator,
)

from . import config
from .ex import FieldError, ScenarioError

_log = logging.getLogger(__name__)

NO_CHIPS = 'at least one chip is required'


class _Frozen(BaseModel):
    model_config = ConfigDict(
        frozen=True, extra='forbid', allow_inf_nan=False, populate_by_name=True
    )


class Category(str, Enum):
    deposition = 'deposition'
    lithography = 'lithography'
    etch = 'etch'
    implant_or_anneal = 'implant_or_anneal'
    clean = 'clean'
    metrology = 'metrology'
    other = 'other'


class MaterialClass(str, Enum):
    gas = 'gas'
    chemical = 'chemical'
    water = 'water'
    metal = 'metal'
    other = 'other'


class YieldVariant(str, Enum):
    murphy = 'murphy'
    poisson = 'poisson'
    seeds = 'seeds'


class ReplacementPolicy(str, Enum):
    per_device = 'per_device'
    common_service_period = 'common_service_period'


class ChipSpec(_Frozen):
    """One technology's functional unit."""

    name: str = Field(min_length=1)
    clock_frequency: float = Field(gt=0, description='Hz')
    operating_power: float = Field(gt=0, description='W at operating temp')
    die_area: float = Field(gt=0, description='cm^2')
    lifetime: float = Field(gt=0, description='years')
    utilization: float = Field(1.0, ge=0, le=1)
    cooling_multiplier: float = Field(0.0, ge=0)
    assembly_area: TYPE.Optional[float] = Field(None, gt=0)
    use_energy_override: TYPE.Optional[float] = Field(
        None, ge=0, description='kWh over one lifetime'
    )

    @property
    def packaged_area(self) -> float:
        """assembly_area, falling back to die_area when unresolved"""
        if self.assembly_area is None:
            return self.die_area
        return self.assembly_area


class WaferSpec(_Frozen):
    diameter: float = Field(gt=0, description='mm')
    manufacturing_energy: TYPE.Optional[float] = Field(
        None, ge=0, description='kWh per wafer'
    )
    defect_density: TYPE.Optional[float] = Field(None, ge=0)


class MaterialFlow(_Frozen):
    material: str = Field(min_length=1)
    mass: float = Field(ge=0, description='grams per wafer')
    material_class: MaterialClass = MaterialClass.other


class ProcessStep(_Frozen):
    index: int = Field(gt=0)
    name: str
    category: Category
    energy: float = Field(ge=0, description='kWh per wafer')
    materials: TYPE.Tuple[MaterialFlow, ...] = ()


class ProcessInventory(_Frozen):
    technology_name: str
    steps: TYPE.Tuple[ProcessStep, ...] = Field(min_length=1)

    @model_validator(mode='after')
    def _unique_indices(self) -> 'ProcessInventory':
        seen = set()
        for step in self.steps:
            if step.index in seen:
                raise ValueError('duplicate step index %d' % step.index)
            seen.add(step.index)
        return self

    @property
    def total_energy(self) -> float:
        """kWh per wafer, recomputed from the steps on every access"""
        return math.fsum(s.energy for s in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


class YieldModelSpec(_Frozen):
    """Yield model variant plus the defect density that drives it.

    target_yield is only a calibration request: validate_scenario turns it
    into defect_density when no density is given.
    """

    variant: YieldVariant = YieldVariant.murphy
    defect_density: TYPE.Optional[float] = Field(None, ge=0)
    target_yield: TYPE.Optional[float] = Field(None, gt=0, le=1)


class ScalingParams(_Frozen):
    area_exponent: float = 2.0
    frequency_exponent: float = -1.0
    power_exponent: float = 2.0


class ScenarioChip(_Frozen):
    chip: ChipSpec
    wafer: WaferSpec
    inventory: TYPE.Optional[str] = None
    yield_model: YieldModelSpec = Field(
        default_factory=YieldModelSpec, alias='yield'
    )

    @property
    def name(self) -> str:
        return self.chip.name


class ScenarioSettings(_Frozen):
    """The scenario-wide fields, validated apart from the chip list."""

    schema_version: TYPE.Literal[1] = config.SCHEMA_VERSION
    name: TYPE.Optional[str] = None
    service_period: TYPE.Optional[float] = Field(None, gt=0)
    replacement_policy: ReplacementPolicy = ReplacementPolicy.per_device
    assembly_coefficient: float = Field(config.ASSEMBLY_COEFFICIENT, ge=0)
    hours_per_year: float = Field(config.HOURS_PER_YEAR, gt=0)
    baseline: TYPE.Optional[str] = None


DocPath = TYPE.Tuple[TYPE.Union[str, int], ...]


class Scenario(ScenarioSettings):
    chips: TYPE.Tuple[ScenarioChip, ...]
    # document paths validate_scenario filled with a default
    _defaulted: TYPE.Tuple[DocPath, ...] = PrivateAttr(default=())

    @model_validator(mode='after')
    def _some_chips(self) -> 'Scenario':
        if not self.chips:
            raise ValueError(NO_CHIPS)
        return self

    @property
    def defaulted(self) -> TYPE.Tuple[DocPath, ...]:
        return self._defaulted

    def document(self) -> TYPE.Dict[str, TYPE.Any]:
        """json document that validates back to this scenario, with every
        defaulted value left unset again"""
        doc = self.model_dump(mode='json', by_alias=True)
        for path in self._defaulted:
            node = doc
            for key in path[:-1]:
                node = node[key]
            node[path[-1]] = None
        return doc

    def chip_named(self, name: str) -> ScenarioChip:
        for entry in self.chips:
            if entry.name == name:
                return entry
        raise KeyError(name)

    @property
    def baseline_name(self) -> str:
        return self.baseline or self.chips[0].name

    @property
    def chip_names(self) -> TYPE.List[str]:
        return [c.name for c in self.chips]


class PhaseEnergies(_Frozen):
    """Per-die life-cycle energies in kWh."""

    manufacturing: float = Field(ge=0)
    assembly: float = Field(ge=0)
    use: float = Field(ge=0)
    cooling: float = Field(ge=0)
    total: float = Field(ge=0)

    @model_validator(mode='before')
    @classmethod
    def _fill_total(cls, data: TYPE.Any) -> TYPE.Any:
        if isinstance(data, dict) and data.get('total') is None:
            data = dict(data)
            data['total'] = (
                data.get('manufacturing', 0.0)
                + data.get('assembly', 0.0)
                + data.get('use', 0.0)
                + data.get('cooling', 0.0)
            )
        return data

    @model_validator(mode='after')
    def _check_total(self) -> 'PhaseEnergies':
        parts = self.manufacturing + self.assembly + self.use + self.cooling
        if abs(parts - self.total) > 1e-9 * max(abs(parts), 1e-300):
            raise ValueError(
                'total %r != sum of components %r' % (self.total, parts)
            )
        return self

    @property
    def total_without_cooling(self) -> float:
        return self.manufacturing + self.assembly + self.use

    @property
    def front_end(self) -> float:
        """manufacturing + assembly"""
        return self.manufacturing + self.assembly


class ChipAssessment(_Frozen):
    name: str
    energies: PhaseEnergies
    die_area: TYPE.Optional[float] = None
    yield_fraction: TYPE.Optional[float] = None
    gross_real: TYPE.Optional[float] = None
    gross: TYPE.Optional[int] = None
    functional_dies: TYPE.Optional[float] = None
    replacements: float = 1.0


class Improvement(_Frozen):
    baseline: str
    candidate: str
    without_cooling: float = Field(gt=0)
    with_cooling: float = Field(gt=0)


class ComponentRatios(_Frozen):
    """candidate / baseline per component; None where the baseline is 0"""

    baseline: str
    candidate: str
    manufacturing: TYPE.Optional[float] = None
    assembly: TYPE.Optional[float] = None
    use: TYPE.Optional[float] = None
    use_with_cooling: TYPE.Optional[float] = None
    area: TYPE.Optional[float] = None

    @property
    def use_orders(self) -> TYPE.Optional[float]:
        return _orders(self.use)

    @property
    def use_orders_with_cooling(self) -> TYPE.Optional[float]:
        return _orders(self.use_with_cooling)


def _orders(ratio: TYPE.Optional[float]) -> TYPE.Optional[float]:
    if ratio is None or ratio <= 0:
        return None
    return -math.log10(ratio)


class ComparisonReport(_Frozen):
    title: TYPE.Optional[str] = None
    baseline: str
    chips: TYPE.Tuple[ChipAssessment, ...] = Field(min_length=1)
    improvements: TYPE.Tuple[Improvement, ...] = ()
    ratios: TYPE.Tuple[ComponentRatios, ...] = ()

    def chip(self, name: str) -> ChipAssessment:
        for c in self.chips:
            if c.name == name:
                return c
        raise KeyError(name)

    def improvement(self, candidate: str) -> Improvement:
        for imp in self.improvements:
            if imp.candidate == candidate:
                return imp
        raise KeyError(candidate)


def loc_path(loc: TYPE.Iterable[TYPE.Union[str, int]]) -> str:
    """('chips', 0, 'chip', 'die_area') -> 'chips[0].chip.die_area'"""
    out = ''
    for part in loc:
        if isinstance(part, int):
            out += '[%d]' % part
        else:
            out += ('.' if out else '') + str(part)
    return out or '<scenario>'


def field_errors(
    e: ValidationError, prefix: DocPath = ()
) -> TYPE.List[FieldError]:
    return [
        FieldError(
            loc_path(prefix + tuple(err['loc'])), err.get('input'), err['msg']
        )
        for err in e.errors()
    ]


InventoryLoader = TYPE.Callable[[str], ProcessInventory]


class _Parts(TYPE.NamedTuple):
    """Sections of one chip entry; None where a section did not validate"""

    chip: TYPE.Optional[ChipSpec]
    wafer: TYPE.Optional[WaferSpec]
    inventory: TYPE.Optional[str]
    yield_model: TYPE.Optional[YieldModelSpec]
    complete: bool


def _section(model: TYPE.Type[_Frozen], data: TYPE.Any) -> TYPE.Any:
    try:
        return model.model_validate(data)
    except ValidationError:
        return None


def _parse_entry(
    raw: TYPE.Any, at: DocPath, errors: TYPE.List[FieldError]
) -> _Parts:
    try:
        entry = ScenarioChip.model_validate(raw)
    except ValidationError as e:
        errors.extend(field_errors(e, at))
    else:
        return _Parts(
            entry.chip, entry.wafer, entry.inventory, entry.yield_model, True
        )
    if not isinstance(raw, TYPE.Mapping):
        return _Parts(None, None, None, None, False)
    # keep what did validate so the cross-field checks still run on it
    inventory = raw.get('inventory')
    return _Parts(
        _section(ChipSpec, raw.get('chip')),
        _section(WaferSpec, raw.get('wafer')),
        inventory if isinstance(inventory, str) else None,
        _section(YieldModelSpec, raw.get('yield', raw.get('yield_model', {}))),
        False,
    )


def _resolve_entry(
    i: int,
    parts: _Parts,
    loader: TYPE.Optional[InventoryLoader],
    errors: TYPE.List[FieldError],
    defaulted: TYPE.List[DocPath],
) -> TYPE.Optional[ScenarioChip]:
    # yields needs the types defined above
    from .yields import calibrate_defect_density, gross_dies_per_wafer

    at = 'chips[%d]' % i
    chip, wafer, ymodel = parts.chip, parts.wafer, parts.yield_model

    if chip is not None and chip.assembly_area is None:
        _log.debug('%s: assembly_area defaults to die_area', chip.name)
        chip = chip.model_copy(update={'assembly_area': chip.die_area})
        defaulted.append(('chips', i, 'chip', 'assembly_area'))

    if chip is not None and wafer is not None:
        try:
            gross_dies_per_wafer(
                wafer.diameter, chip.die_area * config.MM2_PER_CM2
            )
        except ValueError as e:
            errors.append(
                FieldError(at + '.chip.die_area', chip.die_area, str(e))
            )

    energy = None
    if wafer is not None:
        energy = wafer.manufacturing_energy
        inventory = parts.inventory
        if inventory is not None and loader is not None:
            try:
                inv_total = loader(inventory).total_energy
            except (OSError, ValueError) as e:
                errors.append(FieldError(at + '.inventory', inventory, str(e)))
            else:
                if energy is None:
                    energy = inv_total
                elif abs(energy - inv_total) > 1e-9 * max(inv_total, 1e-300):
                    errors.append(
                        FieldError(
                            at + '.wafer.manufacturing_energy',
                            energy,
                            'disagrees with inventory total %r' % inv_total,
                        )
                    )
        if energy is None and (inventory is None or loader is None):
            errors.append(
                FieldError(
                    at + '.wafer.manufacturing_energy',
                    None,
                    'required when no inventory is loaded',
                )
            )

    density = None
    if ymodel is not None:
        density = ymodel.defect_density
        if density is None and wafer is not None:
            density = wafer.defect_density
        if (
            density is None
            and ymodel.target_yield is not None
            and chip is not None
        ):
            density = calibrate_defect_density(
                ymodel.variant, chip.die_area, ymodel.target_yield
            )
            _log.info(
                '%s: calibrated defect density %r /cm2 for yield %r',
                chip.name,
                density,
                ymodel.target_yield,
            )
        if (
            density is None
            and ymodel.target_yield is None
            and wafer is not None
        ):
            errors.append(
                FieldError(
                    at + '.yield.defect_density',
                    None,
                    'give defect_density (yield or wafer) or target_yield',
                )
            )

    if not parts.complete:
        return None
    return ScenarioChip(
        chip=chip,
        wafer=wafer.model_copy(update={'manufacturing_energy': energy}),
        inventory=parts.inventory,
        yield_model=ymodel.model_copy(update={'defect_density': density}),
    )


@logf()
def validate_scenario(
    scenario: TYPE.Union[Scenario, TYPE.Mapping[str, TYPE.Any]],
    loader: TYPE.Optional[InventoryLoader] = None,
    source: TYPE.Optional[str] = None,
) -> Scenario:
    """Validate a scenario and resolve its defaults.
    ~scenario (Scenario | Mapping): a model or a raw scenario document
    ~loader (Callable | None): loads a ProcessInventory from a chip's
        inventory reference; without it references are left unchecked
    ~source (str | None): file name quoted in the error message
    -> Scenario: resolved copy (assembly_area, defect_density,
        manufacturing_energy and service_period filled in)
    Raises ScenarioError listing every violation found. Each chip entry
    and each of its sections is checked on its own, so one bad field
    does not hide the problems of the rest of the document.
    """
    errors: TYPE.List[FieldError] = []
    defaulted: TYPE.List[DocPath] = []
    settings: TYPE.Optional[ScenarioSettings] = None
    if isinstance(scenario, Scenario):
        settings = scenario
        entries = [
            _Parts(e.chip, e.wafer, e.inventory, e.yield_model, True)
            for e in scenario.chips
        ]
        defaulted.extend(scenario.defaulted)
    elif isinstance(scenario, TYPE.Mapping):
        doc = dict(scenario)
        raw_chips = doc.pop('chips', None)
        try:
            settings = ScenarioSettings.model_validate(doc)
        except ValidationError as e:
            errors.extend(field_errors(e))
        entries = []
        if not isinstance(raw_chips, (list, tuple)):
            errors.append(
                FieldError('chips', raw_chips, 'expected a list of chips')
            )
        elif not raw_chips:
            errors.append(FieldError('chips', raw_chips, NO_CHIPS))
        else:
            entries = [
                _parse_entry(raw, ('chips', i), errors)
                for i, raw in enumerate(raw_chips)
            ]
    else:
        raise ScenarioError(
            [FieldError('<scenario>', scenario, 'expected an object')],
            source,
        )

    seen: TYPE.Set[str] = set()
    for i, parts in enumerate(entries):
        if parts.chip is None:
            continue
        if parts.chip.name in seen:
            errors.append(
                FieldError(
                    'chips[%d].chip.name' % i,
                    parts.chip.name,
                    'duplicate name',
                )
            )
        seen.add(parts.chip.name)
    baseline = settings.baseline if settings is not None else None
    named = all(p.chip is not None for p in entries)
    if baseline is not None and baseline not in seen and named:
        errors.append(
            FieldError('baseline', baseline, 'no chip with this name')
        )

    resolved = [
        _resolve_entry(i, parts, loader, errors, defaulted)
        for i, parts in enumerate(entries)
    ]
    if errors:
        raise ScenarioError(errors, source)

    service = settings.service_period
    if service is None:
        service = max(e.chip.lifetime for e in resolved)
        defaulted.append(('service_period',))
    out = Scenario(
        **{
            **dict(settings),
            'chips': tuple(resolved),
            'service_period': service,
        }
    )
    out._defaulted = tuple(dict.fromkeys(defaulted))
    return out
