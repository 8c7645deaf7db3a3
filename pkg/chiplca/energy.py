import logging
import typing as TYPE

from logfunc import logf
from pydantic import Field

from . import config
from .common import (
    ChipAssessment,
    ChipSpec,
    ComparisonReport,
    ComponentRatios,
    Improvement,
    PhaseEnergies,
    ProcessInventory,
    ReplacementPolicy,
    ScalingParams,
    Scenario,
    ScenarioChip,
    WaferSpec,
    YieldModelSpec,
    _Frozen,
)
from .ex import DomainError, SingularError
from .yields import functional_dies, gross_dies_per_wafer, yield_fraction

_log = logging.getLogger(__name__)


class WhatIfResult(_Frozen):
    factor: float = Field(gt=0)
    chip: ChipSpec
    yield_fraction: float
    gross_real: float
    functional_dies: float
    energies: PhaseEnergies
    improvement: float
    improvement_with_cooling: float
    front_end_reduction: float
    original: ChipAssessment
    original_improvement: float
    original_improvement_with_cooling: float


class Policies(TYPE.NamedTuple):
    """Scenario-wide settings an assessment depends on."""

    service_period: TYPE.Optional[float] = None
    replacement_policy: ReplacementPolicy = ReplacementPolicy.per_device
    assembly_coefficient: float = config.ASSEMBLY_COEFFICIENT
    hours_per_year: float = config.HOURS_PER_YEAR

    @classmethod
    def of(cls, scenario: Scenario) -> 'Policies':
        return cls(
            service_period=scenario.service_period,
            replacement_policy=scenario.replacement_policy,
            assembly_coefficient=scenario.assembly_coefficient,
            hours_per_year=scenario.hours_per_year,
        )


def wafer_manufacturing_energy(inv: ProcessInventory) -> float:
    """kWh per wafer: exact-rounded sum of the step energies"""
    return inv.total_energy


def manufacturing_energy_per_die(
    wafer_energy: float, gross_real: float, yield_: float
) -> float:
    """wafer kWh spread over the expected functional dies"""
    dies = functional_dies(gross_real, yield_)
    if dies == 0:
        raise SingularError(
            'no functional dies (gross %r, yield %r)' % (gross_real, yield_)
        )
    return wafer_energy / dies


def assembly_energy(
    assembly_area: float, coefficient: float = config.ASSEMBLY_COEFFICIENT
) -> float:
    return assembly_area * coefficient


def use_phase_energy(
    chip: ChipSpec,
    service_years: float,
    hours_per_year: float = config.HOURS_PER_YEAR,
) -> float:
    """Operating energy over service_years, kWh.

    An override is a lifetime figure and is prorated to service_years.
    """
    if chip.use_energy_override is not None:
        return chip.use_energy_override * (service_years / chip.lifetime)
    hours = service_years * hours_per_year * chip.utilization
    wh = chip.operating_power * hours
    return wh / config.WH_PER_KWH


def cooling_energy(use_energy: float, multiplier: float) -> float:
    return multiplier * use_energy


def _wafer_energy(wafer: WaferSpec) -> float:
    if wafer.manufacturing_energy is None:
        raise DomainError(
            'wafer manufacturing energy is unresolved; validate the scenario'
            ' or give wafer.manufacturing_energy'
        )
    return wafer.manufacturing_energy


def _replacements(chip: ChipSpec, policies: Policies) -> float:
    if (
        policies.replacement_policy is ReplacementPolicy.common_service_period
        and policies.service_period is not None
    ):
        return policies.service_period / chip.lifetime
    return 1.0


@logf()
def evaluate_chip(
    chip: ChipSpec,
    wafer: WaferSpec,
    yield_model: YieldModelSpec,
    policies: Policies = Policies(),
) -> ChipAssessment:
    """Assess one chip and keep the intermediate yield and die counts.
    ~chip, wafer, yield_model: a resolved scenario entry
    ~policies (Policies): service period, replacement policy, assembly
        coefficient and hours per year
    -> ChipAssessment
    """
    dies = gross_dies_per_wafer(
        wafer.diameter, chip.die_area * config.MM2_PER_CM2
    )
    y = yield_fraction(yield_model, chip.die_area)
    reps = _replacements(chip, policies)
    mfg = manufacturing_energy_per_die(
        _wafer_energy(wafer), dies.gross_real, y
    )
    asm = assembly_energy(chip.packaged_area, policies.assembly_coefficient)
    use = use_phase_energy(chip, chip.lifetime, policies.hours_per_year)
    if reps != 1.0:
        mfg, asm, use = mfg * reps, asm * reps, use * reps
    cool = cooling_energy(use, chip.cooling_multiplier)
    return ChipAssessment(
        name=chip.name,
        energies=PhaseEnergies(
            manufacturing=mfg, assembly=asm, use=use, cooling=cool
        ),
        die_area=chip.die_area,
        yield_fraction=y,
        gross_real=dies.gross_real,
        gross=dies.gross,
        functional_dies=functional_dies(dies.gross_real, y),
        replacements=reps,
    )


def assess_chip(
    chip: ChipSpec,
    wafer: WaferSpec,
    yield_model: YieldModelSpec,
    policies: Policies = Policies(),
) -> PhaseEnergies:
    """Per-die manufacturing, assembly, use and cooling energies."""
    return evaluate_chip(chip, wafer, yield_model, policies).energies


def assess_entry(entry: ScenarioChip, policies: Policies) -> ChipAssessment:
    return evaluate_chip(entry.chip, entry.wafer, entry.yield_model, policies)


def improvement_factor(
    baseline: PhaseEnergies,
    candidate: PhaseEnergies,
    with_cooling: bool = True,
) -> float:
    """How many times less life-cycle energy candidate needs than baseline."""
    if with_cooling:
        num, den = baseline.total, candidate.total
    else:
        num = baseline.total_without_cooling
        den = candidate.total_without_cooling
    if den == 0:
        raise SingularError('candidate total energy is zero')
    return num / den


def _ratio(
    cand: TYPE.Optional[float], base: TYPE.Optional[float]
) -> TYPE.Optional[float]:
    if cand is None or not base:
        return None
    return cand / base


def component_ratios(
    base: ChipAssessment, cand: ChipAssessment
) -> ComponentRatios:
    b, c = base.energies, cand.energies
    return ComponentRatios(
        baseline=base.name,
        candidate=cand.name,
        manufacturing=_ratio(c.manufacturing, b.manufacturing),
        assembly=_ratio(c.assembly, b.assembly),
        use=_ratio(c.use, b.use),
        use_with_cooling=_ratio(c.use + c.cooling, b.use + b.cooling),
        area=_ratio(cand.die_area, base.die_area),
    )


_Assessable = TYPE.Union[ChipAssessment, TYPE.Tuple[str, PhaseEnergies]]


def _as_assessment(item: _Assessable) -> ChipAssessment:
    if isinstance(item, ChipAssessment):
        return item
    name, energies = item
    return ChipAssessment(name=name, energies=energies)


def build_report(
    assessments: TYPE.Sequence[_Assessable],
    baseline: TYPE.Optional[str] = None,
    title: TYPE.Optional[str] = None,
) -> ComparisonReport:
    """Report over one or more assessments; improvements and ratios are
    given for every chip other than the baseline."""
    chips = [_as_assessment(a) for a in assessments]
    if not chips:
        raise DomainError('no assessments to report')
    names = [c.name for c in chips]
    base_name = baseline if baseline is not None else names[0]
    if base_name not in names:
        raise DomainError('baseline %r is not among %s' % (base_name, names))
    base = chips[names.index(base_name)]
    improvements, ratios = [], []
    for cand in chips:
        if cand.name == base_name:
            continue
        improvements.append(
            Improvement(
                baseline=base_name,
                candidate=cand.name,
                without_cooling=improvement_factor(
                    base.energies, cand.energies, with_cooling=False
                ),
                with_cooling=improvement_factor(base.energies, cand.energies),
            )
        )
        ratios.append(component_ratios(base, cand))
    return ComparisonReport(
        title=title,
        baseline=base_name,
        chips=tuple(chips),
        improvements=tuple(improvements),
        ratios=tuple(ratios),
    )


@logf()
def compare(
    assessments: TYPE.Sequence[_Assessable],
    baseline: TYPE.Optional[str] = None,
    title: TYPE.Optional[str] = None,
) -> ComparisonReport:
    """Improvement factors (with and without cooling) and component ratios
    of every assessment against the baseline (default: the first)."""
    if len(assessments) < 2:
        raise DomainError('compare needs at least 2 assessments')
    return build_report(assessments, baseline, title)


@logf()
def downscale_whatif(
    chip: ChipSpec,
    wafer: WaferSpec,
    yield_model: YieldModelSpec,
    factor: float,
    baseline: PhaseEnergies,
    policies: Policies = Policies(),
    reference_gross: TYPE.Optional[float] = None,
    full_geometry: bool = False,
) -> WhatIfResult:
    """Re-assess chip with its area divided by factor at fixed defect density.
    ~factor (float): area reduction, > 0
    ~baseline (PhaseEnergies): the chip to compare against
    ~reference_gross (float | None): gross dies of the unscaled chip;
        defaults to the wafer geometry of `chip`
    ~full_geometry (bool): recompute gross dies from the wafer geometry of
        the scaled die instead of scaling them by the area ratio
    -> WhatIfResult
    """
    if not factor > 0:
        raise DomainError('downscale factor must be > 0, got %r' % factor)
    original = evaluate_chip(chip, wafer, yield_model, policies)
    if reference_gross is None:
        reference_gross = original.gross_real

    if factor == 1:
        scaled = chip
    else:
        scaled = chip.model_copy(
            update={
                'name': '%s (area/%g)' % (chip.name, factor),
                'die_area': chip.die_area / factor,
                'assembly_area': chip.packaged_area / factor,
            }
        )
    y = yield_fraction(yield_model, scaled.die_area)
    if full_geometry:
        gross = gross_dies_per_wafer(
            wafer.diameter, scaled.die_area * config.MM2_PER_CM2
        ).gross_real
    else:
        gross = reference_gross * factor

    reps = original.replacements
    mfg = manufacturing_energy_per_die(_wafer_energy(wafer), gross, y)
    asm = assembly_energy(scaled.packaged_area, policies.assembly_coefficient)
    if reps != 1.0:
        mfg, asm = mfg * reps, asm * reps
    energies = PhaseEnergies(
        manufacturing=mfg,
        assembly=asm,
        use=original.energies.use,
        cooling=original.energies.cooling,
    )
    before = original.energies.front_end
    reduction = (1 - energies.front_end / before) if before else 0.0
    return WhatIfResult(
        factor=factor,
        chip=scaled,
        yield_fraction=y,
        gross_real=gross,
        functional_dies=functional_dies(gross, y),
        energies=energies,
        improvement=improvement_factor(baseline, energies, with_cooling=False),
        improvement_with_cooling=improvement_factor(baseline, energies),
        front_end_reduction=reduction,
        original=original,
        original_improvement=improvement_factor(
            baseline, original.energies, with_cooling=False
        ),
        original_improvement_with_cooling=improvement_factor(
            baseline, original.energies
        ),
    )


def scale_to_node(
    chip: ChipSpec,
    from_node: float,
    to_node: float,
    params: ScalingParams = ScalingParams(),
) -> ChipSpec:
    """Power-law scaling of area, clock and power between process nodes.
    ~from_node, to_node (float): feature sizes in nm, > 0
    -> ChipSpec: copy with area * r**area_exponent, frequency *
        r**frequency_exponent and power * r**power_exponent, r = to/from;
        name tagged with the target node
    """
    if not (from_node > 0 and to_node > 0):
        raise DomainError(
            'process nodes must be > 0, got %r -> %r' % (from_node, to_node)
        )
    if from_node == to_node:
        return chip
    r = to_node / from_node
    area_scale = r**params.area_exponent
    update = {
        'name': '%s@%gnm' % (chip.name.split('@')[0], to_node),
        'die_area': chip.die_area * area_scale,
        'clock_frequency': chip.clock_frequency * r**params.frequency_exponent,
        'operating_power': chip.operating_power * r**params.power_exponent,
    }
    if chip.assembly_area is not None:
        update['assembly_area'] = chip.assembly_area * area_scale
    return chip.model_copy(update=update)
