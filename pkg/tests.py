import pytest as pt
from io import StringIO
from unittest.mock import patch

import copy
import csv
import json
import math
import os
import os.path as osp
import random
import typing as T

from shutil import rmtree
from pyshared import ranstr
from pyshared.pytest import multiscope_fixture as scope_fixture
from pydantic import ValidationError

from chiplca import config
from chiplca import msgs as MSGS
from chiplca.cli import run
from chiplca.cli_utils import (
    parse_cli_arg_aliases as pargs,
    parse_grid,
    parse_values,
    read_text,
    write_output,
)
from chiplca.common import (
    Category,
    ChipSpec,
    ComparisonReport,
    MaterialClass,
    PhaseEnergies,
    ProcessInventory,
    ReplacementPolicy,
    ScalingParams,
    Scenario,
    WaferSpec,
    YieldModelSpec,
    YieldVariant,
    validate_scenario,
)
from chiplca.energy import (
    Policies,
    assembly_energy,
    assess_chip,
    build_report,
    compare,
    cooling_energy,
    downscale_whatif,
    evaluate_chip,
    improvement_factor,
    manufacturing_energy_per_die,
    scale_to_node,
    use_phase_energy,
    wafer_manufacturing_energy,
)
from chiplca import ex as EX
from chiplca.inventory import (
    aggregate_materials,
    load_inventory,
    parse_inventory,
)
from chiplca.main import ChipLCA, SweepSpec, run_sweep, sweep_targets
from chiplca.report import (
    parse_report,
    render_materials,
    render_report,
    render_whatif,
)
from chiplca.scenario import load_scenario, parse_scenario, resolve_inventory
from chiplca.utils import fmt_factor, fmt_kwh, fmt_name, grid_values
from chiplca.version import __version__
from chiplca.yields import (
    calibrate_defect_density,
    die_sites,
    functional_dies,
    gross_dies_per_wafer,
    monte_carlo_yield,
    yield_by_variant,
    yield_fraction,
)

_RISCV = osp.join(config.DATA_DIR, 'riscv_comparison.json')
_PARAMS = osp.join(config.DATA_DIR, 'riscv_parameters.json')
_AQFP_INV = osp.join(config.DATA_DIR, 'aqfp_mitll.csv')
_CMOS_INV = osp.join(config.DATA_DIR, 'cmos_130nm.csv')
_CMOS, _AQFP = 'CMOS 130nm RISC-V', 'AQFP RISC-V'
_HEADER = ','.join(config.INVENTORY_HEADER)


def _aqfp_chip(**kw) -> ChipSpec:
    base = dict(
        name='AQFP',
        clock_frequency=5e9,
        operating_power=41e-6,
        die_area=3.5,
        lifetime=10,
        cooling_multiplier=400,
        assembly_area=3.5,
    )
    base.update(kw)
    return ChipSpec(**base)


def _minimal_doc(**chip_kw) -> T.Dict[str, T.Any]:
    chip = dict(
        name='chip',
        clock_frequency=1e9,
        operating_power=2.0,
        die_area=1.0,
        lifetime=4,
    )
    chip.update(chip_kw)
    return {
        'chips': [
            {
                'chip': chip,
                'wafer': {
                    'diameter': 300,
                    'manufacturing_energy': 500.0,
                    'defect_density': 0.1,
                },
            }
        ]
    }


def run_cli(*args) -> T.Tuple[int, str, str]:
    with patch('sys.stdout', new_callable=StringIO) as out, patch(
        'sys.stderr', new_callable=StringIO
    ) as err:
        code = run([str(a) for a in args])
    return code, out.getvalue(), err.getvalue()


@scope_fixture
def randir():
    _tmpdir = '/tmp/' + ranstr(10)
    os.makedirs(_tmpdir, exist_ok=True)
    yield _tmpdir
    rmtree(_tmpdir, ignore_errors=True)


@pt.fixture(scope='module')
def riscv() -> ChipLCA:
    return ChipLCA.from_file(_RISCV)


@pt.fixture(scope='module')
def riscv_report(riscv: ChipLCA) -> ComparisonReport:
    return riscv.assess()


# yields ---------------------------------------------------------------------


@pt.mark.parametrize(
    'area, target, density',
    [(0.121, 0.976, 0.2012), (3.5, 0.852, 0.04639)],
)
def test_calibration_round_trip(area: float, target: float, density: float):
    d = calibrate_defect_density(YieldVariant.murphy, area, target)
    assert abs(yield_by_variant('murphy', area, d) - target) <= 1e-9
    assert d == pt.approx(density, rel=2e-3)


@pt.mark.parametrize(
    'variant, area, target, expected',
    [
        ('poisson', 2.0, math.exp(-1), 0.5),
        ('seeds', 2.0, 0.5, 0.5),
        ('murphy', 1.0, 1.0, 0.0),
    ],
)
def test_calibration_closed_forms(variant, area, target, expected):
    d = calibrate_defect_density(variant, area, target)
    assert d == pt.approx(expected, abs=1e-8)


@pt.mark.parametrize('target', [0.0, -0.1, 1.5])
def test_calibration_domain(target: float):
    with pt.raises(EX.DomainError):
        calibrate_defect_density('murphy', 1.0, target)
    with pt.raises(EX.DomainError):
        calibrate_defect_density('murphy', 0.0, 0.5)


def test_downscaled_yield():
    d = calibrate_defect_density('murphy', 3.5, 0.852)
    y = yield_fraction(YieldModelSpec(defect_density=d), 1.75)
    assert abs(y - 0.921) <= 0.005


def test_yield_properties():
    rng = random.Random(1234)
    for _ in range(1000):
        a, d = rng.uniform(0.01, 10), rng.uniform(1e-3, 5)
        ys = {v: yield_by_variant(v, a, d) for v in YieldVariant}
        for v, y in ys.items():
            assert 0 < y < 1
            assert yield_by_variant(v, a, d * 1.1) < y
            assert yield_by_variant(v, a * 1.1, d) < y
        p, m, s = (
            ys[YieldVariant.poisson],
            ys[YieldVariant.murphy],
            ys[YieldVariant.seeds],
        )
        assert p <= m * (1 + 1e-12)
        assert m <= s * (1 + 1e-12)


def test_murphy_small_defect_limit():
    rng = random.Random(77)
    for _ in range(1000):
        a = rng.uniform(0.01, 10)
        ad = rng.uniform(1e-4, 0.2)
        y = yield_by_variant('murphy', a, ad / a)
        assert abs(y - (1 - ad)) <= ad**2


def test_calibration_round_trip_random():
    rng = random.Random(2024)
    for _ in range(300):
        v = rng.choice(list(YieldVariant))
        a = rng.uniform(0.01, 20)
        target = rng.uniform(0.01, 1)
        d = calibrate_defect_density(v, a, target)
        assert d >= 0
        assert yield_by_variant(v, a, d) == pt.approx(target, abs=1e-8)
    assert calibrate_defect_density('seeds', 2.0, 1.0) == 0.0


def test_yield_zero_defects_and_domain():
    for v in YieldVariant:
        assert yield_by_variant(v, 2.0, 0.0) == 1.0
    assert yield_by_variant('murphy', 1.0, 1e-12) == pt.approx(1.0)
    with pt.raises(EX.DomainError):
        yield_fraction(YieldModelSpec(), 1.0)
    with pt.raises(EX.DomainError):
        yield_by_variant('murphy', -1.0, 0.1)
    with pt.raises(ValueError):
        yield_by_variant('bose', 1.0, 0.1)


@pt.mark.parametrize(
    'diameter, area, gross_real, gross',
    [(300, 12.1, 5650.2, 5650), (200, 350, 66.01, 66)],
)
def test_gross_dies(diameter, area, gross_real, gross):
    dies = gross_dies_per_wafer(diameter, area)
    assert dies.gross_real == pt.approx(gross_real, abs=0.05)
    assert dies.gross == gross
    assert dies.with_yield(0.5).functional_expected == pt.approx(
        dies.gross_real / 2
    )


def test_gross_dies_errors():
    with pt.raises(EX.GeometryError):
        gross_dies_per_wafer(200, 100000)
    with pt.raises(EX.DomainError):
        gross_dies_per_wafer(0, 10)
    with pt.raises(EX.DomainError):
        gross_dies_per_wafer(300, -1)


def test_gross_dies_monotone_in_area():
    rng = random.Random(8)
    for _ in range(200):
        diameter = rng.uniform(25, 450)
        areas = sorted(rng.uniform(1, diameter**2 / 8) for _ in range(20))
        last = math.inf
        for area in areas:
            try:
                dies = gross_dies_per_wafer(diameter, area)
            except EX.GeometryError:
                break
            assert dies.gross_real <= last
            assert dies.gross <= dies.gross_real
            last = dies.gross_real


def test_functional_dies():
    assert functional_dies(66.012, 0.852) == pt.approx(56.242, abs=1e-3)
    assert functional_dies(10.0, 1.0) == 10.0


def test_die_sites():
    ix, iy, n = die_sites(30, 25)
    assert len(ix) == len(iy) == 16
    assert n == 3


def test_monte_carlo_oracle():
    trials = 100000
    y = monte_carlo_yield(0.25, 4.0, 30, trials=trials, seed=11)
    n = trials * 16
    sigma = math.sqrt(math.exp(-1) * (1 - math.exp(-1)) / n)
    assert abs(y - math.exp(-1)) <= 3 * sigma


def test_monte_carlo_seeded():
    a = monte_carlo_yield(0.5, 1.0, 50, trials=2000, seed=3)
    b = monte_carlo_yield(0.5, 1.0, 50, trials=2000, seed=3)
    assert a == b
    assert monte_carlo_yield(0.5, 0.0, 50, trials=10) == 1.0
    with pt.raises(EX.DomainError):
        monte_carlo_yield(0.5, 1.0, 50, trials=0)
    with pt.raises(EX.GeometryError):
        monte_carlo_yield(100.0, 1.0, 50, trials=10)


def test_monte_carlo_streams_follow_trial_index():
    y = monte_carlo_yield(0.5, 1.0, 50, trials=3, seed=8)
    with patch.object(config, 'MC_STREAM_TRIALS', 3):
        assert monte_carlo_yield(0.5, 1.0, 50, trials=3, seed=8) == y
    block = config.MC_STREAM_TRIALS
    one = monte_carlo_yield(0.5, 1.0, 50, trials=block, seed=8)
    two = monte_carlo_yield(0.5, 1.0, 50, trials=2 * block, seed=8)
    assert 0 <= 2 * two - one <= 1
    assert monte_carlo_yield(0.5, 1.0, 50, trials=block, seed=9) != one


# energy engine ---------------------------------------------------------------


def test_phase_functions():
    assert assembly_energy(3.5) == pt.approx(1.19)
    assert assembly_energy(0.2353) == pt.approx(0.08, abs=1e-4)
    assert cooling_energy(0.00105, 400) == pt.approx(0.42)
    chip = _aqfp_chip()
    assert use_phase_energy(chip, 10) == pt.approx(0.003594, abs=1e-6)
    assert use_phase_energy(chip, 10, hours_per_year=8760) == pt.approx(
        41e-6 * 10 * 8760 / 1000
    )
    half = _aqfp_chip(utilization=0.5)
    full = use_phase_energy(chip, 10)
    assert use_phase_energy(half, 10) == pt.approx(full / 2)
    over = _aqfp_chip(use_energy_override=0.00105)
    assert use_phase_energy(over, 10) == pt.approx(0.00105)
    assert use_phase_energy(over, 20) == pt.approx(0.0021)


def test_manufacturing_per_die():
    assert manufacturing_energy_per_die(90.5, 66.012, 0.852) == pt.approx(
        1.609, abs=1e-3
    )
    with pt.raises(EX.SingularError):
        manufacturing_energy_per_die(1.0, 0.0, 0.5)
    with pt.raises(ZeroDivisionError):
        manufacturing_energy_per_die(1.0, 10.0, 0.0)


def test_amortization_identity():
    rng = random.Random(99)
    for _ in range(1000):
        e, g = rng.uniform(0, 1e3), rng.uniform(1, 1e4)
        y = rng.uniform(1e-3, 1)
        assert manufacturing_energy_per_die(e, g, y) * functional_dies(
            g, y
        ) == pt.approx(e, rel=1e-12, abs=1e-12)


def test_phase_functions_linear():
    rng = random.Random(31)
    for _ in range(500):
        k = rng.uniform(0, 100)
        e, g = rng.uniform(0, 1e3), rng.uniform(1, 1e4)
        y = rng.uniform(1e-3, 1)
        assert manufacturing_energy_per_die(k * e, g, y) == pt.approx(
            k * manufacturing_energy_per_die(e, g, y), rel=1e-12, abs=1e-300
        )
        area, coeff = rng.uniform(0, 10), rng.uniform(0, 1)
        assert assembly_energy(k * area, coeff) == pt.approx(
            k * assembly_energy(area, coeff), rel=1e-12, abs=1e-300
        )
        use, mult = rng.uniform(0, 1e3), rng.uniform(0, 1e3)
        assert cooling_energy(k * use, mult) == pt.approx(
            k * cooling_energy(use, mult), rel=1e-12, abs=1e-300
        )
        assert cooling_energy(use, k * mult) == pt.approx(
            k * cooling_energy(use, mult), rel=1e-12, abs=1e-300
        )


def test_unresolved_wafer_energy():
    wafer = WaferSpec(diameter=200)
    ym = YieldModelSpec(defect_density=0.0464)
    with pt.raises(EX.DomainError):
        evaluate_chip(_aqfp_chip(), wafer, ym)
    with pt.raises(EX.DomainError):
        downscale_whatif(
            _aqfp_chip(),
            wafer,
            ym,
            2,
            PhaseEnergies(manufacturing=1, assembly=1, use=1, cooling=0),
        )


def test_wafer_energy_matches_inventory():
    inv = load_inventory(_AQFP_INV)
    assert wafer_manufacturing_energy(inv) == pt.approx(90.5, abs=1e-9)


def test_phase_energies_total():
    e = PhaseEnergies(manufacturing=1, assembly=2, use=3, cooling=4)
    assert e.total == 10
    assert e.total_without_cooling == 6
    assert e.front_end == 3
    with pt.raises(ValidationError):
        PhaseEnergies(manufacturing=1, assembly=2, use=3, cooling=4, total=11)
    with pt.raises(ValidationError):
        PhaseEnergies(manufacturing=-1, assembly=2, use=3, cooling=4)


def test_common_service_period_doubles_short_lived_devices():
    dies = gross_dies_per_wafer(300, 100.0)
    chip = ChipSpec(
        name='cpu',
        clock_frequency=3e9,
        operating_power=10,
        die_area=1.0,
        lifetime=5,
        assembly_area=1.0,
        use_energy_override=722.70,
    )
    wafer = WaferSpec(
        diameter=300, manufacturing_energy=0.79 * dies.gross_real
    )
    ym = YieldModelSpec(defect_density=0.0)
    common = Policies(
        service_period=10,
        replacement_policy=ReplacementPolicy.common_service_period,
    )
    e = assess_chip(chip, wafer, ym, common)
    assert e.total == pt.approx(1447.66, abs=1e-6)
    assert evaluate_chip(chip, wafer, ym, common).replacements == 2
    per_device = assess_chip(chip, wafer, ym, Policies(service_period=10))
    assert per_device.total == pt.approx(723.83, abs=1e-6)
    aqfp = _aqfp_chip()
    w = WaferSpec(diameter=200, manufacturing_energy=90.5)
    y = YieldModelSpec(defect_density=0.0464)
    assert assess_chip(aqfp, w, y, common) == assess_chip(aqfp, w, y)


def test_compare_antisymmetry():
    rng = random.Random(5)

    def _e():
        return PhaseEnergies(
            manufacturing=rng.uniform(0.01, 10),
            assembly=rng.uniform(0.01, 10),
            use=rng.uniform(0.01, 1000),
            cooling=rng.uniform(0, 100),
        )

    for _ in range(200):
        a, b = _e(), _e()
        ab = compare([('a', a), ('b', b)])
        ba = compare([('a', a), ('b', b)], baseline='b')
        assert ab.baseline == 'a' and ba.baseline == 'b'
        for cool in ('without_cooling', 'with_cooling'):
            x = getattr(ab.improvement('b'), cool)
            y = getattr(ba.improvement('a'), cool)
            assert x * y == pt.approx(1.0, rel=1e-12)
        assert improvement_factor(a, a) == 1.0


def test_compare_errors():
    e = PhaseEnergies(manufacturing=1, assembly=1, use=1, cooling=0)
    with pt.raises(EX.DomainError):
        compare([('a', e)])
    with pt.raises(EX.DomainError):
        build_report([('a', e), ('b', e)], baseline='c')
    with pt.raises(EX.DomainError):
        build_report([])
    single = build_report([('a', e)])
    assert single.improvements == () and single.baseline == 'a'
    zero = PhaseEnergies(manufacturing=0, assembly=0, use=0, cooling=0)
    with pt.raises(EX.SingularError):
        compare([('a', e), ('b', zero)])


def test_component_ratios_none_for_zero_baseline():
    base = PhaseEnergies(manufacturing=0, assembly=1, use=1, cooling=0)
    cand = PhaseEnergies(manufacturing=1, assembly=2, use=0.5, cooling=1)
    r = compare([('a', base), ('b', cand)]).ratios[0]
    assert r.manufacturing is None
    assert r.assembly == 2 and r.use == 0.5 and r.use_with_cooling == 1.5
    assert r.area is None


def test_downscale_round_trip():
    rng = random.Random(21)
    chip = _aqfp_chip()
    wafer = WaferSpec(diameter=200, manufacturing_energy=90.5)
    ym = YieldModelSpec(defect_density=0.0464)
    base = PhaseEnergies(manufacturing=0.2, assembly=0.1, use=665.0, cooling=0)
    orig = evaluate_chip(chip, wafer, ym)
    for _ in range(50):
        f = rng.uniform(0.5, 4)
        r1 = downscale_whatif(chip, wafer, ym, f, base)
        r2 = downscale_whatif(
            r1.chip, wafer, ym, 1 / f, base, reference_gross=r1.gross_real
        )
        assert r2.chip.die_area == pt.approx(chip.die_area, rel=1e-12)
        assert r2.gross_real == pt.approx(orig.gross_real, rel=1e-12)
        for k in ('manufacturing', 'assembly', 'use', 'cooling', 'total'):
            assert getattr(r2.energies, k) == pt.approx(
                getattr(orig.energies, k), rel=1e-9
            )


def test_downscale_identity_and_domain():
    chip = _aqfp_chip()
    wafer = WaferSpec(diameter=200, manufacturing_energy=90.5)
    ym = YieldModelSpec(defect_density=0.0464)
    base = PhaseEnergies(manufacturing=0.2, assembly=0.1, use=665.0, cooling=0)
    same = downscale_whatif(chip, wafer, ym, 1, base)
    assert same.chip == chip
    assert same.energies == evaluate_chip(chip, wafer, ym).energies
    assert same.front_end_reduction == pt.approx(0.0, abs=1e-12)
    for bad in (0, -2):
        with pt.raises(EX.DomainError):
            downscale_whatif(chip, wafer, ym, bad, base)
    geo = downscale_whatif(chip, wafer, ym, 2, base, full_geometry=True)
    approx = downscale_whatif(chip, wafer, ym, 2, base)
    assert geo.gross_real > approx.gross_real
    assert geo.energies.manufacturing < approx.energies.manufacturing


def test_scale_to_node():
    chip = _aqfp_chip(name='cmos')
    scaled = scale_to_node(chip, 130, 65)
    assert scaled.name == 'cmos@65nm'
    assert scaled.die_area == pt.approx(chip.die_area * 0.25)
    assert scaled.assembly_area == pt.approx(chip.assembly_area * 0.25)
    assert scaled.clock_frequency == pt.approx(chip.clock_frequency * 2)
    assert scaled.operating_power == pt.approx(chip.operating_power * 0.25)
    assert scale_to_node(chip, 45, 45) is chip
    linear = scale_to_node(chip, 130, 65, ScalingParams(power_exponent=1))
    assert linear.operating_power == pt.approx(chip.operating_power * 0.5)
    with pt.raises(EX.DomainError):
        scale_to_node(chip, 0, 65)


def test_scale_to_node_round_trip():
    rng = random.Random(8)
    chip = _aqfp_chip()
    for _ in range(200):
        a, b = rng.uniform(5, 500), rng.uniform(5, 500)
        back = scale_to_node(scale_to_node(chip, a, b), b, a)
        for k in ('die_area', 'clock_frequency', 'operating_power'):
            assert getattr(back, k) == pt.approx(getattr(chip, k), rel=1e-9)


# riscv scenario --------------------------------------------------------------


def test_riscv_scenario_loads(riscv: ChipLCA):
    s = riscv.scenario
    assert s.chip_names == [_CMOS, _AQFP]
    assert s.service_period == 10
    assert s.baseline_name == _CMOS
    aqfp = s.chip_named(_AQFP)
    assert aqfp.wafer.manufacturing_energy == pt.approx(90.5, abs=1e-9)
    assert aqfp.yield_model.defect_density == pt.approx(0.04639, rel=2e-3)
    assert aqfp.chip.assembly_area == 3.5
    assert s.chip_named(_CMOS).chip.assembly_area == 0.2353


def test_riscv_table(riscv_report: ComparisonReport):
    aqfp = riscv_report.chip(_AQFP).energies
    assert aqfp.manufacturing == pt.approx(1.61, rel=0.02)
    assert aqfp.assembly == pt.approx(1.19, rel=0.02)
    assert aqfp.use == pt.approx(0.00105, rel=1e-9)
    assert aqfp.cooling == pt.approx(0.42, abs=0.01)
    assert aqfp.total_without_cooling == pt.approx(2.81, rel=0.02)
    assert aqfp.total == pt.approx(3.23, rel=0.02)
    cmos = riscv_report.chip(_CMOS).energies
    assert cmos.manufacturing == pt.approx(0.17, abs=0.005)
    assert cmos.assembly == pt.approx(0.08, abs=0.005)
    assert cmos.total == pt.approx(665.48, abs=0.01)
    imp = riscv_report.improvement(_AQFP)
    assert imp.without_cooling == pt.approx(237, rel=0.02)
    assert imp.with_cooling == pt.approx(205, rel=0.02)


def test_riscv_ratios(riscv_report: ComparisonReport):
    r = riscv_report.ratios[0]
    assert (r.baseline, r.candidate) == (_CMOS, _AQFP)
    assert r.manufacturing == pt.approx(9.5, rel=0.01)
    assert r.assembly == pt.approx(14.8, rel=0.01)
    assert r.area == pt.approx(28.9, rel=0.01)
    assert r.use_orders == pt.approx(5.8, abs=0.05)
    assert r.use_orders_with_cooling == pt.approx(3.2, abs=0.05)


def test_riscv_whatif(riscv: ChipLCA):
    w = riscv.whatif(2)
    assert w.chip.die_area == 1.75
    assert abs(w.yield_fraction - 0.921) <= 0.005
    assert 1.30 <= w.energies.front_end <= 1.40
    assert w.front_end_reduction == pt.approx(0.52, abs=0.01)
    assert w.improvement == pt.approx(498, rel=0.02)
    assert w.improvement_with_cooling == pt.approx(378, rel=0.02)
    assert w.original.name == _AQFP
    assert w.original_improvement == pt.approx(237, rel=0.02)
    with pt.raises(EX.DomainError):
        riscv.whatif(2, chip='nope')


def test_uncalibrated_scenario():
    report = ChipLCA.from_file(_PARAMS).compare()
    cmos, aqfp = report.chip(_CMOS), report.chip(_AQFP)
    assert cmos.energies.use == pt.approx(7.5 * 5 * 8766 / 1000)
    assert cmos.energies.assembly == pt.approx(0.121 * 0.34)
    assert aqfp.energies.use == pt.approx(0.003594, abs=1e-6)
    assert aqfp.energies.cooling == pt.approx(400 * aqfp.energies.use)


def test_materials_of_scenario(riscv: ChipLCA):
    names = [m.technology_name for m in riscv.materials()]
    assert len(names) == 2
    assert names[1].startswith('AQFP')


# scenario validation ---------------------------------------------------------


def test_minimal_scenario():
    s = validate_scenario(_minimal_doc())
    assert s.service_period == 4
    assert s.chips[0].yield_model.variant is YieldVariant.murphy
    assert s.chips[0].yield_model.defect_density == 0.1
    assert s.chips[0].chip.assembly_area == 1.0
    assert s.replacement_policy is ReplacementPolicy.per_device
    assert set(s.defaulted) == {
        ('chips', 0, 'chip', 'assembly_area'),
        ('service_period',),
    }
    doc = s.document()
    assert doc['service_period'] is None
    assert doc['chips'][0]['chip']['assembly_area'] is None
    assert validate_scenario(doc) == s


def test_validate_idempotent(riscv: ChipLCA):
    again = validate_scenario(riscv.scenario, loader=resolve_inventory)
    assert again == riscv.scenario
    s = validate_scenario(_minimal_doc())
    assert validate_scenario(s) == s


def test_validate_collects_every_error():
    doc = _minimal_doc(utilization=1.5, lifetime=-1)
    doc['colour'] = 'blue'
    with pt.raises(EX.ScenarioError) as e:
        validate_scenario(doc, source='x.json')
    paths = {err.path for err in e.value.errors}
    assert paths == {
        'chips[0].chip.utilization',
        'chips[0].chip.lifetime',
        'colour',
    }
    assert 'x.json' in str(e.value)
    assert '3 error(s)' in str(e.value)


def test_validate_checks_sections_past_a_bad_field():
    doc = _minimal_doc(utilization=1.5)
    doc['chips'][0]['wafer'] = {'diameter': 300}
    with pt.raises(EX.ScenarioError) as e:
        validate_scenario(doc)
    assert [err.path for err in e.value.errors] == [
        'chips[0].chip.utilization',
        'chips[0].wafer.manufacturing_energy',
        'chips[0].yield.defect_density',
    ]

    second = copy.deepcopy(_minimal_doc()['chips'][0])
    second['chip']['name'] = 'other'
    doc['chips'].append(second)
    doc['baseline'] = 'nowhere'
    doc['service_period'] = 0
    with pt.raises(EX.ScenarioError) as e:
        validate_scenario(doc)
    paths = [err.path for err in e.value.errors]
    assert paths[0] == 'service_period'
    assert 'chips[0].chip.utilization' in paths
    assert 'baseline' not in paths
    assert len(paths) == 4

    doc['chips'][0]['chip']['utilization'] = 1.0
    with pt.raises(EX.ScenarioError) as e:
        validate_scenario(doc)
    assert 'baseline' in [err.path for err in e.value.errors]


@pt.mark.parametrize('chips', [[], None, 'chip'])
def test_validate_chip_list(chips):
    doc = _minimal_doc()
    doc['chips'] = chips
    with pt.raises(EX.ScenarioError) as e:
        validate_scenario(doc)
    assert [err.path for err in e.value.errors] == ['chips']
    with pt.raises(ValidationError):
        Scenario(chips=())


def test_validate_semantic_errors():
    doc = _minimal_doc()
    second = copy.deepcopy(doc['chips'][0])
    second['wafer'] = {'diameter': 200}
    second['chip']['die_area'] = 1000.0
    doc['chips'].append(second)
    doc['baseline'] = 'missing'
    with pt.raises(EX.ScenarioError) as e:
        validate_scenario(doc)
    paths = [err.path for err in e.value.errors]
    assert 'chips[1].chip.name' in paths
    assert 'baseline' in paths
    assert 'chips[1].chip.die_area' in paths
    assert 'chips[1].wafer.manufacturing_energy' in paths
    assert 'chips[1].yield.defect_density' in paths


def test_validate_density_resolution():
    doc = _minimal_doc()
    doc['chips'][0]['yield'] = {'variant': 'poisson', 'defect_density': 0.3}
    assert validate_scenario(doc).chips[0].yield_model.defect_density == 0.3
    doc['chips'][0]['yield'] = {'target_yield': 0.9}
    assert validate_scenario(doc).chips[0].yield_model.defect_density == 0.1
    del doc['chips'][0]['wafer']['defect_density']
    d = validate_scenario(doc).chips[0].yield_model.defect_density
    assert yield_by_variant('murphy', 1.0, d) == pt.approx(0.9, abs=1e-9)


def test_validate_inventory_energy():
    doc = _minimal_doc()
    doc['chips'][0]['inventory'] = _AQFP_INV
    with pt.raises(EX.ScenarioError) as e:
        validate_scenario(doc, loader=resolve_inventory)
    assert e.value.errors[0].path == 'chips[0].wafer.manufacturing_energy'
    del doc['chips'][0]['wafer']['manufacturing_energy']
    s = validate_scenario(doc, loader=resolve_inventory)
    assert s.chips[0].wafer.manufacturing_energy == pt.approx(90.5)
    doc['chips'][0]['inventory'] = '/nonexistent/' + ranstr(8) + '.csv'
    with pt.raises(EX.ScenarioError) as e:
        validate_scenario(doc, loader=resolve_inventory)
    assert e.value.errors[0].path == 'chips[0].inventory'


def test_parse_scenario_documents(randir: str):
    s = parse_scenario(json.dumps(_minimal_doc()))
    assert isinstance(s, Scenario)
    for bad in ('{', '[1, 2]', '{"chips": []}'):
        with pt.raises(EX.ScenarioError):
            parse_scenario(bad, source_name='bad.json')
    doc = json.loads(read_text(_RISCV))
    for entry in doc['chips']:
        entry['inventory'] = osp.join(config.DATA_DIR, entry['inventory'])
    path = osp.join(randir, 'moved.json')
    write_output(path, json.dumps(doc))
    assert load_scenario(path) == load_scenario(_RISCV)


# inventory -------------------------------------------------------------------


def _inv_text(*rows: str) -> str:
    return '\n'.join((_HEADER,) + rows) + '\n'


@pt.mark.parametrize(
    'path, steps, total, tech',
    [(_AQFP_INV, 216, 90.5, 'AQFP'), (_CMOS_INV, 206, 937.4, 'CMOS')],
)
def test_shipped_inventories(path, steps, total, tech):
    inv = parse_inventory(read_text(path), source_name=path)
    assert len(inv) == steps
    assert inv.total_energy == pt.approx(total, abs=1e-9)
    assert inv.technology_name.startswith(tech)
    assert math.fsum(s.energy for s in inv.steps) == inv.total_energy


def test_inventory_error_cites_line():
    rows = ['%d,step %d,etch,1.0,' % (i, i) for i in range(1, 6)]
    rows.append('6,bad,etch,-1.0,')
    with pt.raises(EX.InventoryError) as e:
        parse_inventory(_inv_text(*rows))
    assert [err.line for err in e.value.errors] == [7]
    assert 'line 7' in str(e.value)


def test_inventory_collects_all_errors():
    text = _inv_text(
        '1,a,etch,1.0,',
        '1,b,etch,1.0,',
        '2,c,polish,1.0,',
        '3,d,etch,abc,',
        '4,e,etch,1.0,water',
        '0,f,etch,1.0,',
        '5,g,etch',
    )
    with pt.raises(EX.InventoryError) as e:
        parse_inventory(text, source_name='inv.csv')
    assert [err.line for err in e.value.errors] == [3, 4, 5, 6, 7, 8]
    assert 'first on line 2' in e.value.errors[0].message
    assert 'polish' in e.value.errors[1].message
    assert 'inv.csv' in str(e.value)


@pt.mark.parametrize(
    'text',
    ['', '\n\n# only comments\n', 'idx,name\n1,a\n', _HEADER + '\n'],
)
def test_inventory_file_level_errors(text: str):
    with pt.raises(EX.InventoryError) as e:
        parse_inventory(text)
    assert e.value.errors


def test_inventory_encodings():
    text = '# technology: demo\r\n' + _inv_text('1,a,clean,2.5,water:water:10')
    text = text.replace('\n', '\r\n').replace('\r\r\n', '\r\n')
    inv = parse_inventory(('\ufeff' + text).encode('utf-8'))
    assert inv.technology_name == 'demo'
    assert inv.steps[0].materials[0].mass == 10
    assert parse_inventory(StringIO(text)) == inv
    named = parse_inventory(text, technology_name='other')
    assert named.technology_name == 'demo'
    with pt.raises(EX.InventoryError):
        parse_inventory(b'\xff\xfe\x00bad')


def test_inventory_fuzz():
    rng = random.Random(42)
    valid = read_text(_AQFP_INV)
    for i in range(300):
        if i % 2:
            src = rng.randbytes(rng.randint(0, 400))
        else:
            chars = list(valid[:2000])
            for _ in range(rng.randint(1, 20)):
                chars[rng.randrange(len(chars))] = rng.choice(',;:"\n#-x0\x00')
            src = ''.join(chars)
        try:
            inv = parse_inventory(src)
        except EX.InventoryError as e:
            assert e.errors
        else:
            assert isinstance(inv, ProcessInventory)


def test_inventory_total_is_sum_of_steps():
    rng = random.Random(12)
    cats = [c.value for c in Category]
    for _ in range(100):
        energies = [rng.uniform(0, 50) for _ in range(rng.randint(1, 60))]
        rows = [
            '%d,step %d,%s,%r,' % (i + 1, i, rng.choice(cats), e)
            for i, e in enumerate(energies)
        ]
        inv = parse_inventory(_inv_text(*rows))
        assert inv.total_energy == math.fsum(energies)
        assert inv.total_energy == pt.approx(sum(energies), rel=1e-12)
        s = aggregate_materials(inv)
        by_cat = math.fsum(c.energy for c in s.categories)
        assert by_cat == pt.approx(inv.total_energy, rel=1e-12)
        rng.shuffle(rows)
        assert parse_inventory(_inv_text(*rows)).total_energy == (
            inv.total_energy
        )


def test_aggregate_materials_sums():
    inv = parse_inventory(
        _inv_text(
            '1,rinse,clean,1.0,ultrapure_water:water:100',
            '2,rinse again,clean,2.0,ultrapure_water:water:250;argon:gas:3',
            '3,bake,other,0.5,',
        )
    )
    s = aggregate_materials(inv)
    assert s.grams('ultrapure_water') == 350
    assert s.class_totals[MaterialClass.water] == 350
    assert s.class_totals[MaterialClass.gas] == 3
    clean = [c for c in s.categories if c.category is Category.clean][0]
    assert (clean.steps, clean.energy) == (2, 3.0)
    assert s.step_count == 3 and s.total_energy == 3.5


def test_aggregate_materials_empty():
    s = aggregate_materials(parse_inventory(_inv_text('1,bake,other,0.5,')))
    assert s.materials == () and s.class_totals == {}


def test_aggregate_shipped_and_permutation():
    inv = load_inventory(_AQFP_INV)
    s = aggregate_materials(inv)
    by_class: T.Dict[MaterialClass, float] = {}
    for step in inv.steps:
        for m in step.materials:
            cls = m.material_class
            by_class[cls] = by_class.get(cls, 0) + m.mass
    for cls, grams in by_class.items():
        assert s.class_totals[cls] == pt.approx(grams, rel=1e-12)
    assert s.grams('niobium') == pt.approx(24 * 0.42)
    assert s.grams('ultrapure_water') == pt.approx(24 * 3850)
    steps = list(inv.steps)
    random.Random(3).shuffle(steps)
    shuffled = ProcessInventory(
        technology_name=inv.technology_name, steps=steps
    )
    assert aggregate_materials(shuffled) == s
    assert shuffled.total_energy == inv.total_energy


# reports ---------------------------------------------------------------------


def test_report_json_round_trip(riscv_report: ComparisonReport):
    text = render_report(riscv_report, 'json')
    back = parse_report(text)
    assert back == riscv_report
    assert render_report(back, 'json') == text
    with pt.raises(EX.ReportParseError):
        parse_report('{"baseline": 1}')


def test_report_json_round_trip_random():
    rng = random.Random(17)
    for _ in range(100):
        chips = []
        for _ in range(rng.randint(1, 4)):
            energies = PhaseEnergies(
                manufacturing=rng.uniform(0.01, 100),
                assembly=rng.uniform(0.01, 10),
                use=rng.choice([0.0, rng.uniform(1e-6, 1e3)]),
                cooling=rng.choice([0.0, rng.uniform(0, 1e3)]),
            )
            chips.append((ranstr(8), energies))
        report = build_report(chips, title=rng.choice([None, ranstr(12)]))
        back = parse_report(render_report(report, 'json'))
        assert back == report
        assert back.baseline == chips[0][0]


def test_report_table(riscv_report: ComparisonReport):
    table = render_report(riscv_report, 'table')
    assert MSGS.TABLE_TITLE.format(riscv_report.title) in table
    for cell in (
        'Overall Improvement',
        '0.17 KWh',
        '0.08 KWh',
        '665.48 KWh',
        '1.61 KWh',
        '1.19 KWh',
        '0.001 KWh (with cooling 0.42 KWh)',
        '2.80 KWh (with cooling 3.22 KWh)',
        '237.7X (with cooling 206.7X)',
        '5.8 orders of magnitude',
        '3.2 orders of magnitude',
    ):
        assert cell in table


def test_report_csv(riscv_report: ComparisonReport):
    rows = list(csv.DictReader(StringIO(render_report(riscv_report, 'csv'))))
    assert len(rows) == 2
    assert rows[0]['name'] == _CMOS and float(rows[0]['improvement']) == 1.0
    aqfp = riscv_report.chip(_AQFP)
    assert float(rows[1]['manufacturing_kwh']) == aqfp.energies.manufacturing
    assert float(rows[1]['total_kwh']) == aqfp.energies.total


def test_render_whatif_and_materials(riscv: ChipLCA):
    w = riscv.whatif(2)
    table = render_whatif(w, 'table')
    assert 'Manufacturing + assembly' in table and '(-52.' in table
    row = next(csv.DictReader(StringIO(render_whatif(w, 'csv'))))
    assert float(row['front_end_kwh']) == w.energies.front_end
    assert json.loads(render_whatif(w, 'json'))['factor'] == 2
    s = aggregate_materials(load_inventory(_CMOS_INV))
    assert 'Inventory CMOS' in render_materials(s)
    lines = render_materials(s, 'csv').splitlines()
    assert lines[0] == 'material,class,grams_per_wafer,steps'
    assert len(lines) == len(s.materials) + 1


# sweeps ----------------------------------------------------------------------


def _sweep_rows(lca: ChipLCA, spec: SweepSpec) -> T.List[T.Dict[str, str]]:
    return list(csv.DictReader(StringIO(lca.sweep(spec))))


def test_sweep_downscale(riscv: ChipLCA):
    rows = _sweep_rows(
        riscv, SweepSpec(parameter='chips[1].downscale', values=[1, 2])
    )
    assert [float(r['value']) for r in rows] == [1.0, 2.0]
    assert abs(float(rows[1]['chips[1].yield']) - 0.921) <= 0.005
    assert float(rows[1]['chips[1].front_end']) == pt.approx(1.34, rel=0.02)
    assert float(rows[0]['chips[1].total']) == pt.approx(
        riscv.assess().chip(_AQFP).energies.total, rel=1e-12
    )


def test_sweep_single_point_matches_assess(riscv: ChipLCA, riscv_report):
    spec = SweepSpec(parameter='service_period', values=[10])
    rows = _sweep_rows(riscv, spec)
    assert len(rows) == 1
    assert float(rows[0]['chips[0].total']) == pt.approx(
        riscv_report.chip(_CMOS).energies.total, rel=1e-12
    )
    assert float(rows[0]['improvement']) == pt.approx(
        riscv_report.improvement(_AQFP).without_cooling, rel=1e-12
    )


def test_sweep_cooling_linear(riscv: ChipLCA):
    spec = SweepSpec(
        parameter='chips[1].cooling_multiplier',
        values=[0, 400],
        columns=['value', 'chips[1].use', 'chips[1].cooling'],
    )
    rows = _sweep_rows(riscv, spec)
    assert list(rows[0]) == ['value', 'chips[1].use', 'chips[1].cooling']
    assert rows[0]['chips[1].use'] == rows[1]['chips[1].use']
    assert float(rows[0]['chips[1].cooling']) == 0
    assert float(rows[1]['chips[1].cooling']) == pt.approx(
        400 * float(rows[1]['chips[1].use'])
    )


def test_sweep_rows_independent(riscv: ChipLCA):
    vals = [0.5, 0.75, 0.25]
    a = _sweep_rows(
        riscv, SweepSpec(parameter='chips[0].die_area', values=vals)
    )
    b = _sweep_rows(
        riscv, SweepSpec(parameter='chips[0].die_area', values=sorted(vals))
    )
    assert sorted(a, key=lambda r: float(r['value'])) == b
    grid = SweepSpec.from_grid('chips[0].die_area', 0.25, 0.75, 3)
    assert _sweep_rows(riscv, grid) == b


def test_sweep_holds_defect_density(riscv: ChipLCA):
    rows = _sweep_rows(
        riscv, SweepSpec(parameter='chips[1].die_area', values=[3.5, 1.75])
    )
    assert float(rows[0]['chips[1].yield']) == pt.approx(0.852, abs=1e-9)
    assert abs(float(rows[1]['chips[1].yield']) - 0.921) <= 0.005
    rows = _sweep_rows(
        riscv, SweepSpec(parameter='chips[1].yield.target_yield', values=[0.9])
    )
    assert float(rows[0]['chips[1].yield']) == pt.approx(0.9, abs=1e-9)


def test_sweep_errors(riscv: ChipLCA):
    with pt.raises(EX.SweepError) as e:
        riscv.sweep(SweepSpec(parameter='chips[5].die_area', values=[1]))
    assert 'chips[0].die_area' in str(e.value)
    with pt.raises(EX.SweepError):
        riscv.sweep(SweepSpec(parameter='die_area', values=[1], columns=['x']))
    with pt.raises(ValidationError):
        SweepSpec(parameter='die_area', values=[])
    with pt.raises(EX.DomainError):
        SweepSpec.from_grid('die_area', 0, 1, 3, log=True)
    assert 'downscale' in sweep_targets(2)
    assert sweep_targets(2)['downscale'].indices == (1,)


def test_run_sweep_on_scenario(riscv: ChipLCA):
    text = run_sweep(
        riscv.scenario, SweepSpec(parameter='hours_per_year', values=[8760])
    )
    row = next(csv.DictReader(StringIO(text)))
    assert float(row['value']) == 8760


@pt.mark.parametrize(
    'param, values',
    [
        ('chips[1].die_area', [1.75, 3.5]),
        ('lifetime', [2.5, 20]),
        ('downscale', [2]),
    ],
)
def test_sweep_same_from_document_and_scenario(
    riscv: ChipLCA, param: str, values: T.List[float]
):
    doc = copy.deepcopy(riscv.document)
    doc.pop('service_period')
    doc['replacement_policy'] = 'common_service_period'
    spec = SweepSpec(parameter=param, values=values)
    from_doc = run_sweep(doc, spec)
    assert run_sweep(ChipLCA(doc).scenario, spec) == from_doc
    if param == 'chips[1].die_area':
        row = next(csv.DictReader(StringIO(from_doc)))
        assert float(row['chips[1].assembly']) == pt.approx(1.75 * 0.34)


# cli -------------------------------------------------------------------------


def test_cli_assess_table():
    code, out, err = run_cli(
        'assess', '--scenario', _RISCV, '--format', 'table'
    )
    assert code == 0, err
    assert _AQFP in out and '665.48 KWh' in out and '237.7X' in out


@pt.mark.parametrize('alias', ['as', 'assess', '--as'])
def test_cli_aliases(alias: str):
    code, out, _ = run_cli(alias, '-s', _RISCV, '-f', 'csv')
    assert code == 0
    assert out.splitlines()[0].startswith('name,die_area_cm2')


def test_cli_yield_and_calibrate():
    code, out, _ = run_cli(
        'yield',
        '--model',
        'murphy',
        '--area-cm2',
        3.5,
        '--defect-density',
        0.04649,
    )
    assert code == 0 and float(out) == pt.approx(0.852, abs=5e-4)
    code, out, _ = run_cli('cal', '--area-cm2', 0.121, '--target-yield', 0.976)
    assert code == 0
    d = float(out)
    code, out, _ = run_cli('y', '--area-cm2', 0.121, '--defect-density', d)
    assert abs(float(out) - 0.976) <= 1e-6


def test_cli_csv_fields_are_plain_values():
    code, out, _ = run_cli(
        'yield', '--area-cm2', 3.5, '--defect-density', 0.05, '-f', 'csv'
    )
    assert code == 0
    row = next(csv.DictReader(StringIO(out)))
    assert row['variant'] == 'murphy'
    assert float(row['yield']) == pt.approx(
        yield_by_variant('murphy', 3.5, 0.05)
    )
    assert "'" not in out
    code, out, _ = run_cli(
        'cal', '--area-cm2', 1, '-t', 0.5, '-m', 'seeds', '-f', 'csv'
    )
    row = next(csv.DictReader(StringIO(out)))
    assert row['variant'] == 'seeds'
    assert float(row['defect_density']) == pt.approx(1.0, abs=1e-8)


def test_cli_yield_monte_carlo(randir: str):
    path = osp.join(randir, 'mc.json')
    code, _, _ = run_cli(
        'yield', '--area-cm2', 0.25, '--defect-density', 4, '--monte-carlo',
        '--trials', 2000, '--diameter-mm', 30, '--seed', 5, '-f', 'json',
        '--out', path,
    )
    assert code == 0
    res = json.loads(read_text(path))
    assert res['sites'] == 16 and res['seed'] == 5 and 0 < res['yield'] < 1


def test_cli_dpw():
    code, out, _ = run_cli('dpw', '--diameter-mm', 300, '--die-area-mm2', 12.1)
    assert code == 0 and 'gross: 5650' in out
    code, out, _ = run_cli('dpw', '--diameter-mm', 200, '--area-cm2', 3.5)
    assert 'gross: 66' in out


def test_cli_compare_json_out(randir: str):
    path = osp.join(randir, 'nested', 'report.json')
    code, out, _ = run_cli('compare', '-s', _RISCV, '-f', 'json', '-o', path)
    assert code == 0
    report = parse_report(read_text(path))
    assert len(report.chips) == 2 and report.baseline == _CMOS


def test_cli_whatif_and_sweep():
    code, out, _ = run_cli(
        'whatif', '-s', _RISCV, '--factor', 2, '--format', 'csv'
    )
    assert code == 0
    row = next(csv.DictReader(StringIO(out)))
    assert 1.30 <= float(row['front_end_kwh']) <= 1.40
    code, out, err = run_cli(
        'sweep', '-s', _RISCV, '--param', 'chips[1].downscale',
        '--grid', '1:2:2', '--columns', 'value,chips[1].front_end',
    )
    assert code == 0, err
    rows = list(csv.DictReader(StringIO(out)))
    assert float(rows[1]['chips[1].front_end']) == pt.approx(1.34, rel=0.02)


def test_cli_validate_and_materials():
    code, out, _ = run_cli(
        'validate', '--scenario', _RISCV, '--inventory', _AQFP_INV
    )
    assert code == 0
    assert MSGS.SCENARIO_OK.format(2, 10, 'per_device') in out
    assert '216 steps' in out
    code, out, _ = run_cli('mat', '--scenario', _RISCV, '-f', 'csv')
    assert code == 0
    assert out.count('material,class,grams_per_wafer,steps') == 1


_SWEEP = ['sweep', '-s', _RISCV, '--param']


@pt.mark.parametrize(
    'args, code, needle',
    [
        (['assess', '--scenario', 'missing.scn'], 1, 'missing.scn'),
        (_SWEEP + ['nope', '--values', '1'], 2, 'chips[0].die_area'),
        (_SWEEP + ['die_area', '--grid', '1:2'], 2, '--grid'),
        (_SWEEP + ['die_area', '--values', '1,,2'], 2, '--values'),
        (_SWEEP + ['die_area'], 2, '--values or --grid'),
        (['validate'], 2, '--scenario'),
        (['yield', '--area-cm2', 'x', '--defect-density', '1'], 2, 'area-cm2'),
        (
            ['calibrate', '--area-cm2', '1', '--target-yield', '2'],
            1,
            'target yield',
        ),
        (
            ['whatif', '-s', _RISCV, '--factor', '2', '--chip', 'nope'],
            1,
            'nope',
        ),
    ],
)
def test_cli_errors(args: T.List[str], code: int, needle: str):
    got, out, err = run_cli(*args)
    assert got == code
    assert needle in err


def test_cli_invalid_scenario(randir: str):
    doc = _minimal_doc()
    doc['colour'] = 'red'
    path = osp.join(randir, 'bad.json')
    write_output(path, json.dumps(doc))
    code, _, err = run_cli('validate', '--scenario', path)
    assert code == 1
    assert 'colour' in err and path in err


def test_cli_version_and_help():
    code, out, _ = run_cli('--version')
    assert code == 0 and __version__ in out
    code, out, _ = run_cli()
    assert code == 0 and 'usage' in out.lower()


# utils -----------------------------------------------------------------------


def test_formatting():
    assert fmt_kwh(0.00105) == '0.001'
    assert fmt_kwh(665.48) == '665.48'
    assert fmt_kwh(0) == '0.00'
    assert fmt_kwh(1.2345, 3) == '1.234' or fmt_kwh(1.2345, 3) == '1.235'
    assert fmt_factor(None) == '-'
    assert fmt_factor(237.66) == '237.7X'
    assert fmt_factor(1.5e-6, 2) == '1.5e-06X'
    assert fmt_name('short') == 'short'
    assert len(fmt_name('x' * 100)) < 100


def test_grid_and_values():
    assert parse_grid('1:2:3') == (1.0, 2.0, 3, False)
    assert parse_grid('1:100:3:log') == (1.0, 100.0, 3, True)
    for bad in ('1:2', '1:2:0', '0:1:3:log', '1:2:3:cubic', 'a:b:c'):
        with pt.raises(ValueError):
            parse_grid(bad)
    assert parse_values('1, 2,4.5') == [1.0, 2.0, 4.5]
    with pt.raises(ValueError):
        parse_values('1,,2')
    assert grid_values(1, 100, 3, log=True) == pt.approx([1, 10, 100])
    assert grid_values(0, 1, 1) == [0.0]


def test_parse_cli_arg_aliases():
    assert pargs(['as', '-s', 'x']) == ['assess', '-s', 'x']
    assert pargs(['--wi']) == ['whatif']
    assert pargs(['sweep']) == ['sweep']
    assert pargs([]) == []


def test_write_output_creates_dirs(randir: str):
    path = osp.join(randir, ranstr(6), 'out.csv')
    assert write_output(path, 'a,b\n') == path
    assert read_text(path) == 'a,b\n'
    write_output(path, 'c\n')
    assert read_text(path) == 'c\n'
    assert not osp.exists(path + '.tmp')
