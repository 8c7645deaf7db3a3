from .version import __version__
from .common import (
    ChipSpec,
    ComparisonReport,
    PhaseEnergies,
    ProcessInventory,
    Scenario,
    WaferSpec,
    YieldModelSpec,
    validate_scenario,
)
from .energy import assess_chip, compare, downscale_whatif, scale_to_node
from .inventory import aggregate_materials, parse_inventory
from .main import ChipLCA, SweepSpec, run_sweep
from .report import parse_report, render_report
from .scenario import load_scenario, parse_scenario
from .yields import (
    calibrate_defect_density,
    functional_dies,
    gross_dies_per_wafer,
    monte_carlo_yield,
    yield_fraction,
)
