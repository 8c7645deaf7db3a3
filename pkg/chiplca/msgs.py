VERSION = 'chiplca version: {}'

SCENARIO_OK = 'Scenario OK: {} chip(s), service period {:g} yr, policy {}'
INVENTORY_OK = 'Inventory OK: {} ({} steps, {} kWh per wafer)'

YIELD = '{!r}'
YIELD_MC = '{!r}  ({} trials, seed {}, {} dies per wafer)'
CALIBRATED = '{!r}'
DPW = 'gross_real: {!r}\ngross: {}'

COMPARE_NEEDS_TWO = 'compare needs at least 2 chips, scenario {} has {}'
UNKNOWN_CHIP = 'No chip named {!r}; chips: {}'

ERR_FILE = '{}: {}'
ERR_GRID = (
    'Invalid --grid {!r}: expected START:STOP:COUNT[:log] with COUNT >= 1'
)
ERR_VALUES = 'Invalid --values {!r}: expected comma separated numbers'
ERR_NO_POINTS = 'sweep needs --values or --grid'
ERR_NOTHING_TO_VALIDATE = 'validate needs --scenario and/or --inventory'
ERR_MISSING_FLAG = '{} requires {}'

_title_pad = '=' * 10

TABLE_TITLE = _title_pad + ' {} ' + _title_pad
TABLE_NO_TITLE = 'Comparison of Processors'
RATIO_TITLE = 'Component ratios ({} / {})'
WHATIF_TITLE = 'What-if: {} area / {:g}'
MATERIALS_TITLE = _title_pad + ' Inventory {} ' + _title_pad
