"""Rendering of comparison reports, what-if results and inventory summaries.

json renders are full precision and parse back with parse_report; csv
renders are one row per chip; table renders follow the layout of the
classic processor comparison table.
"""

import csv
import io
import typing as TYPE
from enum import Enum

from pydantic import ValidationError

from . import msgs as MSGS
from .common import ComparisonReport
from .energy import WhatIfResult
from .ex import ReportParseError
from .inventory import MaterialSummary
from .utils import columns_table, fmt_factor, fmt_kwh, fmt_name


class ReportFormat(str, Enum):
    table = 'table'
    json = 'json'
    csv = 'csv'


REPORT_CSV_COLUMNS = (
    'name',
    'die_area_cm2',
    'yield',
    'gross_dies',
    'functional_dies',
    'replacements',
    'manufacturing_kwh',
    'assembly_kwh',
    'use_kwh',
    'cooling_kwh',
    'total_kwh',
    'total_without_cooling_kwh',
    'improvement',
    'improvement_with_cooling',
)


def _kwh(value: float, decimals: TYPE.Optional[int]) -> str:
    return '%s KWh' % fmt_kwh(value, decimals)


def csv_text(
    header: TYPE.Sequence[str], rows: TYPE.Iterable[TYPE.Sequence]
) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow(['' if v is None else v for v in row])
    return buf.getvalue()


def _report_table(
    report: ComparisonReport, decimals: TYPE.Optional[int]
) -> str:
    rows = [
        [
            'Processor',
            'Manufacturing Energy',
            'Assembly Energy',
            'Use Phase Energy',
            'Total Energy',
            'Overall Improvement',
        ]
    ]
    for chip in report.chips:
        e = chip.energies
        use = _kwh(e.use, decimals)
        total = _kwh(e.total_without_cooling, decimals)
        if e.cooling > 0:
            use += ' (with cooling %s)' % _kwh(e.cooling, decimals)
            total += ' (with cooling %s)' % _kwh(e.total, decimals)
        improvement = ''
        if chip.name != report.baseline:
            imp = report.improvement(chip.name)
            improvement = fmt_factor(imp.without_cooling)
            if e.cooling > 0:
                improvement += ' (with cooling %s)' % fmt_factor(
                    imp.with_cooling
                )
        rows.append(
            [
                fmt_name(chip.name),
                _kwh(e.manufacturing, decimals),
                _kwh(e.assembly, decimals),
                use,
                total,
                improvement,
            ]
        )

    title = MSGS.TABLE_TITLE.format(report.title or MSGS.TABLE_NO_TITLE)
    lines = ['', title, '']
    lines.extend(columns_table(rows))
    for r in report.ratios:
        lines.append('')
        lines.append(MSGS.RATIO_TITLE.format(r.candidate, r.baseline))
        use = fmt_factor(r.use, 2)
        if r.use_orders is not None:
            use += ' (%.1f orders of magnitude)' % r.use_orders
        use_cool = fmt_factor(r.use_with_cooling, 2)
        if r.use_orders_with_cooling is not None:
            use_cool += (
                ' (%.1f orders of magnitude)' % r.use_orders_with_cooling
            )
        lines.extend(
            columns_table(
                [
                    ['Component', 'Ratio'],
                    ['Manufacturing', fmt_factor(r.manufacturing, 2)],
                    ['Assembly', fmt_factor(r.assembly, 2)],
                    ['Use Phase', use],
                    ['Use Phase with cooling', use_cool],
                    ['Die Area', fmt_factor(r.area, 2)],
                ]
            )
        )
    lines.append('')
    return '\n'.join(lines)


def _report_csv(report: ComparisonReport) -> str:
    rows = []
    for chip in report.chips:
        e = chip.energies
        if chip.name == report.baseline:
            imp, imp_cool = 1.0, 1.0
        else:
            found = report.improvement(chip.name)
            imp, imp_cool = found.without_cooling, found.with_cooling
        rows.append(
            [
                chip.name,
                chip.die_area,
                chip.yield_fraction,
                chip.gross_real,
                chip.functional_dies,
                chip.replacements,
                e.manufacturing,
                e.assembly,
                e.use,
                e.cooling,
                e.total,
                e.total_without_cooling,
                imp,
                imp_cool,
            ]
        )
    return csv_text(REPORT_CSV_COLUMNS, rows)


def render_report(
    report: ComparisonReport,
    fmt: TYPE.Union[ReportFormat, str] = ReportFormat.table,
    decimals: TYPE.Optional[int] = None,
) -> str:
    """Render a ComparisonReport as table, json or csv text.
    ~decimals (int | None): kWh decimals for tables, default
        config.DECIMALS
    """
    fmt = ReportFormat(fmt)
    if fmt is ReportFormat.json:
        return report.model_dump_json(indent=2) + '\n'
    if fmt is ReportFormat.csv:
        return _report_csv(report)
    return _report_table(report, decimals)


def parse_report(source: TYPE.Union[str, bytes]) -> ComparisonReport:
    """Inverse of render_report(report, 'json')"""
    try:
        return ComparisonReport.model_validate_json(source)
    except ValidationError as e:
        raise ReportParseError('Malformed report document: %s' % e) from None


def render_whatif(
    result: WhatIfResult,
    fmt: TYPE.Union[ReportFormat, str] = ReportFormat.table,
    decimals: TYPE.Optional[int] = None,
) -> str:
    fmt = ReportFormat(fmt)
    if fmt is ReportFormat.json:
        return result.model_dump_json(indent=2) + '\n'
    o, n = result.original, result.energies
    if fmt is ReportFormat.csv:
        header = (
            'name',
            'factor',
            'die_area_cm2',
            'yield',
            'gross_dies',
            'functional_dies',
            'manufacturing_kwh',
            'assembly_kwh',
            'use_kwh',
            'cooling_kwh',
            'total_kwh',
            'front_end_kwh',
            'front_end_reduction',
            'improvement',
            'improvement_with_cooling',
        )
        return csv_text(
            header,
            [
                [
                    result.chip.name,
                    result.factor,
                    result.chip.die_area,
                    result.yield_fraction,
                    result.gross_real,
                    result.functional_dies,
                    n.manufacturing,
                    n.assembly,
                    n.use,
                    n.cooling,
                    n.total,
                    n.front_end,
                    result.front_end_reduction,
                    result.improvement,
                    result.improvement_with_cooling,
                ]
            ],
        )

    rows = [
        ['', 'Today', 'Scaled'],
        ['Die area', '%g cm2' % o.die_area, '%g cm2' % result.chip.die_area],
        [
            'Yield',
            '%.2f%%' % (100 * o.yield_fraction),
            '%.2f%%' % (100 * result.yield_fraction),
        ],
        ['Gross dies', '%.2f' % o.gross_real, '%.2f' % result.gross_real],
        [
            'Manufacturing',
            _kwh(o.energies.manufacturing, decimals),
            _kwh(n.manufacturing, decimals),
        ],
        [
            'Assembly',
            _kwh(o.energies.assembly, decimals),
            _kwh(n.assembly, decimals),
        ],
        [
            'Manufacturing + assembly',
            _kwh(o.energies.front_end, decimals),
            '%s (-%.1f%%)'
            % (_kwh(n.front_end, decimals), 100 * result.front_end_reduction),
        ],
        [
            'Total',
            _kwh(o.energies.total_without_cooling, decimals),
            _kwh(n.total_without_cooling, decimals),
        ],
        [
            'Total with cooling',
            _kwh(o.energies.total, decimals),
            _kwh(n.total, decimals),
        ],
        [
            'Overall improvement',
            fmt_factor(result.original_improvement),
            fmt_factor(result.improvement),
        ],
        [
            'Overall improvement with cooling',
            fmt_factor(result.original_improvement_with_cooling),
            fmt_factor(result.improvement_with_cooling),
        ],
    ]
    lines = ['', MSGS.WHATIF_TITLE.format(o.name, result.factor), '']
    lines.extend(columns_table(rows))
    lines.append('')
    return '\n'.join(lines)


def render_materials(
    summary: MaterialSummary,
    fmt: TYPE.Union[ReportFormat, str] = ReportFormat.table,
    decimals: TYPE.Optional[int] = None,
) -> str:
    fmt = ReportFormat(fmt)
    if fmt is ReportFormat.json:
        return summary.model_dump_json(indent=2) + '\n'
    if fmt is ReportFormat.csv:
        return csv_text(
            ('material', 'class', 'grams_per_wafer', 'steps'),
            [
                [m.material, m.material_class.value, m.grams, m.steps]
                for m in summary.materials
            ],
        )

    lines = ['', MSGS.MATERIALS_TITLE.format(summary.technology_name), '']
    lines.append(
        '%d steps, %s per wafer'
        % (summary.step_count, _kwh(summary.total_energy, decimals))
    )
    lines.append('')
    lines.extend(
        columns_table(
            [['Category', 'Steps', 'Energy']]
            + [
                [c.category.value, str(c.steps), _kwh(c.energy, decimals)]
                for c in summary.categories
            ]
        )
    )
    if summary.materials:
        lines.append('')
        lines.extend(
            columns_table(
                [['Material', 'Class', 'Grams per wafer']]
                + [
                    [m.material, m.material_class.value, '%.2f' % m.grams]
                    for m in summary.materials
                ]
                + [
                    ['(all %s)' % cls.value, cls.value, '%.2f' % grams]
                    for cls, grams in summary.class_totals.items()
                ]
            )
        )
    lines.append('')
    return '\n'.join(lines)
