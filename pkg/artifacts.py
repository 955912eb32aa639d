"""
CSV and JSON output files.
"""
import csv
import json
import math
import logging
from decimal import Decimal, ROUND_HALF_EVEN
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 12


def format_number(value):
    """12 significant digits, round-half-even; fixed notation for magnitudes in [1e-4, 1e12)."""
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    if value == 0:
        return '0.' + '0' * (SIGNIFICANT_DIGITS - 1)
    d = Decimal(repr(value))
    exponent = d.adjusted()
    quantum = Decimal(1).scaleb(exponent - SIGNIFICANT_DIGITS + 1)
    rounded = d.quantize(quantum, rounding=ROUND_HALF_EVEN)
    if 1e-4 <= abs(value) < 1e12 and rounded.adjusted() < 12:
        return format(rounded, 'f')
    digits = rounded.scaleb(-rounded.adjusted()).quantize(Decimal(1).scaleb(-(SIGNIFICANT_DIGITS - 1)))
    return f'{digits}e{rounded.adjusted():+d}'


def format_cell(value):
    if value is None:
        return ''
    if isinstance(value, str):
        return value
    return format_number(value)


def write_csv(path, header, rows, config_hash):
    """Write rows (already in canonical order) with a trailing config_hash column."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        w = csv.writer(f, lineterminator='\n')
        w.writerow(list(header) + ['config_hash'])
        for row in rows:
            w.writerow([format_cell(v) for v in row] + [config_hash])
    logger.info(f"Wrote {len(rows)} rows to {path}")
    return path


def csv_lines(header, rows, config_hash):
    """The lines write_csv would produce, for storing rows elsewhere."""
    lines = [','.join(list(header) + ['config_hash'])]
    for row in rows:
        lines.append(','.join([format_cell(v) for v in row] + [config_hash]))
    return lines


def write_error_json(path, error, config_hash=None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = error.to_dict()
    payload['config_hash'] = config_hash
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write('\n')
    return path
