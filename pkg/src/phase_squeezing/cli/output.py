from pathlib import Path
from typing import List
import logging

import numpy as np

from phase_squeezing.experiments.presets import Table

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def table_path(output: str, table: Table) -> Path:
    path = Path(output)
    if not table.suffix:
        return path
    return path.with_name(f"{path.stem}{table.suffix}{path.suffix}")


def write_table(path: Path, table: Table):
    """Header row, comma separated, 17 significant digits, LF line endings"""
    fmt = ['%s'] * table.text_columns + [FLOAT_FORMAT] * (len(table.header) - table.text_columns)
    data = np.array(table.rows, dtype=object if table.text_columns else float)
    if data.size == 0:
        data = data.reshape(0, len(table.header))
    np.savetxt(
        path,
        data,
        fmt=fmt,
        delimiter=',',
        header=','.join(table.header),
        comments='',
        newline='\n',
        encoding='utf-8'
    )
    logger.debug(f"Wrote {len(table.rows)} rows to {path}")


def write_tables(output: str, tables: List[Table]) -> List[str]:
    """Write every table next to output and return the paths written"""
    written = []
    for table in tables:
        path = table_path(output, table)
        write_table(path, table)
        written.append(str(path))
    return written
