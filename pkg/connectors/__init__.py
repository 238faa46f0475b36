# Connectors: report, table, training-log and weight-file I/O.
from .report_output import (
    read_report,
    read_train_log,
    read_weights,
    to_json,
    write_report,
    write_tables,
    write_train_log,
    write_weights,
)

__all__ = [
    "read_report",
    "read_train_log",
    "read_weights",
    "to_json",
    "write_report",
    "write_tables",
    "write_train_log",
    "write_weights",
]
