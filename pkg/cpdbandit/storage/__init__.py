"""Storage layer."""
from cpdbandit.storage.csv_store import (
    load_mean_matrix_csv,
    traces_frame,
    write_bench,
    write_bounds,
    write_eta_sweep,
    write_events,
    write_failures,
    write_summary,
    write_traces,
)

__all__ = [
    "load_mean_matrix_csv",
    "traces_frame",
    "write_bench",
    "write_bounds",
    "write_eta_sweep",
    "write_events",
    "write_failures",
    "write_summary",
    "write_traces",
]
