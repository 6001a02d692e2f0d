"""CSV and JSON files in and out: mean matrices, traces, events, summaries."""
import json
import logging
import re
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import pandas as pd

from cpdbandit.helpers.errors import ParseError
from cpdbandit.services.env import Environment, RewardModel, build_environment

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["replication", "policy", "t", "arm", "reward", "inst_regret", "cum_regret", "restart"]
EVENT_COLUMNS = ["replication", "policy", "time", "arm", "split", "kind", "true_cp"]
SUMMARY_COLUMNS = [
    "policy", "mean_final_regret", "std", "detections", "misses", "false_alarms",
    "mean_delay", "scan_calls", "wall_ms", "failures",
]
BENCH_COLUMNS = ["policy", "horizon", "scan_calls", "split_evals", "restarts", "wall_ms_median", "repeats"]
ETA_COLUMNS = ["eta", "policy", "segment_length", "success_mean", "success_std", "runs"]
FAILURE_COLUMNS = ["replication", "policy", "error"]

_LINE_RE = re.compile(r"line (\d+)")


def _read_rows(path: Path) -> tuple[pd.DataFrame, int]:
    """Raw numeric-looking table and the file line of its first row."""
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skipinitialspace=True,
                            comment="#", skip_blank_lines=True)
    except pd.errors.ParserError as e:
        match = _LINE_RE.search(str(e))
        raise ParseError(f"{path}: ragged row ({e})", int(match.group(1)) if match else None) from e
    except pd.errors.EmptyDataError as e:
        raise ParseError(f"{path}: no rows") from e
    first = 1
    if pd.to_numeric(frame.iloc[0], errors="coerce").isna().any():
        frame = frame.iloc[1:].reset_index(drop=True)
        first = 2
    return frame, first


def load_mean_matrix_csv(
    path: str | Path,
    horizon: int,
    starts: Sequence[int] | None = None,
    reward_model: RewardModel | None = None,
) -> Environment:
    """Environment from rows `start_time, mean_1, ..., mean_K`; a header line is optional.

    When `starts` is given it replaces the start column row by row.
    """
    path = Path(path)
    frame, first = _read_rows(path)
    if frame.empty:
        raise ParseError(f"{path}: no segment rows")
    values = frame.apply(pd.to_numeric, errors="coerce")
    for row in range(len(values)):
        if values.iloc[row].isna().any():
            raise ParseError(f"{path}: missing or non-numeric field", first + row)
    matrix = values.to_numpy(dtype=np.float64)
    if matrix.shape[1] < 2:
        raise ParseError(f"{path}: rows need a start time and at least one mean", first)
    start_col = matrix[:, 0]
    if starts is not None:
        if len(starts) != len(matrix):
            raise ParseError(f"{path}: {len(matrix)} rows but {len(starts)} segment starts")
        start_col = np.asarray(starts, dtype=np.float64)
    spec = [(int(s), tuple(row)) for s, row in zip(start_col, matrix[:, 1:])]
    env = build_environment(spec, horizon, reward_model or RewardModel.bernoulli())
    logger.info(f"Loaded {len(spec)} segments x {env.n_arms} arms from {path}")
    return env


def _write(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def traces_frame(runs: Iterable[Any]) -> pd.DataFrame:
    parts = []
    for run in runs:
        n = len(run.arms)
        parts.append(pd.DataFrame({
            "replication": np.full(n, run.replication),
            "policy": np.full(n, run.policy, dtype=object),
            "t": np.arange(1, n + 1),
            "arm": run.arms,
            "reward": run.rewards,
            "inst_regret": run.inst_regret,
            "cum_regret": run.cum_regret,
            "restart": run.restarts.astype(np.int64),
        }))
    if not parts:
        return pd.DataFrame(columns=TRACE_COLUMNS)
    return pd.concat(parts, ignore_index=True).sort_values(
        ["replication", "policy", "t"], kind="stable"
    ).reset_index(drop=True)


def write_traces(runs: Iterable[Any], out_dir: Path) -> Path:
    return _write(traces_frame(runs), out_dir / "traces.csv")


def write_events(events: Iterable[Any], out_dir: Path) -> Path:
    rows = [
        {
            "replication": e.replication, "policy": e.policy, "time": e.time,
            "arm": e.arm, "split": e.split, "kind": e.kind, "true_cp": e.true_cp,
        }
        for e in events
    ]
    frame = pd.DataFrame(rows, columns=EVENT_COLUMNS)
    frame = frame.astype({"arm": "Int64", "split": "Int64", "true_cp": "Int64"})
    frame = frame.sort_values(["replication", "policy", "time"], kind="stable").reset_index(drop=True)
    return _write(frame, out_dir / "events.csv")


def write_summary(rows: list[dict[str, Any]], out_dir: Path) -> Path:
    return _write(pd.DataFrame(rows, columns=SUMMARY_COLUMNS), out_dir / "summary.csv")


def write_failures(failures: Iterable[Any], out_dir: Path) -> Path | None:
    rows = [{"replication": f.replication, "policy": f.policy, "error": f.error} for f in failures]
    if not rows:
        return None
    return _write(pd.DataFrame(rows, columns=FAILURE_COLUMNS), out_dir / "failures.csv")


def write_bench(rows: list[dict[str, Any]], out_dir: Path) -> Path:
    return _write(pd.DataFrame(rows, columns=BENCH_COLUMNS), out_dir / "bench.csv")


def write_eta_sweep(rows: list[dict[str, Any]], out_dir: Path) -> Path:
    return _write(pd.DataFrame(rows, columns=ETA_COLUMNS), out_dir / "eta_sweep.csv")


def to_jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return str(value)
    return value


def write_bounds(report: dict[str, Any], out_dir: Path) -> Path:
    path = out_dir / "bounds.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(report), f, indent=2)
    logger.info(f"Wrote bounds report to {path}")
    return path
