from .report import to_csv, to_jsonl, write_report
from .runner import (
    RUNS_PER_LEVEL,
    AgentLoadError,
    BatchReport,
    RunResult,
    run_batch,
    run_level,
)
from .score import InvalidTime, score_run

__all__ = [
    "AgentLoadError", "BatchReport", "InvalidTime", "RUNS_PER_LEVEL",
    "RunResult", "run_batch", "run_level", "score_run", "to_csv", "to_jsonl",
    "write_report",
]
