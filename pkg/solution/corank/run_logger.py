"""
Run Logger for Verification Runs

Provides structured logging for:
- Pipeline stages (parse, solve, check, synthesize, ...)
- Certificate verdicts and violation counts
- Errors surfaced to the command line
- Per-run summaries built from the JSONL trail
"""

import json
import logging
import os
import uuid
from dataclasses import asdict, dataclass
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional


class LogLevel(Enum):
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    DEBUG = "DEBUG"


class RunStage(Enum):
    PARSE = "parse"
    SOLVE = "solve"
    CHECK = "check"
    SYNTHESIZE = "synthesize"
    STRATEGY = "strategy"
    SWEEP = "sweep"
    SIMULATE = "simulate"
    REPORT = "report"


class LogEntryType(Enum):
    RUN_START = "run_start"
    STAGE = "stage"
    VERDICT = "verdict"
    ERROR_HANDLING = "error_handling"
    RUN_END = "run_end"


@dataclass
class LogEntry:
    """Structured log entry for one verification run"""
    log_id: str
    timestamp: str
    run_id: str
    entry_type: LogEntryType
    stage: RunStage
    level: LogLevel
    message: str
    data: Dict[str, Any]


class RunLogger:
    """
    JSONL audit trail for toolkit runs.

    Console output goes to stderr so command output on stdout stays
    reproducible. The JSONL file is only written when a path is given.
    """

    def __init__(self, log_file_path: Optional[str] = None, console_level: int = logging.WARNING):
        self.log_file_path = log_file_path
        self.logger = self._setup_logger(console_level)
        self.current_run_id: Optional[str] = None
        self.run_logs: List[Dict[str, Any]] = []

    def _setup_logger(self, console_level: int) -> logging.Logger:
        """Setup console logger for run events"""
        logger = logging.getLogger("corank.run")
        logger.setLevel(logging.DEBUG)
        logger.propagate = False

        if not logger.handlers:
            console_handler = logging.StreamHandler()
            console_handler.setFormatter(
                logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
            )
            logger.addHandler(console_handler)
        for handler in logger.handlers:
            handler.setLevel(console_level)

        if self.log_file_path:
            directory = os.path.dirname(self.log_file_path)
            if directory:
                os.makedirs(directory, exist_ok=True)

        return logger

    def start_run(self, command: str, arguments: Dict[str, Any]) -> str:
        """Start a run and return its id"""
        self.current_run_id = f"run_{uuid.uuid4().hex[:8]}"
        self.run_logs = []
        self._log_entry(
            LogEntryType.RUN_START,
            RunStage.PARSE,
            LogLevel.INFO,
            f"Run started: {command}",
            {"command": command, "arguments": arguments},
        )
        return self.current_run_id

    def log_stage(self, stage: RunStage, message: str, stage_data: Optional[Dict[str, Any]] = None) -> None:
        """Log a pipeline stage transition"""
        self._log_entry(LogEntryType.STAGE, stage, LogLevel.INFO, message, stage_data or {})

    def log_verdict(self, kind: str, verdict: str, violation_count: int) -> None:
        level = LogLevel.INFO if verdict != "fail" else LogLevel.WARNING
        self._log_entry(
            LogEntryType.VERDICT,
            RunStage.CHECK,
            level,
            f"Certificate {kind}: {verdict} ({violation_count} violations)",
            {"kind": kind, "verdict": verdict, "violations": violation_count},
        )

    def log_error(self, stage: RunStage, error_type: str, error_message: str,
                  context: Optional[Dict[str, Any]] = None) -> None:
        """Log an error surfaced to the caller"""
        self._log_entry(
            LogEntryType.ERROR_HANDLING,
            stage,
            LogLevel.ERROR,
            f"{error_type}: {error_message}",
            {"error_type": error_type, "error_message": error_message, "context": context or {}},
        )

    def end_run(self, exit_code: int) -> None:
        self._log_entry(
            LogEntryType.RUN_END,
            RunStage.REPORT,
            LogLevel.INFO,
            f"Run finished with exit code {exit_code}",
            {"exit_code": exit_code},
        )

    def _log_entry(self, entry_type: LogEntryType, stage: RunStage, level: LogLevel,
                   message: str, data: Dict[str, Any]) -> None:
        """Create and store log entry"""
        log_entry = LogEntry(
            log_id=f"log_{uuid.uuid4().hex[:8]}",
            timestamp=datetime.now().isoformat(),
            run_id=self.current_run_id or "unknown",
            entry_type=entry_type,
            stage=stage,
            level=level,
            message=message,
            data=data,
        )

        log_dict = asdict(log_entry)
        log_dict["entry_type"] = log_entry.entry_type.value
        log_dict["stage"] = log_entry.stage.value
        log_dict["level"] = log_entry.level.value
        self.run_logs.append(log_dict)

        if self.log_file_path:
            try:
                with open(self.log_file_path, "a", encoding="utf-8") as f:
                    f.write(json.dumps(log_dict, default=str) + "\n")
            except OSError as e:
                self.logger.error(f"Failed to write log entry: {e}")

        log_message = f"[{stage.value.upper()}] {message}"
        if level == LogLevel.ERROR:
            self.logger.error(log_message)
        elif level == LogLevel.WARNING:
            self.logger.warning(log_message)
        else:
            self.logger.info(log_message)

    def get_run_logs(self) -> List[Dict[str, Any]]:
        """Get all logs for the current run"""
        return list(self.run_logs)

    def search_logs(self, criteria: Dict[str, Any]) -> List[Dict[str, Any]]:
        """Search the JSONL file (or the in-memory run) for matching entries"""
        if not self.log_file_path or not os.path.exists(self.log_file_path):
            source = self.run_logs
        else:
            source = []
            with open(self.log_file_path, "r", encoding="utf-8") as f:
                for line in f:
                    if not line.strip():
                        continue
                    try:
                        source.append(json.loads(line))
                    except json.JSONDecodeError:
                        continue
        return [
            entry for entry in source
            if all(entry.get(key) == value for key, value in criteria.items())
        ]

    def get_run_summary(self, run_id: Optional[str] = None) -> Dict[str, Any]:
        """Summarize stages, verdicts and errors of a run"""
        run_logs = self.search_logs({"run_id": run_id or self.current_run_id})
        if not run_logs:
            return {"error": "Run not found"}
        return {
            "run_id": run_logs[0]["run_id"],
            "stages": [entry["stage"] for entry in run_logs if entry["entry_type"] == "stage"],
            "verdicts": [entry["data"] for entry in run_logs if entry["entry_type"] == "verdict"],
            "errors": [entry["message"] for entry in run_logs if entry["entry_type"] == "error_handling"],
            "total_entries": len(run_logs),
        }
