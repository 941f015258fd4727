import logging
import json
import uuid
from datetime import datetime
from typing import Any, Dict, List, Optional


class RunLogger:
    """Appends one JSON object per run to a log file"""

    def __init__(self, log_file: str = 'squeezing_runs.log'):
        self.log_file = log_file
        self.logger = logging.getLogger(f'RunLogger.{log_file}')
        self.logger.propagate = False
        self.setup_logger(log_file)

    def setup_logger(self, log_file: str):
        if any(isinstance(h, logging.FileHandler) for h in self.logger.handlers):
            return
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        # The message is the JSON record itself so every line parses on its own
        file_handler.setFormatter(logging.Formatter('%(message)s'))
        self.logger.addHandler(file_handler)
        self.logger.setLevel(logging.INFO)

    def close(self):
        for handler in list(self.logger.handlers):
            handler.close()
            self.logger.removeHandler(handler)

    @staticmethod
    def new_run_id() -> str:
        return uuid.uuid4().hex[:12]

    def log_run(
        self,
        run_id: str,
        mode: str,
        params: Any,
        duration_s: float,
        checks: List[Dict[str, Any]],
        output: Optional[str] = None
    ):
        """One record per completed run, with the invariant checks that ran alongside it"""
        record = {
            'run_id': run_id,
            'mode': mode,
            'params': params,
            'duration_s': round(duration_s, 6),
            'checks_passed': all(check['passed'] for check in checks),
            'timestamp': datetime.now().isoformat(),
            'output': output,
            'checks': checks
        }
        self.logger.info(json.dumps(record, default=str))

    def log_error(self, run_id: str, mode: str, operation: str, message: str, duration_s: float):
        record = {
            'run_id': run_id,
            'mode': mode,
            'event': 'error',
            'operation': operation,
            'message': message,
            'duration_s': round(duration_s, 6),
            'checks_passed': False,
            'timestamp': datetime.now().isoformat()
        }
        self.logger.error(json.dumps(record, default=str))
