"""
Monitoring utilities for tracking the phases of a cubeplan run.
"""

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, Callable, Dict, Iterator, List, Optional


@dataclass
class RunStep:
    name: str
    status: str  # 'running', 'completed', 'error'
    start_time: datetime
    started: float = field(default_factory=time.perf_counter, repr=False)
    end_time: Optional[datetime] = None
    seconds: Optional[float] = None
    detail: Optional[Any] = None
    error: Optional[str] = None


class RunMonitor:
    def __init__(self):
        self.steps: List[RunStep] = []
        self.subscribers: List[Callable[[str, RunStep], None]] = []

    def subscribe(self, callback: Callable[[str, RunStep], None]) -> None:
        """Subscribe to step events ('step_started', 'step_completed', 'step_error')."""
        self.subscribers.append(callback)

    def start_step(self, name: str) -> RunStep:
        step = RunStep(name=name, status="running", start_time=datetime.now())
        self.steps.append(step)
        self._notify("step_started", step)
        return step

    def complete_step(self, step: RunStep, detail: Any = None) -> None:
        self._finish(step, "completed")
        step.detail = detail
        self._notify("step_completed", step)

    def error_step(self, step: RunStep, error: str) -> None:
        self._finish(step, "error")
        step.error = error
        self._notify("step_error", step)

    @contextmanager
    def step(self, name: str) -> Iterator[Dict[str, Any]]:
        """Track a block as one step; the yielded dict becomes the step detail."""
        current = self.start_step(name)
        detail: Dict[str, Any] = {}
        try:
            yield detail
        except Exception as e:
            self.error_step(current, str(e))
            raise
        self.complete_step(current, detail or None)

    def _finish(self, step: RunStep, status: str) -> None:
        step.status = status
        step.end_time = datetime.now()
        step.seconds = time.perf_counter() - step.started

    def _notify(self, event_type: str, step: RunStep) -> None:
        for callback in self.subscribers:
            callback(event_type, step)

    def to_dict(self) -> Dict[str, Any]:
        return {"steps": [self._step_to_dict(step) for step in self.steps]}

    def _step_to_dict(self, step: RunStep) -> Dict[str, Any]:
        return {
            "name": step.name,
            "status": step.status,
            "start_time": step.start_time.isoformat(),
            "end_time": step.end_time.isoformat() if step.end_time else None,
            "seconds": round(step.seconds, 6) if step.seconds is not None else None,
            "detail": step.detail,
            "error": step.error,
        }
