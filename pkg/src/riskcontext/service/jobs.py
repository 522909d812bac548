"""In-process job queue: every mutation runs as a job on a worker thread,
serially by default, so artifacts stay deterministic."""
from __future__ import annotations

import itertools
import queue
import threading
from dataclasses import dataclass, field
from typing import Callable

JOB_KINDS = ("build", "train", "ingest", "prototypes", "explain", "evaluate")

STATE_QUEUED = "queued"
STATE_RUNNING = "running"
STATE_DONE = "done"
STATE_FAILED = "failed"

_TRANSITIONS = {
    STATE_QUEUED: {STATE_RUNNING},
    STATE_RUNNING: {STATE_DONE, STATE_FAILED},
    STATE_DONE: set(),
    STATE_FAILED: set(),
}


@dataclass
class JobRecord:
    job_id: str
    kind: str
    state: str = STATE_QUEUED
    params: dict = field(default_factory=dict)
    result: dict | None = None
    error: str | None = None

    def transition(self, state: str) -> None:
        if state not in _TRANSITIONS[self.state]:
            raise ValueError(f"illegal job transition {self.state} -> {state}")
        self.state = state

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "kind": self.kind,
            "state": self.state,
            "params": self.params,
            "result": self.result,
            "error": self.error,
        }


class JobQueue:
    """Single consumer queue; `runner(kind, params)` does the actual work."""

    def __init__(self, runner: Callable[[str, dict], dict], workers: int = 1):
        self._runner = runner
        self._queue: queue.Queue[str | None] = queue.Queue()
        self._jobs: dict[str, JobRecord] = {}
        self._lock = threading.Lock()
        self._counter = itertools.count(1)
        self._idle = threading.Event()
        self._idle.set()
        self._threads = [
            threading.Thread(target=self._work, daemon=True, name=f"jobs-{i}")
            for i in range(max(1, workers))
        ]
        for t in self._threads:
            t.start()

    def submit(self, kind: str, params: dict | None = None) -> JobRecord:
        if kind not in JOB_KINDS:
            raise ValueError(f"unknown job kind {kind!r}")
        with self._lock:
            job_id = f"job-{next(self._counter):04d}"
            record = JobRecord(job_id=job_id, kind=kind, params=params or {})
            self._jobs[job_id] = record
            self._idle.clear()
        self._queue.put(job_id)
        return record

    def get(self, job_id: str) -> JobRecord | None:
        with self._lock:
            return self._jobs.get(job_id)

    def has_active(self, kind: str) -> bool:
        with self._lock:
            return any(
                j.kind == kind and j.state in (STATE_QUEUED, STATE_RUNNING)
                for j in self._jobs.values()
            )

    def join(self, timeout: float = 60.0) -> bool:
        """Block until every submitted job has finished."""
        return self._idle.wait(timeout)

    def _work(self) -> None:
        while True:
            job_id = self._queue.get()
            if job_id is None:
                return
            with self._lock:
                record = self._jobs[job_id]
                record.transition(STATE_RUNNING)
            try:
                result = self._runner(record.kind, record.params)
            except Exception as exc:  # noqa: BLE001 - job errors surface via state
                with self._lock:
                    record.error = str(exc)
                    record.transition(STATE_FAILED)
            else:
                with self._lock:
                    record.result = result
                    record.transition(STATE_DONE)
            finally:
                self._queue.task_done()
                with self._lock:
                    if not any(
                        j.state in (STATE_QUEUED, STATE_RUNNING)
                        for j in self._jobs.values()
                    ):
                        self._idle.set()
