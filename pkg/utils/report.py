# utils/report.py
"""
CLI 출력 레코드 (JSON lines). 입력 한 줄당 출력 한 줄, 입력 순서 유지.
"""
import json
import time
from dataclasses import dataclass, field
from typing import Optional

from models.errors import MapSyntaxError, SphereDegreeError


@dataclass
class RunReport:
    input: str
    command: str
    outcome: str  # ok | refused | <error kind>
    payload: dict = field(default_factory=dict)
    wall_ms: float = 0.0
    line: Optional[int] = None

    def to_dict(self):
        record = {"input": self.input, "command": self.command}
        if self.line is not None:
            record["line"] = self.line
        record.update({"outcome": self.outcome, "payload": self.payload, "wall_ms": round(self.wall_ms, 3)})
        return record

    def to_json(self):
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @property
    def ok(self):
        return self.outcome == "ok"


def error_payload(exc):
    payload = {"message": str(exc)}
    if isinstance(exc, MapSyntaxError):
        payload.update({"position": exc.position, "detail": exc.message})
    return payload


def run_timed(command, text, action, line=None):
    """
    action() -> (outcome, payload). SphereDegreeError 는 레코드로 변환하고
    그 밖의 예외는 그대로 전파한다.
    """
    start = time.perf_counter()
    try:
        outcome, payload = action()
    except SphereDegreeError as exc:
        outcome, payload = exc.kind, error_payload(exc)
    wall_ms = (time.perf_counter() - start) * 1000
    return RunReport(text, command, outcome, payload, wall_ms, line)


def emit(report, stream):
    stream.write(report.to_json() + "\n")
    stream.flush()
