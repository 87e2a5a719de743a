"""Three-valued check outcomes shared by the center and Poisson checkers."""

from __future__ import annotations

from dataclasses import dataclass, field

PASS, FAIL, VACUOUS = "pass", "fail", "vacuous"


@dataclass
class Verdict:
    status: str
    reason: str = ""
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in (PASS, FAIL, VACUOUS):
            raise ValueError(f"unknown verdict status {self.status!r}")

    @property
    def ok(self) -> bool:
        """Pass or vacuous; only an explicit failure counts against the check."""
        return self.status != FAIL

    def to_json(self) -> dict:
        out = {"status": self.status}
        if self.reason:
            out["reason"] = self.reason
        if self.data:
            out["data"] = self.data
        return out

    @classmethod
    def of(cls, ok: bool, reason: str = "", **data) -> Verdict:
        return cls(PASS if ok else FAIL, reason, data)
