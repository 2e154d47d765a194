"""Structured pass/fail result shared by the verification-style operations."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.ok

    @staticmethod
    def passed() -> "CheckResult":
        return CheckResult(True, None)

    @staticmethod
    def failed(violation: str) -> "CheckResult":
        return CheckResult(False, violation)
