from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    severity: Severity
    subject: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity.value} {self.subject} {self.message}"


def error(subject: str, message: str) -> Finding:
    return Finding(Severity.ERROR, subject, message)


def warning(subject: str, message: str) -> Finding:
    return Finding(Severity.WARNING, subject, message)


@dataclass
class ValidationReport:
    """Findings are data: validators collect them instead of raising."""

    findings: list[Finding] = field(default_factory=list)

    def __iter__(self) -> Iterator[Finding]:
        return iter(self.findings)

    def __len__(self) -> int:
        return len(self.findings)

    def extend(self, findings: Iterable[Finding]) -> None:
        self.findings.extend(findings)

    def append(self, finding: Finding) -> None:
        self.findings.append(finding)

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity is Severity.ERROR]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity is Severity.WARNING]

    @property
    def ok(self) -> bool:
        return not self.errors

    def render(self) -> str:
        return "".join(f"{f}\n" for f in self.findings)
