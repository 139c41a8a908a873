"""
Run reporting.

Emits annotation-style lines (::error::, ::warning::, ::notice::) on
stderr and keeps per-image failure/warning tallies for the closing
summary of batch runs.
"""

import sys
from dataclasses import dataclass
from enum import Enum
from typing import Optional, TextIO


class Severity(Enum):
    """Report severity levels."""

    ERROR = "error"
    WARNING = "warning"
    NOTICE = "notice"


@dataclass
class ReportEntry:
    """A single error, warning or notice."""

    severity: Severity
    message: str
    stem: Optional[str] = None
    file: Optional[str] = None


class Reporter:
    """
    Collects report entries and prints them as they arrive.

    Entries tied to an image stem are also grouped per stem so the
    summary can list which images failed.
    """

    def __init__(self, stream: Optional[TextIO] = None, quiet: bool = False):
        self.stream = stream
        self.quiet = quiet
        self.entries: list[ReportEntry] = []
        self.failed_items: dict[str, list[str]] = {}  # stem -> errors
        self.warning_items: dict[str, list[str]] = {}  # stem -> warnings

    def _out(self) -> TextIO:
        return self.stream if self.stream is not None else sys.stderr

    def _add(
        self,
        severity: Severity,
        message: str,
        stem: Optional[str],
        file: Optional[str],
    ) -> None:
        entry = ReportEntry(severity=severity, message=message, stem=stem, file=file)
        self.entries.append(entry)

        if stem and severity == Severity.ERROR:
            self.failed_items.setdefault(stem, []).append(message)
        elif stem and severity == Severity.WARNING:
            self.warning_items.setdefault(stem, []).append(message)

        self._print_annotation(entry)

    def error(self, message: str, stem: Optional[str] = None, file: Optional[str] = None) -> None:
        """Report an error, optionally tied to an image stem."""
        self._add(Severity.ERROR, message, stem, file)

    def warning(self, message: str, stem: Optional[str] = None, file: Optional[str] = None) -> None:
        """Report a warning, optionally tied to an image stem."""
        self._add(Severity.WARNING, message, stem, file)

    def notice(self, message: str, stem: Optional[str] = None) -> None:
        """Report an informational notice."""
        self._add(Severity.NOTICE, message, stem, None)

    def _print_annotation(self, entry: ReportEntry) -> None:
        if self.quiet and entry.severity == Severity.NOTICE:
            return
        location = f" file={entry.file}" if entry.file else ""
        prefix = f"{entry.stem}: " if entry.stem else ""
        print(f"::{entry.severity.value}{location}::{prefix}{entry.message}", file=self._out())

    def print_summary(self) -> None:
        """Print summary of all errors and warnings."""
        out = self._out()
        error_count = self.get_error_count()
        warning_count = self.get_warning_count()

        print("\n## Summary", file=out)
        if not error_count and not warning_count:
            print("No errors or warnings.", file=out)
            return
        print(f"Total: {error_count} errors, {warning_count} warnings", file=out)

        if self.failed_items:
            print("\n## Failed Images", file=out)
            for stem, errors in sorted(self.failed_items.items()):
                for error in errors:
                    print(f"- {stem}: {error}", file=out)

        if self.warning_items:
            print("\n## Warnings", file=out)
            for stem, warnings in sorted(self.warning_items.items()):
                for warning in warnings:
                    print(f"- {stem}: {warning}", file=out)

    def has_errors(self) -> bool:
        return any(e.severity == Severity.ERROR for e in self.entries)

    def has_failures(self) -> bool:
        """True when at least one image was skipped with an error."""
        return len(self.failed_items) > 0

    def get_failed_items(self) -> dict[str, list[str]]:
        return {stem: list(errors) for stem, errors in self.failed_items.items()}

    def get_error_count(self) -> int:
        return sum(1 for e in self.entries if e.severity == Severity.ERROR)

    def get_warning_count(self) -> int:
        return sum(1 for e in self.entries if e.severity == Severity.WARNING)
