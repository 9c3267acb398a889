"""Session export: a markdown board document or a flat CSV.

The markdown table mirrors the physical board: one column per
criterion, rows padded with "~" where columns are unequal. Rejected
artifacts are excluded from both formats.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from .errors import ValidationError
from .session import SessionState, Status

FORMAT_MARKDOWN = "MARKDOWN"
FORMAT_CSV = "CSV"

_FORMAT_ALIASES = {
    "md": FORMAT_MARKDOWN,
    "markdown": FORMAT_MARKDOWN,
    "csv": FORMAT_CSV,
}


@dataclass(frozen=True)
class ExportDocument:
    format: str
    content: bytes

    @property
    def text(self) -> str:
        return self.content.decode("utf-8")


def _cell(text: str) -> str:
    return text.replace("\n", " ").replace("|", "\\|")


def _markdown(state: SessionState) -> str:
    lines = [f"# {state.activity.name} board", ""]
    labels = [c.label for c in state.activity.criteria]
    columns = [
        [a.text for a in state.board if a.criterion_key == c.key and a.status != Status.REJECTED]
        for c in state.activity.criteria
    ]
    lines.append("| " + " | ".join(_cell(label) for label in labels) + " |")
    lines.append("| " + " | ".join("---" for _ in labels) + " |")
    height = max((len(col) for col in columns), default=0)
    for row in range(height):
        cells = [_cell(col[row]) if row < len(col) else "~" for col in columns]
        lines.append("| " + " | ".join(cells) + " |")

    if state.clusters:
        lines += ["", "## Clusters"]
        for cluster in state.clusters:
            lines += ["", f"### {cluster.label}"]
            for member_id in cluster.member_ids:
                lines.append(f"- {state.artifact(member_id).text}")

    if state.hills:
        lines += ["", "## Hills"]
        for i, hill in enumerate(state.hills, start=1):
            lines.append(f"{i}. {hill.text}")

    return "\n".join(lines) + "\n"


def _csv(state: SessionState) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)  # RFC 4180: CRLF row endings
    writer.writerow(["id", "criterion", "text", "origin", "status", "cluster"])
    labels = {c.id: c.label for c in state.clusters}
    for artifact in state.board:
        if artifact.status == Status.REJECTED:
            continue
        origin = "agent" if artifact.author is None else f"human:{artifact.author}"
        writer.writerow(
            [
                artifact.id,
                artifact.criterion_key,
                artifact.text,
                origin,
                artifact.status.value,
                labels.get(artifact.cluster_id, ""),
            ]
        )
    return buffer.getvalue()


def export_session(state: SessionState, format: str) -> ExportDocument:
    """Render a session snapshot in the requested format ("md" or "csv")."""
    normalized = _FORMAT_ALIASES.get(format.lower())
    if normalized is None:
        raise ValidationError(f"unknown export format {format!r} (expected md or csv)")
    if normalized == FORMAT_MARKDOWN:
        return ExportDocument(FORMAT_MARKDOWN, _markdown(state).encode("utf-8"))
    return ExportDocument(FORMAT_CSV, _csv(state).encode("utf-8"))
