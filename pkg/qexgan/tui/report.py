"""Framed console rendering of corpus statistics and evaluation tables."""

from collections.abc import Sequence

from prompt_toolkit import print_formatted_text
from prompt_toolkit.formatted_text import HTML
from prompt_toolkit.shortcuts import print_container
from prompt_toolkit.widgets import Frame, TextArea

from qexgan.corpus import CorpusStats
from qexgan.metrics import TABLE_HEADER, EvaluationReport
from qexgan.pt_style import get_cli_style


def print_success(message: str) -> None:
    print_formatted_text(HTML(f"<green>{_escape(message)}</green>"))


def print_info(message: str) -> None:
    print_formatted_text(
        HTML(f"<grey>{_escape(message)}</grey>"), style=get_cli_style()
    )


def print_warning(message: str) -> None:
    print_formatted_text(HTML(f"<yellow>{_escape(message)}</yellow>"))


def print_error(message: str) -> None:
    print_formatted_text(HTML(f"<red>Error: {_escape(message)}</red>"))


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _aligned(labels_and_values: Sequence[tuple[str, str]]) -> str:
    label_width = max(len(label) for label, _ in labels_and_values)
    return "\n".join(
        f"{label:<{label_width}} {value}" for label, value in labels_and_values
    )


def format_stats(stats: CorpusStats) -> str:
    """Per-side max / mean / min word counts, then the length ratio."""
    rows: list[tuple[str, str]] = [("   Pairs:", f"{stats.pair_count:,}"), ("", "")]
    for title, side in (("Query", stats.query), ("Document", stats.document)):
        rows += [
            (f"   {title} words (max):", f"{side.max_words}"),
            (f"   {title} words (mean):", f"{side.mean_words:.2f}"),
            (f"   {title} words (min):", f"{side.min_words}"),
            (f"   {title} vocabulary:", f"{side.unique_words:,}"),
            ("", ""),
        ]
    rows.append(("   Document/query ratio:", f"{stats.document_to_query_ratio:.2f}"))
    return _aligned(rows)


def format_evaluation_table(rows: Sequence[tuple[str, EvaluationReport]]) -> str:
    """One row per labelled report under a shared header."""
    label_width = max([len("Model"), *(len(label) for label, _ in rows)])
    lines = [f"{'Model':<{label_width}} | {TABLE_HEADER}"]
    lines += [
        f"{label:<{label_width}} | {report.table_row()}" for label, report in rows
    ]
    return "\n".join(lines)


def _framed(text: str, title: str) -> None:
    container = Frame(
        TextArea(text=text, read_only=True, wrap_lines=True),
        title=title,
    )
    print_container(container, style=get_cli_style())


def display_stats(stats: CorpusStats) -> None:
    _framed(format_stats(stats), "Dataset Statistics")


def display_evaluation(rows: Sequence[tuple[str, EvaluationReport]]) -> None:
    _framed(format_evaluation_table(rows), "Generator Evaluation")
