import math
from unittest.mock import patch

from prompt_toolkit.formatted_text import HTML

from qexgan.corpus import CorpusStats, SideStats
from qexgan.metrics import EvaluationMetadata, EvaluationReport
from qexgan.tui.report import (
    display_evaluation,
    display_stats,
    format_evaluation_table,
    format_stats,
    print_error,
    print_warning,
)


def _stats() -> CorpusStats:
    return CorpusStats(
        pair_count=1200,
        query=SideStats(max_words=5, mean_words=2.5, min_words=1, unique_words=300),
        document=SideStats(
            max_words=30, mean_words=10.0, min_words=2, unique_words=4500
        ),
        document_to_query_ratio=4.0,
    )


def _report(ce: float) -> EvaluationReport:
    return EvaluationReport(
        ce=ce,
        perplexity=math.exp(ce),
        word_coverage=0.4,
        semantic_similarity_mean=0.8,
        semantic_similarity_std=0.1,
        discriminator_accuracy=0.5,
        metadata=EvaluationMetadata(strategy="self"),
    )


class TestFormatting:
    def test_stats_lists_both_sides(self) -> None:
        text = format_stats(_stats())
        assert "1,200" in text
        assert "4,500" in text
        assert "Query words (mean):" in text
        assert "Document words (max):" in text
        assert text.rstrip().endswith("4.00")

    def test_evaluation_table_aligns_labels(self) -> None:
        text = format_evaluation_table(
            [("Self", _report(0.5)), ("Word sim", _report(0.25))]
        )
        lines = text.splitlines()
        assert len(lines) == 3
        assert lines[0].startswith("Model    | CE | PPL")
        assert lines[1].startswith("Self     | 0.500 | 1.649")
        assert lines[2].startswith("Word sim | 0.250 | 1.284")


class TestDisplay:
    def test_stats_are_framed(self) -> None:
        with patch("qexgan.tui.report.print_container") as mock_print:
            display_stats(_stats())
        mock_print.assert_called_once()

    def test_evaluation_is_framed(self) -> None:
        with patch("qexgan.tui.report.print_container") as mock_print:
            display_evaluation([("Self", _report(0.5))])
        mock_print.assert_called_once()

    def test_error_markup_is_escaped(self) -> None:
        with patch("qexgan.tui.report.print_formatted_text") as mock_print:
            print_error("expected <query> & <document>")
        (message,), _ = mock_print.call_args
        assert isinstance(message, HTML)
        assert message.value == (
            "<red>Error: expected &lt;query&gt; &amp; &lt;document&gt;</red>"
        )

    def test_warning_is_yellow(self) -> None:
        with patch("qexgan.tui.report.print_formatted_text") as mock_print:
            print_warning("careful")
        (message,), _ = mock_print.call_args
        assert message.value == "<yellow>careful</yellow>"
