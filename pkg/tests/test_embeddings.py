"""Tests for word-vector loading, PCA reduction and CBOW averaging."""

from pathlib import Path

import numpy as np
import pytest

from qexgan.corpus import TokenSequence, Vocabulary
from qexgan.embeddings import (
    EmbeddingTable,
    cbow,
    load_embedding_table,
    reduce_dimensions,
    write_embedding_table,
)
from qexgan.errors import (
    DegenerateCovarianceError,
    EmptyInputError,
    MalformedRecordError,
    MissingInputError,
)
from qexgan.types import OovPolicy


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "vectors.vec"
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadEmbeddingTable:
    def test_with_header(self, tmp_path: Path) -> None:
        table = load_embedding_table(_write(tmp_path, "2 3\na 1 2 3\nb 4 5 6\n"))
        assert table.tokens == ("a", "b")
        assert table.dimension == 3
        np.testing.assert_array_equal(table.lookup("b"), [4.0, 5.0, 6.0])

    def test_without_header(self, tmp_path: Path) -> None:
        table = load_embedding_table(_write(tmp_path, "a 1 2\nb 3 4\n"))
        assert len(table) == 2

    def test_duplicate_token_keeps_first(self, tmp_path: Path) -> None:
        table = load_embedding_table(_write(tmp_path, "a 1 2\na 9 9\n"))
        np.testing.assert_array_equal(table.lookup("a"), [1.0, 2.0])

    def test_ragged_vector_names_the_line(self, tmp_path: Path) -> None:
        path = _write(tmp_path, "a 1 2\nb 3\n")
        with pytest.raises(MalformedRecordError) as exc_info:
            load_embedding_table(path)
        assert exc_info.value.line_number == 2

    def test_non_numeric_value(self, tmp_path: Path) -> None:
        with pytest.raises(MalformedRecordError):
            load_embedding_table(_write(tmp_path, "a 1 x\n"))

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(MissingInputError):
            load_embedding_table(tmp_path / "absent.vec")

    def test_empty_file(self, tmp_path: Path) -> None:
        with pytest.raises(EmptyInputError):
            load_embedding_table(_write(tmp_path, "\n"))

    def test_write_round_trip(self, tmp_path: Path, toy_table: EmbeddingTable) -> None:
        path = tmp_path / "out.vec"
        write_embedding_table(toy_table, path)
        loaded = load_embedding_table(path)
        assert loaded.tokens == toy_table.tokens
        np.testing.assert_allclose(loaded.matrix, toy_table.matrix, rtol=1e-8)


class TestOovPolicy:
    def test_zero_policy(self) -> None:
        table = EmbeddingTable(("a",), np.array([[1.0, 2.0]]))
        np.testing.assert_array_equal(table.lookup("zz"), [0.0, 0.0])

    def test_unk_vector_is_the_table_mean(self) -> None:
        table = EmbeddingTable(
            ("a", "b"), np.array([[1.0, 2.0], [3.0, 6.0]]), OovPolicy.UNK_VECTOR
        )
        np.testing.assert_array_equal(table.lookup("zz"), [2.0, 4.0])

    def test_vocabulary_matrix_rows_follow_ids(self) -> None:
        table = EmbeddingTable(("a", "b"), np.array([[1.0, 2.0], [3.0, 6.0]]))
        matrix = table.vocabulary_matrix(Vocabulary.from_tokens(["b", "a"]))
        assert matrix.shape == (6, 2)
        np.testing.assert_array_equal(matrix[:4], np.zeros((4, 2)))
        np.testing.assert_array_equal(matrix[4], [3.0, 6.0])

    def test_restricted_to_keeps_table_order(self, toy_table: EmbeddingTable) -> None:
        kept = toy_table.restricted_to(["yazlik", "etek", "not-there"])
        assert kept.tokens == ("etek", "yazlik")


class TestCbow:
    def setup_method(self) -> None:
        self.table = EmbeddingTable(
            ("a", "b", "c"), np.array([[2.0, 0.0], [0.0, 4.0], [1.0, 1.0]])
        )

    def test_mean(self) -> None:
        np.testing.assert_array_equal(cbow(["a", "b"], self.table), [1.0, 2.0])

    def test_weighted(self) -> None:
        vector = cbow(TokenSequence(("a", "b")), self.table, [3.0, 1.0])
        np.testing.assert_allclose(vector, [1.5, 1.0])

    def test_zero_weights_and_empty_sequence_give_zero(self) -> None:
        np.testing.assert_array_equal(cbow(["a"], self.table, [0.0]), [0.0, 0.0])
        np.testing.assert_array_equal(cbow([], self.table), [0.0, 0.0])

    def test_weight_count_must_match(self) -> None:
        with pytest.raises(ValueError):
            cbow(["a", "b"], self.table, [1.0])

    def test_oov_token_counts_as_a_zero_vector(self) -> None:
        np.testing.assert_array_equal(cbow(["a", "zz"], self.table), [1.0, 0.0])

    def test_oov_token_takes_the_unk_vector_under_that_policy(self) -> None:
        table = self.table.with_policy(OovPolicy.UNK_VECTOR)
        np.testing.assert_allclose(cbow(["zz"], table), [1.0, 5.0 / 3.0])

    def test_norm_bounded_by_largest_vector(self, toy_table: EmbeddingTable) -> None:
        rng = np.random.default_rng(0)
        norms = np.linalg.norm(toy_table.matrix, axis=1)
        for _ in range(20):
            picks = rng.choice(len(toy_table), size=4)
            tokens = [toy_table.tokens[i] for i in picks]
            weights = rng.uniform(0.1, 2.0, size=4)
            vector = cbow(tokens, toy_table, weights)
            assert np.linalg.norm(vector) <= norms[picks].max() + 1e-12


class TestReduceDimensions:
    def test_axis_aligned_data_projects_onto_itself(self) -> None:
        matrix = np.array([[2.0, 0.0], [-2.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
        reduced = reduce_dimensions(EmbeddingTable(tuple("abcd"), matrix), 2)
        np.testing.assert_allclose(reduced.matrix, matrix, atol=1e-12)

    def test_components_ordered_by_variance(self, toy_table: EmbeddingTable) -> None:
        reduced = reduce_dimensions(toy_table, 3)
        variances = reduced.matrix.var(axis=0)
        assert reduced.dimension == 3
        assert reduced.tokens == toy_table.tokens
        assert list(variances) == sorted(variances, reverse=True)

    def test_deterministic(self, toy_table: EmbeddingTable) -> None:
        first = reduce_dimensions(toy_table, 2)
        second = reduce_dimensions(toy_table, 2)
        np.testing.assert_array_equal(first.matrix, second.matrix)

    def test_collinear_vectors_are_degenerate(self) -> None:
        matrix = np.outer([-3.0, -1.0, 1.0, 3.0], [1.0, 0.0, 0.0]) + 1.0
        with pytest.raises(DegenerateCovarianceError) as exc_info:
            reduce_dimensions(EmbeddingTable(tuple("abcd"), matrix), 2)
        assert exc_info.value.rank == 1

    def test_target_above_dimension(self, toy_table: EmbeddingTable) -> None:
        with pytest.raises(ValueError):
            reduce_dimensions(toy_table, 5)

    def test_collinear_points_keep_their_distances_in_one_dimension(self) -> None:
        direction = np.array([1.0, -2.0, 0.5])
        offsets = np.array([-3.0, -0.5, 0.0, 1.25, 4.0])
        matrix = offsets[:, None] * direction + np.array([2.0, 1.0, -1.0])
        reduced = reduce_dimensions(EmbeddingTable(tuple("abcde"), matrix), 1)

        before = np.linalg.norm(matrix[:, None] - matrix[None], axis=-1)
        after = np.abs(reduced.matrix[:, None, 0] - reduced.matrix[None, :, 0])
        np.testing.assert_allclose(after, before, atol=1e-9)

    @pytest.mark.parametrize("target_dim", [1, 3, 7])
    def test_reconstruction_error_is_the_discarded_variance(
        self, target_dim: int
    ) -> None:
        matrix = np.random.default_rng(target_dim).normal(size=(50, 10))
        tokens = tuple(f"w{i}" for i in range(50))
        reduced = reduce_dimensions(EmbeddingTable(tokens, matrix), target_dim)

        centered = matrix - matrix.mean(axis=0)
        total = (centered**2).sum(axis=1).mean()
        kept = (reduced.matrix**2).sum(axis=1).mean()
        eigenvalues = np.sort(np.linalg.eigvalsh(np.cov(matrix.T, bias=True)))
        discarded = eigenvalues[: 10 - target_dim].sum()
        assert total - kept == pytest.approx(discarded, rel=1e-9)
