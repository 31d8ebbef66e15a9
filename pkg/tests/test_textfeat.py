import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from convsearch.errors import ConfigurationError
from convsearch.textfeat import (EmbeddingTable, Featurizer, PatternRule,
                                 embed_average, fit_term_weights, match_patterns,
                                 match_wildcard, tokenize, weigh)

# -- tokenize ------------------------------------------------------------------

def test_tokenize_keeps_intra_word_apostrophes():
    assert tokenize("Let's talk about Wonder Woman.") == \
        ["let's", "talk", "about", "wonder", "woman"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_strips_punctuation():
    assert tokenize("how to cook rice?") == ["how", "to", "cook", "rice"]


# -- term weights ---------------------------------------------------------------

CORPUS = [["good", "movie"], ["good", "music"]]


def test_fit_term_weights_idf():
    model = fit_term_weights(CORPUS)
    assert model.doc_count == 2
    assert model.doc_frequency["movie"] == 1
    assert model.idf("good") == pytest.approx(1.0)
    assert model.idf("movie") == pytest.approx(math.log(3 / 2) + 1, abs=1e-9)


def test_fit_single_doc():
    model = fit_term_weights([["a"]])
    assert model.idf("a") == pytest.approx(1.0)


def test_fit_empty_corpus_rejected():
    with pytest.raises(ConfigurationError):
        fit_term_weights([])


def test_weigh_normalized_values():
    model = fit_term_weights(CORPUS)
    vec = weigh(model, ["good", "movie"])
    assert vec[model.vocabulary["good"]] == pytest.approx(0.5797, abs=1e-4)
    assert vec[model.vocabulary["movie"]] == pytest.approx(0.8148, abs=1e-4)
    assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-9)


def test_weigh_oov_and_empty_are_zero():
    model = fit_term_weights(CORPUS)
    assert not weigh(model, ["zzz"]).any()
    assert not weigh(model, []).any()


@given(st.lists(st.sampled_from(["good", "movie", "music", "zzz", "what"]), max_size=12))
def test_weigh_norm_is_zero_or_one(tokens):
    model = fit_term_weights(CORPUS)
    norm = np.linalg.norm(weigh(model, tokens))
    assert norm == pytest.approx(0.0, abs=1e-9) or norm == pytest.approx(1.0, abs=1e-9)


# -- embeddings -----------------------------------------------------------------

def _table():
    return EmbeddingTable(2, {"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])})


def test_embed_average_mean():
    assert embed_average(_table(), ["a", "b"]).tolist() == [0.5, 0.5]


def test_embed_average_identity():
    assert embed_average(_table(), ["a"]).tolist() == [1.0, 0.0]


def test_embed_average_oov_zero():
    assert embed_average(_table(), ["zzz"]).tolist() == [0.0, 0.0]


@given(st.permutations(["a", "b", "a", "zzz"]))
def test_embed_average_permutation_invariant(tokens):
    baseline = embed_average(_table(), ["a", "b", "a", "zzz"])
    assert np.allclose(embed_average(_table(), list(tokens)), baseline)


def test_embedding_table_load_round_trip(tmp_path):
    path = tmp_path / "emb.txt"
    path.write_text("a 1.0 0.0\nb 0.0 1.0\n")
    table = EmbeddingTable.load(str(path))
    assert table.dimension == 2
    assert table.vectors["b"].tolist() == [0.0, 1.0]


def test_embedding_table_rejects_ragged(tmp_path):
    path = tmp_path / "emb.txt"
    path.write_text("a 1.0 0.0\nb 0.0\n")
    with pytest.raises(ConfigurationError):
        EmbeddingTable.load(str(path))


# -- patterns ---------------------------------------------------------------------

COOK = PatternRule("cook", "how to cook X".split(), 0)


def test_pattern_match():
    assert match_patterns([COOK], ["how", "to", "cook", "pasta"]).tolist() == [1.0]


def test_pattern_wildcard_needs_a_token():
    assert match_patterns([COOK], ["how", "to", "cook"]).tolist() == [0.0]


def test_pattern_news_about():
    rule = PatternRule("news", "what is the news about X".split(), 0)
    tokens = ["what", "is", "the", "news", "about", "mars"]
    assert match_patterns([rule], tokens).tolist() == [1.0]


def test_pattern_literal_absent_never_flags():
    assert match_patterns([COOK], ["how", "to", "bake", "bread"]).tolist() == [0.0]


def test_wildcard_capture():
    assert match_wildcard("my name is X".split(), ["my", "name", "is", "alex", "p"]) == ["alex", "p"]
    assert match_wildcard(["hello"], ["hello"]) == []
    assert match_wildcard(["hello"], ["hello", "there"]) is None


def test_two_wildcards_rejected():
    with pytest.raises(ConfigurationError):
        PatternRule("bad", "X and X".split(), 0)


# -- featurize --------------------------------------------------------------------

def _featurizer():
    return Featurizer(fit_term_weights(CORPUS), _table(),
                      [COOK, PatternRule("talk", "let's talk about X".split(), 1)])


def test_featurize_block_widths():
    f = _featurizer()
    fv = f.featurize("good movie")
    assert len(fv.lexical) == 3  # vocabulary: good, movie, music
    assert len(fv.semantic) == 2
    assert len(fv.syntactic) == 2
    assert fv.width == f.width


def test_featurize_empty_is_zero():
    assert not _featurizer().featurize("").concat().any()


def test_featurize_sets_pattern_flag_and_lexical():
    fv = _featurizer().featurize("how to cook good movie")
    assert fv.syntactic.tolist() == [1.0, 0.0]
    assert np.linalg.norm(fv.lexical) == pytest.approx(1.0)


def test_featurize_deterministic():
    f = _featurizer()
    a = f.featurize("let's talk about good music").concat()
    b = f.featurize("let's talk about good music").concat()
    assert a.tobytes() == b.tobytes()
