import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracle import brute_force_purity
from commdiff.synthgen import SynthSpec, build_synthetic
from commdiff.textprep import build_vocab, tokenize, vectorize
from commdiff.topicmodel import (
    EmptyHeldout,
    InvalidDistribution,
    InvalidHyperparameter,
    TopicIndexOutOfRange,
    TopicModel,
    assign_topic,
    canonical_order,
    infer_doc_topic,
    load_model,
    matching_purity,
    perplexity,
    permute_topics,
    pick_k,
    select_k,
    top_keywords,
    train_lda,
)


def planted(n_topics, docs_per_topic, block, length, seed=0):
    syn = build_synthetic(SynthSpec(n_topics=n_topics, docs_per_topic=docs_per_topic, vocab_block_size=block,
                                    doc_length=length, n_tweets=n_topics * docs_per_topic, seed=seed))
    toks = [tokenize(a["body"]) for a in syn.articles]
    vocab = build_vocab(toks)
    bows = [vectorize(t, vocab) for t in toks]
    truth = [syn.ground_truth["articles"][a["id"]]["topic"] for a in syn.articles]
    return bows, vocab, truth, syn.ground_truth["blocks"]


@pytest.fixture(scope="module")
def two_topic():
    bows, vocab, truth, blocks = planted(2, 100, 50, 50)
    model = train_lda(bows, vocab, 2, iterations=200, seed=3)
    return bows, vocab, truth, blocks, model


def test_planted_phi_mass_on_one_block(two_topic):
    _, vocab, _, blocks, model = two_topic
    for row in model.topic_word:
        mass = [sum(row[vocab.index[w]] for w in b if w in vocab) for b in blocks]
        assert max(mass) >= 0.9


def test_rows_are_distributions(two_topic):
    model = two_topic[4]
    np.testing.assert_allclose(model.doc_topic.sum(axis=1), 1.0, atol=1e-9)
    np.testing.assert_allclose(model.topic_word.sum(axis=1), 1.0, atol=1e-9)


def test_same_seed_bit_identical(two_topic):
    bows, vocab, _, _, model = two_topic
    again = train_lda(bows, vocab, 2, iterations=200, seed=3)
    assert np.array_equal(model.topic_word, again.topic_word)
    assert np.array_equal(model.doc_topic, again.doc_topic)


def test_planted_top_keywords_from_one_block(two_topic):
    _, _, _, blocks, model = two_topic
    for t in range(model.k):
        kws = top_keywords(model, t, 10)
        assert any(set(kws) <= set(b) for b in blocks)


def test_purity_on_planted(two_topic):
    _, _, truth, _, model = two_topic
    assigned = [int(np.argmax(r)) for r in model.doc_topic]
    assert matching_purity(assigned, truth) >= 0.9


def test_single_term_vocabulary_perplexity_is_one():
    docs = [{0: 3}, {0: 5}, {0: 1}]
    model = train_lda(docs, ["only"], 2, iterations=10)
    assert perplexity(model, [{0: 4}]) == pytest.approx(1.0, abs=1e-12)


def test_trained_k_beats_k1_on_heldout():
    bows, vocab, _, _ = planted(3, 60, 40, 60, seed=1)
    train, held = bows[:150], bows[150:]
    p3 = perplexity(train_lda(train, vocab, 3, iterations=150, seed=0), held, seed=0)
    p1 = perplexity(train_lda(train, vocab, 1, iterations=150, seed=0), held, seed=0)
    assert 0 < p3 <= p1 and np.isfinite(p3)


def test_empty_heldout_raises(two_topic):
    with pytest.raises(EmptyHeldout):
        perplexity(two_topic[4], [{}])


def test_hyperparameter_validation():
    with pytest.raises(InvalidHyperparameter):
        train_lda([{0: 1}], ["a"], 0)
    with pytest.raises(InvalidHyperparameter):
        train_lda([{0: 1}], ["a"], 2, alpha=-1.0)


def test_singleton_k_range():
    bows, vocab, _, _ = planted(2, 20, 20, 20)
    k, curve = select_k(bows, vocab, [4], iterations=20)
    assert k == 4 and [c[0] for c in curve] == [4]


def test_tie_rule_prefers_smaller_k():
    assert pick_k([(2, 100.4), (3, 100.0), (4, 120.0)]) == 2
    assert pick_k([(2, 101.0), (3, 100.0)]) == 3


@pytest.mark.parametrize("row,idx,prob", [
    ([0.1, 0.7, 0.2], 1, 0.7),
    ([0.5, 0.5], 0, 0.5),
    ([1 / 7] * 7, 0, 1 / 7),
])
def test_assign_topic(row, idx, prob):
    a = assign_topic(row)
    assert a.topic_index == idx
    assert a.probability == pytest.approx(prob)


@pytest.mark.parametrize("row", [[0.5, 0.6], [-0.1, 1.1], []])
def test_assign_topic_rejects_non_distributions(row):
    with pytest.raises(InvalidDistribution):
        assign_topic(row)


def tiny_model(phi, vocab):
    phi = np.asarray(phi, dtype=float)
    return TopicModel(k=phi.shape[0], topic_word=phi, doc_topic=np.full((1, phi.shape[0]), 1 / phi.shape[0]),
                      alpha=0.1, beta=0.01, iterations=0, seed=0, vocabulary=tuple(vocab))


def test_top_keywords_examples():
    m = tiny_model([[0.5, 0.3, 0.2]], ["x", "y", "z"])
    assert top_keywords(m, 0, 2) == ["x", "y"]
    assert top_keywords(m, 0, 10) == ["x", "y", "z"]
    with pytest.raises(TopicIndexOutOfRange):
        top_keywords(m, 1)


def test_top_keywords_ties_lexicographic():
    m = tiny_model([[0.25, 0.25, 0.5]], ["b", "a", "c"])
    assert top_keywords(m, 0, 3) == ["c", "a", "b"]


def test_save_load_round_trip(two_topic, tmp_path):
    from commdiff.topicmodel import save_model

    model = two_topic[4]
    save_model(model, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    assert back.k == model.k and back.vocabulary == model.vocabulary
    assert np.array_equal(back.topic_word, model.topic_word)
    assert np.array_equal(back.doc_topic, model.doc_topic)


def test_permutation_preserves_assignment_partition(two_topic):
    model = two_topic[4]
    swapped = permute_topics(model, [1, 0])
    a = [int(np.argmax(r)) for r in model.doc_topic]
    b = [int(np.argmax(r)) for r in swapped.doc_topic]
    assert [1 - x for x in a] == b
    assert np.array_equal(canonical_order(model).topic_word, canonical_order(swapped).topic_word)


def test_canonical_order_first_document_is_topic_zero(two_topic):
    model = canonical_order(two_topic[4])
    assert int(np.argmax(model.doc_topic[0])) == 0


def test_infer_matches_training_assignments(two_topic):
    bows, _, _, _, model = two_topic
    theta = infer_doc_topic(model, bows[:20], sweeps=50, seed=1)
    assert (theta.argmax(axis=1) == model.doc_topic[:20].argmax(axis=1)).all()


@given(st.lists(st.integers(0, 3), min_size=1, max_size=9), st.data())
def test_purity_matches_brute_force(assigned, data):
    truth = data.draw(st.lists(st.integers(0, 3), min_size=len(assigned), max_size=len(assigned)))
    assert matching_purity(assigned, truth) == pytest.approx(brute_force_purity(assigned, truth))


def test_purity_invariant_under_relabelling():
    assigned = [0, 0, 1, 1, 2, 2, 2]
    truth = [1, 1, 0, 2, 2, 2, 0]
    base = matching_purity(assigned, truth)
    for perm in itertools.permutations(range(3)):
        assert matching_purity([perm[a] for a in assigned], truth) == base


@given(st.lists(st.floats(0.01, 10), min_size=1, max_size=8), st.floats(0.1, 100))
def test_assign_topic_scale_invariant(weights, c):
    w = np.asarray(weights)
    base = assign_topic(w / w.sum()).topic_index
    scaled = w * c
    assert assign_topic(scaled / scaled.sum()).topic_index == base
