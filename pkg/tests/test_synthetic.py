from collections import Counter

from opdist.synthetic import make_contrastive_corpus


def bag(op):
    return Counter(t.normalized for t in op.tokens)


def test_every_opinion_shares_one_bag():
    ds = make_contrastive_corpus(20, seed=0)
    assert len(ds) == 40
    assert Counter(ds.labels) == {"pro": 20, "con": 20}
    first = bag(ds[0])
    assert all(bag(op) == first for op in ds)


def test_negated_variants_share_their_own_bag():
    ds = make_contrastive_corpus(10, seed=1, negated_fraction=0.5)
    bags = {frozenset(bag(op).items()) for op in ds}
    assert len(bags) == 2
    negated = [op for op in ds if "not" in bag(op)]
    assert Counter(op.label for op in negated) == {"pro": 5, "con": 5}


def test_generator_is_seeded():
    assert [o.text for o in make_contrastive_corpus(5, 3)] == [o.text for o in make_contrastive_corpus(5, 3)]
