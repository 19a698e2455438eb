import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opdist.corpus import Dataset, Opinion
from opdist.distance import (
    DifferenceFn,
    DistanceMatrix,
    MissingResourceError,
    distance_matrix,
    f_abs,
    f_emd,
    f_jsd,
    opinion_distance,
    opinion_distance_detail,
)
from opdist.polarity import OpinionRepresentation, SubjectPolarity
from opdist.spotter import OpinionSubject


def rep(oid, items, mode="discrete"):
    out = []
    for cid, v in items:
        pol = SubjectPolarity(mode, distribution=v) if mode == "distribution" else SubjectPolarity(mode, value=float(v))
        out.append((OpinionSubject(cid, ()), pol))
    return OpinionRepresentation(oid, tuple(out))


def test_difference_functions():
    assert f_abs(-1, 1) == 2
    assert f_jsd((1, 0, 0), (0, 0, 1)) == pytest.approx(1.0)
    assert f_jsd((0.2, 0.3, 0.5), (0.2, 0.3, 0.5)) == 0.0
    assert f_emd((1, 0, 0), (0, 0, 1)) == pytest.approx(1.0)
    assert f_emd((0, 1, 0), (0, 0, 1)) == pytest.approx(0.5)


def test_difference_fn_type_checks():
    with pytest.raises(TypeError):
        DifferenceFn("abs")((0, 1, 0), 1.0)
    with pytest.raises(TypeError):
        DifferenceFn("jsd")(1.0, 1.0)
    with pytest.raises(ValueError):
        DifferenceFn("cosine")


def test_opposite_polarities_on_shared_subjects():
    a = rep("a", [("Hillary", 1), ("Trump", -1)])
    b = rep("b", [("Hillary", -1), ("Trump", 1)])
    assert opinion_distance(a, b) == 1.0
    assert opinion_distance(a, a) == 0.0


def test_undefined_when_nothing_maps():
    a = rep("a", [("X", 1)])
    b = rep("b", [("Y", 1)])
    assert opinion_distance(a, b) is None
    assert opinion_distance(a, rep("e", [])) is None
    assert opinion_distance_detail(a, b).undefined


def test_partial_mapping_only_counts_mapped_pairs():
    a = rep("a", [("X", 1), ("Y", 1)])
    b = rep("b", [("X", -1), ("Z", 1)])
    assert opinion_distance(a, b) == 1.0


def test_distribution_mode():
    a = rep("a", [("X", (1.0, 0.0, 0.0))], "distribution")
    b = rep("b", [("X", (0.0, 0.0, 1.0))], "distribution")
    assert opinion_distance(a, b, "jsd") == pytest.approx(0.5)
    assert opinion_distance(a, b, "emd") == pytest.approx(0.5)


concepts = st.sampled_from(["A", "B", "C", "D"])
reps = st.lists(st.tuples(concepts, st.sampled_from([-1, 1])), min_size=1, max_size=4, unique_by=lambda t: t[0])


@settings(max_examples=200, deadline=None)
@given(reps, reps)
def test_od_symmetric_and_bounded(x, y):
    a, b = rep("a", x), rep("b", y)
    d1, d2 = opinion_distance(a, b), opinion_distance(b, a)
    assert d1 == d2
    if d1 is not None:
        assert 0.0 <= d1 <= 1.0


def test_matrix_and_tsv_round_trip(tmp_path):
    reps_ = [rep("a", [("X", 1)]), rep("b", [("X", -1)]), rep("c", [("Y", 1)])]
    ds = Dataset("d", tuple(Opinion.from_text(r.opinion_id, "x") for r in reps_))
    dm = distance_matrix(ds, "od", resources={"reps": reps_})
    np.testing.assert_array_equal(dm.values, [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    assert dm.mask[0, 2] and not dm.mask[0, 1] and not dm.mask[0, 0]
    assert dm.n_undefined == 2
    dm.to_tsv(tmp_path / "d.tsv", tmp_path / "m.tsv")
    back = DistanceMatrix.from_tsv(tmp_path / "d.tsv", tmp_path / "m.tsv")
    assert back.ids == dm.ids
    np.testing.assert_array_equal(back.values, dm.values)
    np.testing.assert_array_equal(back.mask, dm.mask)


def test_workers_do_not_change_result():
    rng = np.random.default_rng(1)
    reps_ = [rep(str(i), [(c, rng.choice([-1, 1])) for c in "ABC" if rng.random() < 0.7] or [("A", 1)]) for i in range(12)]
    ds = Dataset("d", tuple(Opinion.from_text(r.opinion_id, "x") for r in reps_))
    one = distance_matrix(ds, "od", resources={"reps": reps_}, config={"workers": 1})
    four = distance_matrix(ds, "od", resources={"reps": reps_}, config={"workers": 4})
    np.testing.assert_array_equal(one.values, four.values)


def test_missing_resources():
    ds = Dataset("d", (Opinion.from_text("a", "x"),))
    with pytest.raises(MissingResourceError, match="reps"):
        distance_matrix(ds, "od")
    with pytest.raises(MissingResourceError, match="vectors"):
        distance_matrix(ds, "text-wmd")
    with pytest.raises(ValueError, match="unknown measure"):
        distance_matrix(ds, "bm25")
