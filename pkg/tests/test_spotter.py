import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from opdist.corpus import Opinion
from opdist.spotter import (
    Gazetteer,
    SpotterError,
    TagMeClient,
    TagMeConfig,
    annotations_to_mentions,
    longest_match_spans,
    spot,
    spot_tagme,
)


def oracle_spans(keys, words):
    """Leftmost-longest spans, by checking every span length at every start."""
    out, i = [], 0
    while i < len(words):
        fits = [e for e in range(len(words), i, -1) if tuple(words[i:e]) in keys]
        if fits:
            out.append((i, fits[0]))
            i = fits[0]
        else:
            i += 1
    return out


VOCAB = ["a", "b", "c", "d"]


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.lists(st.sampled_from(VOCAB), min_size=1, max_size=3), min_size=1, max_size=6),
    st.lists(st.sampled_from(VOCAB), max_size=12),
)
def test_longest_match_against_oracle(entries, words):
    gaz = Gazetteer()
    for e in entries:
        gaz.add(" ".join(e), "C_" + "_".join(e), 0.5)
    assert longest_match_spans(gaz, words) == oracle_spans({tuple(e) for e in entries}, words)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(
        st.tuples(st.lists(st.sampled_from(VOCAB), min_size=1, max_size=2), st.floats(0, 1)), min_size=1, max_size=6
    ),
    st.lists(st.sampled_from(VOCAB), min_size=1, max_size=10),
    st.floats(0, 1),
    st.floats(0, 1),
)
def test_raising_threshold_only_removes_subjects(entries, words, t1, t2):
    lo, hi = sorted((t1, t2))
    gaz = Gazetteer()
    for e, lp in entries:
        gaz.add(" ".join(e), "C_" + "_".join(e), lp)
    op = Opinion.from_text("o", " ".join(words))
    low = {(s.concept_id, m.span) for s in spot(gaz, op, lo) for m in s.mentions}
    high = {(s.concept_id, m.span) for s in spot(gaz, op, hi) for m in s.mentions}
    assert high <= low


def test_longer_surface_wins_and_mentions_merge():
    gaz = Gazetteer()
    gaz.add("video", "Video", 0.4)
    gaz.add("video games", "Video_game", 0.5)
    gaz.add("games", "Video_game", 0.2)
    subs = spot(gaz, Opinion.from_text("o", "Video games are fun. Games rot brains."))
    assert [s.concept_id for s in subs] == ["Video_game"]
    assert [(m.sentence, m.span) for m in subs[0].mentions] == [(0, (0, 2)), (1, (0, 1))]
    assert subs[0].phrase == "Video games"


def test_candidate_tie_breaks_on_concept_id():
    gaz = Gazetteer()
    gaz.add("mercury", "Mercury_(planet)", 0.4)
    gaz.add("mercury", "Mercury_(element)", 0.4)
    assert gaz.best(["mercury"]) == ("Mercury_(element)", 0.4)


def test_below_threshold_span_is_consumed():
    gaz = Gazetteer()
    gaz.add("new york", "New_York", 0.01)
    gaz.add("york", "York", 0.9)
    assert spot(gaz, Opinion.from_text("o", "new york rocks"), 0.03) == []


def test_gazetteer_validation(tmp_path):
    with pytest.raises(ValueError):
        Gazetteer().add("x", "X", 1.5)
    p = tmp_path / "g.tsv"
    p.write_text("# comment\nvideo games\tVideo_game\t0.5\nbroken line\n")
    with pytest.raises(SpotterError, match=":3:"):
        Gazetteer.load(p)


class FakeResponse:
    def __init__(self, status, payload=None, text=None):
        self.status_code = status
        self._payload = payload
        self._text = text

    def json(self):
        if self._text is not None:
            return json.loads(self._text)
        return self._payload


class FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = []

    def get(self, url, params=None, timeout=None):
        self.calls.append((url, params))
        return self.responses.pop(0)


PAYLOAD = {
    "annotations": [
        {"spot": "video games", "title": "Video game", "link_probability": 0.4, "start": 0, "end": 11},
        {"spot": "youth", "title": "Youth", "link_probability": 0.01, "start": 25, "end": 30},
    ]
}
TEXT = "video games corrupt the youth"


def test_tagme_retries_then_caches(tmp_path):
    session = FakeSession([FakeResponse(503), FakeResponse(200, PAYLOAD)])
    client = TagMeClient(TagMeConfig(token="t", cache_dir=tmp_path, backoff=0.5), session)
    sleeps = []
    client._sleep = sleeps.append
    mentions = client.annotate(TEXT, "o1")
    assert sleeps == [0.5]
    assert session.calls[0][1]["gcube-token"] == "t"
    assert [(m.concept_id, m.span) for m in mentions] == [("Video game", (0, 2)), ("Youth", (4, 5))]
    # second call is served from the cache, no new request
    offline = TagMeClient(TagMeConfig(token=None, cache_dir=tmp_path), FakeSession([]))
    assert offline.fetch(TEXT) == PAYLOAD
    assert [s.concept_id for s in spot_tagme(mentions, 0.03)] == ["Video game"]


def test_tagme_failure_names_endpoint_and_status():
    session = FakeSession([FakeResponse(500)] * 3)
    client = TagMeClient(TagMeConfig(token="t", endpoint="http://tagme.test/tag"), session)
    client._sleep = lambda s: None
    with pytest.raises(SpotterError, match=r"http://tagme\.test/tag.*HTTP 500"):
        client.fetch("x")
    assert len(session.calls) == 3


def test_tagme_malformed_json():
    client = TagMeClient(TagMeConfig(token="t"), FakeSession([FakeResponse(200, text="{oops")]))
    with pytest.raises(SpotterError, match="malformed"):
        client.fetch("x")
    with pytest.raises(SpotterError):
        annotations_to_mentions({"nothing": 1}, "x")


def test_tagme_needs_token_without_cache():
    with pytest.raises(SpotterError, match="token"):
        TagMeClient(TagMeConfig(), FakeSession([])).fetch("x")


def test_annotate_many_keeps_order():
    session = FakeSession([FakeResponse(200, {"annotations": []}) for _ in range(5)])
    client = TagMeClient(TagMeConfig(token="t", max_in_flight=2), session)
    assert client.annotate_many([(str(i), f"text {i}") for i in range(5)]) == [[]] * 5
