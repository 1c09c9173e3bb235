import random

import pytest
from hypothesis import given, settings, strategies as st

from bpmatch.errors import NoCandidates
from bpmatch.matching import (
    AttributeDictionary,
    PrivacyLevel,
    Profile,
    best_match,
    intersection_cardinality,
    load_profiles,
    run_session,
)

EXAMPLE = [Profile("P1", {"a", "b", "c"}), Profile("P2", {"b", "c", "d"}), Profile("P3", {"a", "b", "c", "e"})]


def argmax_oracle(sizes):
    return max(range(len(sizes)), key=lambda i: (sizes[i], -i))


class TestPrimitives:
    def test_cardinality(self):
        s = Profile("x", {"a", "b", "c"})
        assert intersection_cardinality(s, Profile("y", {"b", "c", "d"})) == 2
        assert intersection_cardinality(s, s) == 3
        assert intersection_cardinality(s, Profile("z", set())) == 0

    def test_best_match(self):
        assert best_match([2, 5, 3]) == 1
        assert best_match([4, 4]) == 0
        assert best_match([0]) == 0
        with pytest.raises(NoCandidates):
            best_match([])

    @given(st.lists(st.integers(0, 5), min_size=1, max_size=12))
    def test_best_match_oracle(self, sizes):
        assert best_match(sizes) == argmax_oracle(sizes)

    def test_dictionary(self):
        d = AttributeDictionary(["pear", "apple", "fig", "apple"])
        assert d.words == ("apple", "fig", "pear")
        assert d.encode({"fig", "pear"}) == {1, 2}
        assert d.decode({0}) == {"apple"}

    def test_long_attribute(self):
        Profile("x", {"a" * 64})
        with pytest.raises(ValueError):
            Profile("x", {"a" * 65})
        with pytest.raises(ValueError):
            Profile("x", {"é" * 33})

    def test_privacy_level_parse(self):
        assert PrivacyLevel.parse("pl2") is PrivacyLevel.PL2
        assert PrivacyLevel.parse("PL-1") is PrivacyLevel.PL1
        with pytest.raises(ValueError):
            PrivacyLevel.parse("pl3")


class TestSessions:
    def test_pl1_example(self):
        report = run_session(EXAMPLE, PrivacyLevel.PL1).report
        assert report.intersections == {"P2": ["b", "c"], "P3": ["a", "b", "c"]}
        assert report.sizes == {"P2": 2, "P3": 3}
        assert report.best_match == "P3"
        assert report.transcript is None

    @pytest.mark.parametrize("backend", ["bgn", "paillier"])
    def test_pl2_example(self, backend):
        result = run_session(EXAMPLE, PrivacyLevel.PL2, backend, random.Random(1))
        report = result.report
        assert report.size_multiset == [2, 3]
        assert sorted(report.revealed) == [2, 3]
        assert report.best_match == "P3"
        assert report.intersections is None
        assert report.transcript["messages"] == 4
        assert report.best_match_view == [2, 3]

    def test_identical_profiles_tie(self):
        profiles = [Profile(f"P{i}", {"x", "y"}) for i in range(1, 5)]
        report = run_session(profiles, PrivacyLevel.PL2, "paillier", random.Random(2)).report
        assert set(report.sizes.values()) == {2}
        assert report.best_match == "P2"

    def test_needs_candidate(self):
        with pytest.raises(NoCandidates):
            run_session(EXAMPLE[:1], PrivacyLevel.PL2, rng=random.Random(0))

    def test_duplicate_ids(self):
        with pytest.raises(ValueError):
            run_session([EXAMPLE[0], EXAMPLE[0]], PrivacyLevel.PL1)

    def test_initiator_view_discipline(self):
        result = run_session(EXAMPLE, PrivacyLevel.PL2, "bgn", random.Random(3))
        view = result.initiator_view
        d = AttributeDictionary.from_profiles(EXAMPLE)
        assert view.query_ids == d.encode(EXAMPLE[0].attributes)
        # candidate-only attribute ids never show up in the initiator's fields
        foreign = (d.encode(EXAMPLE[1].attributes) | d.encode(EXAMPLE[2].attributes)) - view.query_ids
        assert foreign == {d.ids["d"], d.ids["e"]}
        assert not any(isinstance(v, (set, frozenset)) and v & foreign for v in vars(view).values())
        assert set(vars(view)) == {"party_id", "query_ids", "shares_in", "shares_out", "revealed"}
        assert view.shares_in.owner == view.shares_out.owner == "A"
        assert view.revealed == tuple(result.report.revealed)

    def test_random_universes(self):
        rng = random.Random(4)
        for _ in range(10):
            vocab = [f"w{i}" for i in range(rng.randint(1, 50))]
            profiles = [Profile(f"P{i}", rng.sample(vocab, rng.randint(0, min(20, len(vocab)))))
                        for i in range(1, rng.randint(2, 10) + 1)]
            plain = [intersection_cardinality(profiles[0], p) for p in profiles[1:]]
            report = run_session(profiles, PrivacyLevel.PL2, "paillier", rng).report
            assert report.size_multiset == sorted(plain)
            assert [report.sizes[p.party_id] for p in profiles[1:]] == plain
            assert report.best_match == profiles[1 + argmax_oracle(plain)].party_id


@settings(max_examples=50)
@given(st.sets(st.sampled_from("abcdefgh"), min_size=1), st.sets(st.sampled_from("abcdefgh")), st.data())
def test_monotonicity(s1, si, data):
    missing = sorted(s1 - si)
    if not missing:
        return
    extra = data.draw(st.sampled_from(missing))
    a, b = Profile("1", s1), Profile("i", si)
    assert intersection_cardinality(a, Profile("i", si | {extra})) == intersection_cardinality(a, b) + 1


class TestLoadProfiles:
    def test_ok(self):
        profiles = load_profiles({"parties": [{"id": "P1", "attributes": ["a"]}, {"id": "P2", "attributes": []}]})
        assert profiles == [Profile("P1", {"a"}), Profile("P2", set())]

    @pytest.mark.parametrize("obj", [
        [],
        {"parties": {}},
        {"parties": [{"attributes": []}]},
        {"parties": [{"id": 3, "attributes": []}]},
        {"parties": [{"id": "P1", "attributes": "abc"}]},
        {"parties": [{"id": "P1", "attributes": ["a", "a"]}]},
        {"parties": [{"id": "P1", "attributes": [1]}]},
        {"parties": [{"id": "P1", "attributes": ["x" * 65]}]},
    ])
    def test_malformed(self, obj):
        with pytest.raises(ValueError):
            load_profiles(obj)
