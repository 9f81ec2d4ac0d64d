"""Feature extraction: hand-checked values, edge cases, projections."""

import math
from datetime import date

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from honeytrap import arff, features
from honeytrap.errors import ConfigError, DomainError
from honeytrap.features import (
    CLASS_ATTRIBUTE,
    CLASS_LABELS,
    FEATURE_NAMES,
    HONEYPOT_FEATURES,
    TRADITIONAL_FEATURES,
    FeatureGroup,
    FeatureVector,
)
from honeytrap.simnet import Label, Profile, Tweet


def make_tweet(tokens=("hello", "world"), n_urls=0, n_mentions=0, is_retweet=False, day=0):
    return Tweet(tuple(tokens), n_urls, n_mentions, is_retweet, day)


def make_profile(**overrides) -> Profile:
    base = dict(
        id="u0001",
        name="testaccount",
        creation_date=date(2016, 7, 1),
        harvest_date=date(2016, 9, 4),
        followers=50,
        followings=100,
        tweet_count=80,
        has_profile_image=True,
        tweets=[make_tweet()],
        honeypot_interactions=0,
        truth_label=Label.LEGITIMATE,
    )
    base.update(overrides)
    return Profile(**base)


# ---------------------------------------------------------------------------
# hand-checked scalar features


def test_account_age_whole_days():
    assert features.account_age(date(2016, 7, 1), date(2016, 9, 4)) == 65
    assert features.account_age(date(2016, 9, 4), date(2016, 9, 4)) == 0
    with pytest.raises(DomainError):
        features.account_age(date(2016, 9, 5), date(2016, 9, 4))


def test_ff_ratio_hand_values():
    assert features.ff_ratio(5, 46) == pytest.approx(0.10869565217391304)
    assert features.ff_ratio(52835, 422) == pytest.approx(125.20142180094787)
    assert features.ff_ratio(7, 0) == 7.0
    assert features.ff_ratio(0, 0) == 0.0
    with pytest.raises(DomainError):
        features.ff_ratio(-1, 5)


def test_avg_tweets_per_day_clamps_day_zero():
    assert features.avg_tweets_per_day(2, 8) == 0.25
    assert features.avg_tweets_per_day(5, 0) == 5.0
    assert features.avg_tweets_per_day(0, 100) == 0.0
    with pytest.raises(DomainError):
        features.avg_tweets_per_day(-1, 10)


def test_tweet_stream_ratios():
    tweets = [
        make_tweet(n_urls=2, n_mentions=1, is_retweet=True),
        make_tweet(n_urls=0, n_mentions=0, is_retweet=False),
        make_tweet(n_urls=1, n_mentions=3, is_retweet=False),
        make_tweet(n_urls=0, n_mentions=0, is_retweet=True),
    ]
    assert features.url_ratio(tweets) == 0.75
    assert features.mention_ratio(tweets) == 1.0
    assert features.retweet_pct(tweets) == 50.0


def test_ratios_can_exceed_one():
    tweets = [make_tweet(n_urls=3, n_mentions=2)]
    assert features.url_ratio(tweets) == 3.0
    assert features.mention_ratio(tweets) == 2.0


def test_empty_stream_gives_zero_ratios():
    assert features.url_ratio([]) == 0.0
    assert features.mention_ratio([]) == 0.0
    assert features.retweet_pct([]) == 0.0
    assert features.tweet_similarity_pct([]) == 0.0
    assert features.tweet_similarity_pct([make_tweet()]) == 0.0


def test_similarity_hand_values():
    # {a,b} vs {b,c}: intersection 1, union 3
    pair = [make_tweet(("a", "b")), make_tweet(("b", "c"))]
    assert features.tweet_similarity_pct(pair) == pytest.approx(100.0 / 3.0)
    identical = [make_tweet(("spam", "link")), make_tweet(("link", "spam"))]
    assert features.tweet_similarity_pct(identical) == 100.0
    disjoint = [make_tweet(("a",)), make_tweet(("b",))]
    assert features.tweet_similarity_pct(disjoint) == 0.0
    # three tweets: pairs {a,b}/{b,c} -> 1/3, {a,b}/{a,b} -> 1, {b,c}/{a,b} -> 1/3
    trio = [make_tweet(("a", "b")), make_tweet(("b", "c")), make_tweet(("a", "b"))]
    assert features.tweet_similarity_pct(trio) == pytest.approx(100.0 * (1 / 3 + 1 + 1 / 3) / 3)


def test_similarity_token_multiplicity_ignored():
    pair = [make_tweet(("a", "a", "b")), make_tweet(("a", "b", "b"))]
    assert features.tweet_similarity_pct(pair) == 100.0


@given(st.lists(st.integers(0, 5), min_size=1, max_size=30))
@settings(max_examples=100)
def test_mention_ratio_times_count_recovers_total(counts):
    tweets = [make_tweet(n_mentions=c) for c in counts]
    total = features.mention_ratio(tweets) * len(tweets)
    assert total == pytest.approx(sum(counts), abs=1e-9 * max(1, sum(counts)))


# ---------------------------------------------------------------------------
# whole-profile extraction


def test_extract_full_vector():
    profile = make_profile(
        followers=5,
        followings=46,
        tweet_count=13,
        tweets=[
            make_tweet(("a", "b"), n_urls=1, n_mentions=0, is_retweet=False),
            make_tweet(("b", "c"), n_urls=0, n_mentions=2, is_retweet=True),
        ],
        honeypot_interactions=3,
        truth_label=Label.MALICIOUS,
    )
    v = features.extract(profile)
    assert v.account_age_days == 65.0
    assert v.followers == 5
    assert v.followings == 46
    assert v.tweet_count == 13
    assert v.has_profile_image == 1
    assert v.avg_tweets_per_day == pytest.approx(13 / 65)
    assert v.ff_ratio == pytest.approx(5 / 46)
    assert v.url_ratio == 0.5
    assert v.mention_ratio == 1.0
    assert v.retweet_pct == 50.0
    assert v.tweet_similarity_pct == pytest.approx(100.0 / 3.0)
    assert v.honeypot_interaction_count == 3
    assert v.class_label == "mal"


def test_extract_label_mapping():
    assert features.extract(make_profile(truth_label=Label.LEGITIMATE)).class_label == "leg"
    assert features.extract(make_profile(truth_label=None)).class_label is None


def test_extract_rejects_inconsistent_profiles():
    with pytest.raises(DomainError):
        features.extract(make_profile(tweet_count=0, tweets=[make_tweet()]))
    with pytest.raises(DomainError):
        features.extract(
            make_profile(creation_date=date(2017, 1, 1), harvest_date=date(2016, 9, 4))
        )


def test_vector_value_lookup():
    v = features.extract(make_profile())
    assert v.value("followers") == 50
    with pytest.raises(ConfigError):
        v.value("class_label")  # not an attribute name
    with pytest.raises(ConfigError):
        v.value("nope")


# ---------------------------------------------------------------------------
# grouping and projection


def test_feature_groups_partition_the_attribute_list():
    assert len(FEATURE_NAMES) == 12
    assert TRADITIONAL_FEATURES + HONEYPOT_FEATURES == FEATURE_NAMES
    assert HONEYPOT_FEATURES == ("honeypot_interaction_count",)
    assert FeatureGroup.COMBINED.attribute_names == FEATURE_NAMES
    assert FeatureGroup.TRADITIONAL.attribute_names == TRADITIONAL_FEATURES
    assert FeatureGroup.HONEYPOT.attribute_names == HONEYPOT_FEATURES


def test_group_from_name():
    assert FeatureGroup.from_name("Traditional") is FeatureGroup.TRADITIONAL
    assert FeatureGroup.from_name("honeypot") is FeatureGroup.HONEYPOT
    with pytest.raises(ConfigError):
        FeatureGroup.from_name("everything")


def test_project_vector():
    v = features.extract(make_profile(honeypot_interactions=2))
    honeypot = features.project(v, FeatureGroup.HONEYPOT)
    assert honeypot == {"honeypot_interaction_count": 2, CLASS_ATTRIBUTE: "leg"}
    traditional = features.project(v, FeatureGroup.TRADITIONAL)
    assert set(traditional) == set(TRADITIONAL_FEATURES) | {CLASS_ATTRIBUTE}
    # projecting a projection further is fine as long as attributes survive
    again = features.project(traditional, FeatureGroup.TRADITIONAL)
    assert again == traditional
    with pytest.raises(ConfigError):
        features.project(honeypot, FeatureGroup.COMBINED)


def test_vectors_to_dataset_layout():
    vectors = [
        features.extract(make_profile(truth_label=Label.MALICIOUS)),
        features.extract(make_profile(id="u0002", truth_label=None)),
    ]
    ds = features.vectors_to_dataset(vectors)
    assert [a.name for a in ds.attributes] == list(FEATURE_NAMES) + [CLASS_ATTRIBUTE]
    assert ds.class_index == len(FEATURE_NAMES)
    assert ds.attributes[-1].categories == CLASS_LABELS
    assert ds.instances[0][-1] == 0  # mal
    assert ds.instances[1][-1] is None  # unlabeled
    ds.validate()
    # the ARFF layer round-trips what the extractor produces
    designated = arff.designate_class(arff.parse(arff.serialize(ds)), CLASS_ATTRIBUTE)
    assert designated == ds


def test_vectors_to_dataset_grouped():
    vectors = [features.extract(make_profile())]
    ds = features.vectors_to_dataset(vectors, FeatureGroup.HONEYPOT, relation="hp only")
    assert ds.relation == "hp only"
    assert [a.name for a in ds.attributes] == ["honeypot_interaction_count", CLASS_ATTRIBUTE]
    assert ds.instances == [[0.0, 1]]


def test_project_dataset():
    vectors = [
        features.extract(make_profile(truth_label=Label.MALICIOUS, honeypot_interactions=4)),
        features.extract(make_profile(id="u0002")),
    ]
    full = features.vectors_to_dataset(vectors)
    hp = features.project_dataset(full, FeatureGroup.HONEYPOT)
    assert [a.name for a in hp.attributes] == ["honeypot_interaction_count", CLASS_ATTRIBUTE]
    assert hp.instances == [[4.0, 0], [0.0, 1]]
    assert hp.class_index == 1
    # row order must be preserved for fold alignment
    trad = features.project_dataset(full, FeatureGroup.TRADITIONAL)
    assert [row[-1] for row in trad.instances] == [row[-1] for row in full.instances]
    with pytest.raises(ConfigError):
        features.project_dataset(hp, FeatureGroup.COMBINED)


def test_project_dataset_requires_a_class_attribute():
    ds = arff.parse("@relation r\n@attribute followers numeric\n@data\n1\n")
    with pytest.raises(Exception):
        features.project_dataset(ds, FeatureGroup.TRADITIONAL)


def test_vectors_to_csv():
    v = features.extract(make_profile(truth_label=Label.MALICIOUS))
    text = features.vectors_to_csv([v])
    lines = text.splitlines()
    assert lines[0] == ",".join(FEATURE_NAMES) + ",class"
    cells = lines[1].split(",")
    assert len(cells) == 13
    assert cells[-1] == "mal"
    assert float(cells[1]) == 50.0
    unlabeled = features.vectors_to_csv([features.extract(make_profile(truth_label=None))])
    assert unlabeled.splitlines()[1].endswith(",")


def test_all_extracted_values_are_finite():
    profile = make_profile(followers=0, followings=0, tweet_count=0, tweets=[])
    v = features.extract(profile)
    for name in FEATURE_NAMES:
        assert math.isfinite(v.value(name))
