"""Per-profile feature extraction.

Turns harvested profiles into the fixed attribute vector the classifier
consumes: ten account/tweet statistics that any crawler could compute,
plus the honeypot interaction count that only the trap deployment can
supply, plus the class label.
"""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass
from datetime import date
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .arff import AttributeSpec, Dataset, Value
from .errors import ConfigError, DomainError
from .simnet import Label, Profile, Tweet

CLASS_ATTRIBUTE = "class"
CLASS_LABELS = ("mal", "leg")

FEATURE_NAMES = (
    "account_age_days",
    "followers",
    "followings",
    "tweet_count",
    "has_profile_image",
    "avg_tweets_per_day",
    "ff_ratio",
    "url_ratio",
    "mention_ratio",
    "retweet_pct",
    "tweet_similarity_pct",
    "honeypot_interaction_count",
)

TRADITIONAL_FEATURES = FEATURE_NAMES[:11]
HONEYPOT_FEATURES = FEATURE_NAMES[11:]


class FeatureGroup(Enum):
    """Which slice of the attribute vector a model is allowed to see."""

    TRADITIONAL = "traditional"
    HONEYPOT = "honeypot"
    COMBINED = "combined"

    @property
    def attribute_names(self) -> tuple[str, ...]:
        if self is FeatureGroup.TRADITIONAL:
            return TRADITIONAL_FEATURES
        if self is FeatureGroup.HONEYPOT:
            return HONEYPOT_FEATURES
        return FEATURE_NAMES

    @classmethod
    def from_name(cls, name: str) -> "FeatureGroup":
        try:
            return cls(name.lower())
        except ValueError:
            valid = ", ".join(g.value for g in cls)
            raise ConfigError(f"unknown feature group {name!r} (expected one of: {valid})") from None


@dataclass(frozen=True)
class FeatureVector:
    """The classifier's view of one profile."""

    account_age_days: float
    followers: int
    followings: int
    tweet_count: int
    has_profile_image: int
    avg_tweets_per_day: float
    ff_ratio: float
    url_ratio: float
    mention_ratio: float
    retweet_pct: float
    tweet_similarity_pct: float
    honeypot_interaction_count: int
    class_label: str | None

    def value(self, name: str) -> float | int:
        if name not in FEATURE_NAMES:
            raise ConfigError(f"unknown attribute name {name!r}")
        return getattr(self, name)


def account_age(creation_date: date, harvest_date: date) -> int:
    """Whole days between account creation and harvest."""
    if harvest_date < creation_date:
        raise DomainError(
            f"harvest date {harvest_date} precedes creation date {creation_date}"
        )
    return (harvest_date - creation_date).days


def ff_ratio(followers: int, followings: int) -> float:
    """Followers per following; degenerates to the follower count when
    the account follows nobody."""
    if followers < 0 or followings < 0:
        raise DomainError("follower and following counts must be non-negative")
    if followings == 0:
        return float(followers)
    return followers / followings


def avg_tweets_per_day(tweet_count: int, account_age_days: int) -> float:
    """Lifetime tweets per day of account age; day-zero accounts count as one day old."""
    if tweet_count < 0:
        raise DomainError("tweet count must be non-negative")
    if account_age_days < 0:
        raise DomainError("account age must be non-negative")
    return tweet_count / max(account_age_days, 1)


def url_ratio(tweets: Sequence[Tweet]) -> float:
    """Mean number of URLs per tweet (not a fraction: tweets can carry several)."""
    if not tweets:
        return 0.0
    return sum(t.n_urls for t in tweets) / len(tweets)


def mention_ratio(tweets: Sequence[Tweet]) -> float:
    """Mean number of @-mentions per tweet."""
    if not tweets:
        return 0.0
    return sum(t.n_mentions for t in tweets) / len(tweets)


def retweet_pct(tweets: Sequence[Tweet]) -> float:
    """Percentage of the retained tweets that are retweets."""
    if not tweets:
        return 0.0
    return 100.0 * sum(1 for t in tweets if t.is_retweet) / len(tweets)


def _jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def tweet_similarity_pct(tweets: Sequence[Tweet]) -> float:
    """Mean pairwise Jaccard similarity of tweet token sets, as a percentage.

    Fewer than two tweets give 0 (no pair to compare).
    """
    token_sets = [frozenset(t.tokens) for t in tweets]
    if len(token_sets) < 2:
        return 0.0
    total = 0.0
    pairs = 0
    for i in range(len(token_sets)):
        for j in range(i + 1, len(token_sets)):
            total += _jaccard(token_sets[i], token_sets[j])
            pairs += 1
    return 100.0 * total / pairs


def extract(profile: Profile) -> FeatureVector:
    """Compute the full attribute vector for one profile."""
    age = account_age(profile.creation_date, profile.harvest_date)
    if profile.followers < 0 or profile.followings < 0:
        raise DomainError(f"profile {profile.id}: negative follower/following count")
    if profile.tweet_count < len(profile.tweets):
        raise DomainError(
            f"profile {profile.id}: tweet_count below the number of retained tweets"
        )
    if profile.truth_label is None:
        label = None
    else:
        label = "mal" if profile.truth_label is Label.MALICIOUS else "leg"
    return FeatureVector(
        account_age_days=float(age),
        followers=profile.followers,
        followings=profile.followings,
        tweet_count=profile.tweet_count,
        has_profile_image=int(profile.has_profile_image),
        avg_tweets_per_day=avg_tweets_per_day(profile.tweet_count, age),
        ff_ratio=ff_ratio(profile.followers, profile.followings),
        url_ratio=url_ratio(profile.tweets),
        mention_ratio=mention_ratio(profile.tweets),
        retweet_pct=retweet_pct(profile.tweets),
        tweet_similarity_pct=tweet_similarity_pct(profile.tweets),
        honeypot_interaction_count=profile.honeypot_interactions,
        class_label=label,
    )


def extract_all(profiles: Iterable[Profile]) -> list[FeatureVector]:
    return [extract(p) for p in profiles]


def project(vector: FeatureVector | Mapping[str, object], group: FeatureGroup) -> dict[str, object]:
    """Reduce a vector to one feature group's attributes (class label kept).

    Accepts either a FeatureVector or a previously projected mapping;
    asking for an attribute the input no longer carries is an error.
    """
    if isinstance(vector, FeatureVector):
        available: Mapping[str, object] = {n: vector.value(n) for n in FEATURE_NAMES}
        label = vector.class_label
    else:
        available = vector
        label = vector.get(CLASS_ATTRIBUTE)
    out: dict[str, object] = {}
    for name in group.attribute_names:
        if name not in available:
            raise ConfigError(f"attribute {name!r} is not present in the input vector")
        out[name] = available[name]
    out[CLASS_ATTRIBUTE] = label
    return out


def vectors_to_dataset(
    vectors: Sequence[FeatureVector],
    group: FeatureGroup = FeatureGroup.COMBINED,
    relation: str = "profiles",
) -> Dataset:
    """Assemble feature vectors into a dataset with the class attribute last."""
    names = group.attribute_names
    attributes = [AttributeSpec(n) for n in names]
    attributes.append(AttributeSpec(CLASS_ATTRIBUTE, CLASS_LABELS))
    rows: list[list[Value]] = []
    for v in vectors:
        row: list[Value] = [float(v.value(n)) for n in names]
        if v.class_label is None:
            row.append(None)
        else:
            if v.class_label not in CLASS_LABELS:
                raise ConfigError(f"unknown class label {v.class_label!r}")
            row.append(CLASS_LABELS.index(v.class_label))
        rows.append(row)
    return Dataset(relation, attributes, rows, class_index=len(attributes) - 1)


def project_dataset(dataset: Dataset, group: FeatureGroup) -> Dataset:
    """Keep only one feature group's columns (plus the class attribute).

    The dataset must carry every attribute the group names; the class
    attribute is the designated one, or the canonical class name when
    none is designated.
    """
    if dataset.class_index is not None:
        class_idx = dataset.class_index
    else:
        class_idx = dataset.index_of(CLASS_ATTRIBUTE)
    keep: list[int] = []
    for name in group.attribute_names:
        try:
            idx = dataset.index_of(name)
        except Exception:
            raise ConfigError(f"attribute {name!r} is not present in the dataset") from None
        if idx == class_idx:
            raise ConfigError(f"attribute {name!r} is the class attribute")
        keep.append(idx)
    keep.append(class_idx)
    attributes = [dataset.attributes[i] for i in keep]
    instances = [[row[i] for i in keep] for row in dataset.instances]
    return Dataset(dataset.relation, attributes, instances, class_index=len(keep) - 1)


def vectors_to_csv(vectors: Sequence[FeatureVector]) -> str:
    """Render vectors as CSV in the canonical attribute order plus class."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(FEATURE_NAMES) + [CLASS_ATTRIBUTE])
    for v in vectors:
        row = [v.value(n) for n in FEATURE_NAMES]
        row.append("" if v.class_label is None else v.class_label)
        writer.writerow(row)
    return buf.getvalue()
