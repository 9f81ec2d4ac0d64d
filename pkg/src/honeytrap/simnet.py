"""Deterministic social-network simulation with passive honeypot accounts.

Stands in for a live trap deployment: a population of legitimate and
spam accounts acts out day-by-day behavior (tweeting, following,
occasionally contacting a honeypot), every unsolicited honeypot contact
is logged, and at the end the contacting profiles are harvested
together with a control sample of untouched legitimate profiles.

All randomness flows through one seeded generator and all loops run in
a fixed order, so a configuration reproduces its population, event log
and harvest exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
import random
from dataclasses import dataclass, fields
from datetime import date, timedelta
from enum import Enum
from importlib import resources

from .errors import ConfigError, DomainError, FormatError

#: Calendar anchor for the simulated deployment: accounts are created
#: before this date and the field phase starts on it.
SIM_START = date(2016, 9, 4)

#: How many of a profile's most recent tweets the harvester retains.
RETAINED_TWEETS = 40

#: How many distinct reusable message templates an account keeps.
TEMPLATE_POOL = 10

#: Per-account behavior jitter: each rate/probability parameter is
#: multiplied by a uniform draw from this range, so accounts of the same
#: kind still differ from one another.
BEHAVIOR_JITTER = (0.5, 1.5)

#: A slice of each population behaves atypically, which is what makes
#: the classification problem honest.  Some spam accounts run quietly
#: (rates blended toward the legitimate preset, honeypot contact
#: included); some legitimate accounts are high-volume "power users"
#: (activity blended toward the spam preset) — but power users still do
#: not contact strangers, so their honeypot contact rate stays put.
STEALTH_SPAMMER_RATE = 0.22
STEALTH_BLEND = (0.55, 0.85)
POWER_LEGIT_RATE = 0.12
POWER_BLEND = (0.45, 0.7)

SPAMMER_AGE_RANGE = (5, 400)
LEGIT_AGE_RANGE = (20, 2000)
SPAMMER_IMAGE_PROB = 0.85
LEGIT_IMAGE_PROB = 0.98

TWEET_LENGTH_RANGE = (4, 12)

VOCABULARY = (
    "about", "after", "again", "amazing", "android", "another", "answer",
    "anyone", "august", "awesome", "battery", "because", "best", "better",
    "bonus", "break", "cash", "cheap", "check", "city", "claim", "click",
    "coffee", "coming", "concert", "daily", "deal", "discount", "dollars",
    "dream", "earn", "easy", "evening", "every", "fast", "follow",
    "followers", "free", "friends", "game", "gift", "going", "great",
    "guaranteed", "happy", "having", "hello", "home", "hours", "huge",
    "instant", "join", "later", "laugh", "limited", "link", "little",
    "live", "lunch", "market", "money", "morning", "movie", "music",
    "never", "night", "offer", "online", "people", "phone", "photo",
    "pizza", "play", "price", "prize", "profile", "promo", "rain",
    "ready", "reply", "reward", "right", "sale", "school", "share",
    "shoes", "shop", "sleep", "smile", "soon", "sorry", "sport", "start",
    "still", "story", "street", "summer", "sunny", "super", "team",
    "thanks", "there", "thing", "think", "timeline", "today", "tomorrow",
    "tonight", "traffic", "train", "travel", "trending", "truly", "visit",
    "watch", "weather", "weekend", "winner", "work", "world", "yeah",
    "yesterday",
)

_NAME_SYLLABLES = (
    "an", "bel", "car", "dor", "el", "fa", "gre", "hol", "jer", "ka",
    "lin", "mo", "ned", "ol", "pra", "quil", "ros", "sa", "tru", "ven",
)


class Label(Enum):
    """Ground-truth account kind assigned at population creation."""

    MALICIOUS = "malicious"
    LEGITIMATE = "legitimate"


class ContactKind(Enum):
    """How an account touched a honeypot."""

    FOLLOW_REQUEST = "FollowRequest"
    MENTION = "Mention"
    DIRECT_MESSAGE = "DirectMessage"


#: Relative frequency of each contact kind when an account decides to
#: touch a honeypot.  Follow requests dominate real trap logs.
CONTACT_KIND_WEIGHTS = (
    (ContactKind.FOLLOW_REQUEST, 0.7),
    (ContactKind.MENTION, 0.2),
    (ContactKind.DIRECT_MESSAGE, 0.1),
)


@dataclass(frozen=True)
class BehaviorParams:
    """Daily behavior rates for one account kind.

    ``tweets_per_day``, ``follow_rate``, ``url_rate`` and
    ``mention_rate`` are Poisson means; the ``*_prob`` fields are
    per-event (or per-day, for honeypot contact) probabilities.
    """

    tweets_per_day: float
    url_rate: float
    mention_rate: float
    retweet_prob: float
    template_reuse_prob: float
    follow_rate: float
    honeypot_contact_prob: float

    def validate(self) -> None:
        for name in ("tweets_per_day", "url_rate", "mention_rate", "follow_rate"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                raise ConfigError(f"behavior rate {name} must be a finite non-negative number")
        for name in ("retweet_prob", "template_reuse_prob", "honeypot_contact_prob"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and 0.0 <= v <= 1.0):
                raise ConfigError(f"behavior probability {name} must lie in [0, 1]")


SPAMMER_PRESET = BehaviorParams(
    tweets_per_day=8.0,
    url_rate=1.2,
    mention_rate=1.5,
    retweet_prob=0.45,
    template_reuse_prob=0.8,
    follow_rate=25.0,
    honeypot_contact_prob=0.15,
)

LEGIT_PRESET = BehaviorParams(
    tweets_per_day=2.0,
    url_rate=0.25,
    mention_rate=0.6,
    retweet_prob=0.15,
    template_reuse_prob=0.05,
    follow_rate=4.0,
    honeypot_contact_prob=0.003,
)


@dataclass(frozen=True)
class SimConfig:
    """Everything a simulation run depends on."""

    seed: int = 42
    n_legitimate: int = 200
    n_spammer: int = 100
    n_honeypots: int = 20
    n_days: int = 60
    spammer_behavior: BehaviorParams = SPAMMER_PRESET
    legit_behavior: BehaviorParams = LEGIT_PRESET
    harvest_cap: int = 90
    control_fraction: float = 0.5

    def validate(self) -> None:
        for name in ("n_legitimate", "n_spammer", "n_honeypots", "harvest_cap"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ConfigError(f"{name} must be a non-negative integer")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ConfigError("seed must be an integer")
        if not isinstance(self.n_days, int) or self.n_days < 1:
            raise ConfigError("n_days must be a positive integer")
        if self.n_legitimate + self.n_spammer == 0:
            raise ConfigError("the population must contain at least one account")
        if self.harvest_cap > self.n_legitimate + self.n_spammer:
            raise ConfigError("harvest_cap exceeds the population size")
        if not (0.0 <= self.control_fraction <= 1.0):
            raise ConfigError("control_fraction must lie in [0, 1]")
        self.spammer_behavior.validate()
        self.legit_behavior.validate()


@dataclass(frozen=True)
class Tweet:
    """One retained tweet: its token set drives similarity features."""

    tokens: tuple[str, ...]
    n_urls: int
    n_mentions: int
    is_retweet: bool
    day: int


@dataclass
class Profile:
    """One account as the harvester sees it at the end of the run."""

    id: str
    name: str
    creation_date: date
    harvest_date: date
    followers: int
    followings: int
    tweet_count: int
    has_profile_image: bool
    tweets: list[Tweet]
    honeypot_interactions: int
    truth_label: Label | None


@dataclass(frozen=True)
class InteractionEvent:
    """One unsolicited honeypot contact, as logged by the trap."""

    day: int
    actor_id: str
    honeypot_id: int
    kind: ContactKind


def _poisson(rng: random.Random, lam: float) -> int:
    """Draw from a Poisson distribution (Knuth's product method)."""
    if lam <= 0.0:
        return 0
    limit = math.exp(-lam)
    k = 0
    p = 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def _weighted_kind(rng: random.Random) -> ContactKind:
    roll = rng.random()
    acc = 0.0
    for kind, weight in CONTACT_KIND_WEIGHTS:
        acc += weight
        if roll < acc:
            return kind
    return CONTACT_KIND_WEIGHTS[-1][0]


def _make_name(rng: random.Random) -> str:
    parts = [rng.choice(_NAME_SYLLABLES) for _ in range(rng.randint(2, 3))]
    return "".join(parts).capitalize()


def _jitter(rng: random.Random, params: BehaviorParams) -> BehaviorParams:
    """Give one account its personal variation of the kind-level preset."""
    factors = {f.name: rng.uniform(*BEHAVIOR_JITTER) for f in fields(BehaviorParams)}
    jittered = {}
    for name, factor in factors.items():
        value = getattr(params, name) * factor
        if name.endswith("_prob"):
            value = min(value, 1.0)
        jittered[name] = value
    return BehaviorParams(**jittered)


def _blend(base: BehaviorParams, other: BehaviorParams, weight: float,
           keep_contact_prob: bool) -> BehaviorParams:
    """Move every parameter of ``base`` a fraction of the way to ``other``."""
    values = {}
    for f in fields(BehaviorParams):
        a = getattr(base, f.name)
        if keep_contact_prob and f.name == "honeypot_contact_prob":
            values[f.name] = a
        else:
            values[f.name] = a + (getattr(other, f.name) - a) * weight
    return BehaviorParams(**values)


def _personal_params(rng: random.Random, label: Label, config: SimConfig) -> BehaviorParams:
    if label is Label.MALICIOUS:
        base = config.spammer_behavior
        if rng.random() < STEALTH_SPAMMER_RATE:
            base = _blend(
                base, config.legit_behavior, rng.uniform(*STEALTH_BLEND),
                keep_contact_prob=False,
            )
    else:
        base = config.legit_behavior
        if rng.random() < POWER_LEGIT_RATE:
            base = _blend(
                base, config.spammer_behavior, rng.uniform(*POWER_BLEND),
                keep_contact_prob=True,
            )
    return _jitter(rng, base)


class _Agent:
    __slots__ = (
        "index", "id", "label", "params", "name", "age_days", "has_image",
        "followers", "followings", "tweet_count", "templates", "recent",
        "honeypots_contacted",
    )

    def __init__(self, index, agent_id, label, params, name, age_days, has_image):
        self.index = index
        self.id = agent_id
        self.label = label
        self.params = params
        self.name = name
        self.age_days = age_days
        self.has_image = has_image
        self.followers = 0
        self.followings = 0
        self.tweet_count = 0
        self.templates: list[tuple[str, ...]] = []
        self.recent: list[Tweet] = []
        self.honeypots_contacted: set[int] = set()


def _compose_tokens(rng: random.Random, agent: _Agent) -> tuple[str, ...]:
    if agent.templates and rng.random() < agent.params.template_reuse_prob:
        return rng.choice(agent.templates)
    length = rng.randint(*TWEET_LENGTH_RANGE)
    tokens = tuple(rng.choice(VOCABULARY) for _ in range(length))
    if len(agent.templates) < TEMPLATE_POOL:
        agent.templates.append(tokens)
    return tokens


def _live_day(rng: random.Random, agent: _Agent, agents: list, day: int) -> None:
    p = agent.params
    for _ in range(_poisson(rng, p.tweets_per_day)):
        tweet = Tweet(
            tokens=_compose_tokens(rng, agent),
            n_urls=_poisson(rng, p.url_rate),
            n_mentions=_poisson(rng, p.mention_rate),
            is_retweet=rng.random() < p.retweet_prob,
            day=day,
        )
        agent.tweet_count += 1
        agent.recent.append(tweet)
        if len(agent.recent) > RETAINED_TWEETS:
            del agent.recent[0]
    n_follows = _poisson(rng, p.follow_rate)
    if n_follows and len(agents) > 1:
        for _ in range(n_follows):
            target = rng.randrange(len(agents) - 1)
            if target >= agent.index:
                target += 1
            agents[target].followers += 1
        agent.followings += n_follows


def run_simulation(config: SimConfig) -> tuple[list[Profile], list[InteractionEvent]]:
    """Run the field phase and return (all profiles, honeypot event log).

    Profiles come back in id order; events in chronological logging
    order.  The same config always returns identical output.
    """
    config.validate()
    rng = random.Random(config.seed)
    total = config.n_legitimate + config.n_spammer
    width = max(4, len(str(max(total - 1, 0))))
    harvest_date = SIM_START + timedelta(days=config.n_days)

    agents: list[_Agent] = []
    for i in range(total):
        if i < config.n_legitimate:
            label = Label.LEGITIMATE
            age = rng.randint(*LEGIT_AGE_RANGE)
            has_image = rng.random() < LEGIT_IMAGE_PROB
        else:
            label = Label.MALICIOUS
            age = rng.randint(*SPAMMER_AGE_RANGE)
            has_image = rng.random() < SPAMMER_IMAGE_PROB
        agents.append(
            _Agent(
                index=i,
                agent_id=f"u{i:0{width}d}",
                label=label,
                params=_personal_params(rng, label, config),
                name=_make_name(rng),
                age_days=age,
                has_image=has_image,
            )
        )

    events: list[InteractionEvent] = []
    for day in range(config.n_days):
        for agent in agents:
            _live_day(rng, agent, agents, day)
            if config.n_honeypots and rng.random() < agent.params.honeypot_contact_prob:
                honeypot = rng.randrange(config.n_honeypots)
                kind = _weighted_kind(rng)
                events.append(InteractionEvent(day, agent.id, honeypot, kind))
                agent.honeypots_contacted.add(honeypot)

    profiles = [
        Profile(
            id=a.id,
            name=a.name,
            creation_date=SIM_START - timedelta(days=a.age_days),
            harvest_date=harvest_date,
            followers=a.followers,
            followings=a.followings,
            tweet_count=a.tweet_count,
            has_profile_image=a.has_image,
            tweets=list(a.recent),
            honeypot_interactions=len(a.honeypots_contacted),
            truth_label=a.label,
        )
        for a in agents
    ]
    return profiles, events


def harvest(
    profiles: list[Profile],
    events: list[InteractionEvent],
    cap: int,
    seed: int,
    control_fraction: float = 0.5,
) -> list[Profile]:
    """Select the study sample: trapped profiles plus legitimate controls.

    Reserves about ``control_fraction`` of ``cap`` for legitimate
    profiles that never touched a honeypot, fills the rest with trapped
    profiles, and tops either side up from the other when one pool runs
    short.  Sampling is seeded; the result is sorted by profile id.
    """
    if cap < 0:
        raise ConfigError("harvest cap must be non-negative")
    if not (0.0 <= control_fraction <= 1.0):
        raise ConfigError("control_fraction must lie in [0, 1]")
    by_id = {p.id: p for p in profiles}
    actor_ids = {e.actor_id for e in events}
    unknown = actor_ids - set(by_id)
    if unknown:
        raise DomainError(f"event log names unknown profiles: {sorted(unknown)[:3]}")

    trapped = sorted(actor_ids)
    controls = sorted(
        p.id
        for p in profiles
        if p.id not in actor_ids and p.truth_label is Label.LEGITIMATE
    )

    rng = random.Random(seed)
    n_controls = min(round(cap * control_fraction), len(controls))
    n_trapped = min(cap - n_controls, len(trapped))
    n_controls = min(cap - n_trapped, len(controls))

    chosen = rng.sample(trapped, n_trapped) + rng.sample(controls, n_controls)
    return [by_id[i] for i in sorted(chosen)]


def honeypot_stats(
    events: list[InteractionEvent], n_days: int, n_honeypots: int | None = None
) -> dict[int, float]:
    """Average follow requests received per day, per honeypot."""
    if n_days < 1:
        raise ConfigError("n_days must be at least 1")
    counts: dict[int, int] = {}
    if n_honeypots is not None:
        for h in range(n_honeypots):
            counts[h] = 0
    for e in events:
        if e.kind is ContactKind.FOLLOW_REQUEST:
            counts[e.honeypot_id] = counts.get(e.honeypot_id, 0) + 1
        else:
            counts.setdefault(e.honeypot_id, 0)
    return {h: counts[h] / n_days for h in sorted(counts)}


# ---------------------------------------------------------------------------
# record files


def profiles_to_jsonl(profiles: list[Profile]) -> str:
    """One JSON object per line, field order fixed."""
    lines = []
    for p in profiles:
        record = {
            "id": p.id,
            "name": p.name,
            "creation_date": p.creation_date.isoformat(),
            "harvest_date": p.harvest_date.isoformat(),
            "followers": p.followers,
            "followings": p.followings,
            "tweet_count": p.tweet_count,
            "has_profile_image": p.has_profile_image,
            "honeypot_interactions": p.honeypot_interactions,
            "truth_label": None if p.truth_label is None else p.truth_label.value,
            "tweets": [
                {
                    "tokens": list(t.tokens),
                    "n_urls": t.n_urls,
                    "n_mentions": t.n_mentions,
                    "is_retweet": t.is_retweet,
                    "day": t.day,
                }
                for t in p.tweets
            ],
        }
        lines.append(json.dumps(record, separators=(",", ":")))
    return "\n".join(lines) + ("\n" if lines else "")


def profiles_from_jsonl(text: str) -> list[Profile]:
    profiles = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            tweets = [
                Tweet(
                    tokens=tuple(t["tokens"]),
                    n_urls=int(t["n_urls"]),
                    n_mentions=int(t["n_mentions"]),
                    is_retweet=bool(t["is_retweet"]),
                    day=int(t["day"]),
                )
                for t in rec["tweets"]
            ]
            profiles.append(
                Profile(
                    id=str(rec["id"]),
                    name=str(rec["name"]),
                    creation_date=date.fromisoformat(rec["creation_date"]),
                    harvest_date=date.fromisoformat(rec["harvest_date"]),
                    followers=int(rec["followers"]),
                    followings=int(rec["followings"]),
                    tweet_count=int(rec["tweet_count"]),
                    has_profile_image=bool(rec["has_profile_image"]),
                    tweets=tweets,
                    honeypot_interactions=int(rec["honeypot_interactions"]),
                    truth_label=None
                    if rec["truth_label"] is None
                    else Label(rec["truth_label"]),
                )
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise FormatError(f"profile record on line {lineno} is malformed: {exc}") from None
    return profiles


def events_to_csv(events: list[InteractionEvent]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["day", "actor_id", "honeypot_id", "kind"])
    for e in events:
        writer.writerow([e.day, e.actor_id, e.honeypot_id, e.kind.value])
    return buf.getvalue()


def events_from_csv(text: str) -> list[InteractionEvent]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("event log is empty") from None
    if header != ["day", "actor_id", "honeypot_id", "kind"]:
        raise FormatError(f"unexpected event log header: {header}")
    events = []
    for rownum, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            events.append(
                InteractionEvent(
                    day=int(row[0]),
                    actor_id=row[1],
                    honeypot_id=int(row[2]),
                    kind=ContactKind(row[3]),
                )
            )
        except (IndexError, ValueError) as exc:
            raise FormatError(f"event record on line {rownum} is malformed: {exc}") from None
    return events


# ---------------------------------------------------------------------------
# configuration files

_BEHAVIOR_FIELDS = tuple(f.name for f in fields(BehaviorParams))

_INT_KEYS = ("seed", "n_legitimate", "n_spammer", "n_honeypots", "n_days", "harvest_cap")
_FLOAT_KEYS = ("control_fraction",)


def parse_config(text: str) -> SimConfig:
    """Parse ``key = value`` configuration text into a SimConfig.

    Unknown keys and unparseable values are configuration errors; keys
    that are absent keep their defaults.  Behavior parameters use the
    prefixes ``spammer.`` and ``legit.``.
    """
    overrides: dict[str, object] = {}
    spammer = dict(SPAMMER_PRESET.__dict__)
    legit = dict(LEGIT_PRESET.__dict__)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno} is not 'key = value': {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        try:
            if key in _INT_KEYS:
                overrides[key] = int(value)
            elif key in _FLOAT_KEYS:
                overrides[key] = float(value)
            elif key == "preset_version":
                int(value)  # recorded for provenance; any integer is accepted
            elif key.startswith("spammer.") and key[len("spammer."):] in _BEHAVIOR_FIELDS:
                spammer[key[len("spammer."):]] = float(value)
            elif key.startswith("legit.") and key[len("legit."):] in _BEHAVIOR_FIELDS:
                legit[key[len("legit."):]] = float(value)
            else:
                raise ConfigError(f"unknown config key {key!r} on line {lineno}")
        except ValueError:
            raise ConfigError(f"bad value for {key!r} on line {lineno}: {value!r}") from None
    config = SimConfig(
        spammer_behavior=BehaviorParams(**spammer),
        legit_behavior=BehaviorParams(**legit),
        **overrides,
    )
    config.validate()
    return config


def default_config_text() -> str:
    """The packaged default configuration, exactly as shipped."""
    return (
        resources.files("honeytrap").joinpath("presets/default.cfg").read_text(encoding="utf-8")
    )


def config_to_dict(config: SimConfig) -> dict:
    """Flatten a SimConfig for manifests and API payloads."""
    out: dict[str, object] = {k: getattr(config, k) for k in _INT_KEYS}
    out["control_fraction"] = config.control_fraction
    for name in _BEHAVIOR_FIELDS:
        out[f"spammer.{name}"] = getattr(config.spammer_behavior, name)
        out[f"legit.{name}"] = getattr(config.legit_behavior, name)
    return out
