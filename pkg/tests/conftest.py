"""Shared fixtures: one full default-seed pipeline run per session, plus a
small fast configuration for tests that only need shape, not scale."""

from __future__ import annotations

import time
from types import SimpleNamespace

import pytest

from honeytrap import features, simnet
from honeytrap.decorate import DecorateParams
from honeytrap.evaluation import ablation, build_report, cv_predictions

#: Small deployment used by CLI/service tests; big enough that the
#: harvest contains several instances of both classes.
TINY_CONFIG = """\
seed = 7
n_legitimate = 24
n_spammer = 12
n_honeypots = 4
n_days = 8
harvest_cap = 20
control_fraction = 0.5
"""

#: Fast learner settings for tests where model quality is irrelevant.
FAST_PARAMS = DecorateParams(c_size=3, i_max=6, r_size=1.0, seed=42, min_leaf=1)


def make_tiny_dataset():
    """Harvest the tiny deployment into a ready-to-train dataset."""
    config = simnet.parse_config(TINY_CONFIG)
    profiles, events = simnet.run_simulation(config)
    harvested = simnet.harvest(
        profiles, events, config.harvest_cap, config.seed, config.control_fraction
    )
    vectors = features.extract_all(harvested)
    return features.vectors_to_dataset(vectors)


@pytest.fixture(scope="session")
def tiny_dataset():
    return make_tiny_dataset()


@pytest.fixture(scope="session")
def demo_run():
    """The default-configuration (seed 42) pipeline, run once per session.

    Mirrors what the ``demo`` subcommand computes: simulate, harvest,
    extract, cross-validate the combined dataset, and compare feature
    groups.  ``elapsed`` captures the wall time of the whole chain.
    """
    start = time.perf_counter()
    config = simnet.parse_config(simnet.default_config_text())
    profiles, events = simnet.run_simulation(config)
    harvested = simnet.harvest(
        profiles, events, config.harvest_cap, config.seed, config.control_fraction
    )
    vectors = features.extract_all(harvested)
    dataset = features.vectors_to_dataset(vectors)
    params = DecorateParams()
    predictions = cv_predictions(dataset, params, folds=10, seed=config.seed)
    report = build_report(predictions, features.CLASS_LABELS, "mal")
    groups = ablation(dataset, params, folds=10, seed=config.seed)
    elapsed = time.perf_counter() - start
    return SimpleNamespace(
        config=config,
        profiles=profiles,
        events=events,
        harvested=harvested,
        dataset=dataset,
        predictions=predictions,
        report=report,
        ablation=groups,
        elapsed=elapsed,
    )
