import dataclasses

import numpy as np
import pytest

from graphshift import DomainPair, SyntheticConfig, TrainConfig, generate_pair, split_labels

TINY_SYNTH = SyntheticConfig(n_nodes=40, n_classes=2, attr_dim=6, p_in=0.3, p_out=0.05,
                             mean_offset=0.3, noise_std=0.8, seed=0)
TINY_TRAIN = TrainConfig(epochs=3, lr=1e-2, hidden_dim=8, embed_dim=8, clf_hidden=4,
                         dropout=0.0, walks_per_node=4, walk_length=10, window=2, seed=0)


def make_tiny_pair(seed=0, rate=0.25, **synth_kw):
    scfg = dataclasses.replace(TINY_SYNTH, seed=seed, **synth_kw)
    pair = generate_pair(scfg)
    return DomainPair(split_labels(pair.source, rate, seed), pair.target)


def tiny_train_config(**kw):
    return dataclasses.replace(TINY_TRAIN, **kw)


@pytest.fixture
def tiny_pair():
    return make_tiny_pair()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
