from __future__ import annotations

from functools import lru_cache

import numpy as np
import pytest

from relimpl import counterexamples as cex
from relimpl import inference, minimizer, prover
from relimpl.equivalence import profiles
from relimpl.properties import parse_lifted, profile_bits
from relimpl.store import Store


@lru_cache(maxsize=None)
def lifted_table(n: int) -> np.ndarray:
    """[P, 384] truth table of every lifted property over the distinct profiles at size n."""
    masks, _ = profiles(n)
    return profile_bits(masks)


def column(n: int, name: str) -> np.ndarray:
    return lifted_table(n)[:, parse_lifted(name).index]


@pytest.fixture(scope="session")
def closed_store() -> Store:
    """init + manual proofs + axiom table + positive closure."""
    s = Store()
    inference.initialize(s)
    prover.ingest_manual(s)
    minimizer.load_axioms(s)
    inference.close_positive(s)
    return s


@pytest.fixture(scope="session")
def decided_store(closed_store) -> Store:
    """The full pipeline: closure, sweep, catalogs, negative closure."""
    s = closed_store.copy()
    cex.sweep(s, 5)
    cex.apply_catalogs(s)
    inference.close_negative(s)
    return s


@pytest.fixture(scope="session")
def valid_mask(closed_store) -> np.ndarray:
    return closed_store.value == 1
