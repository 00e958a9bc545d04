"""
Counter-based random streams.

Every random draw in the engine comes from a Philox generator whose key is
derived from a master seed plus a tuple of integer coordinates (sample size,
iteration, strategy, ...) and a role. Streams therefore do not depend on the
order in which workers execute.
"""

from typing import Iterable

import numpy as np

__author__ = "Lâm Quang Trí"
__copyright__ = "Copyright 2025, Lâm Quang Trí"
__credits__ = ["Lâm Quang Trí"]

__maintainer__ = "Lâm Quang Trí"
__email__ = "quangtri.lam.9@gmail.com"
__status__ = "Development"


ROLES = {
    "sample": 1,
    "outcomes": 2,
    "fit": 3,
    "mcmc": 4,
    "population": 5,
    "mixture": 6,
    "tracked": 7,
    "surrogate": 8,
    "draws": 9,
    "noise": 10,
    "split": 11,
    "synthesis": 12,
}


def _as_key(values: Iterable[int]) -> tuple[int, ...]:
    key = []
    for value in values:
        value = int(value)
        if value < 0:
            raise ValueError(f"Stream coordinates must be non-negative, got {value}")
        key.append(value)
    return tuple(key)


def seed_sequence(seed: int, *keys: int) -> np.random.SeedSequence:
    """Seed sequence for (seed, keys...)."""
    return np.random.SeedSequence(entropy=int(seed), spawn_key=_as_key(keys))


def generator(seed: int, *keys: int) -> np.random.Generator:
    """Philox generator keyed by an integer seed and optional coordinates."""
    return np.random.Generator(np.random.Philox(seed_sequence(seed, *keys)))


def derive_seed(seed: int, *keys: int) -> int:
    """Plain integer seed for (seed, keys...), for APIs that take an int."""
    state = seed_sequence(seed, *keys).generate_state(1, np.uint64)
    return int(state[0] >> np.uint64(1))


def _role_code(role: str) -> int:
    try:
        return ROLES[role]
    except KeyError:
        raise ValueError(f"Unknown stream role '{role}'") from None


def stream(master_seed: int, *keys: int, role: str) -> np.random.Generator:
    """Generator for one role at the given coordinates."""
    return generator(master_seed, *keys, _role_code(role))


def child_seed(master_seed: int, *keys: int, role: str) -> int:
    """Integer seed for one role at the given coordinates."""
    return derive_seed(master_seed, *keys, _role_code(role))
