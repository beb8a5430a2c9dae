"""Counter-based random streams keyed by (master seed, replication, role)."""

from enum import IntEnum

import numpy as np


class StreamRole(IntEnum):
    TRAIN = 0
    TEST = 1
    QPL_CHOICE = 2
    CALIBRATION = 3


def stream(master_seed: int, replication: int, role: StreamRole) -> np.random.Generator:
    """Independent Philox generator for one (replication, role) pair.

    The same key always yields the same stream, whatever order or process the
    replications run in.
    """
    seq = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(replication), int(role)))
    return np.random.Generator(np.random.Philox(seq))
