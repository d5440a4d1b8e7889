"""
Counter-based seed derivation

Every random stream is built from (base seed, stream id, index) so that
episodes can run in any order or process and still see the same numbers.
"""

import numpy as np

TRAIN_ENV_STREAM = 0
TRAIN_POLICY_STREAM = 1
REPLAY_STREAM = 2
EVAL_STREAM = 3
ROLLOUT_STREAM = 4


def derive_rng(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    """Generator for the given (seed, stream, index) triple"""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(stream), int(index)])))
