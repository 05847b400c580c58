"""Counter-based uniforms for per-trial random streams.

Draw ``k`` of trial ``i`` is ``mix64(base(seed, i) + k * GOLDEN)``, i.e. a
SplitMix64 sequence whose starting point is a hash of ``(seed, i)``. Any
trial can be replayed without touching the others, so results do not depend
on how trials are split across threads.
"""

import numba as nb
import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_TO_UNIT = 1.0 / 9007199254740992.0  # 2**-53

MASK64 = (1 << 64) - 1


@nb.njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@nb.njit(cache=True)
def stream_base(seed, index):
    """Starting counter of the stream for trial ``index``."""
    return mix64(mix64(np.uint64(seed)) + mix64(np.uint64(index) + GOLDEN))


@nb.njit(cache=True, inline="always")
def next_uniform(state):
    """Advance ``state`` and return ``(state, u)`` with ``u`` uniform in [0, 1)."""
    state = state + GOLDEN
    return state, np.float64(mix64(state) >> _S11) * _TO_UNIT


@nb.njit(cache=True)
def uniforms(seed, index, count):
    """First ``count`` draws of one stream; used by tests."""
    out = np.empty(count)
    state = stream_base(seed, index)
    for k in range(count):
        state, out[k] = next_uniform(state)
    return out
