"""Motion predictability classification via match-length entropy.

A chunk of poses is discretized onto a spatial/angular grid, the cell
visits become a symbol sequence, and the sequence's entropy rate is
estimated from shortest-novel-window lengths: positions whose upcoming
window has been seen before contribute little, genuinely new movement
contributes log2(T / 1). Low entropy means repetitive, predictable motion.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import so3


class MotionClass(IntEnum):
    EASY = 0
    MEDIUM = 1
    HARD = 2

    @property
    def label(self):
        return self.name.title()


@dataclass
class ClassifierConfig:
    """Grid cell sizes (meters, radians) and entropy thresholds (bits).

    cell_size_rot of inf discretizes position only.
    """
    cell_size_pos: float = 0.05
    cell_size_rot: float = 0.1
    h_low: float = 1.0
    h_high: float = 2.5

    def __post_init__(self):
        if self.cell_size_pos <= 0.0 or self.cell_size_rot <= 0.0:
            raise ValueError("cell sizes must be positive")
        if not 0.0 < self.h_low < self.h_high:
            raise ValueError("thresholds must satisfy 0 < h_low < h_high")


def discretize_chunk(chunk, config=None):
    """Map each pose of a chunk to a symbol id.

    The cell key is floor(p / cell_size_pos) per axis together with
    floor(quat_log(q) / cell_size_rot) per axis; ids are assigned in order
    of first appearance, so the alphabet is dense in [0, n_distinct).
    """
    config = config or ClassifierConfig()
    cells = np.empty((len(chunk), 6), dtype=np.int64)
    cells[:, 0:3] = np.floor(chunk.p / config.cell_size_pos)
    for i in range(len(chunk)):
        cells[i, 3:6] = np.floor(so3.quat_log(chunk.q[i]) / config.cell_size_rot)
    ids = {}
    symbols = np.empty(len(chunk), dtype=np.int64)
    for i, key in enumerate(map(tuple, cells)):
        symbols[i] = ids.setdefault(key, len(ids))
    return symbols


def lz_entropy(symbols):
    """Entropy rate estimate, in bits per symbol.

    For each position t, lambda_t is the length of the shortest window
    starting at t that never occurs starting before t (matches may overlap
    the boundary). A position whose entire remaining suffix has been seen
    saturates at lambda_t = T and contributes zero. The estimate is
    mean(log2(T / lambda_t)); constant sequences score near 0, sequences
    of all-distinct symbols score exactly log2(T).
    """
    s = np.asarray(symbols)
    T = len(s)
    if T < 2:
        raise ValueError(f"need at least 2 symbols, got {T}")
    # lce[i, j]: common extension length of the suffixes at i and j
    lce = np.zeros((T + 1, T + 1), dtype=np.int64)
    for i in range(T - 1, -1, -1):
        np.multiply(s[i] == s, lce[i + 1, 1:T + 1] + 1, out=lce[i, 0:T])
    lam = np.empty(T)
    for t in range(T):
        m = lce[0:t, t].max() if t > 0 else 0
        lam[t] = m + 1 if m < T - t else T
    return float(np.mean(np.log2(T / lam)))


def classify(entropy, config=None):
    """Band an entropy value into a motion class."""
    config = config or ClassifierConfig()
    if entropy < config.h_low:
        return MotionClass.EASY
    if entropy < config.h_high:
        return MotionClass.MEDIUM
    return MotionClass.HARD
