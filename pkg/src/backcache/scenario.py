"""Problem instances for the caching network: sizes, physical-layer and
popularity parameters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Scenario", "zipf_popularity", "db_to_linear"]

_PROB_TOL = 1e-12


def db_to_linear(value_db: float) -> float:
    """Convert a dB quantity to linear scale."""
    return float(10.0 ** (value_db / 10.0))


def zipf_popularity(num_files: int, gamma: float) -> np.ndarray:
    """Zipf request probabilities P_f = f^-gamma / sum_j j^-gamma, f = 1..F.

    Files are assumed sorted by decreasing popularity, so the returned
    vector is non-increasing.
    """
    if num_files < 1:
        raise ValueError("num_files must be >= 1")
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    ranks = np.arange(1, num_files + 1, dtype=float)
    weights = ranks ** (-gamma)
    return weights / weights.sum()


@dataclass(frozen=True, eq=False)
class Scenario:
    """A full caching-network instance.

    Delays are measured in time slots; ``avg_snr`` is linear scale
    (convert dB inputs with :func:`db_to_linear` at the boundary).
    """

    num_bs: int
    num_files: int
    segments_per_file: int
    cache_capacity: int
    backhaul_delay: float
    rate: float
    buffer: int
    avg_snr: float
    popularity: np.ndarray = field(repr=False)

    def __post_init__(self):
        for name in ("num_bs", "num_files", "segments_per_file", "buffer"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.cache_capacity < 0:
            raise ValueError("cache_capacity must be >= 0")
        if self.cache_capacity > self.num_files * self.segments_per_file:
            raise ValueError(
                "cache_capacity exceeds the number of distinct segments"
            )
        if self.backhaul_delay < 0:
            raise ValueError("backhaul_delay must be >= 0")
        if self.rate <= 0:
            raise ValueError("rate must be > 0")
        if self.avg_snr <= 0:
            raise ValueError("avg_snr must be > 0")
        popularity = np.asarray(self.popularity, dtype=float)
        if popularity.shape != (self.num_files,):
            raise ValueError("popularity must have one entry per file")
        if np.any(popularity <= 0):
            raise ValueError("popularity entries must be > 0")
        if abs(popularity.sum() - 1.0) > _PROB_TOL:
            raise ValueError("popularity must sum to 1")
        popularity.setflags(write=False)
        object.__setattr__(self, "popularity", popularity)

    @property
    def num_segments(self) -> int:
        """Total number of distinct segments F*L."""
        return self.num_files * self.segments_per_file

    @property
    def cache_budget(self) -> int:
        """Aggregate number of cached segment copies, K*C_bar."""
        return self.num_bs * self.cache_capacity

    def segment_weights(self) -> np.ndarray:
        """Per-segment request weight w, length F*L.

        Segment (f, l) maps to index f*L + l (0-based) and inherits its
        file's request probability unchanged, so the weights sum to L.
        """
        return np.repeat(self.popularity, self.segments_per_file)
