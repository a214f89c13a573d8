"""Binary placement tensors and their replica-count summary.

The placement is a binary F x L x K tensor; entry (f, l, k) = 1 means
segment l of file f is cached at BS k.  The delay objective depends on a
placement only through its replica counts, so a concrete tensor is
reconstructed from a replica vector with a deterministic greedy packer.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .scenario import Scenario

__all__ = [
    "PlacementMatrix",
    "replica_counts",
    "realize_placement",
    "validate",
    "dump_placement",
    "parse_placement",
]


@dataclass(frozen=True, eq=False)
class PlacementMatrix:
    """Binary cache tensor of shape (num_files, segments_per_file, num_bs)."""

    cache: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.cache)
        if arr.ndim != 3:
            raise ValueError("cache tensor must have shape (F, L, K)")
        arr = arr.astype(np.int8)
        arr.setflags(write=False)
        object.__setattr__(self, "cache", arr)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.cache.shape

    def bs_loads(self) -> np.ndarray:
        """Cached segments per BS, length K."""
        return self.cache.sum(axis=(0, 1))


def replica_counts(placement: PlacementMatrix) -> np.ndarray:
    """Replica vector x with x[f*L + l] = number of BSs caching (f, l)."""
    return placement.cache.sum(axis=2, dtype=np.int64).reshape(-1)


def realize_placement(x, scenario: Scenario) -> PlacementMatrix:
    """Build a concrete placement whose replica counts equal x.

    Segments are processed in decreasing replica count (ties by segment
    index); each is assigned to its x_i currently least-loaded BSs (ties
    by BS index).  The construction is deterministic.
    """
    from .delay import validate_replica_vector

    arr = validate_replica_vector(x, scenario)
    num_files, per_file, num_bs = (
        scenario.num_files,
        scenario.segments_per_file,
        scenario.num_bs,
    )
    cache = np.zeros((num_files, per_file, num_bs), dtype=np.int8)
    loads = np.zeros(num_bs, dtype=np.int64)
    order = np.argsort(-arr, kind="stable")
    for i in order:
        count = int(arr[i])
        if count == 0:
            continue
        chosen = np.lexsort((np.arange(num_bs), loads))[:count]
        over = chosen[loads[chosen] >= scenario.cache_capacity]
        if over.size:
            raise ValueError(
                "greedy packing failed: BS capacity exhausted while placing "
                f"segment {int(i)}"
            )
        f, l = divmod(int(i), per_file)
        cache[f, l, chosen] = 1
        loads[chosen] += 1
    return PlacementMatrix(cache)


def validate(placement: PlacementMatrix, scenario: Scenario) -> list[str]:
    """Return human-readable constraint violations (empty list if valid)."""
    violations = []
    expected = (scenario.num_files, scenario.segments_per_file, scenario.num_bs)
    if placement.shape != expected:
        return [f"shape {placement.shape} does not match scenario {expected}"]
    cache = placement.cache
    bad = (cache != 0) & (cache != 1)
    for f, l, k in zip(*np.nonzero(bad)):
        violations.append(
            f"non-binary entry {int(cache[f, l, k])} at "
            f"(file={int(f)}, segment={int(l)}, bs={int(k)})"
        )
    loads = placement.bs_loads()
    for k in np.nonzero(loads > scenario.cache_capacity)[0]:
        violations.append(
            f"BS {int(k)} caches {int(loads[k])} segments, "
            f"capacity is {scenario.cache_capacity}"
        )
    # Redundant per-segment bound; binary entries already imply it.
    counts = cache.sum(axis=2)
    for f, l in zip(*np.nonzero(counts > scenario.num_bs)):
        violations.append(
            f"segment (file={int(f)}, segment={int(l)}) replicated "
            f"{int(counts[f, l])} > K times"
        )
    return violations


def dump_placement(placement: PlacementMatrix, path) -> None:
    """Write the sparse text format: one `bs file segment` line (0-based)
    per cached copy, sorted lexicographically."""
    f_idx, l_idx, k_idx = np.nonzero(placement.cache)
    entries = sorted(zip(k_idx.tolist(), f_idx.tolist(), l_idx.tolist()))
    Path(path).write_text(
        "".join(f"{k} {f} {l}\n" for k, f, l in entries), encoding="ascii"
    )


def parse_placement(path, scenario: Scenario) -> PlacementMatrix:
    """Read the sparse text format written by :func:`dump_placement`."""
    cache = np.zeros(
        (scenario.num_files, scenario.segments_per_file, scenario.num_bs),
        dtype=np.int8,
    )
    for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
        if not line.strip():
            continue
        try:
            k, f, l = (int(tok) for tok in line.split())
            cache[f, l, k] = 1
        except (ValueError, IndexError) as exc:
            raise ValueError(f"{path}:{line_no}: bad placement line") from exc
    return PlacementMatrix(cache)
