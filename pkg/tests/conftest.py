import numpy as np
import pytest

from backcache import Scenario, zipf_popularity

# High-precision reference constants (independent evaluation, mpmath at
# 40 digits): beta and D(x) = 1/(1 - beta^x) for R=2.5, m=1, snr=10.
BETA_REF = 0.3722952867654063
D_REF = {
    1: 1.5931057691871552,
    2: 1.1609059540984173,
    4: 1.0195872997540483,
    8: 1.0003691990853477,
    10: 1.0000511561199921,
}
ZIPF3_REF = (0.4593401697225313, 0.30305149384232194, 0.23760833643514676)


def make_scenario(
    num_bs=4,
    num_files=3,
    segments_per_file=3,
    cache_capacity=2,
    backhaul_delay=2.0,
    rate=2.5,
    buffer=1,
    avg_snr=10.0,
    popularity=None,
    zipf_gamma=0.6,
):
    if popularity is None:
        popularity = zipf_popularity(num_files, zipf_gamma)
    return Scenario(
        num_bs=num_bs,
        num_files=num_files,
        segments_per_file=segments_per_file,
        cache_capacity=cache_capacity,
        backhaul_delay=backhaul_delay,
        rate=rate,
        buffer=buffer,
        avg_snr=avg_snr,
        popularity=np.asarray(popularity, dtype=float),
    )


@pytest.fixture
def small_scenario():
    """The small comparison instance: F=3, L=3, K=4, C=2, Zipf 0.6."""
    return make_scenario()


@pytest.fixture
def single_segment_scenario():
    return make_scenario(
        num_bs=8,
        num_files=1,
        segments_per_file=1,
        cache_capacity=1,
        backhaul_delay=0.0,
        popularity=[1.0],
    )


@pytest.fixture
def tiny_scenario():
    """F=1, L=2, K=2, C=1: six feasible replica vectors."""
    return make_scenario(
        num_bs=2,
        num_files=1,
        segments_per_file=2,
        cache_capacity=1,
        backhaul_delay=4.0,
        popularity=[1.0],
    )


def random_scenario(rng, max_bs=6, max_files=4, max_segments=4):
    num_bs = int(rng.integers(1, max_bs + 1))
    num_files = int(rng.integers(1, max_files + 1))
    per_file = int(rng.integers(1, max_segments + 1))
    capacity = int(rng.integers(0, num_files * per_file + 1))
    pop = rng.uniform(0.1, 1.0, num_files)
    return make_scenario(
        num_bs=num_bs,
        num_files=num_files,
        segments_per_file=per_file,
        cache_capacity=capacity,
        backhaul_delay=float(rng.uniform(0, 4)),
        rate=float(rng.uniform(0.5, 4.0)),
        buffer=int(rng.integers(1, 4)),
        avg_snr=float(rng.uniform(1.0, 20.0)),
        popularity=pop / pop.sum(),
    )
