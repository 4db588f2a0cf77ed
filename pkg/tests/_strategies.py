"""Shared generators for property tests."""

import random
from math import gcd
from functools import reduce

from hypothesis import strategies as st


def _normalize(q):
    g = reduce(gcd, q)
    return tuple(x // g for x in q)


@st.composite
def weights(draw, max_n=5, max_q=12):
    n = draw(st.integers(1, max_n))
    q = draw(st.lists(st.integers(1, max_q), min_size=n + 1, max_size=n + 1))
    return _normalize(q)


def weight_corpus(count=100, max_n=5, max_q=12, seed=20261019):
    """Deterministic list of distinct normalized weight tuples."""
    rng = random.Random(seed)
    seen = []
    while len(seen) < count:
        n = rng.randint(1, max_n)
        q = _normalize([rng.randint(1, max_q) for _ in range(n + 1)])
        if q not in seen:
            seen.append(q)
    return seen
