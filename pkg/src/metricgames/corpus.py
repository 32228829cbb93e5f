"""The small test corpus: finite metric spaces with distances in {1, 2, 3}."""

import itertools
from functools import lru_cache

from .structures import Vocabulary, metric_space

LABELS = "pqrs"


def _canonical(n, d):
    return min(tuple(d[p[i]][p[j]] for i in range(n) for j in range(i + 1, n))
               for p in itertools.permutations(range(n)))


def _is_metric(n, d):
    return all(d[i][k] <= d[i][j] + d[j][k]
               for i in range(n) for j in range(n) for k in range(n))


@lru_cache(maxsize=None)
def _matrices(max_points, values):
    out = []
    for n in range(1, max_points + 1):
        seen = set()
        slots = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for choice in itertools.product(values, repeat=len(slots)):
            d = [[0] * n for _ in range(n)]
            for (i, j), x in zip(slots, choice):
                d[i][j] = d[j][i] = x
            if not _is_metric(n, d):
                continue
            key = _canonical(n, d)
            if key in seen:
                continue
            seen.add(key)
            out.append((n, tuple(tuple(r) for r in d)))
    return tuple(out)


def small_corpus(max_points=4, values=(1, 2, 3), vocabulary=Vocabulary.LM_CORR):
    """All metric spaces up to isometry, ordered by size then by first discovery."""
    return [metric_space(list(LABELS[:n]) if n <= len(LABELS) else
                         [f"p{i}" for i in range(n)],
                         [list(r) for r in d], vocabulary)
            for n, d in _matrices(max_points, tuple(values))]
