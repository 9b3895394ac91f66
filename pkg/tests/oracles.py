"""Independent reference implementations used only by the tests.

They are deliberately naive (plain recursion or nested loops) so they share
no code or strategy with the library.
"""

from collections import Counter
from functools import lru_cache


def edit_distance(ref, hyp):
    """Quadratic Wagner-Fischer over the prefixes, forward direction."""
    n, m = len(ref), len(hyp)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]))
    return d[n][m]


def min_errors_by_kind(ref, hyp):
    """All (S, D, I) triples reachable at minimum total cost, by memoized recursion."""
    ref, hyp = tuple(ref), tuple(hyp)

    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(ref) and j == len(hyp):
            return 0, {(0, 0, 0)}
        options = []
        if i < len(ref) and j < len(hyp):
            c, s = go(i + 1, j + 1)
            sub = ref[i] != hyp[j]
            options.append((c + sub, {(a + sub, b, e) for a, b, e in s}))
        if i < len(ref):
            c, s = go(i + 1, j)
            options.append((c + 1, {(a, b + 1, e) for a, b, e in s}))
        if j < len(hyp):
            c, s = go(i, j + 1)
            options.append((c + 1, {(a, b, e + 1) for a, b, e in s}))
        best = min(c for c, _ in options)
        return best, set().union(*(s for c, s in options if c == best))

    return go(0, 0)


def sliding_counts(sentences, order):
    counts = Counter()
    for sent in sentences:
        for i in range(len(sent) - order + 1):
            counts[tuple(sent[i : i + order])] += 1
    return counts
