"""Worst-case linear-time order statistics (median of medians).

The partitioning steps are vectorized with numpy, but the control flow is
the classic deterministic BFPRT scheme, so the number of element
comparisons is O(n) in the worst case.  An optional :class:`Counter`
tallies those comparisons for complexity checks.
"""
import numpy as np

# At or below this size we sort directly; a constant, so still O(1) work.
_BASE = 25
# Comparisons used to sort a group of 5 with the classic network.
_GROUP_SORT_COST = 9


class Counter:
    """Running tally of element comparisons."""

    def __init__(self):
        self.comparisons = 0

    def add(self, k):
        self.comparisons += int(k)


def _sort_cost(m):
    # insertion sort upper bound on a tiny slice
    return m * (m - 1) // 2


def _median_of_medians(x, counter):
    m = x.size
    full = (m // 5) * 5
    groups = np.sort(x[:full].reshape(-1, 5), axis=1)[:, 2]
    if counter is not None:
        counter.add(_GROUP_SORT_COST * (full // 5) + _sort_cost(m - full))
    if m > full:
        tail = np.sort(x[full:])
        groups = np.append(groups, tail[(tail.size - 1) // 2])
    return _select(groups, (groups.size + 1) // 2, counter)


def _select(x, k, counter):
    # k is 1-based; x is a scratch array we own
    while True:
        m = x.size
        if m <= _BASE:
            if counter is not None:
                counter.add(_sort_cost(m))
            return float(np.sort(x)[k - 1])
        pivot = _median_of_medians(x, counter)
        less = x[x < pivot]
        n_less = less.size
        n_equal = int(np.count_nonzero(x == pivot))
        if counter is not None:
            counter.add(2 * m)
        if k <= n_less:
            x = less
        elif k <= n_less + n_equal:
            return pivot
        else:
            x = x[x > pivot]
            if counter is not None:
                counter.add(m)
            k -= n_less + n_equal


def select_kth(values, k, counter=None):
    """Return the k-th smallest element (1-based) of ``values``.

    The caller's data is never modified.
    """
    x = np.array(values, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("select_kth needs a non-empty input")
    if not 1 <= k <= x.size:
        raise ValueError(f"k={k} out of range for {x.size} values")
    return _select(x, int(k), counter)


def median(values, counter=None):
    """Lower median: the ceil(n/2)-th smallest element."""
    x = np.asarray(values)
    return select_kth(x, (x.size + 1) // 2, counter)
