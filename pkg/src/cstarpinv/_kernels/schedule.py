"""Round-robin rotation schedule shared by both Jacobi backends.

A sweep visits every unordered column pair exactly once, grouped into rounds
of pairwise-disjoint pairs (the circle method).  Disjointness makes the
vectorized backend apply a whole round at once while computing exactly the
same rotations as the sequential compiled kernel.
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def rotation_schedule(n):
    """Pair lists for one sweep over ``n`` columns.

    Returns
    -------
    pair_p, pair_q : intp arrays, one entry per pair, round-major
    round_offsets : intp array of length ``n_rounds + 1`` delimiting rounds
    """
    if n < 2:
        empty = np.zeros(0, dtype=np.intp)
        return empty, empty, np.zeros(1, dtype=np.intp)
    # Pad to an even player count; index `n` (if present) is the bye.
    padded = n if n % 2 == 0 else n + 1
    others = list(range(1, padded))
    ps, qs, offsets = [], [], [0]
    for _ in range(padded - 1):
        lineup = [0] + others
        for i in range(padded // 2):
            a, b = lineup[i], lineup[padded - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        offsets.append(len(ps))
        others = others[-1:] + others[:-1]
    return (
        np.asarray(ps, dtype=np.intp),
        np.asarray(qs, dtype=np.intp),
        np.asarray(offsets, dtype=np.intp),
    )
