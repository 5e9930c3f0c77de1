"""Small numeric helpers used across modules."""

import numpy as np


def spec_norm(m):
    """Spectral norm; 0.0 for matrices with an empty dimension."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def rel_residual(lhs, rhs):
    """``||lhs - rhs||`` normalized by ``1 + ||lhs||`` (spectral norms).

    ``lhs`` is the left operand of the identity being tested; pass ``None``
    for ``rhs`` to measure an identity of the form ``lhs == 0``.
    """
    delta = lhs if rhs is None else lhs - rhs
    return spec_norm(delta) / (1.0 + spec_norm(lhs))
