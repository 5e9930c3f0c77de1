"""Seeded random algebra elements, vectors and operators.

All functions take an explicit ``numpy.random.Generator``; nothing here
touches global randomness, so callers control determinism by seeding.
"""

from __future__ import annotations

import numpy as np

from ._numeric import spec_norm
from .algebra import AlgebraElement
from .module_space import ModuleVector
from .operators import AdjointableOp, compose

__all__ = [
    "random_element",
    "random_vector",
    "random_operator",
    "random_operator_with_rank",
]


def random_element(signature, rng):
    """Complex Ginibre blocks, entries N(0, 1) / sqrt(2) per part."""
    blocks = []
    for n in signature.block_sizes:
        blocks.append(
            (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
            / np.sqrt(2.0)
        )
    return AlgebraElement(signature, blocks)


def random_vector(signature, k, rng):
    return ModuleVector([random_element(signature, rng) for _ in range(k)])


def random_operator(signature, rows, cols, rng, normalize=False):
    op = AdjointableOp(
        [[random_element(signature, rng) for _ in range(cols)] for _ in range(rows)]
    )
    if normalize:
        norm = spec_norm(op.flat)
        if norm > 0:
            op = op.scale(1.0 / norm)
    return op


def random_operator_with_rank(signature, rows, cols, rank, rng, normalize=True):
    """Random operator factored through ``A^rank`` (module rank ``rank``)."""
    if rank < 1 or rank > min(rows, cols):
        raise ValueError(f"rank {rank} infeasible for {rows}x{cols}")
    op = compose(
        random_operator(signature, rows, rank, rng),
        random_operator(signature, rank, cols, rng),
    )
    if normalize:
        norm = spec_norm(op.flat)
        if norm > 0:
            op = op.scale(1.0 / norm)
    return op
