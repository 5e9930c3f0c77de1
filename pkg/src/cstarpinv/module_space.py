"""Free Hilbert modules over a block-diagonal C*-algebra.

A vector in the module of length ``k`` is a ``k``-tuple of algebra elements;
the algebra-valued inner product is ``<x, y> = sum_i x_i* y_i`` and the norm
is ``||<x, x>||**(1/2)``.  Direct sums are concatenations of component lists.
"""

from __future__ import annotations

import math

import numpy as np

from .algebra import AlgebraElement, elem_adjoint, elem_mul, elem_norm
from .errors import ConformabilityError

__all__ = [
    "ModuleVector",
    "inner_product",
    "vector_norm",
    "direct_sum",
    "direct_sum_inner",
    "stack_vector",
    "unstack_vector",
]


class ModuleVector:
    """Element of the free module ``A^k``."""

    __slots__ = ("signature", "components")

    def __init__(self, components):
        components = tuple(components)
        if not components:
            raise ConformabilityError("module vectors need at least one component")
        signature = components[0].signature
        for c in components:
            if c.signature != signature:
                raise ConformabilityError("components carry different signatures")
        object.__setattr__(self, "signature", signature)
        object.__setattr__(self, "components", components)

    def __setattr__(self, name, value):
        raise AttributeError("ModuleVector is immutable")

    def __len__(self):
        return len(self.components)

    @classmethod
    def zero(cls, signature, k):
        return cls([AlgebraElement.zero(signature) for _ in range(k)])

    @classmethod
    def basis(cls, signature, k, index):
        """Standard basis vector: the identity in slot ``index``."""
        comps = [AlgebraElement.zero(signature) for _ in range(k)]
        comps[index] = AlgebraElement.identity(signature)
        return cls(comps)

    def __add__(self, other):
        _check_conformable(self, other)
        return ModuleVector([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        _check_conformable(self, other)
        return ModuleVector([a - b for a, b in zip(self.components, other.components)])

    def scale_right(self, a):
        """Right module action ``x * a`` for an algebra element ``a``."""
        return ModuleVector([elem_mul(c, a) for c in self.components])

    def __mul__(self, scalar):
        return ModuleVector([scalar * c for c in self.components])

    __rmul__ = __mul__

    def __repr__(self):
        return f"ModuleVector(k={len(self)}, signature={self.signature.block_sizes})"


def _check_conformable(x, y):
    if x.signature != y.signature:
        raise ConformabilityError("signatures differ")
    if len(x) != len(y):
        raise ConformabilityError(f"lengths differ: {len(x)} vs {len(y)}")


def inner_product(x, y):
    """Algebra-valued inner product ``sum_i x_i* y_i``.

    Conjugate-linear in the first slot, linear and A-linear in the second.
    """
    _check_conformable(x, y)
    total = AlgebraElement.zero(x.signature)
    for a, b in zip(x.components, y.components):
        total = total + elem_mul(elem_adjoint(a), b)
    return total


def vector_norm(x):
    """Module norm ``||<x, x>||**(1/2)``."""
    return math.sqrt(elem_norm(inner_product(x, x)))


def direct_sum(x, y):
    """Concatenation, realizing ``A^k (+) A^m`` as ``A^(k+m)``."""
    if x.signature != y.signature:
        raise ConformabilityError("signatures differ")
    return ModuleVector(x.components + y.components)


def direct_sum_inner(p, q):
    """Inner product on a direct sum of two modules.

    ``p`` and ``q`` are pairs ``(x, y)``; the result is
    ``<x_p, x_q> + <y_p, y_q>``.
    """
    x1, y1 = p
    x2, y2 = q
    return inner_product(x1, x2) + inner_product(y1, y2)


def stack_vector(x):
    """Flatten a module vector to a complex column (column-major per block)."""
    parts = []
    for comp in x.components:
        for block in comp.blocks:
            parts.append(block.flatten(order="F"))
    return np.concatenate(parts)


def unstack_vector(column, signature, k):
    """Inverse of :func:`stack_vector`."""
    d = signature.dim
    column = np.asarray(column, dtype=complex).reshape(k * d)
    comps = []
    pos = 0
    for _ in range(k):
        blocks = []
        for n in signature.block_sizes:
            blocks.append(column[pos : pos + n * n].reshape((n, n), order="F"))
            pos += n * n
        comps.append(AlgebraElement(signature, blocks))
    return ModuleVector(comps)
