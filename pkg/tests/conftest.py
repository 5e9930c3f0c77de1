"""Shared fixtures and independent oracles for the test suite.

Oracles deliberately avoid the package's factorization path: dense algebra
is done with plain ``numpy`` calls (``numpy.linalg.svd`` / ``pinv`` /
``eigvalsh``) so that expected values are computed on a route independent
of the Jacobi kernel under test.
"""

import numpy as np
import pytest

from cstarpinv import AlgebraSignature
from cstarpinv.sampling import random_element, random_operator, random_operator_with_rank

SIG1 = AlgebraSignature((1,))
SIG2 = AlgebraSignature((2,))
SIG12 = AlgebraSignature((1, 2))
SIGNATURES = (SIG1, SIG2, SIG12)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_complex(rng, rows, cols):
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def dense_embed(element):
    """Block-diagonal dense matrix of an algebra element (oracle side)."""
    size = sum(element.signature.block_sizes)
    out = np.zeros((size, size), dtype=complex)
    pos = 0
    for n, block in zip(element.signature.block_sizes, element.blocks):
        out[pos : pos + n, pos : pos + n] = block
        pos += n
    return out


def penrose_defects(t, x):
    """Independent substitution oracle: max norms of the four defects."""
    t = np.asarray(t, dtype=complex)
    x = np.asarray(x, dtype=complex)
    tx = t @ x
    xt = x @ t
    return (
        np.linalg.norm(tx @ t - t),
        np.linalg.norm(xt @ x - x),
        np.linalg.norm(tx - tx.conj().T),
        np.linalg.norm(xt - xt.conj().T),
    )


def assert_penrose(t, x, tol=1e-10):
    scale = 1.0 + np.linalg.norm(np.asarray(t)) + np.linalg.norm(np.asarray(x))
    for defect in penrose_defects(t, x):
        assert defect <= tol * scale


def conditioned_operator(signature, rows, cols, rank, rng, floor=1e-2):
    """Random operator whose retained singular values stay above floor*s1.

    Identities that pass through a Gram operator or an inverted block lose
    roughly cond(T)^2 digits, so tolerance-1e-9 checks need instances with
    bounded conditioning; rejection sampling keeps the distribution honest.
    """
    for _ in range(200):
        op = random_operator_with_rank(signature, rows, cols, rank, rng)
        s = np.linalg.svd(op.flat, compute_uv=False)
        retained = s[: rank * signature.dim]
        if retained[-1] >= floor * s[0]:
            return op
    raise RuntimeError("could not draw a well-conditioned operator")


__all__ = [
    "SIG1",
    "SIG2",
    "SIG12",
    "SIGNATURES",
    "random_complex",
    "dense_embed",
    "penrose_defects",
    "assert_penrose",
    "conditioned_operator",
    "random_element",
    "random_operator",
    "random_operator_with_rank",
]
