"""Pure-NumPy one-sided Jacobi kernel.

Fallback used when the compiled extension is unavailable.  Rotations within
one schedule round touch disjoint column pairs, so applying them as a batch
is exactly equivalent to the compiled kernel's sequential loop.
"""

import numpy as np

# Below this, the phase of a coherence has too few significand bits to give
# a unitary rotation; such pairs involve columns that are zero in context.
_MIN_NORMAL = 2.2250738585072014e-308


def orthogonalize_columns(a, v, pair_p, pair_q, round_offsets, tol, max_sweeps):
    """Orthogonalize the columns of ``a`` in place by plane rotations.

    ``v`` (identity on entry) accumulates the right-hand rotations, so on
    exit ``a_in @ v == a_out`` with the columns of ``a_out`` mutually
    orthogonal to relative tolerance ``tol``.  Returns the sweep count.
    """
    sweeps = 0
    for _ in range(max_sweeps):
        rotated = False
        for r in range(len(round_offsets) - 1):
            sel = slice(round_offsets[r], round_offsets[r + 1])
            p, q = pair_p[sel], pair_q[sel]
            ap, aq = a[:, p], a[:, q]
            alpha = np.einsum("ij,ij->j", ap.conj(), ap).real
            beta = np.einsum("ij,ij->j", aq.conj(), aq).real
            gamma = np.einsum("ij,ij->j", ap.conj(), aq)
            absg = np.abs(gamma)
            active = (absg > tol * np.sqrt(alpha) * np.sqrt(beta)) & (absg >= _MIN_NORMAL)
            if not active.any():
                continue
            rotated = True
            p, q = p[active], q[active]
            absg = absg[active]
            # tau (or tau*tau) may overflow to inf for extreme pairs; the
            # limit t -> 0, a pure phase rotation, is exactly what the
            # formula then yields, matching the compiled kernel.
            with np.errstate(over="ignore"):
                tau = (beta[active] - alpha[active]) / (2.0 * absg)
                t = np.where(tau >= 0.0, 1.0, -1.0) / (
                    np.abs(tau) + np.sqrt(1.0 + tau * tau)
                )
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            fbar = (gamma[active] / absg).conj()
            ap, aq = a[:, p], a[:, q] * fbar
            a[:, p] = c * ap - s * aq
            a[:, q] = s * ap + c * aq
            vp, vq = v[:, p], v[:, q] * fbar
            v[:, p] = c * vp - s * vq
            v[:, q] = s * vp + c * vq
        sweeps += 1
        if not rotated:
            break
    return sweeps
