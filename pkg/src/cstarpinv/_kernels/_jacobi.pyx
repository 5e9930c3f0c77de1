# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled one-sided Jacobi kernel.

Same rotation schedule and convergence test as the NumPy backend; pairs are
processed sequentially, which is equivalent because every schedule round
consists of disjoint column pairs.
"""

from libc.math cimport fabs, hypot, sqrt


def orthogonalize_columns(double complex[:, ::1] a, double complex[:, ::1] v,
                          Py_ssize_t[::1] pair_p, Py_ssize_t[::1] pair_q,
                          Py_ssize_t[::1] round_offsets, double tol,
                          Py_ssize_t max_sweeps):
    """In-place column orthogonalization; returns the sweep count."""
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t npairs = pair_p.shape[0]
    cdef Py_ssize_t sweep, idx, i, p, q
    cdef Py_ssize_t sweeps = 0
    cdef double alpha, beta, absg, tau, t, c, s, gr, gi
    cdef double complex ap, aq, fbar
    cdef bint rotated

    for sweep in range(max_sweeps):
        rotated = False
        for idx in range(npairs):
            p = pair_p[idx]
            q = pair_q[idx]
            alpha = 0.0
            beta = 0.0
            gr = 0.0
            gi = 0.0
            for i in range(m):
                ap = a[i, p]
                aq = a[i, q]
                alpha += ap.real * ap.real + ap.imag * ap.imag
                beta += aq.real * aq.real + aq.imag * aq.imag
                gr += ap.real * aq.real + ap.imag * aq.imag
                gi += ap.real * aq.imag - ap.imag * aq.real
            absg = hypot(gr, gi)
            # Subnormal coherences carry almost no significand bits; the
            # phase computed from them would not be unitary.  They can only
            # arise from columns that are zero relative to the matrix.
            if absg <= tol * sqrt(alpha) * sqrt(beta) or absg < 2.2250738585072014e-308:
                continue
            rotated = True
            tau = (beta - alpha) / (2.0 * absg)
            t = (1.0 if tau >= 0.0 else -1.0) / (fabs(tau) + sqrt(1.0 + tau * tau))
            c = 1.0 / sqrt(1.0 + t * t)
            s = c * t
            fbar.real = gr / absg
            fbar.imag = -gi / absg
            for i in range(m):
                ap = a[i, p]
                aq = fbar * a[i, q]
                a[i, p] = c * ap - s * aq
                a[i, q] = s * ap + c * aq
            for i in range(n):
                ap = v[i, p]
                aq = fbar * v[i, q]
                v[i, p] = c * ap - s * aq
                v[i, q] = s * ap + c * aq
        sweeps = sweep + 1
        if not rotated:
            break
    return sweeps
