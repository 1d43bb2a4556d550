# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implicit-shift QL kernel for symmetric tridiagonal matrices.

Same contract as udpssl.linalg.tql2_pure; the inner rotation loop runs in C
instead of Python, which is what makes dense eigendecompositions of
pixel-scale scatter matrices fast.
"""

from libc.math cimport fabs, hypot, copysign


class QLConvergenceError(RuntimeError):
    pass


def tql2(double[::1] d, double[::1] e, double[:, ::1] Z, int max_sweeps=64):
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t l, m, i, row
    cdef int iters
    cdef bint underflow
    cdef double dd, g, r, s, c, p, f, b, zi, zi1

    if e.shape[0] != n or Z.shape[0] != n or Z.shape[1] != n:
        raise ValueError("inconsistent workspace shapes")

    for l in range(n):
        iters = 0
        while True:
            m = n - 1
            for i in range(l, n - 1):
                dd = fabs(d[i]) + fabs(d[i + 1])
                if dd + fabs(e[i]) == dd:
                    m = i
                    break
            if m == l:
                break
            iters += 1
            if iters > max_sweeps:
                raise QLConvergenceError(f"QL sweep failed to converge at index {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for row in range(n):
                    zi = Z[row, i]
                    zi1 = Z[row, i + 1]
                    Z[row, i + 1] = s * zi + c * zi1
                    Z[row, i] = c * zi - s * zi1
            if not underflow:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
