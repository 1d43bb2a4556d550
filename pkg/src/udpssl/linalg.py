"""Dense symmetric linear algebra implemented in-repo.

The generalized eigenproblem behind the projection solver is reduced to a
standard symmetric one by Cholesky whitening, the symmetric problem to
tridiagonal form by Householder reflections, and the tridiagonal problem is
solved by implicit-shift QL with eigenvector accumulation.  No LAPACK
eigensolver or factorization is called anywhere in this module; BLAS-backed
matrix products via NumPy are the only external numerics.

The QL sweep is the one stage whose cost is Python-loop bound, so it exists
twice: a Cython kernel (``udpssl._tridiag``) and a NumPy fallback with the
identical algorithm.  The compiled kernel is selected at import when the
extension built; ``HAVE_COMPILED_KERNEL`` records which path is active and
``benchmarks/bench_eigh.py`` compares the two.
"""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError, NumericalError

try:
    from ._tridiag import tql2 as _tql2_compiled
except ImportError:  # extension not built; pure path below
    _tql2_compiled = None

HAVE_COMPILED_KERNEL = _tql2_compiled is not None


def cholesky_lower(a: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L Lᵀ = a for symmetric positive definite a.

    Raises NumericalError reporting the smallest pivot encountered when a
    is not positive definite.
    """
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    L = np.zeros((n, n))
    for j in range(n):
        pivot = a[j, j] - L[j, :j] @ L[j, :j]
        if pivot <= 0.0 or not np.isfinite(pivot):
            raise NumericalError(
                f"matrix is not positive definite (pivot {pivot:.6e} at row {j})"
            )
        L[j, j] = np.sqrt(pivot)
        if j + 1 < n:
            L[j + 1 :, j] = (a[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def solve_lower(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve L z = b by forward substitution (b may have many columns)."""
    n = L.shape[0]
    z = np.array(b, dtype=np.float64, copy=True)
    if z.ndim == 1:
        z = z[:, None]
        squeeze = True
    else:
        squeeze = False
    for i in range(n):
        if i:
            z[i] -= L[i, :i] @ z[:i]
        z[i] /= L[i, i]
    return z[:, 0] if squeeze else z


def solve_lower_transpose(L: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve Lᵀ z = b by back substitution."""
    n = L.shape[0]
    z = np.array(b, dtype=np.float64, copy=True)
    if z.ndim == 1:
        z = z[:, None]
        squeeze = True
    else:
        squeeze = False
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            z[i] -= L[i + 1 :, i] @ z[i + 1 :]
        z[i] /= L[i, i]
    return z[:, 0] if squeeze else z


def householder_tridiagonalize(a: np.ndarray):
    """Reduce symmetric a to tridiagonal T with orthogonal Q: a = Q T Qᵀ.

    Returns (diag, offdiag, Q) where offdiag[i] couples rows i and i+1
    (offdiag has length n-1).
    """
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    T = np.array(a, copy=True)
    Q = np.eye(n)
    for k in range(n - 2):
        x = T[k + 1 :, k]
        norm_x = np.sqrt(x @ x)
        if norm_x == 0.0:
            continue
        alpha = -np.copysign(norm_x, x[0]) if x[0] != 0.0 else -norm_x
        v = x.copy()
        v[0] -= alpha
        vnorm = np.sqrt(v @ v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        sub = T[k + 1 :, k + 1 :]
        w = sub @ v
        u = 2.0 * (w - (v @ w) * v)
        sub -= np.outer(v, u) + np.outer(u, v)
        T[k + 1 :, k] = 0.0
        T[k, k + 1 :] = 0.0
        T[k + 1, k] = alpha
        T[k, k + 1] = alpha
        Qb = Q[:, k + 1 :]
        Qb -= 2.0 * np.outer(Qb @ v, v)
    diag = np.diagonal(T).copy()
    offdiag = np.diagonal(T, offset=-1).copy()
    return diag, offdiag, Q


def tql2_pure(d: np.ndarray, e: np.ndarray, Z: np.ndarray, max_sweeps: int = 64) -> None:
    """Implicit-shift QL on a symmetric tridiagonal matrix, in place.

    d: diagonal (n,), overwritten with eigenvalues (unsorted).
    e: subdiagonal workspace (n,), e[i] couples d[i] and d[i+1]; e[n-1]
       must be 0 on entry; destroyed.
    Z: (n, n) orthogonal basis (typically from tridiagonalization),
       overwritten with eigenvectors as columns.
    """
    n = d.shape[0]
    for l in range(n):
        iters = 0
        while True:
            for m in range(l, n - 1):
                dd = abs(d[m]) + abs(d[m + 1])
                if dd + abs(e[m]) == dd:
                    break
            else:
                m = n - 1
            if m == l:
                break
            iters += 1
            if iters > max_sweeps:
                raise NumericalError(f"QL sweep failed to converge at index {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + np.copysign(r, g))
            s = c = 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = Z[:, i].copy()
                zi1 = Z[:, i + 1].copy()
                Z[:, i + 1] = s * zi + c * zi1
                Z[:, i] = c * zi - s * zi1
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0


def tql2(d, e, Z, impl: str | None = None) -> None:
    """Dispatch to the compiled QL kernel when available.

    impl: None (auto), "compiled", or "pure".
    """
    if impl is None:
        impl = "compiled" if HAVE_COMPILED_KERNEL else "pure"
    if impl == "compiled":
        if _tql2_compiled is None:
            raise ArgumentError("compiled kernel requested but not built")
        try:
            _tql2_compiled(d, e, Z)
        except RuntimeError as exc:
            raise NumericalError(str(exc)) from exc
    elif impl == "pure":
        tql2_pure(d, e, Z)
    else:
        raise ArgumentError(f"unknown impl {impl!r}")


def eigh_symmetric(a: np.ndarray, impl: str | None = None):
    """All eigenvalues (ascending) and orthonormal eigenvectors of
    symmetric a.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ArgumentError(f"matrix must be square, got {a.shape}")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-10 * max(1.0, np.abs(a).max())):
        raise ArgumentError("matrix is not symmetric")
    n = a.shape[0]
    if n == 1:
        return a[0, :1].astype(np.float64), np.ones((1, 1))
    diag, offdiag, Q = householder_tridiagonalize(a)
    e = np.zeros(n)
    e[: n - 1] = offdiag
    tql2(diag, e, Q, impl=impl)
    order = np.argsort(diag, kind="stable")
    return diag[order], Q[:, order]


def eigh_generalized(a: np.ndarray, b: np.ndarray, impl: str | None = None):
    """Eigenpairs of a v = w b v for symmetric a and positive definite b.

    Eigenvalues ascending; eigenvectors b-orthogonal, returned with unit
    Euclidean norm and a deterministic sign (largest-magnitude component
    positive).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ArgumentError(f"shape mismatch {a.shape} vs {b.shape}")
    L = cholesky_lower(b)
    # C = L^-1 a L^-T, via two triangular solves
    w1 = solve_lower(L, a)
    c = solve_lower(L, w1.T).T
    c = 0.5 * (c + c.T)
    w, u = eigh_symmetric(c, impl=impl)
    v = solve_lower_transpose(L, u)
    norms = np.sqrt((v * v).sum(axis=0))
    v = v / norms
    # deterministic sign: make the largest-|.| component of each column positive
    picks = np.abs(v).argmax(axis=0)
    signs = np.sign(v[picks, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return w, v * signs
