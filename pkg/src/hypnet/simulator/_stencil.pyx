# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Block-tridiagonal stencil kernel.

out[i] = A[i] u[i] + B[i] u[i+1] + C[i] u[i+2] for i < n, where u carries
one ghost cell on each side (n + 2 rows). Runs without the GIL so edges can
be updated from worker threads.
"""

ctypedef fused scalar:
    double
    double complex


def apply_stencil(const scalar[:, :, ::1] A, const scalar[:, :, ::1] B,
                  const scalar[:, :, ::1] C, const scalar[:, ::1] u,
                  scalar[:, ::1] out):
    cdef Py_ssize_t n = out.shape[0]
    cdef Py_ssize_t m = out.shape[1]
    cdef Py_ssize_t i, a, b
    cdef scalar s
    if A.shape[0] != n or B.shape[0] != n or C.shape[0] != n or u.shape[0] != n + 2:
        raise ValueError("stencil shape mismatch")
    if A.shape[1] != m or A.shape[2] != m or u.shape[1] != m:
        raise ValueError("block size mismatch")
    with nogil:
        for i in range(n):
            for a in range(m):
                s = 0
                for b in range(m):
                    s = s + A[i, a, b] * u[i, b]
                for b in range(m):
                    s = s + B[i, a, b] * u[i + 1, b]
                for b in range(m):
                    s = s + C[i, a, b] * u[i + 2, b]
                out[i, a] = s
