# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled ray-sampling kernel.

Walks a ray in fixed steps through a dense voxel volume and records the
occupancy of every sample.  Coordinates are pre-converted by the caller to
voxel-index units relative to the dense array, so the inner loop is pure
arithmetic plus one array lookup.  Must stay bit-identical to the pure
fallback in ``_raycore_py``.
"""

import numpy as np

from libc.math cimport floor


def ray_occupancy(const unsigned char[:, :, ::1] dense,
                  double ox, double oy, double oz,
                  double dx, double dy, double dz,
                  double step, Py_ssize_t n_samples):
    """Occupancy (0/1) at samples origin + i*step*direction, i in [0, n)."""
    out = np.zeros(n_samples, dtype=np.uint8)
    cdef unsigned char[::1] ov = out
    cdef Py_ssize_t nx = dense.shape[0]
    cdef Py_ssize_t ny = dense.shape[1]
    cdef Py_ssize_t nz = dense.shape[2]
    cdef Py_ssize_t i, ix, iy, iz
    cdef double t
    for i in range(n_samples):
        t = i * step
        ix = <Py_ssize_t>floor(ox + t * dx)
        iy = <Py_ssize_t>floor(oy + t * dy)
        iz = <Py_ssize_t>floor(oz + t * dz)
        if 0 <= ix < nx and 0 <= iy < ny and 0 <= iz < nz:
            ov[i] = dense[ix, iy, iz]
    return out
