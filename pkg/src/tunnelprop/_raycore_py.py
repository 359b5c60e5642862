"""Pure-Python (numpy) fallback for the compiled ray-sampling kernel.

Same contract and bit-identical results as ``_raycore.ray_occupancy``; used
when the extension is unavailable or when ``TUNNELPROP_PURE=1`` is set.
"""

import numpy as np


def ray_occupancy(dense, ox, oy, oz, dx, dy, dz, step, n_samples):
    """Occupancy (0/1) at samples origin + i*step*direction, i in [0, n)."""
    # Mirror the extension's arithmetic exactly: t = i*step, p = o + t*d.
    t = np.arange(n_samples, dtype=np.float64) * step
    ix = np.floor(ox + t * dx).astype(np.int64)
    iy = np.floor(oy + t * dy).astype(np.int64)
    iz = np.floor(oz + t * dz).astype(np.int64)
    nx, ny, nz = dense.shape
    inside = ((ix >= 0) & (ix < nx) & (iy >= 0) & (iy < ny) & (iz >= 0) & (iz < nz))
    out = np.zeros(n_samples, dtype=np.uint8)
    out[inside] = dense[ix[inside], iy[inside], iz[inside]]
    return out
