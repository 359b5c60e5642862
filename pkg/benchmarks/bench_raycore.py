#!/usr/bin/env python3
"""Benchmark the compiled ray-sampling kernel against the numpy fallback.

Runs the same batch of rays through both backends on a realistic synthetic
scene, checks the outputs are bit-identical, and reports throughput.

    python3 benchmarks/bench_raycore.py [--rays 2000] [--step 0.25]
"""

import argparse
import time

import numpy as np

from tunnelprop import _raycore_py
from tunnelprop.synth import SideCorridor, TunnelLayout, rasterize_solid

try:
    from tunnelprop import _raycore
except ImportError:
    _raycore = None


def make_scene(voxel_size):
    layout = TunnelLayout(
        east0=-120.0, north0=-250.0, axis_length=60.0, width=3.0, height=2.5,
        burial_depth=3.0,
        side_corridors=(SideCorridor(20.0, 2.0, 6.0, side=1),
                        SideCorridor(42.0, 2.0, 6.0, side=1)))
    return layout, rasterize_solid(layout, voxel_size)


def make_rays(layout, grid, n_rays, seed=0):
    """Random origins inside the tunnel, random directions, in voxel units."""
    rng = np.random.default_rng(seed)
    origins = np.column_stack([
        rng.uniform(layout.east0 - 1.0, layout.east0 + 1.0, n_rays),
        rng.uniform(layout.north0 + 1.0, layout.north0 + layout.axis_length - 1.0, n_rays),
        rng.uniform(layout.floor_z + 0.2, layout.ceiling_z - 0.2, n_rays),
    ])
    dirs = rng.normal(size=(n_rays, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    o_vox = origins / grid.voxel_size - grid.index_min
    return o_vox, dirs


def run(kernel, dense, o_vox, dirs, step_vox, n_samples):
    t0 = time.perf_counter()
    out = [kernel.ray_occupancy(dense, o[0], o[1], o[2], d[0], d[1], d[2],
                                step_vox, n_samples)
           for o, d in zip(o_vox, dirs)]
    return time.perf_counter() - t0, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rays", type=int, default=2000)
    parser.add_argument("--step", type=float, default=0.25, help="sample step [m]")
    parser.add_argument("--max-range", type=float, default=400.0)
    parser.add_argument("--voxel-size", type=float, default=0.25)
    args = parser.parse_args()

    layout, grid = make_scene(args.voxel_size)
    o_vox, dirs = make_rays(layout, grid, args.rays)
    n_samples = int(args.max_range / args.step) + 1
    step_vox = args.step / grid.voxel_size
    total = args.rays * n_samples

    print(f"scene: {grid.dense.shape} voxels at {grid.voxel_size} m, "
          f"{args.rays} rays x {n_samples} samples")

    t_py, out_py = run(_raycore_py, grid.dense, o_vox, dirs, step_vox, n_samples)
    print(f"python kernel: {t_py:.3f} s  ({total / t_py / 1e6:.2f} Msamples/s)")

    if _raycore is None:
        print("cython kernel: extension not built, skipping")
        return

    t_cy, out_cy = run(_raycore, grid.dense, o_vox, dirs, step_vox, n_samples)
    print(f"cython kernel: {t_cy:.3f} s  ({total / t_cy / 1e6:.2f} Msamples/s)")
    print(f"speedup: {t_py / t_cy:.1f}x")

    identical = all(np.array_equal(a, np.asarray(b))
                    for a, b in zip(out_py, out_cy))
    print(f"outputs bit-identical: {identical}")
    if not identical:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
