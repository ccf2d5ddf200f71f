#!/usr/bin/env python3
"""Regenerate the precomputed polynomial-root cache shipped with the package.

The roots of the length-generating polynomials are computed from their exact
integer coefficients in 50-digit arithmetic, which takes seconds per order
at high n; caching them keeps grid construction instant. Run this after any
change to the root-finding path:

    python scripts/generate_root_cache.py [--max-n 64]
"""
import argparse
import time

import numpy as np

from cfem.pade_grid import _ROOT_CACHE_PATH, _compute_roots


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=60)
    args = parser.parse_args()

    arrays = {}
    for n in range(1, args.max_n + 1):
        t0 = time.time()
        arrays[f"n{n}"] = _compute_roots(n)
        print(f"n={n}: {time.time() - t0:.2f} s")
    _ROOT_CACHE_PATH.parent.mkdir(parents=True, exist_ok=True)
    np.savez_compressed(_ROOT_CACHE_PATH, **arrays)
    print(f"wrote {_ROOT_CACHE_PATH}")


if __name__ == "__main__":
    main()
