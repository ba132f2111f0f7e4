#!/usr/bin/env python3
"""Run every theorem check on the bundled datasets and print a summary.

This is the long-form version of what the test suite asserts: localization
validity, the circle-level kernel decomposition in every chamber, the
torus-level kernel against the chamber sum, and the nonabelian comparisons
where Weyl data is available.
"""

import time

from resloc.datasets import BUNDLED, load_dataset
from resloc.kernels import (
    TorusPairing,
    build_model,
    check_circle_kernel_split,
    check_full_kernel,
    enumerate_generic_directions,
)
from resloc.spaces import localization_sum
from resloc.weylgrp import check_antisymmetrized_span, check_nonabelian_kernels


def generator_products(ds, max_degree):
    nonunit = [(n, c) for n, c in ds.generators if c.degree > 0]
    out = []

    def grow(idx, label, cls):
        out.append((label or "one", cls))
        for i in range(idx, len(nonunit)):
            name, gen = nonunit[i]
            if cls.degree + gen.degree <= max_degree:
                grow(i, f"{label}*{name}" if label else name, cls * gen)

    from resloc.spaces import RestrictedClass
    grow(0, "", RestrictedClass.unit(ds.space))
    return out


def main():
    overall_ok = True
    for name in BUNDLED:
        ds = load_dataset(name)
        dim = ds.space.dim
        print(f"== {name} (dim {dim}, rank {ds.space.vars.count}) ==")

        t0 = time.time()
        bad = [label for label, cls in generator_products(ds, dim)
               if not localization_sum(ds.space, cls).is_polynomial()]
        ok = not bad
        overall_ok &= ok
        print(f"  localization validity: {'ok' if ok else f'FAIL {bad}'}"
              f"  [{time.time() - t0:.2f}s]")

        model = build_model(ds.space, ds.generators, max(dim, dim - 2))
        chambers = enumerate_generic_directions(ds.space)
        print(f"  chambers: {len(chambers.chambers)}"
              f" (expected {chambers.expected}, complete={chambers.complete})")

        t0 = time.time()
        ok = True
        for chamber in chambers.chambers:
            for row in check_circle_kernel_split(model, chamber.representative):
                ok &= row.ok
        overall_ok &= ok
        print(f"  circle kernel split over all chambers: {'ok' if ok else 'FAIL'}"
              f"  [{time.time() - t0:.2f}s]")

        t0 = time.time()
        rows, _ = check_full_kernel(model)
        ok = all(r.ok for r in rows)
        overall_ok &= ok
        dims = ", ".join(f"d{r.degree}:{r.kernel_dim}" for r in rows)
        print(f"  torus kernel vs chamber sum: {'ok' if ok else 'FAIL'} ({dims})"
              f"  [{time.time() - t0:.2f}s]")

        if ds.weyl is not None:
            t0 = time.time()
            pairing = TorusPairing(ds.space)
            degrees = list(range(0, dim + 1, 2))
            nrows = check_nonabelian_kernels(model, ds.weyl, degrees, pairing)
            ok = all(r.equal for r in nrows)
            two_r = 2 * len(ds.weyl.positive_roots)
            for src in range(two_r, dim + 1, 2):
                ok &= check_antisymmetrized_span(model, ds.weyl, src, pairing).equal
            overall_ok &= ok
            print(f"  nonabelian comparisons: {'ok' if ok else 'FAIL'}"
                  f"  [{time.time() - t0:.2f}s]")
        print()
    print("ALL CHECKS PASS" if overall_ok else "SOME CHECKS FAILED")
    return 0 if overall_ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
