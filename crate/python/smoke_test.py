#!/usr/bin/env python3
"""Smoke test for the pdecomp_py extension module.

Builds nothing itself: it locates the compiled cdylib under the cargo
target directory (release preferred), copies it next to a temp dir under
the importable name, and exercises the main entry points.

Usage:
    cargo build -p pdecomp-py --release
    python3 python/smoke_test.py
"""

import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def locate_library():
    target = os.environ.get("CARGO_TARGET_DIR", os.path.join(ROOT, "target"))
    candidates = [
        os.path.join(target, profile, name)
        for profile in ("release", "debug")
        for name in ("libpdecomp_py.so", "libpdecomp_py.dylib", "pdecomp_py.dll")
    ]
    for path in candidates:
        if os.path.exists(path):
            return path
    raise SystemExit(
        "pdecomp_py library not found; run `cargo build -p pdecomp-py --release` first"
    )


def import_module():
    lib = locate_library()
    stage = tempfile.mkdtemp(prefix="pdecomp_py_")
    suffix = ".pyd" if lib.endswith(".dll") else ".so"
    shutil.copy(lib, os.path.join(stage, "pdecomp_py" + suffix))
    sys.path.insert(0, stage)
    import pdecomp_py

    return pdecomp_py


def main():
    pd = import_module()

    # Random exact module round-trips through decomposition.
    module, truth = pd.random_module(6, 5, 8, seed=42, p=101)
    commutes, exact = module.validate()
    assert commutes and exact, "random module must validate"
    barcode = module.decompose()
    assert barcode == truth, "decomposition must recover the ground truth"
    assert module.certify(barcode), "certificate must verify"

    # Pointwise dimensions agree with the barcode.
    n, m = module.grid()
    for x in range(n + 1):
        for y in range(m + 1):
            assert module.dim(x, y) == barcode.dim_at(x, y)

    # JSON round-trip.
    again = pd.Module.from_json(module.to_json())
    assert again.to_json() == module.to_json()

    # Smoothing preserves exactness.
    smoothed = module.smoothing(1, 1)
    assert smoothed.validate() == (True, True)

    # Synthesis from an explicit barcode.
    handmade = pd.Barcode.new(2, 2, [("b", 1, 0, 1), ("b", 0, 1, 1)])
    synthesized = pd.synth(handmade, p=2)
    assert synthesized.dim(1, 1) == 2
    assert synthesized.decompose() == handmade

    # Zigzag interval round-trip with hidden bases.
    zig = pd.Zigzag.from_intervals([(0, 2, 1), (1, 3, 2)], length=3, p=5)
    assert zig.dims() == [1, 3, 3, 2]
    hidden = zig.conjugate(9)
    assert sorted(hidden.decompose()) == [(0, 2, 1), (1, 3, 2)]

    # Interlevel-set barcode of a path graph with a peak.
    barcode, levels = pd.interlevel_barcode([0.0, 2.0, 0.0], [(0, 1), (1, 2)], p=2)
    assert levels == [-1.0, 0.0, 1.0, 2.0, 3.0]
    assert barcode.total_blocks() >= 2

    # Bottleneck distance: zero on equal barcodes, finite band deletion.
    assert barcode.bottleneck(barcode) == 0.0
    band = pd.Barcode.new(4, 4, [("h", 1, 3, 1)])
    empty = pd.Barcode.new(4, 4, [])
    assert band.bottleneck(empty) == 1.5
    quad = pd.Barcode.new(4, 4, [("b", 0, 0, 1)])
    assert quad.bottleneck(empty) == float("inf")

    # SVG plotting is deterministic.
    svg = pd.plot_svg(handmade)
    assert svg.startswith("<svg") and svg == pd.plot_svg(handmade)

    print("smoke test OK")


if __name__ == "__main__":
    main()
