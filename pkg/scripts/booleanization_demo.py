#!/usr/bin/env python3
"""Walk through the reflection of the three-element chain into Boolean
algebras and the failure of the analogous reflection from bounded meet
semilattices into bounded distributive lattices, printing each step."""
from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from qvbench import fixtures as fx
from qvbench.adjunction import check_counit_iso, check_unit_mono, counit, free_extension
from qvbench.core import reduct


def main() -> None:
    fe = free_extension(fx.CHAIN3, fx.DL_TO_BOOL)
    print(f"free Boolean extension of {fx.CHAIN3.name}:")
    print(f"  size {fe.algebra.size}, produced from {fe.factor_count} chain maps")
    print(f"  unit map {fe.unit.mapping} (injective: {fe.unit_injective})")

    eps = counit(fx.FOUR_BA, fx.DL_TO_BOOL)
    print(f"counit at {fx.FOUR_BA.name}: map {eps.mapping} on {eps.source.size} elements")

    fe2 = free_extension(fx.DIAMOND_MS, fx.MSL_TO_DL)
    print(f"free lattice extension of {fx.DIAMOND_MS.name}:")
    print(f"  size {fe2.algebra.size} (the missing join is adjoined)")
    eps2 = counit(fx.DIAMOND, fx.MSL_TO_DL)
    print(f"counit at {fx.DIAMOND.name}: map {eps2.mapping} -- not injective")

    print("unit injectivity over all meet-semilattice members up to size 4:")
    for inst in check_unit_mono(fx.MSL_TO_DL, 4):
        print(f"  {inst.algebra.name}: {'mono' if inst.embedding else 'NOT mono'}")
    print("counit bijectivity over all lattice members up to size 4:")
    for inst in check_counit_iso(fx.MSL_TO_DL, 4):
        print(f"  {inst.algebra.name}: {'iso' if inst.bijective else 'NOT iso'}")


if __name__ == "__main__":
    main()
