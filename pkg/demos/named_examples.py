"""Walk through the three named surfaces: lines, orbits, Brauer group, rationality.

Run:  python demos/named_examples.py
"""
from dp4brauer import (
    brauer_presentations,
    build_lines,
    classify_formula,
    h1_oracle,
    orbits,
    picard_model,
    rationality_report,
    ti_partition_check,
)
from dp4brauer.brauer import labels_of

SURFACES = [(1, 1, 1, -1, 1), (1, 1, -1, -4, 1), (1, 1, 2, -1, -3)]

for a in SURFACES:
    config = build_lines(a)
    print(f"a = {a}, d = {config.coefficients.d}")
    print(f"  splitting field: Q(sqrt r) for r in {list(config.basis.radicals)}")
    part = orbits(config)
    print(f"  Galois orbits on the 16 lines: {part.profile_string}")
    order = classify_formula(a)
    print(f"  Br X / Br_0 X = {order.shape} (square-class formula), "
          f"|H^1(G, Pic)| = {h1_oracle(picard_model(config))} (Smith form)")
    for p in brauer_presentations(config):
        print(f"    double four {labels_of(p.first)} | {labels_of(p.second)}, swapped over Q(sqrt {p.b})")
    print(f"  T_i partition check: {bool(ti_partition_check(config))}")
    print(f"  {rationality_report(a, config).verdict}")
    print()
