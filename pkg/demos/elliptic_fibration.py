"""The genus-one pencil through F and F', its reducible fibres and section heights.

Run:  python demos/elliptic_fibration.py [a0 a1 a2 a3 a4]
"""
import sys

from dp4brauer import (
    MixedConfiguration,
    TypeCheckFailed,
    brauer_presentations,
    build_lines,
    build_pencil,
    elliptic_model,
    fibre_type_check,
    mw_report,
    verticality,
)
from dp4brauer.brauer import labels_of

a = tuple(map(int, sys.argv[1:6])) if len(sys.argv) > 5 else (1, 1, -1, -4, 1)
config = build_lines(a)
pencil = build_pencil(config)
for bp in pencil.base_points:
    print(f"{bp.name} = {' ^ '.join(map(str, bp.lines))} defined over {bp.field or 'Q'}")

model = elliptic_model(pencil)
for f in model.fibres:
    print(f"fibre {f.kodaira} at t = {f.parameter}: {[c.name for c in f.components]}")
try:
    fibre_type_check(model)
except TypeCheckFailed as exc:
    print(f"type check: {exc}")

for p in brauer_presentations(config):
    try:
        v = verticality(p, pencil)
    except MixedConfiguration:
        v = "mixed"
    print(f"{labels_of(p.first)} | {labels_of(p.second)}: {v}")

report = mw_report(a, model)
for k, v in report.heights.items():
    print(f"{k} = {v}")
print(f"Shioda-Tate: {report.shioda_tate}")
print(report.narrative)
