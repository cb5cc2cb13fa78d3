"""Command line front end: ``dp4brauer {classify,report,scan,verify}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from collections import Counter
from typing import Iterable, Sequence

from .brauer import (
    brauer_presentations,
    classify_formula,
    enumerate_fours,
    h1_oracle,
    picard_model,
    rationality_report,
    star_condition,
    ti_partition_check,
)
from .exactfield import FactorizationIncomplete, get_factor_bound, set_factor_bound
from .fibration import (
    SECTIONS,
    MixedConfiguration,
    TypeCheckFailed,
    build_pencil,
    elliptic_model,
    fibre_type_check,
    height,
    mw_report,
    projection_height,
    verticality,
)
from .galois import (
    OrbitPartition,
    contractible_orbit_exists,
    generator_permutations,
    orbits_from_generators,
    splitting_field,
)
from .surface import LABELS, NotSmooth, build_lines, closed_form_matrix, validate

SCHEMA_VERSION = "1.0"
CSV_COLUMNS = ["a0", "a1", "a2", "a3", "a4", "d", "br_order", "profile", "contractible",
               "oracle_order", "consistent", "error"]
NAMED_EXAMPLES = {(1, 1, 1, -1, 1): 2, (1, 1, -1, -4, 1): 4, (1, 1, 2, -1, -3): 1}

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


# -- classify / report ---------------------------------------------------------------

def cmd_classify(a: Sequence[int], as_json: bool = False) -> str:
    c = validate(*a)
    order = classify_formula(c)
    if as_json:
        return json.dumps({"schema_version": SCHEMA_VERSION, "coefficients": list(c.a), "d": c.d,
                           "br_order": order.order, "shape": order.shape})
    return f"Br/Br0 = {order.shape}"


def build_report(a: Sequence[int]) -> dict:
    c = validate(*a)
    config = build_lines(c, verify=False)
    gens = generator_permutations(config)
    partition = OrbitPartition(tuple(tuple(LABELS[i] for i in b) for b in orbits_from_generators(gens)))
    formula = classify_formula(c)
    oracle = h1_oracle(picard_model(config, gens))
    presentations = brauer_presentations(config, gens)
    ti = ti_partition_check(config, geometric=True, gens=gens)
    rational = rationality_report(c, config, partition)

    report = {
        "schema_version": SCHEMA_VERSION,
        "coefficients": list(c.a),
        "d": c.d,
        "splitting_field": {"anchor": "splitting-field", **splitting_field(config).to_dict()},
        "lines": {"anchor": "lines", **config.to_dict(exact=False)},
        "orbits": {"anchor": "galois-orbits", **partition.to_dict(),
                   "contractible_orbit": [str(l) for l in rational.witness] if rational.witness else None},
        "brauer": {
            "anchor": "brauer-group",
            "br_order": formula.order,
            "shape": formula.shape,
            "oracle_order": oracle,
            "consistent": formula.order == oracle,
            "star_condition": star_condition(c),
            "fours": len(enumerate_fours(config)),
            "presentations": [p.to_dict() for p in presentations],
            "ti_partition": {"holds": bool(ti), "galois_stable": ti.galois_stable,
                             "unions_are_double_fours": ti.unions_are_double_fours,
                             "cohyperplanar": ti.cohyperplanar},
        },
        "rationality": {"anchor": "rationality", **rational.to_dict()},
    }
    if formula.order == 1:
        report["fibration"] = {"anchor": "genus-one-fibration",
                               "skipped": "trivial Brauer group: the pencil statements do not apply"}
        return report

    pencil = build_pencil(config)
    model = elliptic_model(pencil)
    try:
        check = {"types": fibre_type_check(model), "passed": True}
    except TypeCheckFailed as exc:
        check = {"types": exc.found, "passed": False, "message": str(exc)}
    vert = []
    for p in presentations:
        try:
            kind = verticality(p, pencil)
        except MixedConfiguration:
            kind = "mixed"
        vert.append({"first": p.to_dict()["first"], "b": p.b, "kind": kind})
    mw = mw_report(c, model)
    report["fibration"] = {
        "anchor": "genus-one-fibration",
        "pencil": pencil.to_dict(),
        "model": model.to_dict(),
        "fibre_type_check": check,
        "verticality": vert,
    }
    report["mordell_weil"] = {"anchor": "mordell-weil", **mw.to_dict()}
    return report


def render_report(rep: dict) -> str:
    b = rep["brauer"]
    out = [
        f"a = {tuple(rep['coefficients'])}, d = {rep['d']}",
        f"splitting field: Q({', '.join('sqrt(%d)' % r for r in rep['splitting_field']['basis'])})"
        if rep["splitting_field"]["basis"] else "splitting field: Q",
        f"orbit profile: {rep['orbits']['profile']}",
        f"contractible orbit: {rep['orbits']['contractible_orbit']}",
        f"Br/Br0 = {b['shape']} (formula {b['br_order']}, oracle {b['oracle_order']}, "
        f"consistent: {b['consistent']})",
        f"presentations: {len(b['presentations'])}",
    ]
    for p in b["presentations"]:
        out.append(f"  {{{', '.join(p['first'])}}} | {{{', '.join(p['second'])}}}  b = {p['b']}")
    out.append(f"ti partition: {b['ti_partition']['holds']}")
    out.append(f"rationality: {rep['rationality']['verdict']}")
    fib = rep["fibration"]
    if "skipped" in fib:
        out.append(f"fibration: {fib['skipped']}")
        return "\n".join(out)
    out.append(f"fibres: [{', '.join(fib['fibre_type_check']['types'])}]")
    if not fib["fibre_type_check"]["passed"]:
        out.append(f"  fibre check: {fib['fibre_type_check']['message']}")
    for bp in fib["pencil"]["base_points"]:
        field = "Q" if not bp["field"] else "Q(" + ", ".join(f"sqrt({r})" for r in bp["field"]) + ")"
        out.append(f"  {bp['name']} = {' meet '.join(bp['lines'])}, defined over {field}")
    for v in fib["verticality"]:
        out.append(f"  presentation {{{', '.join(v['first'])}}}: {v['kind']}")
    mw = rep["mordell_weil"]
    for k, v in mw["heights"].items():
        out.append(f"{k} = {v}")
    out.append(f"det height matrix (E3, E4) = {mw['height_matrix_det']}")
    out.append(f"Shioda-Tate: {mw['shioda_tate']}")
    out.append(mw["narrative"])
    return "\n".join(out)


# -- scan ---------------------------------------------------------------------

def scan_row(a: Sequence[int]) -> dict:
    row = dict(zip(CSV_COLUMNS[:5], a))
    try:
        c = validate(*a)
        row["d"] = c.d
        config = build_lines(c, verify=False)
        gens = generator_permutations(config)
        blocks = orbits_from_generators(gens)
        partition = OrbitPartition(tuple(tuple(LABELS[i] for i in b) for b in blocks))
        order = classify_formula(c).order
        oracle = h1_oracle(picard_model(config, gens))
        row.update(br_order=order, profile=partition.profile_string,
                   contractible=contractible_orbit_exists(config, partition)[0],
                   oracle_order=oracle, consistent=order == oracle, error="")
    except (ArithmeticError, ValueError, RuntimeError) as exc:
        row.update(br_order="", profile="", contractible="", oracle_order="", consistent="",
                   error=f"{type(exc).__name__}: {exc}")
    return row


def admissible(a: Sequence[int]) -> bool:
    return all(a) and a[0] * a[1] != a[2] * a[3]


def box_tuples(bound: int) -> Iterable[tuple[int, ...]]:
    values = [v for v in range(-bound, bound + 1) if v]
    from itertools import product

    return (a for a in product(values, repeat=5) if admissible(a))


def random_tuples(bound: int, samples: int, seed: int) -> list[tuple[int, ...]]:
    rng = random.Random(seed)
    out = []
    while len(out) < samples:
        a = tuple(rng.randint(-bound, bound) for _ in range(5))
        if admissible(a):
            out.append(a)
    return out


def run_scan(bound: int, samples: int | None, seed: int, jobs: int = 1) -> tuple[list[dict], dict]:
    tuples = list(box_tuples(bound) if samples is None else random_tuples(bound, samples, seed))
    unique = list(dict.fromkeys(tuples))
    if jobs > 1:
        from multiprocessing import Pool

        # Pool.map returns results in input order, so the output does not depend on scheduling
        with Pool(jobs) as pool:
            memo = dict(zip(unique, pool.map(scan_row, unique, chunksize=64)))
    else:
        memo = {a: scan_row(a) for a in unique}
    rows = [memo[a] for a in tuples]
    tallies = {
        "visited": len(rows),
        "errors": sum(1 for r in rows if r["error"]),
        "by_order": dict(sorted(Counter(str(r["br_order"]) for r in rows if not r["error"]).items())),
        "by_profile": dict(sorted(Counter(r["profile"] for r in rows if not r["error"]).items())),
        "contractible": sum(1 for r in rows if r["contractible"] is True),
        "inconsistent": sum(1 for r in rows if r["consistent"] is False),
    }
    return rows, tallies


def format_scan(rows, tallies, bound, samples, seed, as_json: bool) -> str:
    header = {"schema_version": SCHEMA_VERSION, "bound": bound,
              "mode": "exhaustive" if samples is None else "random",
              "samples": samples, "seed": seed if samples is not None else None}
    if as_json:
        return json.dumps({**header, "tallies": tallies, "rows": rows}, indent=1)
    buf = io.StringIO()
    buf.write("# " + " ".join(f"{k}={v}" for k, v in header.items()) + "\n")
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r)
    buf.write("# tallies " + json.dumps(tallies, sort_keys=True) + "\n")
    return buf.getvalue()


# -- verify -------------------------------------------------------------------

class VerificationFailure(Exception):
    pass


def run_verify(samples: int, seed: int, *, inject_fault: bool = False, log=print) -> None:
    """Cross-checks; raises VerificationFailure with the first counterexample."""
    want = closed_form_matrix()
    if inject_fault:
        want[0][1] = want[1][0] = 1 - want[0][1]

    for a, expected in NAMED_EXAMPLES.items():
        config = build_lines(a)
        f = classify_formula(a).order
        o = h1_oracle(picard_model(config))
        if not f == o == expected:
            raise VerificationFailure(f"named example {a}: formula {f}, oracle {o}, expected {expected}")
    log(f"named examples: ok ({len(NAMED_EXAMPLES)})")

    tuples = random_tuples(20, samples, seed)
    for k, a in enumerate(tuples):
        config = build_lines(a, verify=False)
        f = classify_formula(a).order
        o = h1_oracle(picard_model(config))
        if f != o:
            raise VerificationFailure(f"formula {f} != oracle {o} at a = {a}")
        if len(enumerate_fours(config)) != 40:
            raise VerificationFailure(f"{len(enumerate_fours(config))} fours at a = {a}")
    log(f"formula = oracle and 40 fours: ok ({len(tuples)} samples, seed {seed})")

    for a in list(NAMED_EXAMPLES) + tuples[:10]:
        m = build_lines(a).intersections
        if m != want:
            i, j = next((i, j) for i in range(16) for j in range(16) if m[i][j] != want[i][j])
            raise VerificationFailure(
                f"intersection {LABELS[i]}.{LABELS[j]} = {m[i][j]} but closed form gives {want[i][j]} at a = {a}")
    log(f"intersection matrix = closed form: ok ({len(NAMED_EXAMPLES) + min(10, len(tuples))} surfaces)")

    for a in [t for t in NAMED_EXAMPLES if NAMED_EXAMPLES[t] > 1]:
        model = elliptic_model(build_pencil(build_lines(a)))
        if height(model, "E2") != 0:
            raise VerificationFailure(f"h(E2) = {height(model, 'E2')} at a = {a}")
        for p in SECTIONS[1:]:
            for q in SECTIONS[1:]:
                if height(model, p, q) != projection_height(model, p, q):
                    raise VerificationFailure(f"<{p},{q}> formula and lattice projection differ at a = {a}")
    log("height identities: ok")


# -- argument parsing ---------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dp4brauer", description=__doc__)
    parser.add_argument("--factor-bound", type=int, default=None,
                        help="trial division bound for squarefree parts")
    sub = parser.add_subparsers(dest="command", required=True)

    def coeffs(p):
        p.add_argument("a", type=int, nargs=5, metavar="a_i", help="a0 a1 a2 a3 a4")

    p = sub.add_parser("classify", help="order of Br X / Br_0 X")
    coeffs(p)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("report", help="full report for one surface")
    coeffs(p)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("scan", help="tabulate a box of coefficient vectors")
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--samples", type=int, default=None, help="random samples (default: exhaustive)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("verify", help="run the cross-checks")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--inject-fault", action="store_true", help="flip one adjacency entry (checks the checker)")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def main(argv: Sequence[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    saved = get_factor_bound()
    try:
        if args.factor_bound is not None:
            set_factor_bound(args.factor_bound)
        if args.command == "classify":
            print(cmd_classify(args.a, args.json))
        elif args.command == "report":
            rep = build_report(args.a)
            _emit(json.dumps(rep, indent=1) if args.json else render_report(rep), args.out)
        elif args.command == "scan":
            if args.bound < 1 or (args.samples is not None and args.samples < 0):
                raise ValueError("bound must be positive and samples non-negative")
            rows, tallies = run_scan(args.bound, args.samples, args.seed, args.jobs)
            _emit(format_scan(rows, tallies, args.bound, args.samples, args.seed, args.json), args.out)
        elif args.command == "verify":
            try:
                run_verify(args.samples, args.seed, inject_fault=args.inject_fault)
            except VerificationFailure as exc:
                print(f"FAIL: {exc}")
                return EXIT_FAIL
            print("all checks passed")
    except (NotSmooth, FactorizationIncomplete, ValueError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    finally:
        set_factor_bound(saved)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
