"""Fours, double fours and the Brauer group Br X_a / Br_0 X_a.

The order of the Brauer group is computed twice: from the square-class
criterion on the coefficients (:func:`classify_formula`) and as the order of
H^1(G, Pic X_bar) for the Galois action on the Picard lattice spanned by the
lines (:func:`h1_oracle`).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from math import prod
from typing import Sequence

from .exactfield import FieldElement, is_square_in_quadratic, solve_linear, squarefree_part
from .galois import (
    OrbitPartition,
    Permutation,
    contractible_orbit_exists,
    generator_permutations,
    orbits,
)
from .lattice import (
    _rref_q,
    coordinates_many,
    elementary_divisors,
    integer_coordinates,
    integer_kernel,
    matvec,
    row_basis,
)
from .surface import LABELS, Coefficients, LineConfiguration, LineLabel, as_coefficients, build_lines


class NotAFour(ValueError):
    pass


Four = frozenset  # of line positions 0..15


def _matrix_key(adj: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(r) for r in adj)


def _adj(x) -> tuple[tuple[int, ...], ...]:
    return _matrix_key(x.adjacency if isinstance(x, LineConfiguration) else x)


def is_four(adj, members) -> bool:
    adj = _adj(adj)
    idx = sorted(members)
    if len(set(idx)) != 4:
        return False
    if any(adj[i][j] for a, i in enumerate(idx) for j in idx[a + 1:]):
        return False
    return not any(all(adj[k][i] == 1 for i in idx) for k in range(len(adj)) if k not in idx)


@lru_cache(maxsize=8)
def _fours(adj: tuple[tuple[int, ...], ...]) -> tuple[Four, ...]:
    return tuple(Four(c) for c in combinations(range(len(adj)), 4) if is_four(adj, c))


def enumerate_fours(config) -> list[Four]:
    """All sets of four skew lines not all met by a fifth line."""
    return list(_fours(_adj(config)))


def complement_four(config, four) -> Four:
    """The lines meeting exactly three members of ``four``."""
    adj = _adj(config)
    four = Four(four)
    if not is_four(adj, four):
        raise NotAFour(f"{sorted(four)} is not a four")
    out = Four(k for k in range(len(adj)) if k not in four and sum(adj[k][i] for i in four) == 3)
    if len(out) != 4:
        raise NotAFour(f"complement of {sorted(four)} has {len(out)} lines")
    return out


def double_fours(config) -> list[tuple[Four, Four]]:
    """The 20 double fours, each as a (first, second) pair in canonical order."""
    return list(_double_fours(_adj(config)))


@lru_cache(maxsize=8)
def _double_fours(adj) -> tuple[tuple[Four, Four], ...]:
    seen = set()
    out = []
    for f in _fours(adj):
        g = complement_four(adj, f)
        key = frozenset((f, g))
        if key not in seen:
            seen.add(key)
            out.append(tuple(sorted((f, g), key=sorted)))
    return tuple(out)


def labels_of(positions) -> list[str]:
    return [str(LABELS[i]) for i in sorted(positions)]


@dataclass(frozen=True)
class BrauerPresentation:
    """A Galois-stable double four whose halves are swapped over Q(sqrt b).

    The class is represented by a quaternion algebra (f, b) where
    div(f) = V + V' - 2h.  In H^1 it is the cocycle sending each element that
    swaps the halves to E = (V - h)/2; ``nontrivial`` records whether that
    cocycle is a coboundary.
    """

    first: Four
    second: Four
    b: int
    nontrivial: bool = True
    divisor_note: str = "div f = V + V' - 2h, deg = 4 + 4 - 2*4 = 0"

    def to_dict(self) -> dict:
        return {"first": labels_of(self.first), "second": labels_of(self.second),
                "b": self.b, "nontrivial": self.nontrivial, "divisor": self.divisor_note}


def _apply(perm: Permutation, s) -> frozenset:
    return frozenset(perm[i] for i in s)


def brauer_presentations(config: LineConfiguration,
                         gens: Sequence[Permutation] | None = None,
                         *, include_trivial: bool = False) -> list[BrauerPresentation]:
    """Galois-stable double fours whose halves some automorphism swaps.

    By default only those giving a nonzero class in H^1(G, Pic X_bar) are kept.
    """
    gens = generator_permutations(config) if gens is None else gens
    model = picard_model(config, gens)
    radicals = config.basis.radicals
    out = []
    for f, g in double_fours(config):
        swap_mask = 0
        stable = True
        for i, p in enumerate(gens):
            img = _apply(p, f)
            if img == g:
                swap_mask |= 1 << i
            elif img != f:
                stable = False
                break
        if stable and swap_mask:
            b = squarefree_part(prod(r for i, r in enumerate(radicals) if swap_mask >> i & 1))
            nontrivial = not _is_coboundary(model, _half_divisor(model.lattice, f), swap_mask)
            if nontrivial or include_trivial:
                out.append(BrauerPresentation(f, g, b, nontrivial))
    return out


def _half_divisor(lat: "PicardLattice", four: Four) -> list[int]:
    V = [sum(lat.line_coords[i][k] for i in four) for k in range(lat.rank)]
    D = [v - x for v, x in zip(V, lat.hyperplane)]
    if any(x % 2 for x in D):
        raise RuntimeError("V - h is not divisible by 2 in Pic")
    return [x // 2 for x in D]


def _is_coboundary(model: "PicardModel", E: Sequence[int], swap_mask: int) -> bool:
    """Is g -> (E if g swaps else 0) of the form g -> (1 - g) m with m integral?"""
    r = model.rank
    stacked, target = [], []
    for i, g in enumerate(model.matrices):
        stacked += [[int(p == q) - g[p][q] for q in range(r)] for p in range(r)]
        target += list(E) if swap_mask >> i & 1 else [0] * r
    image = row_basis([list(col) for col in zip(*stacked)])
    if not image:
        return not any(target)
    try:
        integer_coordinates(image, target)
    except ValueError:
        return False
    return True


def hyperplane_through(config: LineConfiguration, labels) -> tuple[FieldElement, ...] | None:
    """Coefficients of a hyperplane containing the given lines, or None."""
    points = [pt for lab in labels for pt in config[lab].span]
    sol = solve_linear(points)
    return sol.kernel[0] if sol.kernel else None


T_SETS = tuple(
    frozenset(LineLabel(f, i, s).position for f in "LM" for s in (1, -1)) for i in range(1, 5)
)


@dataclass(frozen=True)
class TiPartitionResult:
    galois_stable: bool
    unions_are_double_fours: bool
    cohyperplanar: bool | None

    def __bool__(self) -> bool:
        return self.galois_stable and self.unions_are_double_fours


def ti_partition_check(config: LineConfiguration, *, geometric: bool = False,
                       gens: Sequence[Permutation] | None = None) -> TiPartitionResult:
    """Check T_i = {L_i+, L_i-, M_i+, M_i-}: each Galois stable, pairwise unions double fours.

    With ``geometric=True`` each T_i is also tested for lying in a hyperplane.
    """
    gens = generator_permutations(config) if gens is None else gens
    stable = all(_apply(p, t) == t for p in gens for t in T_SETS)
    dfs = {f | g for f, g in double_fours(config)}
    unions = all((s | t) in dfs for s, t in combinations(T_SETS, 2))
    cohyper = None
    if geometric:
        cohyper = all(hyperplane_through(config, [LABELS[i] for i in t]) is not None for t in T_SETS)
    return TiPartitionResult(stable, unions, cohyper)


@dataclass(frozen=True)
class BrOrder:
    order: int

    @property
    def shape(self) -> str:
        return {1: "trivial", 2: "Z/2", 4: "(Z/2)^2"}[self.order]


def _sq(x: int) -> bool:
    return squarefree_part(x) == 1


def star_condition(a) -> bool:
    c = as_coefficients(a)
    a0, a1, a2, a3, a4 = c.a
    d = c.d
    return (not is_square_in_quadratic(-a0 * a4 * d, squarefree_part(-a0 * a2))
            and not is_square_in_quadratic(-a1 * a4 * d, squarefree_part(-a1 * a3))
            and not (_sq(-a0 * a2) and _sq(-a1 * a3) and _sq(a0 * a1)))


def classify_formula(a) -> BrOrder:
    """Order of Br X_a / Br_0 X_a from the square classes of the coefficients."""
    c = as_coefficients(a)
    a0, a1, a2, a3, a4 = c.a
    d = c.d
    if _sq(a0 * a1) and _sq(a2 * a3) and _sq(-a0 * a2) and not _sq(-a0 * a4 * d):
        return BrOrder(4)
    if star_condition(c):
        return BrOrder(2)
    return BrOrder(1)


# -- Picard lattice and H^1 ----------------------------------------------------

@dataclass(frozen=True)
class PicardLattice:
    """Pic X_bar as the lattice of intersection functionals of the 16 lines."""

    basis: tuple[tuple[int, ...], ...]          # rows in Z^16
    line_coords: tuple[tuple[int, ...], ...]    # 16 x 6
    gram: tuple[tuple[int, ...], ...]           # 6 x 6 pairing
    hyperplane: tuple[int, ...]                 # class of L1+ + L2+ + M3+ + M4+

    @property
    def rank(self) -> int:
        return len(self.basis)

    def pair(self, u, v) -> int:
        return sum(u[i] * self.gram[i][j] * v[j] for i in range(self.rank) for j in range(self.rank))

    @cached_property
    def _inverse(self) -> tuple[tuple[int, ...], list[list[Fraction]]]:
        # leading columns of the echelon basis give an invertible square block
        cols = tuple(next(j for j, x in enumerate(b) if x) for b in self.basis)
        r = self.rank
        block = [[Fraction(self.basis[k][c]) for k in range(r)] + [Fraction(int(i == j)) for j in range(r)]
                 for i, c in enumerate(cols)]
        R, _ = _rref_q(block)
        return cols, [row[r:] for row in R]

    def coordinates_of(self, w: Sequence[int]) -> list[int]:
        """Integer coordinates of a functional ``w`` lying in the lattice."""
        cols, inv = self._inverse
        y = [sum(inv[i][k] * w[c] for k, c in enumerate(cols)) for i in range(self.rank)]
        if any(x.denominator != 1 for x in y):
            raise ValueError("functional is not in the line lattice")
        y = [int(x) for x in y]
        if [sum(y[k] * self.basis[k][j] for k in range(self.rank)) for j in range(len(w))] != list(w):
            raise ValueError("functional is not in the line lattice")
        return y

    @lru_cache(maxsize=256)
    def permutation_matrix(self, perm: Permutation) -> tuple[tuple[int, ...], ...]:
        """6x6 matrix (acting on column vectors) induced by a line permutation."""
        cols = []
        for b in self.basis:
            w = [0] * len(b)
            for j, x in enumerate(b):
                w[perm[j]] = x
            cols.append(self.coordinates_of(w))
        return tuple(tuple(cols[k][i] for k in range(self.rank)) for i in range(self.rank))


@lru_cache(maxsize=8)
def _picard_lattice(adj: tuple[tuple[int, ...], ...]) -> PicardLattice:
    gram16 = [list(r) for r in adj]
    basis = row_basis(gram16)
    if len(basis) != 6:
        raise RuntimeError(f"line lattice has rank {len(basis)}, expected 6")
    coords = [[int(x) for x in y] for y in coordinates_many(basis, gram16)]
    if [[sum(y[k] * basis[k][j] for k in range(6)) for j in range(16)] for y in coords] != gram16:
        raise RuntimeError("line functionals are not integral in the lattice basis")
    # choose six lines with independent coordinates and solve C Q C^T = G
    chosen: list[int] = []
    for i in range(16):
        trial = [coords[j] for j in chosen + [i]]
        if len(row_basis(trial)) == len(trial):
            chosen.append(i)
        if len(chosen) == 6:
            break
    C = [coords[i] for i in chosen]
    # Q = C^-1 G_sub C^-T, computed column by column
    G = [[gram16[i][j] for j in chosen] for i in chosen]
    Ct = [list(r) for r in zip(*C)]
    # X = C^-1 G  (solve C X = G column-wise): columns of G in the row-space of C^T
    X_cols = coordinates_many(Ct, [[G[r][c] for r in range(6)] for c in range(6)])
    X = [[X_cols[c][r] for c in range(6)] for r in range(6)]
    # Q = X C^-T  <=>  C Q^T = X^T
    Q_rows = coordinates_many(Ct, [[X[r][c] for c in range(6)] for r in range(6)])
    Q = [[int(x) for x in row] for row in Q_rows]
    if any(x.denominator != 1 for row in Q_rows for x in row):
        raise RuntimeError("pairing on the line lattice is not integral")
    h_lines = [LineLabel("L", 1, 1), LineLabel("L", 2, 1), LineLabel("M", 3, 1), LineLabel("M", 4, 1)]
    h = [sum(coords[l.position][k] for l in h_lines) for k in range(6)]
    lat = PicardLattice(tuple(map(tuple, basis)), tuple(map(tuple, coords)),
                        tuple(map(tuple, Q)), tuple(h))
    for i in range(16):
        for j in range(16):
            if lat.pair(coords[i], coords[j]) != gram16[i][j]:
                raise RuntimeError("Gram data inconsistent with the line lattice")
    return lat


@dataclass(frozen=True)
class PicardModel:
    lattice: PicardLattice
    permutations: tuple[Permutation, ...]
    matrices: tuple[tuple[tuple[int, ...], ...], ...] = field(default=())

    @property
    def rank(self) -> int:
        return self.lattice.rank

    @property
    def hyperplane(self) -> tuple[int, ...]:
        return self.lattice.hyperplane


def picard_model(config: LineConfiguration,
                 gens: Sequence[Permutation] | None = None) -> PicardModel:
    lat = _picard_lattice(_adj(config))
    gens = tuple(generator_permutations(config) if gens is None else gens)
    mats = tuple(lat.permutation_matrix(tuple(p)) for p in gens)
    return PicardModel(lat, gens, mats)


def h1_order(matrices: Sequence[Sequence[Sequence[int]]]) -> int:
    """|H^1(G, Z^r)| for G = (Z/2)^n given by commuting involutions ``matrices``.

    Cocycles are tuples (c_1..c_n) with (1 + g_i) c_i = 0 and
    (1 - g_j) c_i = (1 - g_i) c_j; coboundaries are ((1 - g_i) m)_i.
    """
    mats = [[list(r) for r in g] for g in matrices]
    n = len(mats)
    if n == 0:
        return 1
    r = len(mats[0])
    ident = [[int(i == j) for j in range(r)] for i in range(r)]

    def plus(g, s):
        return [[ident[i][j] + s * g[i][j] for j in range(r)] for i in range(r)]

    rows = []
    for i, g in enumerate(mats):
        block = plus(g, 1)
        for row in block:
            full = [0] * (r * n)
            full[i * r:(i + 1) * r] = row
            rows.append(full)
    for i in range(n):
        for j in range(i + 1, n):
            left, right = plus(mats[j], -1), plus(mats[i], -1)
            for k in range(r):
                full = [0] * (r * n)
                full[i * r:(i + 1) * r] = left[k]
                full[j * r:(j + 1) * r] = [-x for x in right[k]]
                rows.append(full)
    Z = integer_kernel(rows)
    if not Z:
        return 1
    bounds = []
    for t in range(r):
        e = [int(k == t) for k in range(r)]
        vec = []
        for g in mats:
            vec += matvec(plus(g, -1), e)
        bounds.append(integer_coordinates(Z, vec))
    ed = elementary_divisors(bounds)
    if len(ed) < len(Z):
        raise RuntimeError("H^1 is infinite; the action is not by a finite group")
    return prod(ed)


@lru_cache(maxsize=4096)
def _h1_cached(matrices) -> int:
    return h1_order(matrices)


def h1_oracle(model: PicardModel) -> int:
    # drop duplicate generators; H^1 depends only on the generated group
    return _h1_cached(tuple(sorted(set(model.matrices))))


# -- reports -------------------------------------------------------------------

@dataclass(frozen=True)
class RationalityReport:
    brauer_order: int
    contractible: bool
    witness: tuple[str, ...] | None
    verdict: str
    hypothesis: str = "X(A_Q) nonempty (local solubility not checked)"

    def to_dict(self) -> dict:
        return {
            "brauer_order": self.brauer_order,
            "contractible_orbit": list(self.witness) if self.witness else None,
            "verdict": self.verdict,
            "unchecked_hypothesis": self.hypothesis,
        }


def rationality_report(a, config: LineConfiguration | None = None,
                       partition: OrbitPartition | None = None) -> RationalityReport:
    c = as_coefficients(a)
    config = config or build_lines(c)
    order = classify_formula(c).order
    ok, witness = contractible_orbit_exists(config, partition or orbits(config))
    if order == 1:
        verdict = "Q-rational, assuming X(A_Q) is nonempty"
    else:
        verdict = "not Q-rational"
    return RationalityReport(order, ok, tuple(str(l) for l in witness) if witness else None, verdict)
