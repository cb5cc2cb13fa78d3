"""The quartic del Pezzo surfaces X_a, their two conic bundles and 16 lines.

X_a is cut out in P^4 by

    x0*x1 - x2*x3 = 0,
    a0*x0^2 + a1*x1^2 + a2*x2^2 + a3*x3^2 + a4*x4^2 = 0.

Every line lies in a singular fibre of one of the conic bundles

    pi1: (s:t) = (x0:x2) = (x3:x1),      pi2: (s:t) = (x3:x0) = (x1:x2),

so an L-line is ``x0 = c*x2, x3 = c*x1, x4 = e*x_k`` and an M-line is
``x3 = c*x0, x1 = c*x2, x4 = e*x_k`` with ``c`` the fibre parameter and
``e`` a radical fixed by the residual binary form.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from typing import NamedTuple, Sequence

from .exactfield import (
    FieldElement,
    RadicalBasis,
    is_square_in_quadratic,
    normalize_point,
    reduced_basis,
    solve_linear,
    sqrt_in_field,
    squarefree_part,
)


class NotSmooth(ValueError):
    pass


class ConstructionError(RuntimeError):
    """An internal consistency check on the line data failed."""


@dataclass(frozen=True)
class Coefficients:
    a0: int
    a1: int
    a2: int
    a3: int
    a4: int

    @property
    def a(self) -> tuple[int, int, int, int, int]:
        return (self.a0, self.a1, self.a2, self.a3, self.a4)

    @property
    def d(self) -> int:
        return self.a0 * self.a1 - self.a2 * self.a3

    def __iter__(self):
        return iter(self.a)


def validate(a0: int, a1: int, a2: int, a3: int, a4: int) -> Coefficients:
    """Check smoothness: ``(a0*a1 - a2*a3) * a0*a1*a2*a3*a4 != 0``."""
    c = Coefficients(int(a0), int(a1), int(a2), int(a3), int(a4))
    zeros = [i for i, ai in enumerate(c.a) if ai == 0]
    if zeros:
        raise NotSmooth(f"not smooth: a{zeros[0]} = 0")
    if c.d == 0:
        raise NotSmooth("not smooth: d = 0")
    return c


def as_coefficients(a) -> Coefficients:
    return a if isinstance(a, Coefficients) else validate(*a)


class LineLabel(NamedTuple):
    family: str   # "L" or "M"
    index: int    # 1..4
    sign: int     # +1 or -1

    def __str__(self) -> str:
        return f"{self.family}{self.index}{'+' if self.sign > 0 else '-'}"

    @property
    def position(self) -> int:
        return (0 if self.family == "L" else 8) + 2 * (self.index - 1) + (0 if self.sign > 0 else 1)

    @property
    def partner(self) -> LineLabel:
        return LineLabel(self.family, self.index, -self.sign)

    @classmethod
    def parse(cls, text: str) -> LineLabel:
        text = text.strip().replace("⁺", "+").replace("⁻", "-")
        return cls(text[0], int(text[1]), 1 if text[2] == "+" else -1)


LABELS: tuple[LineLabel, ...] = tuple(
    LineLabel(f, i, s) for f in "LM" for i in range(1, 5) for s in (1, -1)
)


def label_index(label: LineLabel | str) -> int:
    if isinstance(label, str):
        label = LineLabel.parse(label)
    return label.position


def closed_form_meets(p: LineLabel, q: LineLabel) -> bool:
    """Adjacency of the 16 lines in closed form.

    L_i+ meets L_i-, M_i- and M_j+ (j != i); L_i- meets L_i+, M_i+ and M_j-;
    symmetrically for the M-lines.
    """
    if p == q:
        return False
    if p.family == q.family:
        return p.index == q.index
    if p.index == q.index:
        return p.sign != q.sign
    return p.sign == q.sign


@lru_cache(maxsize=1)
def _closed_form_rows() -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(-1 if i == j else int(closed_form_meets(p, q))
                       for j, q in enumerate(LABELS)) for i, p in enumerate(LABELS))


def closed_form_matrix() -> list[list[int]]:
    return [list(r) for r in _closed_form_rows()]


# (family, pair) -> (c^2, e^2, coordinate that x4 is proportional to)
def _radicands(c: Coefficients) -> dict[tuple[str, int], tuple[Fraction, Fraction, int]]:
    a0, a1, a2, a3, a4 = (Fraction(x) for x in c.a)
    d = Fraction(c.d)
    return {
        ("L", 0): (-a2 / a0, -d / (a0 * a4), 1),
        ("L", 1): (-a1 / a3, d / (a3 * a4), 2),
        ("M", 0): (-a0 / a3, d / (a3 * a4), 2),
        ("M", 1): (-a2 / a1, -d / (a1 * a4), 0),
    }


def line_radicands(c: Coefficients) -> list[Fraction]:
    return [r for cc, ee, _ in _radicands(c).values() for r in (cc, ee)]


def splitting_basis(c: Coefficients) -> RadicalBasis:
    """Independent radicals generating the field of definition of all 16 lines."""
    a0, a1, a2, a3, a4 = c.a
    return reduced_basis([-a0 * a2, -a1 * a3, -a0 * a3, -a0 * a4 * c.d])


@dataclass(frozen=True, eq=False)
class Line:
    label: LineLabel
    c: FieldElement
    e: FieldElement
    x4_coordinate: int

    @property
    def family(self) -> str:
        return self.label.family

    @cached_property
    def equations(self) -> tuple[tuple[FieldElement, ...], ...]:
        B = self.c.basis
        zero, one = FieldElement(B), FieldElement.rational(B, 1)
        rows = [[zero] * 5 for _ in range(3)]
        if self.family == "L":
            rows[0][0], rows[0][2] = one, -self.c      # x0 = c x2
            rows[1][3], rows[1][1] = one, -self.c      # x3 = c x1
        else:
            rows[0][3], rows[0][0] = one, -self.c      # x3 = c x0
            rows[1][1], rows[1][2] = one, -self.c      # x1 = c x2
        rows[2][4], rows[2][self.x4_coordinate] = one, -self.e
        return tuple(tuple(r) for r in rows)

    @cached_property
    def span(self) -> tuple[tuple[FieldElement, ...], tuple[FieldElement, ...]]:
        B = self.c.basis
        zero, one = FieldElement(B), FieldElement.rational(B, 1)
        k = self.x4_coordinate
        if self.family == "L":
            p = [self.c, zero, one, zero, zero]      # x2 = 1, x1 = 0
            q = [zero, one, zero, self.c, zero]      # x1 = 1, x2 = 0
            if k == 2:
                p[4] = self.e
            else:
                q[4] = self.e
        else:
            p = [one, zero, zero, self.c, zero]      # x0 = 1, x2 = 0
            q = [zero, self.c, one, zero, zero]      # x2 = 1, x0 = 0
            if k == 0:
                p[4] = self.e
            else:
                q[4] = self.e
        return tuple(p), tuple(q)

    @cached_property
    def definition_field(self) -> frozenset[int]:
        """Masks of the subgroup generated by the radicals of ``c`` and ``e``."""
        gens = [m for x in (self.c, self.e) for m in x.coeffs]
        group = {0}
        for g in gens:
            group |= {h ^ g for h in group}
        return frozenset(group)

    @property
    def definition_degree(self) -> int:
        return len(self.definition_field)


def _quadric_forms(c: Coefficients):
    a = c.a

    def q1(u, v):
        return (u[0] * v[1] + u[1] * v[0] - u[2] * v[3] - u[3] * v[2]) * Fraction(1, 2)

    def q2(u, v):
        return sum((u[i] * v[i] * a[i] for i in range(5)), FieldElement(u[0].basis))

    return q1, q2


def lies_on_surface(line: Line, coeffs: Coefficients) -> bool:
    """Both quadrics vanish identically on the span of ``line``."""
    p, q = line.span
    for form in _quadric_forms(coeffs):
        if not all(form(u, v).is_zero() for u, v in ((p, p), (p, q), (q, q))):
            return False
    return all(sum((r[i] * u[i] for i in range(5)), FieldElement(p[0].basis)).is_zero()
               for r in line.equations for u in (p, q))


def meets_by_radicals(l1: Line, l2: Line) -> bool:
    """Closed-form intersection test from the (c, e) data of two lines."""
    if l1.family == l2.family:
        return l1.c == l2.c and l1.e == -l2.e
    if l1.family == "M":
        l1, l2 = l2, l1
    lk, mk = l1.x4_coordinate, l2.x4_coordinate
    if lk == 1 and mk == 2:
        return l2.e == l2.c * l1.e
    if lk == 1 and mk == 0:
        return l1.e * l2.c == l2.e * l1.c
    if lk == 2 and mk == 2:
        return l1.e == l2.e
    return l1.e == l2.e * l1.c


def intersect(l1: Line, l2: Line) -> tuple[FieldElement, ...] | None:
    """Intersection point of two distinct lines, normalized; None if skew."""
    sol = solve_linear(l1.equations + l2.equations)
    if sol.dimension == 0:
        return None
    if sol.dimension > 1:
        raise ConstructionError(f"{l1.label} and {l2.label} coincide")
    return normalize_point(sol.kernel[0])


class LineConfiguration:
    """The 16 lines of X_a, labelled to satisfy :func:`closed_form_meets`."""

    def __init__(self, coeffs: Coefficients, basis: RadicalBasis, lines: Sequence[Line]):
        self.coefficients = coeffs
        self.basis = basis
        self.lines = tuple(lines)
        self._by_label = {l.label: l for l in self.lines}

    def __getitem__(self, label: LineLabel | str | int) -> Line:
        if isinstance(label, int):
            return self.lines[label]
        if isinstance(label, str):
            label = LineLabel.parse(label)
        return self._by_label[label]

    @property
    def labels(self) -> tuple[LineLabel, ...]:
        return LABELS

    @cached_property
    def intersections(self) -> list[list[int]]:
        """16x16 matrix from exact linear algebra; diagonal -1."""
        n = len(self.lines)
        m = [[0] * n for _ in range(n)]
        for i in range(n):
            m[i][i] = -1
            for j in range(i + 1, n):
                m[i][j] = m[j][i] = int(intersect(self.lines[i], self.lines[j]) is not None)
        return m

    @cached_property
    def adjacency(self) -> list[list[int]]:
        """Same matrix from the closed-form radical relations (cheap)."""
        n = len(self.lines)
        return [[-1 if i == j else int(meets_by_radicals(self.lines[i], self.lines[j]))
                 for j in range(n)] for i in range(n)]

    def to_dict(self, exact: bool = True) -> dict:
        """``exact=False`` reports the radical-relation matrix instead of redoing the linear algebra."""
        return {
            "basis": list(self.basis.radicals),
            "lines": [
                {
                    "label": str(l.label),
                    "c": l.c.to_list(),
                    "e": l.e.to_list(),
                    "x4_proportional_to": f"x{l.x4_coordinate}",
                    "definition_degree": l.definition_degree,
                }
                for l in self.lines
            ],
            "intersection_matrix": self.intersections if exact else self.adjacency,
            "intersection_source": "linear algebra" if exact else "radical relations",
        }


def _label_lines(raw) -> dict[LineLabel, Line]:
    """Assign labels so that adjacency matches :func:`closed_form_meets`.

    L1+ is pinned to ``(-c, +e)``.  The order of the two fibres inside the
    pairs L3/L4, M1/M2, M3/M4 is free (first index takes ``-c`` is tried
    first); for each order the signs follow from "L1+ meets M1- and M_j+" and
    "L_i+ meets M1+", and the full matrix is then checked.
    """
    pool = {}
    for (fam, idx), choices in raw.items():
        pool[(fam, idx)] = [Line(LineLabel(fam, idx, 0), *ch) for ch in choices]
    want = closed_form_matrix()
    for swaps in product((False, True), repeat=3):
        order = {("L", 1): ("L", 1), ("L", 2): ("L", 2)}
        for (fam, first), sw in zip((("L", 3), ("M", 1), ("M", 3)), swaps):
            order[(fam, first)] = (fam, first + 1) if sw else (fam, first)
            order[(fam, first + 1)] = (fam, first) if sw else (fam, first + 1)
        pairs = {order[key]: lines for key, lines in pool.items()}
        lplus, lminus = pairs[("L", 1)]
        plus: dict[tuple[str, int], tuple[Line, Line]] = {("L", 1): (lplus, lminus)}
        for j in range(1, 5):
            x, y = pairs[("M", j)]
            want_meet = j != 1
            plus[("M", j)] = (x, y) if meets_by_radicals(lplus, x) == want_meet else (y, x)
        m1plus = plus[("M", 1)][0]
        for i in range(2, 5):
            x, y = pairs[("L", i)]
            plus[("L", i)] = (x, y) if meets_by_radicals(x, m1plus) else (y, x)
        lines = {}
        for (fam, idx), (p, m) in plus.items():
            for lab, src in ((LineLabel(fam, idx, 1), p), (LineLabel(fam, idx, -1), m)):
                lines[lab] = Line(lab, src.c, src.e, src.x4_coordinate)
        ordered = [lines[lab] for lab in LABELS]
        if all(meets_by_radicals(ordered[a], ordered[b]) == bool(want[a][b])
               for a in range(16) for b in range(a + 1, 16)):
            return lines
    raise ConstructionError("no labelling reproduces the closed-form adjacency")


def build_lines(a, *, verify: bool = True) -> LineConfiguration:
    """Construct the 16 lines over the splitting field.

    L1+ uses ``c = -sqrt(-a2/a0)`` and the positive root ``e = sqrt(-d/(a0*a4))``;
    every other label is then fixed by the adjacency rules.
    """
    coeffs = as_coefficients(a)
    basis = splitting_basis(coeffs)
    data = _radicands(coeffs)

    def root(q):
        r = sqrt_in_field(q, basis)
        if r is None:
            raise ConstructionError(f"sqrt({q}) not in splitting field {basis}")
        return r

    raw: dict[tuple[str, int], list[tuple[FieldElement, FieldElement, int]]] = {}
    for (fam, pair), (c2, e2, k) in data.items():
        cr, er = root(c2), root(e2)
        # index 2*pair+1 takes -c, index 2*pair+2 takes +c
        raw[(fam, 2 * pair + 1)] = [(-cr, er, k), (-cr, -er, k)]
        raw[(fam, 2 * pair + 2)] = [(cr, er, k), (cr, -er, k)]

    lines = _label_lines(raw)
    config = LineConfiguration(coeffs, basis, [lines[lab] for lab in LABELS])
    if not verify:
        # _label_lines has already checked every pair against the closed form
        config.__dict__["adjacency"] = closed_form_matrix()
    else:
        for line in config.lines:
            if not lies_on_surface(line, coeffs):
                raise ConstructionError(f"{line.label} does not lie on X_a for a = {coeffs.a}")
        if config.adjacency != closed_form_matrix():
            raise ConstructionError(f"labelling inconsistent with closed-form adjacency for a = {coeffs.a}")
    return config


def intersection_matrix(config: LineConfiguration) -> list[list[int]]:
    return config.intersections


# -- conic bundles -----------------------------------------------------------

@dataclass(frozen=True)
class SingularFibre:
    """A pair of geometric singular fibres with conjugate parameters.

    ``parameter_square`` is the value of (s/t)^2; ``components`` lists, for
    the parameter -sqrt and +sqrt respectively, the two lines of the fibre.
    """

    bundle: str
    parameter_square: Fraction
    parameter_class: int
    e_square: Fraction
    components: tuple[tuple[str, str], tuple[str, str]]

    @property
    def residue_degree(self) -> int:
        return 1 if self.parameter_class == 1 else 2

    @property
    def split(self) -> bool:
        """True when each component is defined over the residue field."""
        return is_square_in_quadratic(self.e_square, self.parameter_class)


def singular_fibres(a, bundle: str) -> list[SingularFibre]:
    """The two conjugate pairs of singular fibres of ``pi1`` or ``pi2``."""
    coeffs = as_coefficients(a)
    data = _radicands(coeffs)
    fam = {"pi1": "L", "pi2": "M"}[bundle]
    out = []
    for pair in (0, 1):
        c2, e2, _ = data[(fam, pair)]
        i = 2 * pair + 1
        comps = ((f"{fam}{i}+", f"{fam}{i}-"), (f"{fam}{i + 1}+", f"{fam}{i + 1}-"))
        out.append(SingularFibre(bundle, c2, squarefree_part(c2), e2, comps))
    return out


def complexity(a, bundle: str) -> int:
    """Sum of the residue degrees of the non-split closed singular fibres."""
    total = 0
    for fib in singular_fibres(a, bundle):
        if not fib.split:
            # two closed fibres of degree 1, or one of degree 2
            total += 2
    return total
