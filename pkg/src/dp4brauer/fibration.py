"""The genus-one pencil spanned by F and F', its blow-up and Mordell-Weil heights.

F = L1+ + L2+ + M3+ + M4+ and F' = L1- + L2- + M3- + M4- are hyperplane
sections.  Blowing up the four base points P1..P4 gives a rational elliptic
surface Y with sections E1..E4.  Reducible members of the pencil are searched
for geometrically (lines contained in a member, and members splitting into two
conics), and the Picard lattice of Y is modelled as Pic X_bar + <E1..E4>.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from math import lcm
from typing import Sequence

from .brauer import BrauerPresentation, PicardLattice, classify_formula, picard_model
from .exactfield import FieldElement, normalize_point, reduced_basis, solve_linear
from .galois import generator_permutations
from .lattice import _rref_q, coordinates, rank_q, row_basis
from .surface import (
    LABELS,
    ConstructionError,
    LineConfiguration,
    LineLabel,
    as_coefficients,
    build_lines,
    intersect,
)

CHI = 1

F_LABELS = tuple(LineLabel.parse(s) for s in ("L1+", "M3+", "L2+", "M4+"))
FPRIME_LABELS = tuple(l._replace(sign=-1) for l in F_LABELS)
BASE_POINT_LINES = {
    "P1": ("L1+", "L1-"),
    "P2": ("L2+", "L2-"),
    "P3": ("M3+", "M3-"),
    "P4": ("M4+", "M4-"),
}
SECTIONS = ("E1", "E2", "E3", "E4")


class TypeCheckFailed(RuntimeError):
    def __init__(self, message: str, found: Sequence[str] = ()):
        super().__init__(message)
        self.found = list(found)


class InapplicableTrivialBrauer(ValueError):
    pass


class MixedConfiguration(ValueError):
    pass


# -- exact helpers ---------------------------------------------------------------

def _sp():
    import sympy  # deferred: only the fibre search needs a CAS

    return sympy


def to_sympy(x: FieldElement):
    sp = _sp()
    out = sp.Integer(0)
    for mask, c in x.coeffs.items():
        term = sp.Rational(c.numerator, c.denominator)
        for i, r in enumerate(x.basis.radicals):
            if mask >> i & 1:
                term *= sp.sqrt(r)
        out += term
    return out


def _is_zero(expr) -> bool:
    sp = _sp()
    return sp.simplify(sp.expand(expr)) == 0


def point_field(coords: Sequence[FieldElement]) -> list[int]:
    """Radicands of a reduced basis for the field of definition of a normalized point."""
    pt = normalize_point(coords)
    basis = pt[0].basis
    return list(reduced_basis(basis.product(m) for x in pt for m in x.coeffs if m).radicals)


def _dot(h: Sequence, p: Sequence):
    return sum((a * b for a, b in zip(h, p)), type(p[0])(p[0].basis) if isinstance(p[0], FieldElement) else 0)


# -- the pencil ----------------------------------------------------------------------

@dataclass(frozen=True)
class BasePoint:
    name: str
    lines: tuple[LineLabel, LineLabel]
    coords: tuple[FieldElement, ...]

    @cached_property
    def field(self) -> list[int]:
        return point_field(self.coords)

    @property
    def rational(self) -> bool:
        return not self.field

    def to_dict(self) -> dict:
        return {"name": self.name, "lines": [str(l) for l in self.lines],
                "coordinates": [x.to_list() for x in self.coords], "field": self.field}


@dataclass(frozen=True)
class GenusOnePencil:
    config: LineConfiguration
    F: tuple[LineLabel, ...]
    Fprime: tuple[LineLabel, ...]
    hyperplane_F: tuple[FieldElement, ...]
    hyperplane_Fprime: tuple[FieldElement, ...]
    rational_basis: tuple[tuple[Fraction, ...], tuple[Fraction, ...]]
    base_points: tuple[BasePoint, ...]
    galois_stable: bool

    @property
    def components(self) -> frozenset[int]:
        return frozenset(l.position for l in self.F + self.Fprime)

    def to_dict(self) -> dict:
        return {
            "F": [str(l) for l in self.F],
            "Fprime": [str(l) for l in self.Fprime],
            "hyperplane_F": [x.to_list() for x in self.hyperplane_F],
            "hyperplane_Fprime": [x.to_list() for x in self.hyperplane_Fprime],
            "pencil_basis": [[str(x) for x in w] for w in self.rational_basis],
            "base_points": [p.to_dict() for p in self.base_points],
            "galois_stable": self.galois_stable,
        }


def _hyperplane(config: LineConfiguration, labels) -> tuple[FieldElement, ...]:
    points = [pt for lab in labels for pt in config[lab].span]
    sol = solve_linear(points)
    if sol.dimension != 1:
        raise ConstructionError(f"{[str(l) for l in labels]} span {5 - sol.dimension - 1}-space, not a hyperplane")
    return normalize_point(sol.kernel[0])


def _rational_span(vectors: Sequence[Sequence[FieldElement]]) -> tuple[tuple[Fraction, ...], ...]:
    # a Galois-stable span is spanned by the coefficient vectors of its elements
    rows = []
    for v in vectors:
        masks = {m for x in v for m in x.coeffs}
        rows += [[x.coeffs.get(m, Fraction(0)) for x in v] for m in sorted(masks)]
    R, pivots = _rref_q(rows)
    return tuple(tuple(r) for r in R[:len(pivots)])


def build_pencil(config: LineConfiguration) -> GenusOnePencil:
    hF = _hyperplane(config, F_LABELS)
    hFp = _hyperplane(config, FPRIME_LABELS)
    basis = _rational_span([hF, hFp])
    if len(basis) != 2:
        raise ConstructionError(f"pencil through F and F' has no rational basis (dimension {len(basis)})")
    points = []
    for name, (s, t) in BASE_POINT_LINES.items():
        p = intersect(config[s], config[t])
        if p is None:
            raise ConstructionError(f"{s} and {t} are skew")
        points.append(BasePoint(name, (LineLabel.parse(s), LineLabel.parse(t)), p))
    Fset = frozenset(l.position for l in F_LABELS)
    Fpset = frozenset(l.position for l in FPRIME_LABELS)
    stable = all(frozenset(p[i] for i in S) in (Fset, Fpset)
                 for p in generator_permutations(config) for S in (Fset, Fpset))
    return GenusOnePencil(config, F_LABELS, FPRIME_LABELS, hF, hFp, basis, tuple(points), stable)


# -- reducible members -----------------------------------------------------------------

@dataclass(frozen=True)
class Component:
    """A component of a reducible fibre, with its class in Pic X_bar."""

    name: str
    kind: str                          # "line" or "conic"
    line_vector: tuple[int, ...]       # intersection numbers with the 16 lines
    base_points: tuple[str, ...]       # base points lying on the curve


@dataclass(frozen=True)
class ReducibleFibre:
    parameter: str
    kodaira: str
    components: tuple[Component, ...]  # in cyclic order
    crossings_blown_up: bool

    def to_dict(self) -> dict:
        return {"parameter": self.parameter, "type": self.kodaira,
                "components": [c.name for c in self.components]}


def _quadric_matrices(a):
    sp = _sp()
    Q1 = sp.zeros(5, 5)
    Q1[0, 1] = Q1[1, 0] = sp.Rational(1, 2)
    Q1[2, 3] = Q1[3, 2] = sp.Rational(-1, 2)
    Q2 = sp.diag(*[sp.Integer(x) for x in a])
    return Q1, Q2


def _bordered(Q, h):
    return Q.row_join(h).col_join(h.T.row_join(_sp().zeros(1, 1)))


def _maximal_minors(M, gens):
    """Nonzero 5x5 minors of the symmetric 6x6 matrix ``M`` (one of each transposed pair).

    Returns the minors as elements of the polynomial domain over ``gens`` and that domain.
    """
    sp = _sp()
    from sympy.polys.matrices import DomainMatrix

    full = DomainMatrix.from_Matrix(M)
    ground = full.domain.dom if full.domain.is_PolynomialRing else full.domain
    ground = ground.unify(sp.ZZ)
    # generator order matters: lex elimination puts gens[0] first
    dom = ground[tuple(gens)] if gens else ground
    A = full.convert_to(dom).to_list()

    @lru_cache(maxsize=None)
    def minor(rows, cols):
        # Laplace expansion along the first row; sub-minors are shared
        if len(rows) == 1:
            return A[rows[0]][cols[0]]
        total = dom.zero
        for k, c in enumerate(cols):
            if A[rows[0]][c]:
                term = A[rows[0]][c] * minor(rows[1:], cols[:k] + cols[k + 1:])
                total = total + term if k % 2 == 0 else total - term
        return total

    out = []
    idx = list(combinations(range(6), 5))
    for a, r in enumerate(idx):
        for c in idx[a:]:
            d = minor(r, c)
            if d and d not in out:
                out.append(d)
    return out, dom


def _same_number(x, y) -> bool:
    sp = _sp()
    if x == sp.oo or y == sp.oo:
        return x == y
    if abs(complex(sp.N(x - y, 30))) > 1e-20:
        return False
    return _is_zero(x - y)


def _conic_member_parameters(pencil: GenusOnePencil):
    """Members ``w1 + t w2`` (and ``w2``) on which some quadric of the net has rank <= 2.

    Returns ``(polynomial in t, whether the member w2 qualifies)``.
    """
    sp = _sp()
    a = pencil.config.coefficients.a
    Q1, Q2 = _quadric_matrices(a)
    L = lcm(*(x.denominator for w in pencil.rational_basis for x in w))
    w1, w2 = (sp.Matrix([int(x * L) for x in w]) for w in pencil.rational_basis)
    mu, t = sp.symbols("mu t")
    q2_rank = rank_q([[int(x) for x in row] for row in Q2.tolist()])

    def eliminate(h, gens):
        from sympy.polys.groebnertools import groebner

        polys = []
        for lam, m in ((1, mu), (0, 1)):
            if lam == 0 and q2_rank == 5:
                # restricting to a hyperplane drops the rank by at most 2
                polys.append(sp.Integer(1))
                continue
            # scaling by 2 keeps the vanishing locus and clears the 1/2 in Q1
            minors, dom = _maximal_minors(2 * _bordered(lam * Q1 + m * Q2, h), [mu, *gens])
            if not minors:
                polys.append(sp.Integer(0))
            elif lam == 0 and not gens:
                polys.append(sp.Integer(1))
            else:
                G = groebner(minors, dom.ring)
                free = [g for g in G if g.degree(0) == 0]
                polys.append(dom.to_sympy(free[-1]) if free else sp.Integer(0))
        return polys

    finite = [p for p in eliminate(w1 + t * w2, [t]) if p != 1]
    if any(p == 0 for p in finite):
        raise TypeCheckFailed("every member of the pencil contains a conic")
    poly = None
    for p in finite:
        P = sp.Poly(p, t)
        poly = P if poly is None else poly.lcm(P)
    at_infinity = any(p == 0 for p in eliminate(w2, []))
    return poly, at_infinity


def _line_member(pencil: GenusOnePencil, line) -> tuple[FieldElement, FieldElement] | None:
    """(lam, mu) with the line inside lam*w1 + mu*w2, or None."""
    p, q = line.span
    B = p[0].basis
    w = [[FieldElement.rational(B, x) for x in v] for v in pencil.rational_basis]
    rows = [[_dot(w[0], p), _dot(w[1], p)], [_dot(w[0], q), _dot(w[1], q)]]
    sol = solve_linear(rows)
    if sol.dimension == 0:
        return None
    lam, mu = sol.kernel[0]
    return lam, mu


def _on_point(linear_forms, point) -> bool:
    return all(_is_zero(sum(f * x for f, x in zip(form, point))) for form in linear_forms)


def _line_meets_plane(forms, line) -> bool:
    p, q = ([to_sympy(x) for x in pt] for pt in line.span)
    (a, b), (c, d) = ([sum(f * x for f, x in zip(form, pt)) for pt in (p, q)] for form in forms)
    # two forms restricted to the line: dependent iff the plane meets it
    return _is_zero(a * d - b * c)


def _conic_pair(pencil: GenusOnePencil, h, mu_value, which):
    """Split the rank-2 quadric of the member ``h`` into two planes; describe both conics."""
    sp = _sp()
    a = pencil.config.coefficients.a
    Q1, Q2 = _quadric_matrices(a)
    R = Q1 + mu_value * Q2 if which == 0 else Q2
    other = Q2 if which == 0 else Q1
    P = sp.Matrix.hstack(*sp.Matrix(h.T).nullspace(simplify=True))     # 5 x 4, x = P y
    Rr = (P.T * R * P).applyfunc(sp.simplify)
    K = sp.Matrix.hstack(*Rr.nullspace(simplify=True))                # 4 x 2 singular line
    comp = sp.Matrix.hstack(*K.T.nullspace(simplify=True))            # complement directions
    basis4 = sp.Matrix.hstack(K, comp)
    B2 = (comp.T * Rr * comp).applyfunc(sp.simplify)
    # binary form B2[0,0] u^2 + 2 B2[0,1] u v + B2[1,1] v^2 = product of two linear factors
    A_, Bh, C_ = B2[0, 0], B2[0, 1], B2[1, 1]
    disc = sp.simplify(Bh ** 2 - A_ * C_)
    if _is_zero(A_):
        roots = [(1, 0), (-C_, 2 * Bh)]                                # v = 0 and 2 Bh u + C v = 0
        factors = [sp.Matrix([[0, 1]]), sp.Matrix([[2 * Bh, C_]])]
    else:
        r1, r2 = (-Bh + sp.sqrt(disc)) / A_, (-Bh - sp.sqrt(disc)) / A_
        factors = [sp.Matrix([[1, -r1]]), sp.Matrix([[1, -r2]])]
    inv = basis4.inv()
    Pinv = (P.T * P).inv() * P.T                                       # left inverse of P
    forms = []
    for f in factors:
        # plane: coordinates (k1, k2, u, v) = inv * y; linear form f on (u, v)
        lin = (f * inv[2:4, :] * Pinv).applyfunc(sp.simplify)
        forms.append([list(h.T), list(lin)])
    # the two conics meet on the singular line; count points via the other quadric
    Ko = (K.T * P.T * other * P * K).applyfunc(sp.simplify)
    meet_disc = sp.simplify(Ko[0, 1] ** 2 - Ko[0, 0] * Ko[1, 1])
    return forms, not _is_zero(meet_disc), (P, K)


def reducible_fibres(pencil: GenusOnePencil) -> list[ReducibleFibre]:
    """All reducible members of the pencil, found geometrically."""
    sp = _sp()
    config = pencil.config
    adj = config.adjacency
    members: dict[tuple, list[LineLabel]] = {}
    params = {}
    for line in config.lines:
        lm = _line_member(pencil, line)
        if lm is None:
            continue
        lam, mu = lm
        key = normalize_point([lam, mu])
        members.setdefault(key, []).append(line.label)
        params[key] = sp.oo if key[0].is_zero() else to_sympy(key[1] / key[0])
    fibres = []
    points = {bp.name: bp for bp in pencil.base_points}
    for key, labels in members.items():
        fibres.append(_line_fibre(config, labels, points, str(params[key])))

    poly, at_infinity = _conic_member_parameters(pencil)
    line_params = list(params.values())
    w1, w2 = (sp.Matrix([sp.Rational(x.numerator, x.denominator) for x in w]) for w in pencil.rational_basis)
    candidates = []
    if poly is not None:
        rts = sp.roots(poly)
        if sum(rts.values()) != poly.degree():
            raise TypeCheckFailed(f"could not solve the member equation {poly.as_expr()}")
        candidates += [r for r in rts]
    if at_infinity:
        candidates.append(sp.oo)
    for r in candidates:
        if any(_same_number(r, q) for q in line_params):
            continue
        h = w2 if r == sp.oo else w1 + r * w2
        fibres.append(_conic_fibre(pencil, h, r, points))
    return fibres


def _line_fibre(config, labels, points, parameter) -> ReducibleFibre:
    adj = config.adjacency
    idx = [l.position for l in labels]
    if len(labels) != 4 or any(sum(adj[i][j] for j in idx if j != i) != 2 for i in idx):
        return ReducibleFibre(parameter, f"unrecognized({len(labels)} lines)",
                              tuple(Component(str(l), "line", tuple(adj[l.position]), ()) for l in labels), False)
    # order as a cycle
    order = [idx[0]]
    while len(order) < 4:
        nxt = next(j for j in idx if adj[order[-1]][j] == 1 and j not in order)
        order.append(nxt)
    crossings = [intersect(config[LABELS[order[k]]], config[LABELS[order[(k + 1) % 4]]]) for k in range(4)]
    blown = any(c == bp.coords for c in crossings for bp in points.values())
    comps = []
    for i in order:
        lab = LABELS[i]
        on = tuple(name for name, bp in points.items() if lab in bp.lines)
        comps.append(Component(str(lab), "line", tuple(adj[i]), on))
    return ReducibleFibre(parameter, "I4" if not blown else "I4*blown", tuple(comps), blown)


def _conic_fibre(pencil, h, r, points) -> ReducibleFibre:
    sp = _sp()
    a = pencil.config.coefficients.a
    Q1, Q2 = _quadric_matrices(a)
    mu = sp.symbols("mu")
    # find the rank-2 quadric of the net on this member
    found = None
    for which, Q in ((0, Q1 + mu * Q2), (1, Q2)):
        if which == 1 and rank_q([[int(x) for x in row] for row in Q2.tolist()]) == 5:
            continue
        M = _bordered(Q, h)
        minors, dom = _maximal_minors(M, [mu])
        if which == 1:
            if not minors:
                found = (which, None)
                break
            continue
        g = None
        for m in minors:
            P = sp.Poly(dom.to_sympy(m), mu)
            g = P if g is None else g.gcd(P)
        roots = list(sp.roots(g)) if g is not None and g.degree() > 0 else []
        if roots:
            found = (which, roots[0])
            break
    if found is None:
        raise TypeCheckFailed(f"member at {r} has no rank-2 quadric")
    forms, transversal, _ = _conic_pair(pencil, h, found[1], found[0])
    comps = []
    for k, form in enumerate(forms):
        vec = tuple(int(_line_meets_plane(form, line)) for line in pencil.config.lines)
        on = tuple(name for name, bp in points.items()
                   if _on_point(form, [to_sympy(x) for x in bp.coords]))
        comps.append(Component(f"C{k + 1}[{r}]", "conic", vec, on))
    return ReducibleFibre(str(r), "I2" if transversal else "III", tuple(comps), False)


def fibre_type_check(model: "EllipticModel") -> list[str]:
    """Kodaira types of the reducible fibres; raises unless they are exactly [I4, I4]."""
    types = [f.kodaira for f in model.fibres]
    lines = [f for f in model.fibres if all(c.kind == "line" for c in f.components)]
    names = sorted(frozenset(c.name for c in f.components) for f in lines)
    expected = sorted([frozenset(map(str, F_LABELS)), frozenset(map(str, FPRIME_LABELS))])
    if names != expected or any(f.kodaira != "I4" for f in lines):
        raise TypeCheckFailed(f"F and F' are not the two I4 fibres: {types}", types)
    extra = [f for f in model.fibres if f not in lines]
    if extra:
        raise TypeCheckFailed(
            "further reducible fibres: " + ", ".join(f"{f.kodaira} at t = {f.parameter}" for f in extra),
            types)
    return types


# -- elliptic model --------------------------------------------------------------

@dataclass(frozen=True)
class PicY:
    """Pic of the blow-up: Pic X_bar (rank 6) plus E1..E4, as 10-vectors."""

    lattice: PicardLattice

    def pair(self, u, v) -> Fraction:
        return self.lattice.pair(u[:6], v[:6]) - sum(x * y for x, y in zip(u[6:], v[6:]))

    def section(self, i: int) -> tuple[int, ...]:
        return (0,) * 6 + tuple(int(k == i) for k in range(4))

    @lru_cache(maxsize=64)
    def strict_transform(self, line_vector, base_points) -> tuple[int, ...]:
        cls = self.lattice.coordinates_of(line_vector)
        return tuple(cls) + tuple(-int(f"P{k + 1}" in base_points) for k in range(4))

    @property
    def fibre_class(self) -> tuple[int, ...]:
        return tuple(self.lattice.hyperplane) + (-1, -1, -1, -1)


@dataclass(frozen=True)
class EllipticModel:
    pencil: GenusOnePencil
    fibres: tuple[ReducibleFibre, ...]
    picard: PicY
    zero_section: str = "E1"

    @property
    def config(self) -> LineConfiguration:
        return self.pencil.config

    def component_classes(self, fibre: ReducibleFibre) -> list[tuple[int, ...]]:
        return [self.picard.strict_transform(c.line_vector, c.base_points) for c in fibre.components]

    def theta(self, fibre: ReducibleFibre) -> dict[str, int]:
        """Component name -> index around the fibre, 0 for the component met by O."""
        n = len(fibre.components)
        o = self.picard.section(SECTIONS.index(self.zero_section))
        classes = self.component_classes(fibre)
        start = next(k for k, c in enumerate(classes) if self.picard.pair(c, o) == 1)
        return {fibre.components[(start + k) % n].name: k for k in range(n)}

    def incidence(self, section: str) -> dict[str, str]:
        """For each reducible fibre, the component met by ``section`` (from point membership)."""
        s = self.picard.section(SECTIONS.index(section))
        out = {}
        for f in self.fibres:
            hit = [c.name for c, cls in zip(f.components, self.component_classes(f)) if self.picard.pair(cls, s) == 1]
            if len(hit) != 1:
                raise ConstructionError(f"{section} meets {len(hit)} components of the fibre at {f.parameter}")
            out[f.parameter] = hit[0]
        return out

    def theta_labels(self) -> dict[str, str]:
        """Labels Theta_{i,j} for the components of F (j = 1) and F' (j = 2)."""
        out = {}
        for f in self.fibres:
            names = {c.name for c in f.components}
            j = 1 if names == set(map(str, F_LABELS)) else 2 if names == set(map(str, FPRIME_LABELS)) else None
            if j is None:
                continue
            for name, i in self.theta(f).items():
                out[f"Theta_{{{i},{j}}}"] = name
        return out

    def to_dict(self) -> dict:
        return {
            "fibres": [f.to_dict() for f in self.fibres],
            "theta": self.theta_labels(),
            "zero_section": self.zero_section,
            "incidence": {s: self.incidence(s) for s in SECTIONS},
            "chi": CHI,
        }


def elliptic_model(pencil: GenusOnePencil, *, check: bool = True) -> EllipticModel:
    lattice = picard_model(pencil.config).lattice
    model = EllipticModel(pencil, tuple(reducible_fibres(pencil)), PicY(lattice))
    if check:
        _check_model(model)
    return model


def _check_model(model: EllipticModel) -> None:
    P = model.picard
    phi = P.fibre_class
    if P.pair(phi, phi) != 0:
        raise ConstructionError("fibre class is not isotropic")
    for i in range(4):
        s = P.section(i)
        if P.pair(s, s) != -1 or P.pair(s, phi) != 1:
            raise ConstructionError(f"E{i + 1} is not a section")
    for f in model.fibres:
        classes = model.component_classes(f)
        if any(P.pair(c, c) != -2 or P.pair(c, phi) != 0 for c in classes):
            raise ConstructionError(f"fibre at {f.parameter} has a component that is not a (-2)-curve")
        total = tuple(map(sum, zip(*classes)))
        if total != phi:
            raise ConstructionError(f"components of the fibre at {f.parameter} do not add up to a fibre")


def contr_I4(i: int, j: int) -> Fraction:
    return contr_In(4, i, j)


def contr_In(n: int, i: int, j: int) -> Fraction:
    i, j = sorted((i % n, j % n))
    return Fraction(i * (n - j), n)


def _fibre_size(f: ReducibleFibre) -> int:
    return len(f.components)


def height(model: EllipticModel, P: str, Q: str | None = None) -> Fraction:
    """<P, Q> = chi + P.O + Q.O - P.Q - sum of fibre contributions."""
    Q = P if Q is None else Q
    Y = model.picard
    o = Y.section(SECTIONS.index(model.zero_section))
    p, q = Y.section(SECTIONS.index(P)), Y.section(SECTIONS.index(Q))
    if P == Q:
        value = Fraction(2 * CHI + 2 * Y.pair(p, o))
    else:
        value = Fraction(CHI + Y.pair(p, o) + Y.pair(q, o) - Y.pair(p, q))
    for f in model.fibres:
        theta = model.theta(f)
        ip = theta[model.incidence(P)[f.parameter]]
        iq = theta[model.incidence(Q)[f.parameter]]
        value -= contr_In(_fibre_size(f), ip, iq)
    return value


def trivial_lattice(model: EllipticModel) -> list[tuple[int, ...]]:
    Y = model.picard
    o = Y.section(SECTIONS.index(model.zero_section))
    rows = [o, Y.fibre_class]
    for f in model.fibres:
        rows += [c for c in model.component_classes(f) if Y.pair(c, o) == 0]
    return rows


def _gram(Y: PicY, rows) -> list[list[Fraction]]:
    return [[Fraction(Y.pair(u, v)) for v in rows] for u in rows]


def projection_height(model: EllipticModel, P: str, Q: str | None = None) -> Fraction:
    """Height as minus the pairing of the projections orthogonal to the trivial lattice."""
    Q = P if Q is None else Q
    Y = model.picard
    T = trivial_lattice(model)
    G = _gram(Y, T)

    def project(v):
        c = coordinates(G, [Fraction(Y.pair(t, v)) for t in T])   # G symmetric
        return [Fraction(x) - sum(c[k] * T[k][i] for k in range(len(T))) for i, x in enumerate(v)]

    p, q = project(Y.section(SECTIONS.index(P))), project(Y.section(SECTIONS.index(Q)))
    return -(Fraction(Y.lattice.pair(p[:6], q[:6])) - sum(x * y for x, y in zip(p[6:], q[6:])))


def torsion_order(model: EllipticModel, P: str) -> int | None:
    """Order of P in MW = NS / T, or None for infinite order."""
    Y = model.picard
    T = trivial_lattice(model)
    v = Y.section(SECTIONS.index(P))
    try:
        c = coordinates([list(t) for t in T], list(v))
    except ValueError:
        return None
    return lcm(*(x.denominator for x in c))


# -- Galois action on Pic Y ---------------------------------------------------------

def base_point_permutation(pencil: GenusOnePencil, signs) -> tuple[int, ...]:
    from .exactfield import apply_galois

    pts = [bp.coords for bp in pencil.base_points]
    out = []
    for p in pts:
        img = normalize_point([apply_galois(x, signs) for x in p])
        out.append(pts.index(img))
    return tuple(out)


def galois_matrices_Y(model: EllipticModel) -> list[list[list[int]]]:
    """10x10 matrices of the generators acting on Pic Y (column vectors)."""
    config = model.config
    lat = model.picard.lattice
    mats = []
    for g, perm in zip(config.basis.generators(), generator_permutations(config)):
        A = lat.permutation_matrix(tuple(perm))
        bp = base_point_permutation(model.pencil, g)
        M = [[0] * 10 for _ in range(10)]
        for i in range(6):
            for j in range(6):
                M[i][j] = A[i][j]
        for k in range(4):
            M[6 + bp[k]][6 + k] = 1
        mats.append(M)
    return mats


def _invariance_equations(M, rows=None) -> list[list[int]]:
    """Rows of (M - I), or of (M - I) R^T when invariants are sought inside span(rows)."""
    n = len(M)
    D = [[M[i][j] - int(i == j) for j in range(n)] for i in range(n)]
    if rows is None:
        return [d for d in D if any(d)]
    out = [[sum(x * y for x, y in zip(d, r)) for r in rows] for d in D]
    return [e for e in out if any(e)]


def _fixed_rank(mats, rows=None) -> int:
    """Rank of the invariants of the group generated by ``mats`` (in span(rows) if given)."""
    k = (len(mats[0]) if mats else 10) if rows is None else len(rows)
    eqs = [e for M in mats for e in _invariance_equations(M, rows)]
    return k - len(row_basis(eqs)) if eqs else k


def mw_rank_over(model: EllipticModel, subgroup_mats) -> int:
    T = trivial_lattice(model)
    return _fixed_rank(subgroup_mats) - _fixed_rank(subgroup_mats, T)


def _subgroups(n: int, largest_first: bool = False):
    """Subgroups of (Z/2)^n as (sorted elements, independent generators), bitmask encoded."""
    seen = set()
    for k in (range(n, -1, -1) if largest_first else range(n + 1)):
        for gens in combinations(range(1, 1 << n), k):
            span = {0}
            for g in gens:
                span |= {s ^ g for s in span}
            if len(span) != 1 << k:
                continue
            key = frozenset(span)
            if key not in seen:
                seen.add(key)
                yield sorted(key), list(gens)


def _fixed_field(basis, subgroup: Sequence[int]) -> list[int]:
    n = len(basis)
    masks = [m for m in range(1, 1 << n)
             if all(bin(m & g).count("1") % 2 == 0 for g in subgroup)]
    return list(reduced_basis(basis.product(m) for m in masks).radicals)


def _group_matrix(mats, element: int):
    n = len(mats[0])
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for i, g in enumerate(mats):
        if element >> i & 1:
            M = [[sum(M[r][k] * g[k][c] for k in range(n)) for c in range(n)] for r in range(n)]
    return M


# -- reports -----------------------------------------------------------------------------

@dataclass(frozen=True)
class HeightReport:
    brauer_order: int
    fibre_types: tuple[str, ...]
    heights: dict
    determinant: Fraction
    torsion: dict
    section_fields: dict
    geometric_rank: int
    rank_over_Q: int
    full_rank_fields: tuple[tuple[int, ...], ...]
    shioda_tate: str
    narrative: str

    def to_dict(self) -> dict:
        return {
            "brauer_order": self.brauer_order,
            "fibre_types": list(self.fibre_types),
            "heights": {k: str(v) for k, v in self.heights.items()},
            "height_matrix_det": str(self.determinant),
            "torsion_orders": {k: v for k, v in self.torsion.items()},
            "section_fields": self.section_fields,
            "geometric_mw_rank": self.geometric_rank,
            "mw_rank_over_Q": self.rank_over_Q,
            "full_rank_fields": [list(f) for f in self.full_rank_fields],
            "shioda_tate": self.shioda_tate,
            "narrative": self.narrative,
        }


def mw_report(a, model: EllipticModel | None = None) -> HeightReport:
    c = as_coefficients(a)
    order = classify_formula(c).order
    if order == 1:
        raise InapplicableTrivialBrauer(f"Br X / Br_0 X is trivial for a = {list(c.a)}")
    if model is None:
        model = elliptic_model(build_pencil(build_lines(c)))
    heights = {
        "h(E2)": height(model, "E2"),
        "h(E3)": height(model, "E3"),
        "h(E4)": height(model, "E4"),
        "<E3,E4>": height(model, "E3", "E4"),
    }
    det = heights["h(E3)"] * heights["h(E4)"] - heights["<E3,E4>"] ** 2
    torsion = {s: torsion_order(model, s) for s in SECTIONS[1:]}
    fields = {f"E{k + 1}": bp.field for k, bp in enumerate(model.pencil.base_points)}
    T = trivial_lattice(model)
    geo = 10 - rank_q(T)
    mats = galois_matrices_Y(model)
    basis = model.config.basis
    rank_Q = mw_rank_over(model, mats)
    best: list[tuple[int, ...]] = []
    best_deg = None
    eq_cache: dict[int, tuple[list, list]] = {}

    def equations(h):
        if h not in eq_cache:
            M = _group_matrix(mats, h)
            eq_cache[h] = (_invariance_equations(M), _invariance_equations(M, T))
        return eq_cache[h]

    # fixed fields of larger subgroups have smaller degree: stop after the first level that works
    for H, H_gens in _subgroups(len(basis), largest_first=True):
        if best and len(H_gens) < len(basis) - best_deg:
            break
        full = [e for h in H_gens for e in equations(h)[0]]
        restricted = [e for h in H_gens for e in equations(h)[1]]
        r = (10 - len(row_basis(full)) if full else 10) - (len(T) - len(row_basis(restricted)) if restricted else len(T))
        if r != geo:
            continue
        K = tuple(_fixed_field(basis, H))
        if best_deg is None or len(K) < best_deg:
            best, best_deg = [K], len(K)
        elif len(K) == best_deg and K not in best:
            best.append(K)
    sizes = [len(f.components) - 1 for f in model.fibres]
    st = f"10 = 2 + {' + '.join(map(str, sizes))} + {geo}"
    types = tuple(f.kodaira for f in model.fibres)
    narrative = _narrative(order, types, torsion, fields, rank_Q, best)
    return HeightReport(order, types, heights, det, torsion, fields, geo, rank_Q, tuple(best), st, narrative)


def _fmt_field(rads: Sequence[int]) -> str:
    return "Q" if not rads else "Q(" + ", ".join(f"sqrt({r})" for r in rads) + ")"


def _narrative(order, types, torsion, fields, rank_Q, best) -> str:
    tors = ", ".join(f"{s} of order {o}" if o else f"{s} of infinite order" for s, o in torsion.items())
    rational_sections = [s for s, f in fields.items() if not f]
    parts = [
        f"Br X / Br_0 X has order {order}.",
        f"Reducible fibres: {', '.join(types)}.",
        f"With zero section E1: {tors}.",
    ]
    if rational_sections:
        parts.append(f"Sections defined over Q: {', '.join(rational_sections)}.")
    else:
        parts.append("No section Ei is defined over Q; E1 is defined over "
                     f"{_fmt_field(fields['E1'])}.")
    parts.append(f"Mordell-Weil rank over Q: {rank_Q}.")
    parts.append("Full Mordell-Weil rank is reached over " + " or ".join(_fmt_field(f) for f in best) + ".")
    return " ".join(parts)


def verticality(presentation: BrauerPresentation, pencil: GenusOnePencil) -> str:
    lines = presentation.first | presentation.second
    inside = len(lines & pencil.components)
    if inside == len(lines):
        return "vertical"
    if inside == 0:
        return "horizontal"
    raise MixedConfiguration(
        f"{inside} of the 8 lines of {sorted(str(LABELS[i]) for i in lines)} are fibre components")
