"""Exact arithmetic over Q and over multiquadratic fields Q(sqrt r1, ..., sqrt rn).

Rationals are :class:`fractions.Fraction`.  A square class of Q*/Q*^2 is
represented by its squarefree integer representative.  Elements of a
multiquadratic field are stored as a map ``mask -> Fraction`` where bit ``i``
of ``mask`` selects the radical ``sqrt(r_i)``; the monomial for ``mask`` is the
product of the selected square roots.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import isqrt
from typing import Iterable, Iterator, Sequence

DEFAULT_FACTOR_BOUND = 10**6

_factor_bound = DEFAULT_FACTOR_BOUND


class ZeroInput(ValueError):
    pass


class FactorizationIncomplete(ArithmeticError):
    """A cofactor could not be classified within the trial-division bound."""


def set_factor_bound(bound: int) -> None:
    global _factor_bound
    if bound < 2:
        raise ValueError("factor bound must be at least 2")
    _factor_bound = int(bound)
    _squarefree_int.cache_clear()


def get_factor_bound() -> int:
    return _factor_bound


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with the first 13 prime bases (deterministic below 3.3e24)."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=1 << 16)
def _squarefree_int(n: int) -> int:
    # n > 0
    bound = _factor_bound
    out = 1
    m = n
    p = 2
    while p * p <= m and p <= bound:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if e % 2:
                out *= p
        p += 1 if p == 2 else 2
    if m == 1:
        return out
    # every prime factor of m exceeds min(bound, sqrt(m))
    if p * p > m or m < bound * bound:
        return out * m
    r = isqrt(m)
    if r * r == m:
        return out
    if m < bound**3 or is_probable_prime(m):
        # prime, or a product of two distinct primes
        return out * m
    raise FactorizationIncomplete(
        f"cofactor {m} has no prime factor below {bound} and cannot be classified"
    )


def squarefree_part(q) -> int:
    """Squarefree integer ``s`` with ``q = s * (rational square)``."""
    q = Fraction(q)
    if q == 0:
        raise ZeroInput("square class of zero is undefined")
    sign = -1 if q < 0 else 1
    num, den = abs(q.numerator), q.denominator
    return sign * _squarefree_int(num * den)


def is_rational_square(q) -> bool:
    q = Fraction(q)
    if q < 0:
        return False
    return isqrt(q.numerator) ** 2 == q.numerator and isqrt(q.denominator) ** 2 == q.denominator


def rational_sqrt(q) -> Fraction:
    q = Fraction(q)
    if not is_rational_square(q):
        raise ValueError(f"{q} is not a rational square")
    return Fraction(isqrt(q.numerator), isqrt(q.denominator))


def is_square_in_quadratic(x, m: int) -> bool:
    """True iff the rational ``x`` is a square in Q(sqrt m)."""
    return squarefree_part(x) == 1 or squarefree_part(Fraction(x) * m) == 1


def canonical_order(radicals: Iterable[int]) -> list[int]:
    return sorted(radicals, key=lambda r: (abs(r), r < 0))


class RadicalBasis:
    """Squarefree integers independent modulo squares."""

    __slots__ = ("radicals", "_products")

    def __init__(self, radicals: Sequence[int] = ()):
        rads = tuple(int(r) for r in radicals)
        for r in rads:
            if r == 1 or squarefree_part(r) != r:
                raise ValueError(f"{r} is not a nontrivial squarefree integer")
        self.radicals = rads
        n = len(rads)
        prods = [1] * (1 << n)
        for mask in range(1, 1 << n):
            low = mask & -mask
            prods[mask] = prods[mask ^ low] * rads[low.bit_length() - 1]
        for mask in range(1, 1 << n):
            if squarefree_part(prods[mask]) == 1:
                raise ValueError(f"radicals {rads} are not independent modulo squares")
        self._products = tuple(prods)

    def __len__(self) -> int:
        return len(self.radicals)

    def __iter__(self):
        return iter(self.radicals)

    def __eq__(self, other) -> bool:
        return isinstance(other, RadicalBasis) and self.radicals == other.radicals

    def __hash__(self) -> int:
        return hash(self.radicals)

    def __repr__(self) -> str:
        return f"RadicalBasis({list(self.radicals)})"

    @property
    def degree(self) -> int:
        return 1 << len(self.radicals)

    def product(self, mask: int) -> int:
        """Integer product of the radicands selected by ``mask``."""
        return self._products[mask]

    def express(self, c) -> int | None:
        """Mask ``S`` with ``prod_S r_i`` in the square class of ``c``, or None."""
        s = squarefree_part(c)
        for mask, p in enumerate(self._products):
            if squarefree_part(p) == s:
                return mask
        return None

    def adjoin(self, c) -> tuple[RadicalBasis, frozenset[int] | int]:
        """Return ``(self, dependency)`` or ``(enlarged, new_index)``.

        A dependency is the set of 1-based indices whose product is ``c``
        modulo squares; the empty set means ``c`` is a square.
        """
        mask = self.express(c)
        if mask is not None:
            return self, frozenset(i + 1 for i in range(len(self)) if mask >> i & 1)
        s = squarefree_part(c)
        return RadicalBasis(self.radicals + (s,)), len(self) + 1

    def characters(self) -> Iterator[tuple[int, ...]]:
        """All sign vectors of the Galois group {+-1}^n."""
        return product((1, -1), repeat=len(self))

    def generators(self) -> list[tuple[int, ...]]:
        n = len(self)
        return [tuple(-1 if j == i else 1 for j in range(n)) for i in range(n)]


def reduced_basis(classes: Iterable[int]) -> RadicalBasis:
    """Independent basis for the subgroup of Q*/Q*^2 generated by ``classes``.

    Candidates are adjoined in canonical order and the result is sorted, so
    the basis does not depend on input order.
    """
    basis = RadicalBasis()
    for c in canonical_order({squarefree_part(c) for c in classes}):
        basis, _ = basis.adjoin(c)
    return RadicalBasis(canonical_order(basis.radicals))


def _mask_sign(mask: int, signs: Sequence[int]) -> int:
    s = 1
    i = 0
    while mask:
        if mask & 1:
            s *= signs[i]
        mask >>= 1
        i += 1
    return s


class FieldElement:
    """Element of Q(sqrt r1, ..., sqrt rn) for a fixed :class:`RadicalBasis`."""

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis: RadicalBasis, coeffs: dict[int, Fraction] | None = None):
        self.basis = basis
        self.coeffs = {m: Fraction(c) for m, c in (coeffs or {}).items() if c != 0}

    @classmethod
    def _new(cls, basis: RadicalBasis, coeffs: dict) -> FieldElement:
        # coeffs already hold Fractions/ints; only zeros are dropped
        obj = cls.__new__(cls)
        obj.basis = basis
        obj.coeffs = {m: c for m, c in coeffs.items() if c}
        return obj

    @classmethod
    def rational(cls, basis: RadicalBasis, q) -> FieldElement:
        return cls(basis, {0: Fraction(q)})

    @classmethod
    def radical(cls, basis: RadicalBasis, mask: int, coeff=1) -> FieldElement:
        return cls(basis, {mask: Fraction(coeff)})

    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.basis != self.basis:
                raise ValueError("operands live over different radical bases")
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement.rational(self.basis, other)
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_rational(self) -> bool:
        return all(m == 0 for m in self.coeffs)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs.get(0, Fraction(0))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0) + c
        return FieldElement._new(self.basis, out)

    __radd__ = __add__

    def __neg__(self) -> FieldElement:
        return FieldElement._new(self.basis, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prod_ = self.basis.product
        if len(self.coeffs) == 1 and len(other.coeffs) == 1:
            # monomial fast path; lines and their data are monomials
            (m1, c1), = self.coeffs.items()
            (m2, c2), = other.coeffs.items()
            return FieldElement._new(self.basis, {m1 ^ m2: c1 * c2 * prod_(m1 & m2)})
        out: dict[int, Fraction] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = m1 ^ m2
                out[m] = out.get(m, 0) + c1 * c2 * prod_(m1 & m2)
        return FieldElement._new(self.basis, out)

    __rmul__ = __mul__

    def conjugate(self, signs: Sequence[int]) -> FieldElement:
        return apply_galois(self, signs)

    def inverse(self) -> FieldElement:
        """Inverse by clearing one radical at a time.

        ``1/(a + b sqrt r) = (a - b sqrt r) / (a^2 - r b^2)``; iterating over the
        tower multiplies through by all conjugates in stages.
        """
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        top = max(self.coeffs).bit_length() - 1
        if top < 0:
            return FieldElement.rational(self.basis, 1 / self.coeffs[0])
        bit = 1 << top
        a = FieldElement(self.basis, {m: c for m, c in self.coeffs.items() if not m & bit})
        b = FieldElement(self.basis, {m ^ bit: c for m, c in self.coeffs.items() if m & bit})
        r = self.basis.radicals[top]
        norm = a * a - b * b * r
        conj = a - b * FieldElement.radical(self.basis, bit)
        return conj * norm.inverse()

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = FieldElement.rational(self.basis, other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.basis == other.basis and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.basis, frozenset(self.coeffs.items())))

    def to_list(self) -> list[list]:
        """``[[radicand, "p/q"], ...]`` sorted by mask; exact, JSON friendly."""
        return [[self.basis.product(m), str(c)] for m, c in sorted(self.coeffs.items())]

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for m, c in sorted(self.coeffs.items()):
            if m == 0:
                parts.append(str(c))
            else:
                rad = "*".join(f"sqrt({self.basis.radicals[i]})"
                               for i in range(len(self.basis)) if m >> i & 1)
                parts.append(rad if c == 1 else f"{c}*{rad}")
        return " + ".join(parts)


def fe_add(x: FieldElement, y: FieldElement) -> FieldElement:
    return x + y


def fe_mul(x: FieldElement, y: FieldElement) -> FieldElement:
    return x * y


def fe_inv(x: FieldElement) -> FieldElement:
    return x.inverse()


def fe_is_zero(x: FieldElement) -> bool:
    return x.is_zero()


def apply_galois(e: FieldElement, signs: Sequence[int]) -> FieldElement:
    """Image of ``e`` under sqrt(r_i) -> signs[i] * sqrt(r_i)."""
    if len(signs) != len(e.basis):
        raise ValueError("character length does not match the radical basis")
    return FieldElement._new(e.basis, {m: c * _mask_sign(m, signs) for m, c in e.coeffs.items()})


def sqrt_in_field(q, basis: RadicalBasis) -> FieldElement | None:
    """Square root of the rational ``q`` with positive coefficient, if it exists."""
    q = Fraction(q)
    mask = basis.express(q)
    if mask is None:
        return None
    p = basis.product(mask)
    u = rational_sqrt(q * p)
    return FieldElement.radical(basis, mask, abs(u / p))


def normalize_point(coords: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
    """Scale a projective point so that its first nonzero coordinate is 1."""
    for x in coords:
        if not x.is_zero():
            inv = x.inverse()
            return tuple(c * inv for c in coords)
    raise ValueError("the zero vector is not a projective point")


@dataclass(frozen=True)
class LinearSolution:
    """Solution set ``particular + span(kernel)``; ``particular`` is None if inconsistent."""

    particular: tuple[FieldElement, ...] | None
    kernel: tuple[tuple[FieldElement, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.kernel)


def _pivot_cost(x: FieldElement) -> int:
    return len(x.coeffs) if x.is_rational() else 16 + len(x.coeffs)


def solve_linear(matrix: Sequence[Sequence[FieldElement]],
                 rhs: Sequence[FieldElement] | None = None) -> LinearSolution:
    """Gaussian elimination over the multiquadratic field.

    With ``rhs=None`` the homogeneous system is solved.  Pivots are chosen
    among nonzero entries, cheapest (rational) first.
    """
    rows = [list(r) for r in matrix]
    if not rows:
        raise ValueError("empty system")
    ncols = len(rows[0])
    basis = rows[0][0].basis
    zero = FieldElement(basis)
    one = FieldElement.rational(basis, 1)
    if rhs is None:
        rhs = [zero] * len(rows)
    rows = [r + [b] for r, b in zip(rows, rhs)]

    pivots: list[int] = []
    r0 = 0
    for col in range(ncols):
        cands = [i for i in range(r0, len(rows)) if not rows[i][col].is_zero()]
        if not cands:
            continue
        piv = min(cands, key=lambda i: _pivot_cost(rows[i][col]))
        rows[r0], rows[piv] = rows[piv], rows[r0]
        inv = rows[r0][col].inverse()
        rows[r0] = [x * inv for x in rows[r0]]
        for i in range(len(rows)):
            if i != r0 and not rows[i][col].is_zero():
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r0])]
        pivots.append(col)
        r0 += 1
        if r0 == len(rows):
            break

    if any(not rows[i][ncols].is_zero() for i in range(r0, len(rows))):
        particular = None
    else:
        part = [zero] * ncols
        for i, col in enumerate(pivots):
            part[col] = rows[i][ncols]
        particular = tuple(part)

    free = [c for c in range(ncols) if c not in pivots]
    kernel = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for i, col in enumerate(pivots):
            v[col] = -rows[i][fc]
        kernel.append(tuple(v))
    return LinearSolution(particular, tuple(kernel))
