"""Galois action on the 16 lines: splitting field, orbits, contractible orbits.

The ground field is Q, so the Galois group of the splitting field
Q(sqrt r1, ..., sqrt rn) is the full sign group {+-1}^n.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .exactfield import RadicalBasis, apply_galois
from .surface import LABELS, LineConfiguration, LineLabel, ConstructionError, line_radicands

ALLOWED_PROFILES = ((2,) * 8, (2, 2, 2, 2, 4, 4), (4, 4, 4, 4))


@dataclass(frozen=True)
class SplittingField:
    basis: RadicalBasis
    provenance: dict[Fraction, frozenset[int]]

    @property
    def degree(self) -> int:
        return self.basis.degree

    def to_dict(self) -> dict:
        return {
            "basis": list(self.basis.radicals),
            "degree": self.degree,
            "provenance": {str(q): sorted(s) for q, s in self.provenance.items()},
        }


def splitting_field(config: LineConfiguration) -> SplittingField:
    basis = config.basis
    prov = {}
    for q in line_radicands(config.coefficients):
        mask = basis.express(q)
        if mask is None:
            raise ConstructionError(f"radicand {q} escapes the splitting basis {basis}")
        prov[q] = frozenset(i + 1 for i in range(len(basis)) if mask >> i & 1)
    return SplittingField(basis, prov)


Permutation = tuple[int, ...]


def _key(x) -> tuple:
    return tuple(sorted((m, c.numerator, c.denominator) for m, c in x.coeffs.items()))


def act_on_lines(config: LineConfiguration, signs: Sequence[int]) -> Permutation:
    """``perm[i]`` is the position of the image of line ``i``."""
    index = {(l.family, _key(l.c), _key(l.e)): i for i, l in enumerate(config.lines)}
    perm = []
    for l in config.lines:
        key = (l.family, _key(apply_galois(l.c, signs)), _key(apply_galois(l.e, signs)))
        try:
            perm.append(index[key])
        except KeyError:
            raise ConstructionError(f"Galois image of {l.label} is not a line") from None
    return tuple(perm)


def generator_permutations(config: LineConfiguration) -> list[Permutation]:
    return [act_on_lines(config, g) for g in config.basis.generators()]


def group_permutations(config: LineConfiguration) -> list[Permutation]:
    return [act_on_lines(config, s) for s in config.basis.characters()]


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``p`` after ``q``."""
    return tuple(p[i] for i in q)


@dataclass(frozen=True)
class OrbitPartition:
    orbits: tuple[tuple[LineLabel, ...], ...]

    @cached_property
    def profile(self) -> tuple[int, ...]:
        return tuple(sorted(len(o) for o in self.orbits))

    @property
    def profile_string(self) -> str:
        return profile_string(self.profile)

    def orbit_of(self, label: LineLabel) -> tuple[LineLabel, ...]:
        for o in self.orbits:
            if label in o:
                return o
        raise KeyError(label)

    def to_dict(self) -> dict:
        return {
            "orbits": [[str(l) for l in o] for o in self.orbits],
            "profile": self.profile_string,
        }


def profile_string(profile: Sequence[int]) -> str:
    counts = Counter(profile)
    return " ".join(f"{size}^{counts[size]}" for size in sorted(counts))


def orbits_from_generators(gens: Sequence[Permutation], n: int = 16) -> list[list[int]]:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for i, j in enumerate(g):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    blocks: dict[int, list[int]] = {}
    for i in range(n):
        blocks.setdefault(find(i), []).append(i)
    return sorted(blocks.values())


def orbits(config: LineConfiguration) -> OrbitPartition:
    blocks = orbits_from_generators(generator_permutations(config))
    return OrbitPartition(tuple(tuple(LABELS[i] for i in b) for b in blocks))


def contractible_orbit_exists(config: LineConfiguration,
                              partition: OrbitPartition | None = None):
    """``(True, orbit)`` for the first orbit of pairwise skew lines, else ``(False, None)``.

    A single rational line counts: it is a (-1)-curve defined over Q.
    """
    partition = partition or orbits(config)
    adj = config.adjacency
    for orb in partition.orbits:
        idx = [l.position for l in orb]
        if all(adj[i][j] == 0 for a, i in enumerate(idx) for j in idx[a + 1:]):
            return True, orb
    return False, None


def orbits_are_fibre_unions(partition: OrbitPartition) -> bool:
    """Every orbit contains both components of each singular fibre it meets."""
    return all(l.partner in orb for orb in partition.orbits for l in orb)
