"""Summand labels, restricted tensor-product tables and member metadata."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from .characters import (
    Character,
    UnknownTiltingCharacter,
    into_simple_basis,
    into_weyl_basis,
    multiply,
    restricted_simple_is_tilting,
    simple_character,
    tilting_character,
    weyl_character,
)
from .weights import (
    ZERO,
    Weight,
    WeightError,
    as_weight,
    is_restricted,
    tilting_digits,
    weight_order_key,
)

_KIND_RANK = {"T": 0, "L": 1, "M": 2}


class NotRestricted(WeightError):
    """A restricted-table lookup received a non-restricted weight."""


class UnknownAtom(ValueError):
    """The atom is not a member of any family for the given prime."""


@dataclass(frozen=True)
class Atom:
    """A family member: a tilting module T(wt), a simple module L(wt), or M."""

    kind: str
    wt: Weight | None = None

    def __post_init__(self):
        if self.kind not in _KIND_RANK:
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if (self.kind == "M") != (self.wt is None):
            raise ValueError("M carries no weight; T and L atoms require one")
        if self.wt is not None:
            object.__setattr__(self, "wt", as_weight(self.wt))

    @staticmethod
    def T(a: int, b: int) -> "Atom":
        return Atom("T", Weight(a, b))

    @staticmethod
    def L(a: int, b: int) -> "Atom":
        return Atom("L", Weight(a, b))

    @property
    def is_identity(self) -> bool:
        return self.wt == ZERO

    def flipped(self) -> "Atom":
        return self if self.wt is None else Atom(self.kind, self.wt.flipped())

    def sort_key(self) -> tuple:
        if self.wt is None:
            return (_KIND_RANK[self.kind], 0, 0)
        s, a = weight_order_key(self.wt)
        return (_KIND_RANK[self.kind], -s, -a)

    def __str__(self) -> str:
        return "M" if self.kind == "M" else f"{self.kind}({self.wt[0]},{self.wt[1]})"

    def to_json(self) -> dict:
        return {"kind": self.kind} if self.wt is None else {"kind": self.kind, "wt": list(self.wt)}


M = Atom("M")


# ---------------------------------------------------------------------------
# restricted tables, one entry per proposition line; symmetric mates are generated

def _t(a, b, mult=1):
    return (mult, Atom.T(a, b))


RESTRICTED_LINES: dict[int, dict[int, tuple[tuple, tuple, list]]] = {
    2: {
        1: ((1, 0), (1, 0), [_t(2, 0)]),
        2: ((1, 0), (0, 1), [_t(1, 1), _t(0, 0)]),
        3: ((1, 0), (1, 1), [_t(2, 1)]),
        4: ((1, 1), (1, 1), [_t(2, 2), _t(1, 1, 2)]),
    },
    3: {
        1: ((1, 0), (1, 0), [_t(2, 0), _t(0, 1)]),
        2: ((1, 0), (0, 1), [_t(1, 1)]),
        3: ((1, 0), (2, 0), [_t(3, 0)]),
        4: ((1, 0), (1, 1), [_t(2, 1), _t(0, 2)]),
        5: ((1, 0), (0, 2), [_t(1, 2), _t(0, 1)]),
        6: ((1, 0), (2, 1), [_t(3, 1), _t(2, 0)]),
        7: ((1, 0), (1, 2), [_t(2, 2), _t(0, 3)]),
        8: ((1, 0), (2, 2), [_t(3, 2)]),
        9: ((2, 0), (2, 0), [_t(4, 0), _t(2, 1)]),
        10: ((2, 0), (1, 1), [_t(3, 1), _t(0, 1)]),
        11: ((2, 0), (0, 2), [_t(2, 2), _t(1, 1)]),
        12: ((2, 0), (2, 1), [_t(4, 1), _t(2, 2)]),
        13: ((2, 0), (1, 2), [_t(3, 2), _t(0, 2), _t(1, 0)]),
        14: ((2, 0), (2, 2), [_t(4, 2), _t(2, 3)]),
        15: ((1, 1), (1, 1), [_t(2, 2), _t(0, 0), (1, M)]),
        16: ((1, 1), (2, 1), [_t(3, 2), _t(4, 0), _t(1, 0)]),
        17: ((1, 1), (2, 2), [_t(3, 3), _t(2, 2)]),
        18: ((2, 1), (2, 1), [_t(4, 2), _t(5, 0), _t(2, 3), _t(3, 1)]),
        19: ((2, 1), (1, 2), [_t(3, 3), _t(2, 2, 2), _t(1, 1)]),
        20: ((2, 1), (2, 2), [_t(4, 3), _t(3, 2, 2), _t(2, 4)]),
        21: ((2, 2), (2, 2), [_t(4, 4), _t(3, 3), _t(5, 2), _t(2, 5), _t(2, 2, 3)]),
    },
}

# p = 3 products of a pushed multiplier with M; the characters force T(1,3) next to L(1,0)
M_PRODUCTS: dict[Atom, list[tuple[int, Atom]]] = {
    Atom.T(1, 0): [_t(1, 3), _t(1, 0), _t(4, 0)],
    Atom.T(0, 1): [_t(3, 1), _t(0, 1), _t(0, 4)],
}

Term = tuple[int, Atom]


def _pair_key(lam: Weight, mu: Weight) -> tuple[Weight, Weight]:
    return tuple(sorted((as_weight(lam), as_weight(mu)), key=weight_order_key))  # type: ignore[return-value]


def canonical_terms(terms) -> list[Term]:
    acc: dict[Atom, int] = {}
    for m, atom in terms:
        acc[atom] = acc.get(atom, 0) + m
    return sorted(((m, a) for a, m in acc.items() if m), key=lambda t: t[1].sort_key())


@lru_cache(maxsize=None)
def _closed_table(p: int) -> dict[tuple[Weight, Weight], tuple[Term, ...]]:
    table: dict[tuple[Weight, Weight], tuple[Term, ...]] = {}
    for lam, mu, terms in RESTRICTED_LINES[p].values():
        lam, mu = Weight(*lam), Weight(*mu)
        table[_pair_key(lam, mu)] = tuple(canonical_terms(terms))
        flipped = [(m, a.flipped()) for m, a in terms]
        table[_pair_key(lam.flipped(), mu.flipped())] = tuple(canonical_terms(flipped))
    return table


def restricted_atom(p: int, lam: Weight) -> Atom:
    """The family member equal to L(lam) for restricted lam."""
    lam = as_weight(lam)
    return Atom("T", lam) if restricted_simple_is_tilting(p, lam) else Atom("L", lam)


def restricted_decompose(p: int, lam: Weight, mu: Weight) -> list[Term]:
    """Indecomposable summands of L(lam) (x) L(mu) for restricted lam, mu."""
    lam, mu = as_weight(lam), as_weight(mu)
    for w in (lam, mu):
        if not is_restricted(p, w):
            raise NotRestricted(f"weight {tuple(w)} is not restricted for p={p}")
    if lam == ZERO:
        return [(1, restricted_atom(p, mu))]
    if mu == ZERO:
        return [(1, restricted_atom(p, lam))]
    return list(_closed_table(p)[_pair_key(lam, mu)])


def table_lines(p: int) -> list[tuple[str, Weight, Weight, list[Term]]]:
    """All table entries with labels, including symmetric mates and (0,0)-pairs."""
    out = []
    for n, (lam, mu, _) in RESTRICTED_LINES[p].items():
        lam, mu = Weight(*lam), Weight(*mu)
        out.append((f"({n})", lam, mu, restricted_decompose(p, lam, mu)))
        fl, fm = lam.flipped(), mu.flipped()
        if _pair_key(fl, fm) != _pair_key(lam, mu):
            out.append((f"({n})'", fl, fm, restricted_decompose(p, fl, fm)))
    for a in range(p):
        for b in range(p):
            w = Weight(a, b)
            out.append((f"0*{a}{b}", ZERO, w, restricted_decompose(p, ZERO, w)))
    return out


# composition-factor identities chi_p(lam) * chi_p(mu) = sum m * chi_p(nu)
COMPOSITION_IDENTITIES: dict[int, list[tuple[tuple, tuple, dict[tuple, int]]]] = {
    2: [
        ((1, 0), (1, 0), {(2, 0): 1, (0, 1): 2}),
        ((1, 0), (0, 1), {(1, 1): 1, (0, 0): 1}),
        ((1, 0), (1, 1), {(2, 1): 1, (0, 2): 2, (1, 0): 3}),
        ((0, 1), (0, 1), {(0, 2): 1, (1, 0): 2}),
        ((0, 1), (1, 1), {(1, 2): 1, (2, 0): 2, (0, 1): 3}),
        ((1, 1), (1, 1), {(2, 2): 1, (0, 3): 2, (3, 0): 2, (1, 1): 2, (0, 0): 4}),
    ],
    3: [
        ((1, 0), (1, 0), {(2, 0): 1, (0, 1): 1}),
        ((1, 0), (0, 1), {(1, 1): 1, (0, 0): 2}),
        ((1, 0), (2, 0), {(3, 0): 1, (1, 1): 2, (0, 0): 1}),
        ((1, 0), (1, 1), {(2, 1): 1, (0, 2): 1}),
        ((1, 0), (0, 2), {(1, 2): 1, (0, 1): 1}),
        ((1, 0), (2, 1), {(3, 1): 1, (1, 2): 2, (2, 0): 1}),
        ((1, 0), (1, 2), {(2, 2): 1, (0, 3): 1, (1, 1): 2, (0, 0): 1}),
        ((1, 0), (2, 2), {(3, 2): 1, (1, 3): 2, (2, 1): 3}),
        ((2, 0), (2, 0), {(4, 0): 1, (2, 1): 1, (0, 2): 2}),
        ((2, 0), (1, 1), {(3, 1): 1, (1, 2): 2, (0, 1): 1}),
        ((2, 0), (0, 2), {(2, 2): 1, (1, 1): 1, (0, 0): 2}),
        ((2, 0), (2, 1), {(4, 1): 1, (2, 2): 1, (0, 3): 2, (3, 0): 2, (1, 1): 4, (0, 0): 2}),
        ((2, 0), (1, 2), {(3, 2): 1, (1, 3): 2, (2, 1): 3, (0, 2): 1, (1, 0): 1}),
        ((2, 0), (2, 2), {(4, 2): 1, (2, 3): 1, (0, 4): 2, (3, 1): 2, (1, 2): 3, (2, 0): 3}),
        ((1, 1), (1, 1), {(2, 2): 1, (0, 3): 1, (3, 0): 1, (1, 1): 2, (0, 0): 2}),
        ((1, 1), (2, 1), {(3, 2): 1, (1, 3): 2, (4, 0): 1, (2, 1): 3, (0, 2): 2, (1, 0): 1}),
        ((1, 1), (2, 2), {(3, 3): 1, (1, 4): 2, (4, 1): 2, (2, 2): 1, (0, 3): 4, (3, 0): 4,
                          (1, 1): 6, (0, 0): 5}),
        ((2, 1), (2, 1), {(4, 2): 1, (2, 3): 1, (0, 4): 2, (5, 0): 1, (3, 1): 3, (1, 2): 5,
                          (2, 0): 3, (0, 1): 2}),
        ((2, 1), (1, 2), {(3, 3): 1, (1, 4): 2, (4, 1): 2, (2, 2): 2, (0, 3): 4, (3, 0): 4,
                          (1, 1): 7, (0, 0): 7}),
        ((2, 1), (2, 2), {(4, 3): 1, (2, 4): 1, (0, 5): 2, (5, 1): 2, (3, 2): 2, (1, 3): 4,
                          (4, 0): 2, (2, 1): 6, (0, 2): 3, (1, 0): 5}),
        ((2, 2), (2, 2), {(4, 4): 1, (2, 5): 1, (0, 6): 2, (5, 2): 1, (3, 3): 3, (1, 4): 6,
                          (6, 0): 2, (4, 1): 6, (2, 2): 3, (0, 3): 8, (3, 0): 8, (1, 1): 11,
                          (0, 0): 15}),
    ],
}


def composition_identity(p: int, lam: Weight, mu: Weight) -> dict[Weight, int]:
    """Composition multiplicities of L(lam) (x) L(mu), recomputed from characters."""
    return into_simple_basis(p, multiply(simple_character(p, lam), simple_character(p, mu)))


# ---------------------------------------------------------------------------
# characters and metadata

def m_character() -> Character:
    """ch M = ch L(1,1)^2 - ch L(2,2) - ch L(0,0) at p = 3."""
    return weyl_character(Weight(3, 0)) + weyl_character(Weight(0, 3)) + weyl_character(ZERO)


@lru_cache(maxsize=None)
def family_character(p: int, atom: Atom) -> Character:
    if atom.kind == "M":
        if p != 3:
            raise UnknownAtom("M exists only for p = 3")
        return m_character()
    if atom.kind == "L":
        return simple_character(p, atom.wt)
    return tilting_character(p, atom.wt)


def composition_length(p: int, atom: Atom) -> int:
    """Number of composition factors, counted through the simple characters."""
    return sum(into_simple_basis(p, family_character(p, atom)).values())


def family_members(p: int) -> set[Atom]:
    if p == 2:
        return {Atom.T(a, b) for a in range(3) for b in range(3)}
    if p == 3:
        base = {Atom.T(a, b) for a in range(5) for b in range(5)}
        return base | {Atom.T(5, 0), Atom.T(0, 5), Atom.T(5, 2), Atom.T(2, 5), Atom.L(1, 1), M}
    raise UnknownAtom(f"no family for p={p}")


def family_prime_members(p: int) -> set[Atom]:
    if p != 3:
        return family_members(p)
    base = {Atom.T(a, b) for a in range(5) for b in range(5)}
    extra = {Atom.T(*w) for w in [(6, 0), (5, 1), (5, 0), (0, 6), (1, 5), (0, 5)]}
    return base | extra | {Atom.L(1, 1), M}


@dataclass(frozen=True)
class AtomMetadata:
    is_tilting: bool
    simple_restricted_socle: bool
    in_F: bool
    in_Fprime: bool


def atom_metadata(p: int, atom: Atom) -> AtomMetadata:
    fam, famp = family_members(p), family_prime_members(p)
    simple_ok = atom.kind == "L" and (
        (p == 3 and atom.wt in ((1, 1), (2, 2))) or is_restricted(p, atom.wt)
    )
    if atom not in fam and atom not in famp and not simple_ok:
        raise UnknownAtom(f"{atom} is not a family member for p={p}")
    is_tilting = atom.kind == "T" or (atom.kind == "L" and restricted_simple_is_tilting(p, atom.wt)
                                      and is_restricted(p, atom.wt))
    socle = not (p == 3 and atom in (Atom.T(5, 2), Atom.T(2, 5)))
    return AtomMetadata(is_tilting, socle, atom in fam, atom in famp)


# ---------------------------------------------------------------------------
# pushed multipliers at p = 3

@dataclass(frozen=True)
class Factored:
    """base (x) pushed^[1]: a tilting output split by its tilting digits."""

    base: Atom
    pushed: Atom

    def flipped(self) -> "Factored":
        return Factored(self.base.flipped(), self.pushed.flipped())

    def __str__(self) -> str:
        return f"{self.base} (x) {self.pushed}^[1]"


MULTIPLIERS = (Atom.T(1, 0), Atom.T(0, 1))
ProductTerm = tuple[int, Union[Atom, Factored]]


def greedy_tilting_split(p: int, ch: Character) -> list[tuple[int, Weight]]:
    """Peel off tilting characters by highest weight until nothing remains."""
    rest = dict(into_weyl_basis(ch).terms)
    out = []
    while rest:
        top = max(rest, key=weight_order_key)
        m = rest[top]
        if m < 0:
            raise ValueError(f"negative multiplicity at {tuple(top)}: not a tilting character")
        out.append((m, top))
        for w, k in into_weyl_basis(tilting_character(p, top)).terms.items():
            v = rest.get(w, 0) - m * k
            if v:
                rest[w] = v
            else:
                rest.pop(w, None)
    return out


def _factor_tilting(p: int, nu: Weight) -> Atom | Factored:
    digits = tilting_digits(p, nu)
    if len(digits) <= 1:
        return Atom("T", nu)
    if len(digits) != 2 or digits[1] not in ((1, 0), (0, 1)):
        raise UnknownTiltingCharacter(p, nu, "cannot be factored through a minuscule multiplier")
    base = Atom("L", digits[0]) if digits[0] == (p - 1, p - 1) else Atom("T", digits[0])
    return Factored(base, Atom("T", digits[1]))


def multiplier_product(p: int, m: Atom, a: Atom) -> list[ProductTerm]:
    """Split m (x) a for a pushed minuscule multiplier m at p = 3."""
    if p != 3:
        raise ValueError("pushed multipliers only occur for p = 3")
    if m not in MULTIPLIERS:
        raise ValueError(f"{m} is not a pushed multiplier")
    if a.kind == "M":
        return list(M_PRODUCTS[m])
    if a.kind == "L" and a.wt == (1, 1):
        return list(restricted_decompose(p, m.wt, a.wt))
    ch = multiply(family_character(p, m), family_character(p, a))
    out: list[ProductTerm] = []
    for mult, nu in greedy_tilting_split(p, ch):
        out.append((mult, _factor_tilting(p, nu)))
    return out
