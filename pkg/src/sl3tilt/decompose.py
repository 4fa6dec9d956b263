"""Decomposition of L(lam) (x) L(mu) into twisted tensor products of family members."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache

from .characters import Character, frobenius_twist, multiply, simple_character
from .family import (
    Atom,
    M,
    Factored,
    atom_metadata,
    family_character,
    multiplier_product,
    restricted_decompose,
)
from .weights import (
    MINUSCULE,
    ZERO,
    Weight,
    WeightError,
    as_weight,
    in_steinberg_range,
    is_dominant,
    steinberg_digits,
    steinberg_weight,
    _require_prime,
)

Factor = tuple[Atom, int]


@dataclass(frozen=True)
class Summand:
    multiplicity: int
    factors: tuple[Factor, ...]

    def key(self) -> tuple:
        return tuple((t, a.sort_key()) for a, t in self.factors)

    def flipped(self) -> "Summand":
        return Summand(self.multiplicity, tuple((a.flipped(), t) for a, t in self.factors))

    def body(self) -> str:
        if not self.factors:
            return "T(0,0)"
        parts = []
        for a, t in self.factors:
            parts.append(str(a) if t == 0 else f"{a}^[{t}]")
        return " ⊗ ".join(parts)

    def __str__(self) -> str:
        body = self.body()
        if self.multiplicity == 1:
            return body
        if len(self.factors) > 1:
            body = f"({body})"
        return f"{self.multiplicity}{body}"

    def to_json(self) -> dict:
        return {
            "mult": self.multiplicity,
            "factors": [dict(a.to_json(), twist=t) for a, t in self.factors],
        }


@dataclass
class Decomposition:
    p: int
    lam: Weight
    mu: Weight
    summands: list[Summand]
    indecomposable_flags: list[bool] = field(default_factory=list)
    errata: list[str] = field(default_factory=list)
    verified: bool = False

    def flipped(self) -> "Decomposition":
        pairs = sorted(
            ((s.flipped(), f) for s, f in zip(self.summands, self.indecomposable_flags)),
            key=lambda t: t[0].key(),
        )
        return Decomposition(
            self.p, self.lam.flipped(), self.mu.flipped(),
            [s for s, _ in pairs], [f for _, f in pairs], list(self.errata), self.verified,
        )

    def same_summands(self, other: "Decomposition") -> bool:
        return self.summands == other.summands

    def total_dimension(self) -> int:
        return sum(s.multiplicity * summand_character(self.p, s.factors).dim() for s in self.summands)

    def __str__(self) -> str:
        return " ⊕ ".join(str(s) for s in self.summands)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "lambda": list(self.lam),
            "mu": list(self.mu),
            "summands": [s.to_json() for s in self.summands],
            "indecomposable_flags": list(self.indecomposable_flags),
            "verified": self.verified,
            "errata": list(self.errata),
        }


KNOWN_ERRATA: dict[tuple[int, frozenset], str] = {
    (2, frozenset({Weight(7, 2), Weight(6, 3)})): (
        "printed coefficient 2 on T(6,2)^[1] is inconsistent with the total dimension 5184; "
        "the character identity forces coefficient 1"
    ),
    (3, frozenset({Weight(5, 4), Weight(4, 5)})): (
        "the printed summand T(7,7) should read T(1,1) ⊗ T(2,2)^[1]: "
        "dim 243, whereas dim T(7,7) = dim T(4,4) ⊗ T(1,1)^[1] = 2916"
    ),
}


def errata_for(p: int, lam: Weight, mu: Weight) -> list[str]:
    note = KNOWN_ERRATA.get((p, frozenset({as_weight(lam), as_weight(mu)})))
    return [note] if note else []


# ---------------------------------------------------------------------------
# rewriting

def _is_tilting_like(p: int, atom: Atom) -> bool:
    return atom.kind == "T" or (atom.kind == "L" and atom.wt == steinberg_weight(p))


def canonicalize(p: int, s: Summand) -> Summand:
    """Elide trivial factors and merge consecutive tilting runs by the twisted tensor product theorem."""
    facs = sorted(((a, t) for a, t in s.factors if not a.is_identity), key=lambda f: f[1])
    out: list[Factor] = []
    i = 0
    while i < len(facs):
        atom, start = facs[i]
        if not _is_tilting_like(p, atom):
            out.append((atom, start))
            i += 1
            continue
        j = i
        while (
            j + 1 < len(facs)
            and in_steinberg_range(p, facs[j][0].wt)
            and _is_tilting_like(p, facs[j + 1][0])
            and facs[j + 1][1] == facs[j][1] + 1
        ):
            j += 1
        if j == i:
            if atom.kind == "L":
                atom = Atom("T", atom.wt)
            out.append((atom, start))
        else:
            a = sum(facs[k][0].wt[0] * p ** (facs[k][1] - start) for k in range(i, j + 1))
            b = sum(facs[k][0].wt[1] * p ** (facs[k][1] - start) for k in range(i, j + 1))
            out.append((Atom("T", Weight(a, b)), start))
        i = j + 1
    return Summand(s.multiplicity, tuple(out))


_SPLIT_PUSH = {Atom.T(5, 2): Atom.T(1, 0), Atom.T(2, 5): Atom.T(0, 1)}


M_PRODUCT_NOTE = (
    "L(1,0) ⊗ M splits as T(1,3) ⊕ T(1,0) ⊕ T(4,0) (and L(0,1) ⊗ M as T(3,1) ⊕ T(0,1) ⊕ T(0,4)); "
    "the printed T(3,1), T(1,3) are swapped relative to the characters"
)


def resplit(p: int, s: Summand, notes: set | None = None) -> list[Summand]:
    """Rewrite T(5,2), T(2,5) factors as L(2,2) with a multiplier pushed one degree up.

    When a pushed multiplier meets M, ``M_PRODUCT_NOTE`` is added to ``notes``.
    """
    if p != 3:
        raise ValueError("resplitting applies only for p = 3")
    steinberg = Atom.L(2, 2)
    results: list[Summand] = []
    stack = [(s.multiplicity, {t: a for a, t in s.factors if not a.is_identity}, 0, None)]
    while stack:
        mult, facs, d, pending = stack.pop()
        if pending is None:
            todo = [k for k in sorted(facs) if k >= d and facs[k] in _SPLIT_PUSH]
            if not todo:
                results.append(Summand(mult, tuple((facs[k], k) for k in sorted(facs))))
                continue
            k = todo[0]
            g = dict(facs)
            g[k] = steinberg
            stack.append((mult, g, k + 1, _SPLIT_PUSH[facs[k]]))
            continue
        here = facs.get(d)
        if here is None:
            g = dict(facs)
            g[d] = pending
            stack.append((mult, g, d + 1, None))
            continue
        if here == M and notes is not None:
            notes.add(M_PRODUCT_NOTE)
        for k, out in reversed(multiplier_product(p, pending, here)):
            g = dict(facs)
            if isinstance(out, Factored):
                g[d] = out.base
                stack.append((mult * k, g, d + 1, out.pushed))
            else:
                if out.is_identity:
                    del g[d]
                else:
                    g[d] = out
                stack.append((mult * k, g, d + 1, None))
    return results


# ---------------------------------------------------------------------------
# pipeline

def _collect(pairs: list[tuple[Summand, bool]]) -> tuple[list[Summand], list[bool]]:
    acc: dict[tuple[Factor, ...], list] = {}
    for s, flag in pairs:
        entry = acc.setdefault(s.factors, [0, True])
        entry[0] += s.multiplicity
        entry[1] = entry[1] and flag
    items = sorted(acc.items(), key=lambda kv: Summand(1, kv[0]).key())
    return [Summand(m, f) for f, (m, _) in items], [flag for _, (_, flag) in items]


def _indecomposable_flag(p: int, s: Summand) -> bool:
    facs = [a for a, _ in s.factors if not a.is_identity]
    if len(facs) <= 1:
        return True
    return all(atom_metadata(p, a).simple_restricted_socle for a in facs)


def tensor_decompose(p: int, lam: Weight, mu: Weight, canonical: bool = True) -> Decomposition:
    """Indecomposable summands of L(lam) (x) L(mu), collected with multiplicities."""
    _require_prime(p)
    lam, mu = as_weight(lam), as_weight(mu)
    for w in (lam, mu):
        if not is_dominant(w):
            raise WeightError(f"weight {tuple(w)} is not dominant")
    dl, dm = steinberg_digits(p, lam), steinberg_digits(p, mu)
    depth = max(len(dl), len(dm))
    per_degree = [restricted_decompose(p, dl.get(j), dm.get(j)) for j in range(depth)]
    raw: list[Summand] = []
    for combo in itertools.product(*per_degree):
        mult = 1
        facs = []
        for j, (k, atom) in enumerate(combo):
            mult *= k
            if not atom.is_identity:
                facs.append((atom, j))
        raw.append(Summand(mult, tuple(facs)))
    notes: set[str] = set()
    if p == 3:
        raw = [r for s in raw for r in resplit(p, s, notes)]
    flagged = [(s, _indecomposable_flag(p, s)) for s in raw]
    if canonical:
        flagged = [(canonicalize(p, s), f) for s, f in flagged]
    summands, flags = _collect(flagged)
    return Decomposition(p, lam, mu, summands, flags, errata_for(p, lam, mu) + sorted(notes))


@lru_cache(maxsize=200_000)
def summand_character(p: int, factors: tuple[Factor, ...]) -> Character:
    total = Character({ZERO: 1})
    for atom, t in factors:
        total = multiply(total, frobenius_twist(family_character(p, atom), t, p))
    return total


def decomposition_character(dec: Decomposition) -> Character:
    total = Character()
    for s in dec.summands:
        total = total + s.multiplicity * summand_character(dec.p, s.factors)
    return total


def product_character(p: int, lam: Weight, mu: Weight) -> Character:
    return multiply(simple_character(p, lam), simple_character(p, mu))


def verify_decomposition(dec: Decomposition) -> bool:
    """Exact comparison of both sides of the character identity; records the verdict."""
    dec.verified = decomposition_character(dec) == product_character(dec.p, dec.lam, dec.mu)
    return dec.verified


# ---------------------------------------------------------------------------
# closed-form digit predicates

_INDECOMPOSABLE_PAIRS = {
    2: [((1, 0), (1, 0)), ((0, 1), (0, 1)), ((1, 0), (1, 1)), ((0, 1), (1, 1))],
    3: [((1, 0), (0, 1)), ((1, 0), (2, 0)), ((1, 0), (2, 2)), ((0, 1), (0, 2)), ((0, 1), (2, 2))],
}


def _pair_in_list(p: int, x: Weight, y: Weight) -> bool:
    if x == ZERO or y == ZERO:
        return True
    return any({x, y} == {Weight(*u), Weight(*v)} for u, v in _INDECOMPOSABLE_PAIRS[p])


def is_indecomposable_pair(p: int, lam: Weight, mu: Weight) -> bool:
    dl, dm = steinberg_digits(p, lam), steinberg_digits(p, mu)
    return all(_pair_in_list(p, dl.get(j), dm.get(j)) for j in range(max(len(dl), len(dm))))


def is_tilting_pair(p: int, lam: Weight, mu: Weight) -> bool:
    dl, dm = steinberg_digits(p, lam), steinberg_digits(p, mu)
    m = max(len(dl), len(dm)) - 1
    st = steinberg_weight(p)
    for j in range(m):
        x, y = dl.get(j), dm.get(j)
        if not ((x in MINUSCULE and y == st) or (y in MINUSCULE and x == st)):
            return False
    if m < 0:
        return True
    x, y = dl.get(m), dm.get(m)
    if not _pair_in_list(p, x, y):
        return False
    # the top-degree product must itself be tilting: L(1,1) is not, for p = 3
    return not (p == 3 and {x, y} == {ZERO, Weight(1, 1)})


# ---------------------------------------------------------------------------
# parsing rendered decompositions

_FACTOR_RE = re.compile(r"(?:([TL])\((\d+),(\d+)\)|M)(?:\^\[(\d+)\])?")
_SUMMAND_RE = re.compile(r"(\d*)(.+)")


def parse_summands(text: str) -> list[Summand]:
    """Read summands written as in ``str(Decomposition)``, e.g. ``2(T(2,2) ⊗ M^[1])``.

    Spaces are ignored and "T(0,0)" factors are dropped.  The result is collected
    and put in canonical order, so two renderings that differ only in summand
    order parse to the same list.
    """
    flat = re.sub(r"\s+", "", text).replace("(+)", "⊕").replace("(x)", "⊗")
    pairs = []
    for chunk in flat.split("⊕"):
        m = _SUMMAND_RE.fullmatch(chunk)
        if not chunk or not m:
            raise ValueError(f"cannot parse summand {chunk!r}")
        mult, body = int(m.group(1) or 1), chunk[len(m.group(1)):]
        if body.startswith("(") and body.endswith(")") and "⊗" in body:
            body = body[1:-1]
        factors = []
        for piece in body.split("⊗"):
            f = _FACTOR_RE.fullmatch(piece)
            if not f:
                raise ValueError(f"cannot parse factor {piece!r}")
            atom = M if f.group(1) is None else Atom(f.group(1), Weight(int(f.group(2)), int(f.group(3))))
            if not atom.is_identity:
                factors.append((atom, int(f.group(4) or 0)))
        pairs.append((Summand(mult, tuple(sorted(factors, key=lambda x: x[1]))), True))
    return _collect(pairs)[0]
