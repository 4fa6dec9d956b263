"""Formal characters of SL3-modules: Weyl, simple and tilting characters."""

from __future__ import annotations

import json
import os
import threading
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .weights import (
    POSITIVE_ROOTS,
    RHO,
    ZERO,
    Weight,
    WeightError,
    as_weight,
    dominant_conjugate,
    is_dominant,
    is_restricted,
    steinberg_digits,
    tilting_digits,
    weight_order_key,
    weyl_orbit,
    _require_prime,
)


class NonInvariantInput(ValueError):
    """The character handed to the Weyl-basis expansion is not W-invariant."""


class UnknownTiltingCharacter(LookupError):
    """No stored or derivable character for the requested tilting module."""

    def __init__(self, p: int, weight: Weight, detail: str = ""):
        self.p = p
        self.weight = weight
        msg = f"tilting character of T{tuple(weight)} at p={p} is not known"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class Character:
    """Finite sparse map Weight -> int; zero coefficients are never stored."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coeffs: Mapping | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c: dict[Weight, int] = {}
        for w, m in items:
            if m:
                w = as_weight(w)
                c[w] = c.get(w, 0) + int(m)
        self._c = {w: m for w, m in c.items() if m}
        self._hash = None

    @classmethod
    def _raw(cls, d: dict) -> "Character":
        obj = cls.__new__(cls)
        obj._c = d
        obj._hash = None
        return obj

    def __getitem__(self, w) -> int:
        return self._c.get(w, 0)

    def __iter__(self):
        return iter(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def items(self):
        return self._c.items()

    def support(self) -> set[Weight]:
        return set(self._c)

    def dim(self) -> int:
        return sum(self._c.values())

    def is_zero(self) -> bool:
        return not self._c

    def __eq__(self, other) -> bool:
        if isinstance(other, Character):
            return self._c == other._c
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._c.items()))
        return self._hash

    def __add__(self, other: "Character") -> "Character":
        d = dict(self._c)
        for w, m in other._c.items():
            v = d.get(w, 0) + m
            if v:
                d[w] = v
            else:
                d.pop(w, None)
        return Character._raw(d)

    def __neg__(self) -> "Character":
        return Character._raw({w: -m for w, m in self._c.items()})

    def __sub__(self, other: "Character") -> "Character":
        return self + (-other)

    def __rmul__(self, k: int) -> "Character":
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return Character()
        return Character._raw({w: k * m for w, m in self._c.items()})

    def __mul__(self, other):
        if isinstance(other, Character):
            return multiply(self, other)
        return self.__rmul__(other)

    def flipped(self) -> "Character":
        return Character._raw({w.flipped(): m for w, m in self._c.items()})

    def is_weyl_invariant(self) -> bool:
        return all(self[v] == m for w, m in self._c.items() for v in weyl_orbit(w))

    def dominant_part(self) -> dict[Weight, int]:
        return {w: m for w, m in self._c.items() if is_dominant(w)}

    def __repr__(self) -> str:
        body = ", ".join(f"{tuple(w)}: {m}" for w, m in sorted(self._c.items()))
        return f"Character({{{body}}})"


class WeylBasisExpr:
    """Integer combination of Weyl characters, keyed by dominant weight."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Weight, int] = {}
        for w, m in items:
            w = as_weight(w)
            acc[w] = acc.get(w, 0) + int(m)
        self.terms = {w: m for w, m in acc.items() if m}

    def __getitem__(self, w) -> int:
        return self.terms.get(as_weight(w), 0)

    def __eq__(self, other) -> bool:
        if isinstance(other, WeylBasisExpr):
            return self.terms == other.terms
        if isinstance(other, Mapping):
            return self.terms == WeylBasisExpr(other).terms
        return NotImplemented

    def items(self):
        return self.terms.items()

    def sorted_terms(self) -> list[tuple[Weight, int]]:
        return sorted(self.terms.items(), key=lambda t: weight_order_key(t[0]), reverse=True)

    def character(self) -> Character:
        total = Character()
        for w, m in self.terms.items():
            total = total + m * weyl_character(w)
        return total

    def flipped(self) -> "WeylBasisExpr":
        return WeylBasisExpr({w.flipped(): m for w, m in self.terms.items()})

    def __repr__(self) -> str:
        body = " + ".join(f"{m}*chi{tuple(w)}" for w, m in self.sorted_terms())
        return f"WeylBasisExpr({body or '0'})"


def _form(x: Weight, y: Weight) -> int:
    """Three times the invariant form, in fundamental-weight coordinates."""
    return 2 * x[0] * y[0] + x[0] * y[1] + x[1] * y[0] + 2 * x[1] * y[1]


@lru_cache(maxsize=None)
def _dominant_multiplicities(lam: Weight) -> dict[Weight, int]:
    """Freudenthal's recursion for the dominant weights of Delta(lam)."""
    lr = lam + RHO
    norm = _form(lr, lr)
    # dominant mu = lam - n1*alpha1 - n2*alpha2, processed by increasing height n1+n2
    candidates = []
    n_max = lam[0] + lam[1] + 2
    for n1 in range(0, 2 * n_max):
        for n2 in range(0, 2 * n_max):
            mu = Weight(lam[0] - 2 * n1 + n2, lam[1] + n1 - 2 * n2)
            if is_dominant(mu):
                candidates.append((n1 + n2, mu))
    candidates.sort()
    mult: dict[Weight, int] = {lam: 1}

    def m(nu: Weight) -> int:
        return mult.get(dominant_conjugate(nu), 0)

    for _, mu in candidates:
        if mu == lam:
            continue
        total = 0
        for alpha in POSITIVE_ROOTS:
            k = 1
            while True:
                nu = Weight(mu[0] + k * alpha[0], mu[1] + k * alpha[1])
                if weight_order_key(dominant_conjugate(nu))[0] > lam[0] + lam[1]:
                    break
                mv = m(nu)
                if mv:
                    total += _form(nu, alpha) * mv
                k += 1
        denom = norm - _form(mu + RHO, mu + RHO)
        value = Fraction(2 * total, denom)
        if value.denominator != 1:
            raise ArithmeticError(f"non-integral multiplicity at {mu}")
        if value:
            mult[mu] = int(value)
    return mult


@lru_cache(maxsize=None)
def weyl_character(lam: Weight) -> Character:
    """Character of the Weyl module Delta(lam)."""
    lam = as_weight(lam)
    if not is_dominant(lam):
        raise WeightError(f"weight {tuple(lam)} is not dominant")
    d: dict[Weight, int] = {}
    for mu, m in _dominant_multiplicities(lam).items():
        for nu in weyl_orbit(mu):
            d[nu] = m
    return Character._raw(d)


def weyl_dimension(lam: Weight) -> int:
    a, b = lam
    return (a + 1) * (b + 1) * (a + b + 2) // 2


_DENSE_THRESHOLD = 4096


def _multiply_dense(c1: Character, c2: Character) -> Character:
    if len(c1) > len(c2):
        c1, c2 = c2, c1
    w2 = np.array(list(c2._c.keys()), dtype=np.int64)
    m2 = np.array(list(c2._c.values()), dtype=np.int64)
    lo = w2.min(axis=0)
    span = w2.max(axis=0) - lo + 1
    dense = np.zeros(tuple(span), dtype=np.int64)
    dense[w2[:, 0] - lo[0], w2[:, 1] - lo[1]] = m2
    w1 = np.array(list(c1._c.keys()), dtype=np.int64)
    lo1 = w1.min(axis=0)
    span1 = w1.max(axis=0) - lo1 + 1
    out = np.zeros(tuple(span + span1 - 1), dtype=np.int64)
    for (a, b), m in c1._c.items():
        i, j = a - lo1[0], b - lo1[1]
        out[i : i + span[0], j : j + span[1]] += m * dense
    nz = np.nonzero(out)
    base = lo + lo1
    d = {
        Weight(int(i) + int(base[0]), int(j) + int(base[1])): int(out[i, j])
        for i, j in zip(*nz)
    }
    return Character._raw(d)


def multiply(c1: Character, c2: Character) -> Character:
    """Convolution of weight multiplicities (the character of a tensor product)."""
    if not c1._c or not c2._c:
        return Character()
    if len(c1) * len(c2) > _DENSE_THRESHOLD:
        return _multiply_dense(c1, c2)
    d: dict[Weight, int] = {}
    for (a1, b1), m1 in c1._c.items():
        for (a2, b2), m2 in c2._c.items():
            w = Weight(a1 + a2, b1 + b2)
            d[w] = d.get(w, 0) + m1 * m2
    return Character._raw({w: m for w, m in d.items() if m})


def frobenius_twist(c: Character, j: int, p: int) -> Character:
    if j == 0:
        return c
    s = p**j
    return Character._raw({Weight(s * w[0], s * w[1]): m for w, m in c._c.items()})


def into_weyl_basis(c: Character) -> WeylBasisExpr:
    """Expand a W-invariant character in the Weyl-character basis."""
    rest = dict(c._c)
    terms: dict[Weight, int] = {}
    while rest:
        top = max(rest, key=weight_order_key)
        if not is_dominant(top):
            raise NonInvariantInput(f"maximal remainder weight {tuple(top)} is not dominant")
        m = rest[top]
        terms[top] = m
        for w, k in weyl_character(top)._c.items():
            v = rest.get(w, 0) - m * k
            if v:
                rest[w] = v
            else:
                rest.pop(w, None)
    return WeylBasisExpr(terms)


# ---------------------------------------------------------------------------
# simple characters


def _restricted_simple(p: int, lam: Weight) -> Character:
    if p == 3 and lam == (1, 1):
        return weyl_character(Weight(1, 1)) - weyl_character(ZERO)
    return weyl_character(lam)


@lru_cache(maxsize=None)
def simple_character(p: int, lam: Weight) -> Character:
    """ch L(lam) via Steinberg's tensor product theorem."""
    _require_prime(p)
    lam = as_weight(lam)
    if not is_dominant(lam):
        raise WeightError(f"weight {tuple(lam)} is not dominant")
    if is_restricted(p, lam):
        return _restricted_simple(p, lam)
    low = Weight(lam[0] % p, lam[1] % p)
    high = Weight(lam[0] // p, lam[1] // p)
    return multiply(_restricted_simple(p, low), frobenius_twist(simple_character(p, high), 1, p))


def into_simple_basis(p: int, c: Character) -> dict[Weight, int]:
    """Composition multiplicities [c : L(nu)] of a W-invariant character."""
    rest = dict(c.dominant_part())
    terms: dict[Weight, int] = {}
    while rest:
        top = max(rest, key=weight_order_key)
        m = rest[top]
        terms[top] = m
        for w, k in simple_character(p, top).dominant_part().items():
            v = rest.get(w, 0) - m * k
            if v:
                rest[w] = v
            else:
                rest.pop(w, None)
    return terms


def restricted_simple_is_tilting(p: int, lam: Weight) -> bool:
    return not (p == 3 and tuple(lam) == (1, 1))


# ---------------------------------------------------------------------------
# tilting characters

def _with_mates(table: dict[tuple[int, int], dict]) -> dict[Weight, WeylBasisExpr]:
    out: dict[Weight, WeylBasisExpr] = {}
    for w, terms in table.items():
        expr = WeylBasisExpr(terms)
        out[Weight(*w)] = expr
        out[Weight(w[1], w[0])] = expr.flipped()
    return out


TILTING_TABLE: dict[int, dict[Weight, WeylBasisExpr]] = {
    2: _with_mates({
        (0, 0): {(0, 0): 1},
        (1, 0): {(1, 0): 1},
        (1, 1): {(1, 1): 1},
        (2, 0): {(2, 0): 1, (0, 1): 1},
        (2, 1): {(2, 1): 1, (0, 2): 1, (1, 0): 1},
        (2, 2): {(2, 2): 1, (3, 0): 1, (0, 3): 1, (0, 0): 1},
    }),
    3: _with_mates({
        (0, 0): {(0, 0): 1},
        (1, 0): {(1, 0): 1},
        (2, 0): {(2, 0): 1},
        (2, 1): {(2, 1): 1},
        (2, 2): {(2, 2): 1},
        (5, 2): {(5, 2): 1},
        (1, 1): {(1, 1): 1, (0, 0): 1},
        (3, 0): {(3, 0): 1, (1, 1): 1},
        (4, 0): {(4, 0): 1, (0, 2): 1},
        (3, 1): {(3, 1): 1, (1, 2): 1},
        (5, 0): {(5, 0): 1, (0, 1): 1},
        (3, 2): {(3, 2): 1, (1, 3): 1, (2, 1): 1},
        (4, 1): {(4, 1): 1, (3, 0): 1, (0, 3): 1, (1, 1): 1},
        (4, 2): {(4, 2): 1, (0, 4): 1, (2, 0): 1},
        (3, 3): {(3, 3): 1, (4, 1): 1, (1, 4): 1, (3, 0): 1, (0, 3): 1, (1, 1): 1},
        (4, 3): {(4, 3): 1, (5, 1): 1, (0, 5): 1, (1, 0): 1},
        (4, 4): {
            (4, 4): 1, (6, 0): 1, (0, 6): 1, (3, 3): 1,
            (4, 1): 1, (1, 4): 1, (1, 1): 1, (0, 0): 1,
        },
    }),
}

# weights whose characters are fixed by convention: target -> (left factor, right factor)
CONVENTION_SEEDS: dict[int, dict[Weight, tuple[Weight, Weight]]] = {
    3: {
        Weight(6, 0): (Weight(1, 0), Weight(5, 0)),
        Weight(5, 1): (Weight(1, 0), Weight(4, 1)),
    }
}

_convention_lock = threading.Lock()
_convention_store: dict[tuple[int, Weight], WeylBasisExpr] = {}


def _nonnegative(expr: Mapping[Weight, int]) -> bool:
    return all(m >= 0 for m in expr.values())


def _derive_by_convention(p: int, target: Weight) -> WeylBasisExpr:
    """Product of the seed factors minus a greedy (largest dimension first)
    maximal multiset of table tilting characters, keeping the target term."""
    left, right = CONVENTION_SEEDS[p][target]
    prod = multiply(tilting_character(p, left), tilting_character(p, right))
    rest = dict(into_weyl_basis(prod).terms)
    known = sorted(
        (w for w in TILTING_TABLE[p] if w != target),
        key=lambda w: (-tilting_character(p, w).dim(), weight_order_key(w)),
    )
    for w in known:
        expr = TILTING_TABLE[p][w].terms
        if w not in rest:
            continue
        while True:
            trial = dict(rest)
            for v, m in expr.items():
                trial[v] = trial.get(v, 0) - m
            trial = {v: m for v, m in trial.items() if m}
            if not _nonnegative(trial) or trial.get(target, 0) != 1:
                break
            rest = trial
    return WeylBasisExpr(rest)


def convention_expr(p: int, target: Weight) -> WeylBasisExpr:
    key = (p, Weight(*target))
    with _convention_lock:
        if key not in _convention_store:
            cached = _cache_lookup(p, key[1])
            _convention_store[key] = cached if cached is not None else _derive_by_convention(p, key[1])
            _cache_append(p, key[1], _convention_store[key], "derived-by-convention")
        return _convention_store[key]


def _stored_tilting_expr(p: int, nu: Weight) -> tuple[WeylBasisExpr, str] | None:
    if nu in TILTING_TABLE.get(p, {}):
        return TILTING_TABLE[p][nu], "paper-table"
    seeds = CONVENTION_SEEDS.get(p, {})
    if nu in seeds:
        return convention_expr(p, nu), "derived-by-convention"
    if nu.flipped() in seeds:
        return convention_expr(p, nu.flipped()).flipped(), "derived-by-convention"
    return None


def tilting_provenance(p: int, nu: Weight) -> str:
    nu = as_weight(nu)
    stored = _stored_tilting_expr(p, nu)
    if stored is not None:
        return stored[1]
    tilting_character(p, nu)
    return "donkin-digits"


def missing_provenance(p: int, nu: Weight) -> str:
    """Explain which stored sources were consulted for an unavailable character."""
    seeds = ", ".join(f"T{tuple(w)}" for w in CONVENTION_SEEDS.get(p, {}))
    return f"searched table (p={p}) and convention seeds [{seeds}] for T{tuple(nu)}"


@lru_cache(maxsize=None)
def tilting_character(p: int, nu: Weight) -> Character:
    """ch T(nu) from the stored tables or the twisted tensor product of digit tiltings."""
    _require_prime(p)
    nu = as_weight(nu)
    if not is_dominant(nu):
        raise WeightError(f"weight {tuple(nu)} is not dominant")
    stored = _stored_tilting_expr(p, nu)
    if stored is not None:
        return stored[0].character()
    digits = tilting_digits(p, nu)
    if len(digits) <= 1:
        raise UnknownTiltingCharacter(p, nu, "not in the stored table")
    total = Character({ZERO: 1})
    for j, d in enumerate(digits):
        stored = _stored_tilting_expr(p, d)
        if stored is None:
            raise UnknownTiltingCharacter(p, nu, f"digit {tuple(d)} has no stored character")
        total = multiply(total, frobenius_twist(stored[0].character(), j, p))
    return total


def tilting_weyl_expr(p: int, nu: Weight) -> WeylBasisExpr:
    return into_weyl_basis(tilting_character(p, nu))


def donkin_restricted_tilting_char(p: int, lam: Weight) -> Character:
    """ch T((p-1)rho + lam) = ch L((p-1)rho) times the orbit sum of lam."""
    lam = as_weight(lam)
    if not is_dominant(lam):
        raise WeightError(f"weight {tuple(lam)} is not dominant")
    if lam[0] + lam[1] > p:
        raise WeightError(f"Donkin formula needs a+b <= p, got {tuple(lam)}")
    orbit_sum = Character({w: 1 for w in weyl_orbit(lam)})
    return multiply(simple_character(p, Weight(p - 1, p - 1)), orbit_sum)


def donkin_delta_multiplicities(p: int, lam: Weight, mu: Weight, nu: Weight) -> int:
    """(T((p-1)rho + lam + p mu) : nabla(nu)) via the sum over N(nu)."""
    lam, mu, nu = as_weight(lam), as_weight(mu), as_weight(nu)
    if lam[0] + lam[1] > p:
        raise WeightError(f"Donkin formula needs a+b <= p, got {tuple(lam)}")
    inner = tilting_weyl_expr(p, mu)
    shifted = nu + RHO
    total = 0
    for x in weyl_orbit(lam):
        # nu + rho - p(xi + rho) = x  =>  xi = (nu + rho - x)/p - rho
        da, db = shifted[0] - x[0], shifted[1] - x[1]
        if da % p or db % p:
            continue
        xi = Weight(da // p - 1, db // p - 1)
        if is_dominant(xi):
            total += inner[xi]
    return total


# ---------------------------------------------------------------------------
# derived-character cache

DEFAULT_CACHE_PATH = Path.home() / ".cache" / "sl3tilt" / "tilting_cache.json"
CACHE_ENV_VAR = "SL3TILT_CACHE"

_cache_state = {"enabled": False, "path": None}


def configure_cache(enabled: bool, path: str | os.PathLike | None = None) -> None:
    """Enable or disable the on-disk cache of derived tilting characters."""
    _cache_state["enabled"] = enabled
    if path is None:
        path = os.environ.get(CACHE_ENV_VAR, str(DEFAULT_CACHE_PATH))
    _cache_state["path"] = Path(path)


def _cache_records() -> list[dict]:
    path = _cache_state["path"]
    if not _cache_state["enabled"] or path is None or not path.exists():
        return []
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return []
    return data if isinstance(data, list) else []


def _cache_lookup(p: int, nu: Weight) -> WeylBasisExpr | None:
    for rec in _cache_records():
        if rec.get("p") == p and tuple(rec.get("weight", ())) == tuple(nu):
            return WeylBasisExpr({tuple(w): m for w, m in rec["weyl_multiplicities"]})
    return None


def cache_record(p: int, nu: Weight, expr: WeylBasisExpr, provenance: str) -> dict:
    return {
        "p": p,
        "weight": [nu[0], nu[1]],
        "weyl_multiplicities": [[[w[0], w[1]], m] for w, m in expr.sorted_terms()],
        "provenance": provenance,
    }


def _cache_append(p: int, nu: Weight, expr: WeylBasisExpr, provenance: str) -> None:
    path = _cache_state["path"]
    if not _cache_state["enabled"] or path is None:
        return
    records = _cache_records()
    if any(r.get("p") == p and tuple(r.get("weight", ())) == tuple(nu) for r in records):
        return
    records.append(cache_record(p, nu, expr, provenance))
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(records, indent=1))
    tmp.replace(path)
