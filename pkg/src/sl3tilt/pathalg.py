"""Finite-dimensional path algebras with relations and their right modules.

Paths compose left to right: for arrows x: i -> j and y: j -> k the path
``x y`` runs from i to k.  A right module stores one vector space per vertex
and, for each arrow x: i -> j, a matrix of shape dim(i) x dim(j) acting on
row vectors.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from sympy.polys.matrices import DomainMatrix

from .linalg import (
    Subspace,
    block_diag,
    eye,
    field_domain,
    hstack,
    is_invertible,
    is_zero,
    left_kernel,
    matrix,
    mul,
    rows_of,
    vstack,
    zeros,
)

PATH_LENGTH_BOUND = 12


class NonTerminating(RuntimeError):
    """The relations do not cut the path algebra down within the length bound."""


class PresentationNotSelfDual(ValueError):
    """The relations are not preserved by reversing paths and swapping dashed arrows."""


class NonConvergence(RuntimeError):
    """The universal-extension loop did not stabilise."""


class ShapeMismatch(ValueError):
    """A representation does not have the shape an operation requires."""


_GREEK = {"alpha": "α", "beta": "β", "gamma": "γ", "delta": "δ"}


def arrow_symbol(name: str) -> str:
    base = name.rstrip("'")
    return _GREEK.get(base, base) + "′" * (len(name) - len(base))


# ---------------------------------------------------------------------------
# quivers, paths, presentations

@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[tuple[str, str, str], ...]

    def __post_init__(self):
        seen = set()
        for name, s, t in self.arrows:
            if s not in self.vertices or t not in self.vertices:
                raise ValueError(f"arrow {name} has an unknown endpoint")
            if (s, t) in seen:
                raise ValueError(f"multiple arrows {s} -> {t}")
            seen.add((s, t))
        if len({a[0] for a in self.arrows}) != len(self.arrows):
            raise ValueError("arrow names must be distinct")

    @cached_property
    def _ends(self) -> dict[str, tuple[str, str]]:
        return {name: (s, t) for name, s, t in self.arrows}

    def source(self, arrow: str) -> str:
        return self._ends[arrow][0]

    def target(self, arrow: str) -> str:
        return self._ends[arrow][1]

    def arrows_from(self, v: str) -> list[str]:
        return [name for name, s, _ in self.arrows if s == v]

    def arrows_into(self, v: str) -> list[str]:
        return [name for name, _, t in self.arrows if t == v]

    def arrow_rank(self, arrow: str) -> int:
        return [a[0] for a in self.arrows].index(arrow)


@dataclass(frozen=True)
class Path:
    source: str
    target: str
    arrows: tuple[str, ...] = ()

    @property
    def length(self) -> int:
        return len(self.arrows)

    def __str__(self) -> str:
        if not self.arrows:
            return f"e{self.source}"
        return "".join(arrow_symbol(a) for a in self.arrows)


def make_path(quiver: Quiver, arrows: Sequence[str], vertex: str | None = None) -> Path:
    arrows = tuple(arrows)
    if not arrows:
        if vertex is None:
            raise ValueError("a trivial path needs its vertex")
        return Path(vertex, vertex)
    for x, y in zip(arrows, arrows[1:]):
        if quiver.target(x) != quiver.source(y):
            raise ValueError(f"arrows {x} and {y} do not compose")
    return Path(quiver.source(arrows[0]), quiver.target(arrows[-1]), arrows)


def concat(quiver: Quiver, p: Path, q: Path) -> Path | None:
    if p.target != q.source:
        return None
    return Path(p.source, q.target, p.arrows + q.arrows)


Relation = list[tuple[int, tuple[str, ...]]]


@dataclass
class AlgebraPresentation:
    quiver: Quiver
    relations: list[Relation]
    field: str = "QQ"
    name: str = ""
    dual_pairs: tuple[tuple[str, str], ...] | None = None

    def __post_init__(self):
        for rel in self.relations:
            ends = {(make_path(self.quiver, p).source, make_path(self.quiver, p).target) for _, p in rel}
            if len(ends) != 1:
                raise ValueError(f"relation {rel} mixes paths with different endpoints")

    @property
    def domain(self):
        return field_domain(self.field)

    def duality(self) -> dict[str, str]:
        """The arrow involution used by the contravariant dual."""
        pairs = self.dual_pairs
        if pairs is None:
            names = [a[0] for a in self.quiver.arrows]
            pairs = tuple((n, n + "'") for n in names if not n.endswith("'") and n + "'" in names)
        sigma = {}
        for x, y in pairs:
            sigma[x], sigma[y] = y, x
        return sigma

    def with_field(self, field: str) -> "AlgebraPresentation":
        return AlgebraPresentation(self.quiver, self.relations, field, self.name, self.dual_pairs)

    @classmethod
    def from_json(cls, data: dict | str) -> "AlgebraPresentation":
        if isinstance(data, str):
            data = json.loads(data)
        quiver = Quiver(tuple(data["vertices"]), tuple(tuple(a) for a in data["arrows"]))
        rels = [[(int(t["coeff"]), tuple(t["path"])) for t in rel] for rel in data["relations"]]
        pairs = data.get("dual_pairs")
        return cls(quiver, rels, str(data.get("field", "QQ")), data.get("name", ""),
                   tuple(tuple(p) for p in pairs) if pairs else None)

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "vertices": list(self.quiver.vertices),
            "arrows": [list(a) for a in self.quiver.arrows],
            "relations": [[{"coeff": c, "path": list(p)} for c, p in rel] for rel in self.relations],
            "field": self.field,
        }
        if self.dual_pairs:
            out["dual_pairs"] = [list(p) for p in self.dual_pairs]
        return out


_A_QUIVER = Quiver(
    ("10", "05", "51", "43"),
    (
        ("alpha", "10", "05"), ("alpha'", "05", "10"),
        ("beta", "10", "51"), ("beta'", "51", "10"),
        ("gamma", "10", "43"), ("gamma'", "43", "10"),
    ),
)

_COMMON = [
    [(1, ("alpha'", "alpha"))],
    [(1, ("alpha'", "beta"))],
    [(1, ("beta'", "alpha"))],
    [(1, ("gamma'", "gamma"))],
    [(1, ("gamma'", "alpha", "alpha'")), (-1, ("gamma'", "beta", "beta'"))],
    [(1, ("alpha", "alpha'", "gamma")), (-1, ("beta", "beta'", "gamma"))],
    [(1, ("gamma'", "alpha", "alpha'", "gamma"))],
]


def builtin_presentation(name: str, field: str = "QQ") -> AlgebraPresentation:
    """The named presentations "A-appendix", "A-prime" and "B-subalgebra"."""
    if name == "A-appendix":
        rels = _COMMON[:3] + [[(1, ("beta'", "beta")), (-1, ("beta'", "gamma", "gamma'", "beta"))]] + _COMMON[3:]
        return AlgebraPresentation(_A_QUIVER, rels, field, name)
    if name == "A-prime":
        rels = _COMMON[:3] + [[(1, ("beta'", "beta"))]] + _COMMON[3:]
        return AlgebraPresentation(_A_QUIVER, rels, field, name)
    if name == "B-subalgebra":
        quiver = Quiver(("10", "05", "51"), _A_QUIVER.arrows[:4])
        rels = [[(1, p)] for p in [("alpha'", "alpha"), ("alpha'", "beta"), ("beta'", "alpha"), ("beta'", "beta")]]
        return AlgebraPresentation(quiver, rels, field, name)
    raise KeyError(f"unknown presentation {name!r}")


BUILTIN_NAMES = ("A-appendix", "A-prime", "B-subalgebra")
DEFAULT_ORDER = ("10", "05", "51", "43")


# ---------------------------------------------------------------------------
# the algebra

class FiniteDimAlgebra:
    """Quotient of the path algebra, with a basis of surviving paths."""

    def __init__(self, pres: AlgebraPresentation, basis: list[Path], rewrite: dict[Path, dict[Path, object]],
                 truncation: int, self_dual: bool):
        self.presentation = pres
        self.quiver = pres.quiver
        self.K = pres.domain
        self.basis = basis
        self.index = {p: i for i, p in enumerate(basis)}
        self._rewrite = rewrite
        self.truncation = truncation
        self.self_dual = self_dual

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def nilpotency_degree(self) -> int:
        return self.truncation - 1

    def strata(self) -> list[int]:
        counts = Counter(p.length for p in self.basis)
        return [counts[i] for i in range(max(counts) + 1)]

    def basis_by_length(self) -> list[list[Path]]:
        out: list[list[Path]] = [[] for _ in self.strata()]
        for p in self.basis:
            out[p.length].append(p)
        return out

    def normal_form(self, path: Path) -> dict[int, object]:
        if path.length >= self.truncation:
            return {}
        if path in self.index:
            return {self.index[path]: self.K.one}
        return {self.index[q]: c for q, c in self._rewrite.get(path, {}).items()}

    def reduce_combination(self, terms: Iterable[tuple[int, Sequence[str]]], vertex: str | None = None) -> dict[int, object]:
        out: dict[int, object] = {}
        for c, arrows in terms:
            p = make_path(self.quiver, arrows, vertex)
            for i, v in self.normal_form(p).items():
                out[i] = out.get(i, self.K.zero) + self.K.convert(c) * v
        return {i: v for i, v in out.items() if v}

    def multiply(self, i: int, j: int) -> dict[int, object]:
        q = concat(self.quiver, self.basis[i], self.basis[j])
        return {} if q is None else self.normal_form(q)

    @cached_property
    def multiplication_table(self) -> list[list[dict[int, object]]]:
        return [[self.multiply(i, j) for j in range(self.dim)] for i in range(self.dim)]

    def is_associative(self) -> bool:
        table = self.multiplication_table
        K = self.K
        for i, j, k in itertools.product(range(self.dim), repeat=3):
            left: dict[int, object] = {}
            for a, c in table[i][j].items():
                for b, d in table[a][k].items():
                    left[b] = left.get(b, K.zero) + c * d
            right: dict[int, object] = {}
            for a, c in table[j][k].items():
                for b, d in table[i][a].items():
                    right[b] = right.get(b, K.zero) + c * d
            if {x: y for x, y in left.items() if y} != {x: y for x, y in right.items() if y}:
                return False
        return True


def _all_paths(quiver: Quiver, max_len: int) -> list[Path]:
    layer = [Path(v, v) for v in quiver.vertices]
    out = list(layer)
    for _ in range(max_len):
        layer = [Path(p.source, quiver.target(a), p.arrows + (a,)) for p in layer for a in quiver.arrows_from(p.target)]
        out.extend(layer)
    return out


def _reduce_at(pres: AlgebraPresentation, trunc: int):
    """Row-reduce the ideal generated by the relations modulo paths of length >= trunc."""
    quiver, K = pres.quiver, pres.domain
    rank = {a[0]: i for i, a in enumerate(quiver.arrows)}
    paths = _all_paths(quiver, trunc - 1)
    # shorter paths first; within a length, lexicographically larger paths first
    paths.sort(key=lambda p: (p.length, tuple(-rank[a] for a in p.arrows), p.source))
    col = {p: i for i, p in enumerate(paths)}
    ending = {v: [p for p in paths if p.target == v] for v in quiver.vertices}
    starting = {v: [p for p in paths if p.source == v] for v in quiver.vertices}
    rows: dict[int, dict[int, object]] = {}
    for rel in pres.relations:
        first = make_path(quiver, rel[0][1])
        shortest = min(len(p) for _, p in rel)
        for u in ending[first.source]:
            for v in starting[first.target]:
                if u.length + shortest + v.length >= trunc:
                    continue
                row: dict[int, object] = {}
                for c, arrows in rel:
                    full = u.arrows + tuple(arrows) + v.arrows
                    if len(full) >= trunc:
                        continue
                    j = col[Path(u.source, v.target, full)]
                    row[j] = row.get(j, K.zero) + K.convert(c)
                row = {j: x for j, x in row.items() if x}
                if row:
                    rows[len(rows)] = row
    if rows:
        R, pivots = DomainMatrix(rows, (len(rows), len(paths)), K).rref()
        dok = R.to_dok()
    else:
        pivots, dok = (), {}
    pivset = set(pivots)
    basis = [p for p in paths if col[p] not in pivset]
    by_row: dict[int, dict[int, object]] = {}
    for (i, j), x in dok.items():
        by_row.setdefault(i, {})[j] = x
    rewrite: dict[Path, dict[Path, object]] = {}
    for r, pc in enumerate(pivots):
        rewrite[paths[pc]] = {paths[j]: -x for j, x in by_row.get(r, {}).items() if j != pc and x}
    return basis, rewrite


def _anti_image(sigma: dict[str, str], arrows: Sequence[str]) -> tuple[str, ...]:
    return tuple(sigma[a] for a in reversed(arrows))


def build_algebra(pres: AlgebraPresentation, bound: int = PATH_LENGTH_BOUND) -> FiniteDimAlgebra:
    """Compute a path basis and multiplication for the quotient by the relation ideal."""
    for trunc in range(1, bound + 2):
        basis, rewrite = _reduce_at(pres, trunc)
        if not any(p.length == trunc - 1 for p in basis):
            break
    else:
        raise NonTerminating(f"paths of length {bound} survive the relations")
    key = lambda p: (p.length, pres.quiver.vertices.index(p.source),
                     tuple(pres.quiver.arrow_rank(a) for a in p.arrows))
    basis.sort(key=key)
    alg = FiniteDimAlgebra(pres, basis, rewrite, trunc, False)
    sigma = pres.duality()
    if all(a[0] in sigma for a in pres.quiver.arrows):
        alg.self_dual = all(
            not alg.reduce_combination([(c, _anti_image(sigma, p)) for c, p in rel]) for rel in pres.relations
        )
    return alg


# ---------------------------------------------------------------------------
# representations

@dataclass
class QuiverRepresentation:
    quiver: Quiver
    K: object
    dims: dict[str, int]
    action: dict[str, DomainMatrix]
    labels: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        for name, s, t in self.quiver.arrows:
            shape = self.action[name].shape
            if shape != (self.dims[s], self.dims[t]):
                raise ShapeMismatch(f"arrow {name}: matrix {shape}, expected {(self.dims[s], self.dims[t])}")

    @property
    def dim(self) -> int:
        return sum(self.dims.values())

    def composition(self) -> Counter:
        return Counter({v: d for v, d in self.dims.items() if d})

    def path_matrix(self, arrows: Sequence[str], vertex: str | None = None) -> DomainMatrix:
        if not arrows:
            return eye(self.dims[vertex], self.K)
        out = self.action[arrows[0]]
        for a in arrows[1:]:
            out = mul(out, self.action[a])
        return out

    def satisfies(self, pres: AlgebraPresentation) -> bool:
        for rel in pres.relations:
            first = make_path(self.quiver, rel[0][1])
            total = zeros(self.dims[first.source], self.dims[first.target], self.K)
            for c, arrows in rel:
                M = self.path_matrix(arrows)
                total = total + M * self.K.convert(c) if M.shape[0] and M.shape[1] else total
            if not is_zero(total):
                return False
        return True

    def element(self, vertex: str, label: str) -> dict[str, list]:
        """The basis vector at ``vertex`` carrying ``label``."""
        i = self.labels[vertex].index(label)
        vec = [self.K.zero] * self.dims[vertex]
        vec[i] = self.K.one
        return {vertex: vec}


Graded = dict[str, Subspace]


def _full(m: QuiverRepresentation) -> Graded:
    return {v: Subspace.full(m.dims[v], m.K) for v in m.quiver.vertices}


def _zero(m: QuiverRepresentation) -> Graded:
    return {v: Subspace.zero(m.dims[v], m.K) for v in m.quiver.vertices}


def _dims(S: Graded) -> dict[str, int]:
    return {v: s.dim for v, s in S.items()}


def _images(m: QuiverRepresentation, S: Graded) -> Graded:
    out = {}
    for t in m.quiver.vertices:
        mats = [mul(S[m.quiver.source(a)].basis, m.action[a]) for a in m.quiver.arrows_into(t)]
        out[t] = Subspace(vstack(mats, m.dims[t], m.K))
    return out


def _preimage(m: QuiverRepresentation, S: Graded) -> Graded:
    """Vectors sent into S by every arrow."""
    out = {}
    for w in m.quiver.vertices:
        mats = [mul(m.action[a], S[m.quiver.target(a)].projector()) for a in m.quiver.arrows_from(w)]
        H = hstack(mats, m.dims[w], m.K)
        out[w] = Subspace.full(m.dims[w], m.K) if H.shape[1] == 0 else Subspace(left_kernel(H))
    return out


def _sum(S: Graded, T: Graded) -> Graded:
    return {v: S[v] + T[v] for v in S}


def _same(S: Graded, T: Graded) -> bool:
    return all(S[v] == T[v] for v in S)


def radical_series(m: QuiverRepresentation) -> list[Graded]:
    series = [_full(m)]
    while any(s.dim for s in series[-1].values()):
        series.append(_images(m, series[-1]))
    return series


def socle_series(m: QuiverRepresentation) -> list[Graded]:
    series = [_zero(m)]
    while sum(s.dim for s in series[-1].values()) < m.dim:
        nxt = _preimage(m, series[-1])
        if _same(nxt, series[-1]):
            raise RuntimeError("socle series stalled")
        series.append(nxt)
    return series


@dataclass
class FiltrationReport:
    """Vertex multisets of the layers of a filtration."""

    kind: str
    layers: list[list[str]]

    @property
    def loewy_length(self) -> int:
        return len(self.layers)

    def total(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def as_sets(self) -> list[Counter]:
        return [Counter(layer) for layer in self.layers]

    def __str__(self) -> str:
        return " | ".join("{" + ",".join(layer) + "}" for layer in self.layers)


def _layers(m: QuiverRepresentation, big: list[Graded], descending: bool) -> list[list[str]]:
    out = []
    for i in range(len(big) - 1):
        upper, lower = (big[i], big[i + 1]) if descending else (big[i + 1], big[i])
        layer = []
        for v in m.quiver.vertices:
            layer += [v] * (upper[v].dim - lower[v].dim)
        out.append(layer)
    return out


def radical_filtration(m: QuiverRepresentation) -> FiltrationReport:
    """Layers rad^i / rad^(i+1), top layer first."""
    return FiltrationReport("radical", _layers(m, radical_series(m), True))


def socle_filtration(m: QuiverRepresentation) -> FiltrationReport:
    """Layers soc_(i+1) / soc_i, socle first."""
    return FiltrationReport("socle", _layers(m, socle_series(m), False))


def top_of(m: QuiverRepresentation) -> Counter:
    rad = radical_series(m)
    return Counter({v: m.dims[v] - rad[1][v].dim for v in m.quiver.vertices if m.dims[v] - rad[1][v].dim}) if len(rad) > 1 else Counter()


def socle_of(m: QuiverRepresentation) -> Counter:
    if m.dim == 0:
        return Counter()
    soc = _preimage(m, _zero(m))
    return Counter({v: s.dim for v, s in soc.items() if s.dim})


def is_rigid(m: QuiverRepresentation) -> bool:
    rad, soc = radical_series(m), socle_series(m)
    if len(rad) != len(soc):
        return False
    length = len(rad) - 1
    return all(_same(rad[i], soc[length - i]) for i in range(length + 1))


def sub_rep(m: QuiverRepresentation, S: Graded) -> QuiverRepresentation:
    action = {}
    for name, s, t in m.quiver.arrows:
        imgs = mul(S[s].basis, m.action[name])
        action[name] = matrix([S[t].coords(r) for r in rows_of(imgs)], m.K, S[t].dim)
    return QuiverRepresentation(m.quiver, m.K, _dims(S), action)


def quotient_rep(m: QuiverRepresentation, S: Graded) -> QuiverRepresentation:
    action = {}
    labels = {}
    for name, s, t in m.quiver.arrows:
        keep = S[s].complement_indices()
        rows = rows_of(mul(m.action[name], S[t].projector()))
        action[name] = matrix([rows[i] for i in keep], m.K, m.dims[t] - S[t].dim)
    for v in m.quiver.vertices:
        if v in m.labels:
            labels[v] = [m.labels[v][i] for i in S[v].complement_indices()]
    dims = {v: m.dims[v] - S[v].dim for v in m.quiver.vertices}
    return QuiverRepresentation(m.quiver, m.K, dims, action, labels)


def _restrict(S: Graded, T: Graded) -> Graded:
    """Express T (contained in S) in the coordinates of S."""
    out = {}
    for v in S:
        rows = [S[v].coords(r) for r in T[v].rows()]
        out[v] = Subspace(matrix(rows, S[v].K, S[v].dim))
    return out


def generated_submodule(m: QuiverRepresentation, generators: Iterable[dict[str, list]]) -> Graded:
    S = _zero(m)
    for g in generators:
        for v, vec in g.items():
            S[v] = S[v] + Subspace(matrix([vec], m.K, m.dims[v]))
    while True:
        nxt = _sum(S, _images(m, S))
        if _same(nxt, S):
            return S
        S = nxt


def quotient_by_right_ideal(alg: FiniteDimAlgebra, module: QuiverRepresentation,
                            generators: Iterable[dict[str, list]]) -> QuiverRepresentation:
    """module / (submodule generated by the given elements)."""
    return quotient_rep(module, generated_submodule(module, generators))


def restrict_to(m: QuiverRepresentation, quiver: Quiver) -> QuiverRepresentation:
    """View m as a representation of a full subquiver; m must vanish off it."""
    dropped = [v for v in m.quiver.vertices if v not in quiver.vertices]
    if any(m.dims[v] for v in dropped):
        raise ShapeMismatch(f"module is nonzero at {', '.join(v for v in dropped if m.dims[v])}")
    dims = {v: m.dims[v] for v in quiver.vertices}
    action = {name: m.action[name] for name, _, _ in quiver.arrows}
    labels = {v: m.labels[v] for v in quiver.vertices if v in m.labels}
    return QuiverRepresentation(quiver, m.K, dims, action, labels)


def direct_sum(ms: Sequence[QuiverRepresentation]) -> QuiverRepresentation:
    first = ms[0]
    dims = {v: sum(m.dims[v] for m in ms) for v in first.quiver.vertices}
    action = {a: block_diag([m.action[a] for m in ms], first.K) for a, _, _ in first.quiver.arrows}
    return QuiverRepresentation(first.quiver, first.K, dims, action)


def projective(alg: FiniteDimAlgebra, v: str) -> QuiverRepresentation:
    """The indecomposable projective e_v A, on the basis of paths starting at v."""
    quiver, K = alg.quiver, alg.K
    paths = {w: [p for p in alg.basis if p.source == v and p.target == w] for w in quiver.vertices}
    pos = {p: i for w in paths for i, p in enumerate(paths[w])}
    action = {}
    for name, s, t in quiver.arrows:
        arrow = Path(s, t, (name,))
        rows = []
        for p in paths[s]:
            row = [K.zero] * len(paths[t])
            for j, c in alg.normal_form(concat(quiver, p, arrow)).items():
                row[pos[alg.basis[j]]] += c
            rows.append(row)
        action[name] = matrix(rows, K, len(paths[t]))
    labels = {w: [str(p) for p in paths[w]] for w in quiver.vertices}
    rep = QuiverRepresentation(quiver, K, {w: len(paths[w]) for w in quiver.vertices}, action, labels)
    rep.paths = paths  # type: ignore[attr-defined]
    return rep


def path_element(alg: FiniteDimAlgebra, P: QuiverRepresentation, arrows: Sequence[str]) -> dict[str, list]:
    """The element of P = e_v A given by a path from v."""
    src = next(p.source for w in alg.quiver.vertices for p in P.paths[w])  # type: ignore[attr-defined]
    path = make_path(alg.quiver, arrows, src)
    out = {}
    for j, c in alg.normal_form(path).items():
        q = alg.basis[j]
        vec = out.setdefault(q.target, [alg.K.zero] * P.dims[q.target])
        vec[P.paths[q.target].index(q)] += c  # type: ignore[attr-defined]
    return out


# ---------------------------------------------------------------------------
# homomorphisms and isomorphism

def _hom_nullspace(m1: QuiverRepresentation, m2: QuiverRepresentation):
    K = m1.K
    var = {}
    for w in m1.quiver.vertices:
        for i in range(m1.dims[w]):
            for j in range(m2.dims[w]):
                var[(w, i, j)] = len(var)
    rows: dict[int, dict[int, object]] = {}
    for name, s, t in m1.quiver.arrows:
        A1, A2 = rows_of(m1.action[name]), rows_of(m2.action[name])
        for i in range(m1.dims[s]):
            for j in range(m2.dims[t]):
                row: dict[int, object] = {}
                for k in range(m1.dims[t]):
                    if A1[i][k]:
                        x = var[(t, k, j)]
                        row[x] = row.get(x, K.zero) + A1[i][k]
                for k in range(m2.dims[s]):
                    if A2[k][j]:
                        x = var[(s, i, k)]
                        row[x] = row.get(x, K.zero) - A2[k][j]
                row = {x: c for x, c in row.items() if c}
                if row:
                    rows[len(rows)] = row
    n = len(var)
    if n == 0:
        return var, []
    if not rows:
        return var, rows_of(eye(n, K))
    N = DomainMatrix(rows, (len(rows), n), K).nullspace()
    return var, rows_of(N) if N.shape[0] else []


def _unflatten(var, vec, m1, m2) -> dict[str, DomainMatrix]:
    K = m1.K
    mats = {w: [[K.zero] * m2.dims[w] for _ in range(m1.dims[w])] for w in m1.quiver.vertices}
    for (w, i, j), x in var.items():
        mats[w][i][j] = vec[x]
    return {w: matrix(mats[w], K, m2.dims[w]) for w in mats}


def hom_space(m1: QuiverRepresentation, m2: QuiverRepresentation) -> list[dict[str, DomainMatrix]]:
    """A basis of Hom(m1, m2); each map is given by one matrix per vertex."""
    var, basis = _hom_nullspace(m1, m2)
    return [_unflatten(var, vec, m1, m2) for vec in basis]


def rep_isomorphic(m1: QuiverRepresentation, m2: QuiverRepresentation, trials: int = 200, seed: int = 0) -> bool:
    """Search Hom(m1, m2) for an invertible element.

    Over the rationals a random integer combination of a Hom basis is
    invertible whenever any element is, outside a proper Zariski-closed set;
    several independent draws are tried.  Over a prime field small Hom spaces
    are searched exhaustively.
    """
    if m1.dims != m2.dims:
        return False
    var, basis = _hom_nullspace(m1, m2)
    if m1.dim == 0:
        return True
    if not basis:
        return False
    K = m1.K
    rng = random.Random(seed)
    q = getattr(K, "mod", None)
    if q is not None and q ** len(basis) <= 4 * trials:
        combos: Iterable = itertools.product(range(q), repeat=len(basis))
    elif q is not None:
        combos = ([rng.randrange(q) for _ in basis] for _ in range(trials))
    else:
        combos = ([rng.randint(-10**6, 10**6) for _ in basis] for _ in range(8))
    for coeffs in combos:
        vec = [sum((K.convert(c) * b[x] for c, b in zip(coeffs, basis)), K.zero) for x in range(len(var))]
        maps = _unflatten(var, vec, m1, m2)
        if all(is_invertible(maps[w]) for w in maps if m1.dims[w]):
            return True
    return False


def contravariant_dual(alg: FiniteDimAlgebra, m: QuiverRepresentation) -> QuiverRepresentation:
    """Transpose every arrow matrix and exchange each arrow with its dashed partner."""
    if not alg.self_dual:
        raise PresentationNotSelfDual(f"{alg.presentation.name or 'presentation'} is not self-dual")
    sigma = alg.presentation.duality()
    action = {a: m.action[sigma[a]].transpose() for a, _, _ in m.quiver.arrows}
    return QuiverRepresentation(m.quiver, m.K, dict(m.dims), action)


# ---------------------------------------------------------------------------
# standard modules, Ext^1 and tilting modules

def _later(order: Sequence[str], v: str) -> list[str]:
    return list(order[list(order).index(v) + 1:])


def _trace(P: QuiverRepresentation, vertices: Iterable[str]) -> Graded:
    """Submodule generated by the components of P at the given vertices."""
    gens = []
    for w in vertices:
        for row in rows_of(eye(P.dims[w], P.K)):
            gens.append({w: row})
    return generated_submodule(P, gens)


def delta_module(alg: FiniteDimAlgebra, order: Sequence[str], v: str) -> QuiverRepresentation:
    """P(v) modulo the trace of all P(w) with w after v in the order."""
    P = projective(alg, v)
    return quotient_rep(P, _trace(P, _later(order, v)))


def nabla_module(alg: FiniteDimAlgebra, order: Sequence[str], v: str) -> QuiverRepresentation:
    return contravariant_dual(alg, delta_module(alg, order, v))


def ext1_classes(alg: FiniteDimAlgebra, order: Sequence[str], w: str, X: QuiverRepresentation):
    """Representatives f_1..f_e: K -> X of a basis of Ext^1(Delta(w), X),
    where K is the kernel of P(w) -> Delta(w)."""
    P = projective(alg, w)
    S = _trace(P, _later(order, w))
    Krep = sub_rep(P, S)
    var, hom = _hom_nullspace(Krep, X)
    # restrictions of the maps P(w) -> X, p -> x.p for x in X_w
    restricted = []
    for a in range(X.dims[w]):
        vec = [X.K.zero] * len(var)
        for u in alg.quiver.vertices:
            if not Krep.dims[u] or not X.dims[u]:
                continue
            phi = [rows_of(X.path_matrix(q.arrows, w))[a] for q in P.paths[u]]  # type: ignore[attr-defined]
            img = rows_of(mul(S[u].basis, matrix(phi, X.K, X.dims[u])))
            for i, row in enumerate(img):
                for j, c in enumerate(row):
                    vec[var[(u, i, j)]] = c
        restricted.append(vec)
    span = Subspace(matrix(restricted, X.K, len(var)))
    reps = []
    for h in hom:
        if not span.contains(h):
            reps.append(h)
            span = span + Subspace(matrix([h], X.K, len(var)))
    return P, S, [_unflatten(var, h, Krep, X) for h in reps]


def universal_extension(alg: FiniteDimAlgebra, order: Sequence[str], w: str, X: QuiverRepresentation):
    """Extension 0 -> X -> Y -> Delta(w)^e -> 0 realising every class; e = dim Ext^1."""
    P, S, classes = ext1_classes(alg, order, w, X)
    e = len(classes)
    if e == 0:
        return X, 0
    D = direct_sum([X] + [P] * e)
    K = X.K
    gens = []
    for u in alg.quiver.vertices:
        kb = S[u].rows()
        for i, f in enumerate(classes):
            fr = rows_of(f[u])
            for k, b in enumerate(kb):
                vec = list(fr[k]) if X.dims[u] else []
                for block in range(e):
                    vec += [-x for x in b] if block == i else [K.zero] * P.dims[u]
                gens.append({u: vec})
    return quotient_rep(D, generated_submodule(D, gens)), e


def build_tilting(alg: FiniteDimAlgebra, order: Sequence[str], v: str, max_steps: int = 50) -> QuiverRepresentation:
    """Ringel's construction: universal extensions of Delta(v) by standard modules
    in decreasing order until no Ext^1(Delta(w), -) remains."""
    X = delta_module(alg, order, v)
    steps = 0
    while True:
        changed = False
        for w in reversed(list(order)):
            X, e = universal_extension(alg, order, w, X)
            if e:
                changed = True
                steps += 1
                if steps > max_steps:
                    raise NonConvergence("too many universal extensions")
        if not changed:
            return X


def delta_multiplicities(alg: FiniteDimAlgebra, order: Sequence[str], X: QuiverRepresentation) -> dict[str, int]:
    """(X : Delta(w)) = dim Hom(X, nabla(w)) for X with a standard filtration."""
    return {w: len(hom_space(X, nabla_module(alg, order, w))) for w in order}


# ---------------------------------------------------------------------------
# the tilting module T(43) and its four-subspace configuration

def tilting_43(alg: FiniteDimAlgebra) -> QuiverRepresentation:
    """T(43) = P(10) / gamma A."""
    P = projective(alg, "10")
    return quotient_by_right_ideal(alg, P, [path_element(alg, P, ["gamma"])])


def rad_mod_soc(m: QuiverRepresentation) -> QuiverRepresentation:
    rad = radical_series(m)[1]
    soc = _preimage(m, _zero(m))
    return quotient_rep(sub_rep(m, rad), _restrict(rad, soc))


@dataclass
class FourSubspaceReport:
    dim_V: int
    dims: tuple[int, int, int, int]
    dim_U1_cap_U2: int
    dim_U3_plus_U4: int
    cap_is_image_of_gg: bool
    sum_is_kernel_of_gg: bool
    all_distinct: bool
    lattice_size: int
    cap_below_sum: bool
    U1_plus_U2_is_V: bool
    U3_cap_U4_is_zero: bool
    subspaces: dict[str, list[list[str]]]

    def to_json(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def four_subspace_report(T: QuiverRepresentation) -> FourSubspaceReport:
    """Subspaces of V = (rad T / soc T) at vertex 10 cut out by the arrows."""
    need = {"10", "05", "51", "43"}
    if set(T.quiver.vertices) != need or T.dims.get("10") != 5:
        raise ShapeMismatch("expected the module T(43) over the four-vertex algebra")
    N = rad_mod_soc(T)
    K, n = N.K, N.dims["10"]
    gg = mul(N.action["gamma"], N.action["gamma'"])

    def image(M):
        return Subspace(M) if M.shape[0] else Subspace.zero(n, K)

    def kernel(M):
        return Subspace(left_kernel(M)) if M.shape[1] else Subspace.full(n, K)

    im_gg, ker_gg = image(gg), kernel(gg)
    U1 = image(N.action["alpha'"]) + im_gg
    U2 = image(N.action["beta'"]) + im_gg
    U3 = kernel(N.action["alpha"]) & ker_gg
    U4 = kernel(N.action["beta"]) & ker_gg
    us = [U1, U2, U3, U4]
    lattice = {u.key(): u for u in us}
    while True:
        items = list(lattice.values())
        new = {}
        for x, y in itertools.product(items, repeat=2):
            for z in (x + y, x & y):
                if z.key() not in lattice:
                    new[z.key()] = z
        if not new:
            break
        lattice.update(new)
    cap, cup = U1 & U2, U3 + U4
    return FourSubspaceReport(
        dim_V=n,
        dims=tuple(u.dim for u in us),
        dim_U1_cap_U2=cap.dim,
        dim_U3_plus_U4=cup.dim,
        cap_is_image_of_gg=cap == im_gg,
        sum_is_kernel_of_gg=cup == ker_gg,
        all_distinct=len({u.key() for u in us}) == 4,
        lattice_size=len(lattice),
        cap_below_sum=cap <= cup,
        U1_plus_U2_is_V=(U1 + U2).dim == n,
        U3_cap_U4_is_zero=(U3 & U4).dim == 0,
        subspaces={f"U{i + 1}": [[str(x) for x in r] for r in u.rows()] for i, u in enumerate(us)},
    )


# ---------------------------------------------------------------------------
# coefficient quivers

def radical_adapted(m: QuiverRepresentation) -> QuiverRepresentation:
    """Change to a basis refining the radical series, echelonised layer by layer."""
    series = radical_series(m)
    change = {}
    labels = {}
    for v in m.quiver.vertices:
        rows = []
        for i in range(len(series) - 1):
            upper, lower = series[i][v], series[i + 1][v]
            acc = lower
            for r in upper.rows():
                if not acc.contains(r):
                    rows.append(r)
                    acc = acc + Subspace(matrix([r], m.K, m.dims[v]))
        change[v] = matrix(rows, m.K, m.dims[v])
        labels[v] = [f"{v}_{i}" for i in range(len(rows))]
    action = {}
    for name, s, t in m.quiver.arrows:
        if m.dims[s] == 0 or m.dims[t] == 0:
            action[name] = zeros(m.dims[s], m.dims[t], m.K)
            continue
        action[name] = mul(mul(change[s], m.action[name]), change[t].inv())
    return QuiverRepresentation(m.quiver, m.K, dict(m.dims), action, labels)


def coefficient_quiver_edges(m: QuiverRepresentation) -> list[tuple[str, int, str, int, str]]:
    edges = []
    for name, s, t in m.quiver.arrows:
        for i, row in enumerate(rows_of(m.action[name])):
            for j, c in enumerate(row):
                if c:
                    edges.append((s, i, t, j, name))
    return edges


def coefficient_quiver_dot(m: QuiverRepresentation, basis_strategy: str = "native", name: str = "M") -> str:
    """DOT digraph with one node per basis vector and one edge per nonzero matrix entry.

    ``basis_strategy`` is "native" (the stored basis, e.g. residues of paths)
    or "radical" (an echelon basis adapted to the radical series).
    """
    if basis_strategy == "radical":
        m = radical_adapted(m)
    elif basis_strategy != "native":
        raise ValueError(f"unknown basis strategy {basis_strategy!r}")
    lines = [f'digraph "{name}" {{', "  node [shape=plaintext];"]
    for v in m.quiver.vertices:
        for i in range(m.dims[v]):
            tip = m.labels.get(v, [None] * m.dims[v])[i] if m.labels.get(v) else None
            extra = f' tooltip="{tip}"' if tip and tip != v else ""
            lines.append(f'  "{v}_{i}" [label="{v}"{extra}];')
    for s, i, t, j, arrow in coefficient_quiver_edges(m):
        lines.append(f'  "{s}_{i}" -> "{t}_{j}" [label="{arrow_symbol(arrow)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"

