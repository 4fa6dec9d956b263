import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import convolve, kostant_weyl_multiplicity
from sl3tilt import characters as ch
from sl3tilt.characters import (
    Character,
    NonInvariantInput,
    UnknownTiltingCharacter,
    WeylBasisExpr,
    donkin_delta_multiplicities,
    donkin_restricted_tilting_char,
    frobenius_twist,
    into_simple_basis,
    into_weyl_basis,
    multiply,
    simple_character,
    tilting_character,
    tilting_provenance,
    weyl_character,
    weyl_dimension,
)
from sl3tilt.family import M, Atom, family_character
from sl3tilt.weights import Weight, steinberg_digits, weyl_orbit

W = Weight
small = st.integers(0, 10)


def chi(*terms):
    """Weyl-basis shorthand: chi((a, b), m, (c, d), n, ...)."""
    return WeylBasisExpr(dict(zip(terms[::2], terms[1::2])))


class TestWeylCharacters:
    def test_examples(self):
        assert weyl_character(W(0, 0)) == Character({(0, 0): 1})
        assert weyl_character(W(1, 0)) == Character({(1, 0): 1, (-1, 1): 1, (0, -1): 1})
        c = weyl_character(W(1, 1))
        assert c.dim() == 8 and c[W(0, 0)] == 2

    # dominant multiplicities of chi(2,2) and chi(3,3), frozen from the Kostant-count oracle
    FROZEN = {
        (2, 2): {(2, 2): 1, (3, 0): 1, (0, 3): 1, (1, 1): 2, (0, 0): 3},
        (3, 3): {(3, 3): 1, (4, 1): 1, (1, 4): 1, (2, 2): 2, (3, 0): 2,
                 (0, 3): 2, (1, 1): 3, (0, 0): 4},
    }

    @pytest.mark.parametrize("lam", sorted(FROZEN))
    def test_frozen_multiplicities(self, lam):
        assert weyl_character(W(*lam)).dominant_part() == {W(*k): v for k, v in self.FROZEN[lam].items()}
        assert {w: kostant_weyl_multiplicity(lam, w) for w in self.FROZEN[lam]} == self.FROZEN[lam]

    def test_against_kostant_oracle(self):
        for a in range(9):
            for b in range(9):
                c = weyl_character(W(a, b))
                for w, m in c.items():
                    assert kostant_weyl_multiplicity((a, b), w) == m
                # no weight is missing: the oracle vanishes outside the support
                for x in range(-a - b - 1, a + b + 2):
                    for y in range(-a - b - 1, a + b + 2):
                        if W(x, y) not in c.support():
                            assert kostant_weyl_multiplicity((a, b), (x, y)) == 0

    def test_dimension_formula(self):
        for a in range(21):
            for b in range(21):
                d = (a + 1) * (b + 1) * (a + b + 2) // 2
                assert weyl_dimension(W(a, b)) == d
                if a + b <= 16:
                    assert weyl_character(W(a, b)).dim() == d

    @given(small, small)
    def test_invariance(self, a, b):
        assert weyl_character(W(a, b)).is_weyl_invariant()

    def test_rejects_non_dominant(self):
        with pytest.raises(ValueError):
            weyl_character(W(-1, 0))


class TestRingOperations:
    def test_identity_and_dims(self):
        c = weyl_character(W(2, 1))
        assert multiply(c, Character({(0, 0): 1})) == c
        d = weyl_character(W(0, 3))
        assert multiply(c, d).dim() == c.dim() * d.dim()

    def test_product_expansion(self):
        prod = multiply(weyl_character(W(1, 0)), weyl_character(W(0, 1)))
        assert into_weyl_basis(prod) == chi((1, 1), 1, (0, 0), 1)
        sq = multiply(weyl_character(W(1, 1)), weyl_character(W(1, 1)))
        assert into_weyl_basis(sq) == chi((2, 2), 1, (3, 0), 1, (0, 3), 1, (1, 1), 2, (0, 0), 1)

    @pytest.mark.parametrize("l1,l2", [((1, 0), (2, 1)), ((3, 3), (2, 2)), ((6, 4), (5, 5))])
    def test_matches_naive_convolution(self, l1, l2):
        c1, c2 = weyl_character(W(*l1)), weyl_character(W(*l2))
        expected = convolve(dict(c1.items()), dict(c2.items()))
        # the last case exceeds the dense-multiplication threshold
        assert multiply(c1, c2) == Character(expected)

    def test_twist(self):
        c = weyl_character(W(1, 2))
        assert frobenius_twist(c, 0, 3) == c
        assert frobenius_twist(Character({(1, 0): 1}), 1, 3) == Character({(3, 0): 1})
        assert frobenius_twist(c, 2, 2).dim() == c.dim()

    @given(st.dictionaries(st.tuples(small, small), st.integers(-5, 5), max_size=6))
    def test_weyl_basis_round_trip(self, terms):
        expr = WeylBasisExpr(terms)
        assert into_weyl_basis(expr.character()) == expr

    def test_non_invariant_input(self):
        with pytest.raises(NonInvariantInput):
            into_weyl_basis(Character({(1, 0): 1}) + Character({(-1, 1): 1}))


class TestSimpleCharacters:
    def test_examples(self):
        assert simple_character(3, W(1, 1)).dim() == 7
        assert into_weyl_basis(simple_character(3, W(1, 1))) == chi((1, 1), 1, (0, 0), -1)
        assert simple_character(3, W(2, 2)).dim() == 27
        assert simple_character(3, W(5, 2)).dim() == 81
        assert simple_character(2, W(1, 1)).dim() == 8

    def test_digit_product_property(self):
        rng = random.Random(11)
        for _ in range(500):
            p = rng.choice([2, 3])
            lam = W(rng.randint(0, 40), rng.randint(0, 40))
            total = Character({(0, 0): 1})
            for j, d in enumerate(steinberg_digits(p, lam)):
                base = weyl_character(d) - (weyl_character(W(0, 0)) if (p, d) == (3, (1, 1)) else Character())
                total = multiply(total, frobenius_twist(base, j, p))
            assert simple_character(p, lam) == total

    @given(st.sampled_from([2, 3]), st.integers(0, 30), st.integers(0, 30))
    def test_invariant_and_symmetric(self, p, a, b):
        c = simple_character(p, W(a, b))
        assert c.is_weyl_invariant()
        assert simple_character(p, W(b, a)) == c.flipped()

    def test_into_simple_basis(self):
        prod = multiply(simple_character(3, W(2, 2)), simple_character(3, W(2, 2)))
        comp = into_simple_basis(3, prod)
        assert comp[W(0, 0)] == 15 and comp[W(1, 1)] == 11 and comp[W(4, 4)] == 1


class TestTiltingCharacters:
    def test_examples(self):
        assert into_weyl_basis(tilting_character(3, W(1, 1))) == chi((1, 1), 1, (0, 0), 1)
        t44 = tilting_character(3, W(4, 4))
        assert t44.dim() == 324
        assert into_weyl_basis(t44) == chi((4, 4), 1, (6, 0), 1, (0, 6), 1, (3, 3), 1, (4, 1), 1, (1, 4), 1,
                                          (1, 1), 1, (0, 0), 1)
        t20 = tilting_character(2, W(2, 0))
        assert into_weyl_basis(t20) == chi((2, 0), 1, (0, 1), 1) and t20.dim() == 9

    def test_digit_recursion(self):
        t99 = tilting_character(3, W(9, 9))
        assert t99 == multiply(tilting_character(3, W(3, 3)), frobenius_twist(tilting_character(3, W(2, 2)), 1, 3))
        assert t99.dim() == 4374
        assert tilting_provenance(3, W(9, 9)) == "donkin-digits"
        assert tilting_provenance(3, W(4, 4)) == "paper-table"

    @pytest.mark.parametrize("p", [2, 3])
    def test_table_entries(self, p):
        for nu in ch.TILTING_TABLE[p]:
            expr = into_weyl_basis(tilting_character(p, nu))
            assert expr[nu] == 1
            assert all(m > 0 for m in expr.terms.values())
            assert all(w == nu or (w[0] + w[1], w[0]) < (nu[0] + nu[1], nu[0]) for w in expr.terms)
            assert tilting_character(p, nu.flipped()) == tilting_character(p, nu).flipped()

    def test_convention_characters(self):
        assert into_weyl_basis(tilting_character(3, W(6, 0))) == chi((6, 0), 1, (4, 1), 1)
        assert tilting_character(3, W(6, 0)).dim() == 63
        assert into_weyl_basis(tilting_character(3, W(5, 1))) == chi((5, 1), 1)
        assert tilting_character(3, W(0, 6)) == tilting_character(3, W(6, 0)).flipped()
        assert tilting_provenance(3, W(1, 5)) == "derived-by-convention"

    def test_unknown(self):
        with pytest.raises(UnknownTiltingCharacter):
            tilting_character(3, W(7, 0))

    def test_family_characters(self):
        m = family_character(3, M)
        assert m.dim() == 21
        assert into_simple_basis(3, m) == {W(3, 0): 1, W(0, 3): 1, W(1, 1): 2, W(0, 0): 1}
        assert family_character(3, Atom.L(1, 1)).dim() == 7
        assert family_character(3, Atom.T(2, 2)).dim() == 27


class TestDonkinFormulas:
    @pytest.mark.parametrize("p,lam,target,dim", [
        (3, (1, 1), (3, 3), 162), (3, (2, 1), (4, 3), 162), (3, (1, 0), (3, 2), 81),
        (2, (1, 0), (2, 1), 24), (2, (1, 1), (2, 2), 48),
    ])
    def test_restricted_tilting(self, p, lam, target, dim):
        c = donkin_restricted_tilting_char(p, W(*lam))
        assert c == tilting_character(p, W(*target))
        assert c.dim() == dim

    def test_all_small_shifts(self):
        for p, lams in ((3, [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2), (2, 1), (1, 2)]),
                        (2, [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)])):
            for lam in lams:
                st_ = W(p - 1 + lam[0], p - 1 + lam[1])
                assert donkin_restricted_tilting_char(p, W(*lam)) == tilting_character(p, st_)

    def test_delta_multiplicities(self):
        assert donkin_delta_multiplicities(3, W(0, 2), W(1, 0), W(5, 4)) == 1
        assert donkin_delta_multiplicities(3, W(1, 1), W(0, 0), W(3, 3)) == 1
        assert donkin_delta_multiplicities(3, W(1, 1), W(0, 0), W(2, 2)) == 0

    def test_delta_lists(self):
        def delta_list(p, lam, mu, bound=12):
            return {(a, b) for a in range(bound) for b in range(bound)
                    if donkin_delta_multiplicities(p, W(*lam), W(*mu), W(a, b))}

        assert delta_list(3, (1, 1), (0, 0)) == {(3, 3), (4, 1), (1, 4), (3, 0), (0, 3), (1, 1)}
        assert delta_list(3, (2, 1), (0, 0)) == {(4, 3), (5, 1), (0, 5), (1, 0)}
        # T(5,4) = T(2,4) (x) T(1,0)^[1]: compare with the digit factorisation
        expected = into_weyl_basis(tilting_character(3, W(5, 4)))
        for a in range(10):
            for b in range(10):
                assert donkin_delta_multiplicities(3, W(0, 2), W(1, 0), W(a, b)) == expected[W(a, b)]

    def test_precondition(self):
        with pytest.raises(ValueError):
            donkin_restricted_tilting_char(3, W(3, 1))


class TestCache:
    def test_round_trip(self, tmp_path, monkeypatch):
        path = tmp_path / "cache.json"
        monkeypatch.setattr(ch, "_convention_store", {})
        ch.configure_cache(True, path)
        expr = ch.convention_expr(3, W(6, 0))
        records = json.loads(path.read_text())
        assert records == [{"p": 3, "weight": [6, 0], "weyl_multiplicities": [[[6, 0], 1], [[4, 1], 1]],
                            "provenance": "derived-by-convention"}]
        monkeypatch.setattr(ch, "_convention_store", {})
        assert ch.convention_expr(3, W(6, 0)) == expr
        assert len(json.loads(path.read_text())) == 1

    def test_disabled_writes_nothing(self, tmp_path, monkeypatch):
        path = tmp_path / "cache.json"
        monkeypatch.setattr(ch, "_convention_store", {})
        ch.configure_cache(False, path)
        ch.convention_expr(3, W(5, 1))
        assert not path.exists()


def test_orbit_sums_are_invariant():
    for a in range(5):
        for b in range(5):
            assert Character({w: 1 for w in weyl_orbit(W(a, b))}).is_weyl_invariant()
