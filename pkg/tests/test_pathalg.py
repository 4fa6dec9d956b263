import json
import re
from collections import Counter

import pytest

from oracles import monomial_algebra_dims
from sl3tilt.pathalg import (
    DEFAULT_ORDER,
    AlgebraPresentation,
    NonTerminating,
    PresentationNotSelfDual,
    Quiver,
    ShapeMismatch,
    build_algebra,
    build_tilting,
    builtin_presentation,
    coefficient_quiver_dot,
    coefficient_quiver_edges,
    contravariant_dual,
    delta_module,
    delta_multiplicities,
    four_subspace_report,
    generated_submodule,
    hom_space,
    is_rigid,
    make_path,
    nabla_module,
    path_element,
    projective,
    quotient_by_right_ideal,
    quotient_rep,
    rad_mod_soc,
    radical_adapted,
    radical_filtration,
    radical_series,
    rep_isomorphic,
    restrict_to,
    socle_filtration,
    socle_of,
    socle_series,
    sub_rep,
    tilting_43,
    top_of,
)

FIELDS = ["QQ", "GF(3)"]
T43_LAYERS = [["10"], ["05", "51"], ["10", "10"], ["43"], ["10"], ["05", "51"], ["10"]]


@pytest.fixture(scope="module", params=FIELDS)
def A(request):
    return build_algebra(builtin_presentation("A-appendix", request.param))


@pytest.fixture(scope="module")
def A_qq():
    return build_algebra(builtin_presentation("A-appendix"))


@pytest.fixture(scope="module")
def T43(A):
    return tilting_43(A)


def lopsided():
    q = Quiver(("x", "y", "z"), (("a", "x", "y"), ("a'", "y", "x"), ("b", "y", "z"), ("b'", "z", "y")))
    rels = [[(1, ("a", "b"))], [(1, ("a'", "a"))], [(1, ("b", "b'"))], [(1, ("b'", "b"))]]
    return AlgebraPresentation(q, rels, name="lopsided")


def layer_sets(report):
    return [sorted(layer) for layer in report.layers]


class TestAlgebra:
    def test_dimensions(self, A):
        assert A.dim == 34
        assert A.strata() == [4, 6, 7, 6, 6, 4, 1]
        assert A.nilpotency_degree == 7
        assert A.self_dual

    def test_associative(self, A_qq):
        assert A_qq.is_associative()

    def test_projective_dims(self, A):
        assert [projective(A, v).dim for v in DEFAULT_ORDER] == [15, 7, 7, 5]

    def test_longest_path(self, A_qq):
        (top,) = A_qq.basis_by_length()[6]
        assert top.source == top.target == "10"

    def test_variant_and_subalgebra(self):
        Ap = build_algebra(builtin_presentation("A-prime"))
        assert Ap.dim == 34 and Ap.strata() == [4, 6, 7, 6, 6, 4, 1]
        B = build_algebra(builtin_presentation("B-subalgebra"))
        assert B.dim == 9 and B.strata() == [3, 4, 2]

    def test_monomial_oracle(self):
        for pres in (builtin_presentation("B-subalgebra"), lopsided()):
            zero = [rel[0][1] for rel in pres.relations]
            expected = monomial_algebra_dims(pres.quiver.vertices, pres.quiver.arrows, zero)
            assert build_algebra(pres).strata() == expected

    def test_trivial_quiver(self):
        alg = build_algebra(AlgebraPresentation(Quiver(("x",), ()), []))
        assert alg.dim == 1

    def test_truncated_loop(self):
        q = Quiver(("x",), (("l", "x", "x"),))
        assert build_algebra(AlgebraPresentation(q, [[(1, ("l", "l", "l"))]])).strata() == [1, 1, 1]

    def test_non_terminating(self):
        q = Quiver(("x",), (("l", "x", "x"),))
        with pytest.raises(NonTerminating):
            build_algebra(AlgebraPresentation(q, []))

    def test_not_self_dual(self):
        alg = build_algebra(lopsided())
        assert not alg.self_dual
        with pytest.raises(PresentationNotSelfDual):
            contravariant_dual(alg, projective(alg, "x"))

    def test_presentation_json_round_trip(self):
        for name in ("A-appendix", "A-prime", "B-subalgebra"):
            pres = builtin_presentation(name, "GF(3)")
            again = AlgebraPresentation.from_json(json.dumps(pres.to_json()))
            assert again.to_json() == pres.to_json()
            assert build_algebra(again).strata() == build_algebra(pres).strata()

    def test_bad_relation(self):
        q = builtin_presentation("A-appendix").quiver
        with pytest.raises(ValueError):
            AlgebraPresentation(q, [[(1, ("alpha",)), (1, ("beta",))]])
        with pytest.raises(ValueError):
            make_path(q, ["alpha", "beta"])


class TestModules:
    def test_projectives_satisfy_relations(self, A):
        for v in DEFAULT_ORDER:
            assert projective(A, v).satisfies(A.presentation)

    def test_top_quotient(self, A_qq):
        P = projective(A_qq, "10")
        Q = quotient_by_right_ideal(A_qq, P, [path_element(A_qq, P, [a]) for a in ("alpha", "beta", "gamma")])
        assert Q.dim == 1 and Q.dims["10"] == 1

    def test_p43(self, A):
        P = projective(A, "43")
        assert layer_sets(radical_filtration(P)) == [["43"], ["10"], ["05", "51"], ["10"]]
        assert is_rigid(P)

    def test_p10_socle(self, A):
        P = projective(A, "10")
        assert socle_of(P) == Counter({"10": 2})
        assert socle_filtration(P).loewy_length == 7

    def test_standard_modules(self, A):
        D05 = delta_module(A, DEFAULT_ORDER, "05")
        assert D05.dim == 2 and layer_sets(radical_filtration(D05)) == [["05"], ["10"]]
        assert rep_isomorphic(delta_module(A, DEFAULT_ORDER, "43"), projective(A, "43"))
        assert not rep_isomorphic(D05, delta_module(A, DEFAULT_ORDER, "51"))
        assert delta_module(A, DEFAULT_ORDER, "10").dim == 1

    def test_dual_involution(self, A):
        for m in (projective(A, "05"), tilting_43(A), delta_module(A, DEFAULT_ORDER, "51")):
            assert rep_isomorphic(contravariant_dual(A, contravariant_dual(A, m)), m)
        assert rep_isomorphic(contravariant_dual(A, delta_module(A, DEFAULT_ORDER, "05")),
                              nabla_module(A, DEFAULT_ORDER, "05"))

    def test_hom_dimensions(self, A_qq):
        P10 = projective(A_qq, "10")
        for v in DEFAULT_ORDER:
            # dim Hom(P(v), X) = dim X e_v
            assert len(hom_space(projective(A_qq, v), P10)) == P10.dims[v]

    def test_shape_mismatch(self, A_qq):
        P = projective(A_qq, "43")
        with pytest.raises(ShapeMismatch):
            four_subspace_report(P)
        with pytest.raises(ShapeMismatch):
            restrict_to(P, builtin_presentation("B-subalgebra").quiver)

    def test_series_endpoints(self, A_qq):
        P = projective(A_qq, "10")
        rad, soc = radical_series(P), socle_series(P)
        assert sum(S.dim for S in rad[0].values()) == P.dim and all(S.dim == 0 for S in rad[-1].values())
        assert all(S.dim == 0 for S in soc[0].values()) and sum(S.dim for S in soc[-1].values()) == P.dim


class TestTilting43:
    def test_structure(self, T43):
        assert T43.dim == 10
        assert T43.composition() == Counter({"10": 5, "05": 2, "51": 2, "43": 1})
        assert top_of(T43) == Counter({"10": 1}) and socle_of(T43) == Counter({"10": 1})
        rad, soc = radical_filtration(T43), socle_filtration(T43)
        assert rad.loewy_length == soc.loewy_length == 7
        assert layer_sets(rad) == T43_LAYERS and layer_sets(soc) == T43_LAYERS
        assert not is_rigid(T43)

    def test_layers_around_43(self, T43):
        rad, soc = radical_filtration(T43), socle_filtration(T43)
        i = next(k for k, layer in enumerate(rad.layers) if "43" in layer)
        assert sorted(rad.layers[i - 1]) == ["10", "10"]
        # socle layers are listed socle first, so "below" means the previous entry
        j = next(k for k, layer in enumerate(soc.layers) if "43" in layer)
        assert sorted(soc.layers[j - 1]) == ["10", "10"]

    def test_self_dual(self, A, T43):
        assert rep_isomorphic(contravariant_dual(A, T43), T43)

    def test_standard_filtration(self, A, T43):
        assert rep_isomorphic(build_tilting(A, DEFAULT_ORDER, "43"), T43)
        assert delta_multiplicities(A, DEFAULT_ORDER, T43) == {v: 1 for v in DEFAULT_ORDER}
        assert build_tilting(A, DEFAULT_ORDER, "10").dim == 1

    def test_delta_43_radical(self, A):
        D = delta_module(A, DEFAULT_ORDER, "43")
        N = nabla_module(A, DEFAULT_ORDER, "43")
        radD = sub_rep(D, radical_series(D)[1])
        assert rep_isomorphic(radD, quotient_rep(N, socle_series(N)[1]))
        B = builtin_presentation("B-subalgebra", A.presentation.field)
        onB = restrict_to(radD, B.quiver)
        assert onB.satisfies(B) and onB.dim == 4
        assert layer_sets(radical_filtration(onB)) == [["10"], ["05", "51"], ["10"]]
        assert is_rigid(onB)

    def test_rad_mod_soc(self, T43):
        mid = rad_mod_soc(T43)
        assert mid.dim == 8 and mid.dims["43"] == 1

    def test_variant_tilting(self):
        Ap = build_algebra(builtin_presentation("A-prime"))
        T = build_tilting(Ap, DEFAULT_ORDER, "43")
        assert T.dim == 11
        assert delta_multiplicities(Ap, DEFAULT_ORDER, T) == {"10": 2, "05": 1, "51": 1, "43": 1}


class TestFourSubspaces:
    def test_report(self, T43):
        r = four_subspace_report(T43)
        assert (r.dim_V, r.dims) == (3, (2, 2, 1, 1))
        assert r.dim_U1_cap_U2 == 1 and r.dim_U3_plus_U4 == 2
        assert r.cap_is_image_of_gg and r.sum_is_kernel_of_gg
        assert r.all_distinct and r.cap_below_sum
        assert r.U1_plus_U2_is_V and r.U3_cap_U4_is_zero
        assert r.lattice_size == 8

    def test_json(self, T43):
        data = four_subspace_report(T43).to_json()
        assert json.loads(json.dumps(data))["dims"] == [2, 2, 1, 1]


class TestCoefficientQuiver:
    EDGE = re.compile(r'"(\d\d)_(\d+)" -> "(\d\d)_(\d+)"')

    def test_t43_edges(self, T43):
        for strategy in ("native", "radical"):
            dot = coefficient_quiver_dot(T43, strategy, name="T43")
            assert len(self.EDGE.findall(dot)) == 12
            assert dot.count("[label=") == 10 + 12
        assert len(coefficient_quiver_edges(T43)) == 12

    def test_arrow_counts(self, T43):
        counts = Counter(e[4] for e in coefficient_quiver_edges(T43))
        assert counts == Counter({"beta": 3, "alpha": 2, "alpha'": 2, "beta'": 2, "gamma": 2, "gamma'": 1})

    def test_native_labels(self, T43):
        assert T43.labels["10"] == ["e10", "αα′", "ββ′", "αα′γγ′", "αα′γγ′αα′"]
        assert T43.labels["43"] == ["αα′γ"]

    def test_small_modules(self, A_qq):
        assert len(coefficient_quiver_edges(projective(A_qq, "43"))) == 5
        S = delta_module(A_qq, DEFAULT_ORDER, "10")
        dot = coefficient_quiver_dot(S)
        assert len(self.EDGE.findall(dot)) == 0 and dot.count("[label=") == 1
        assert dot.startswith("digraph")

    def test_radical_adapted_is_isomorphic(self, T43):
        assert rep_isomorphic(radical_adapted(T43), T43)

    def test_unknown_strategy(self, T43):
        with pytest.raises(ValueError):
            coefficient_quiver_dot(T43, "bogus")


def test_generated_submodule_is_closed(A_qq):
    P = projective(A_qq, "10")
    S = generated_submodule(P, [path_element(A_qq, P, ["alpha"])])
    assert sum(x.dim for x in S.values()) == projective(A_qq, "05").dim


def test_extension_order_irrelevant(A_qq):
    from sl3tilt.pathalg import universal_extension

    X = delta_module(A_qq, DEFAULT_ORDER, "43")
    changed = True
    while changed:
        changed = False
        for w in DEFAULT_ORDER:  # increasing instead of decreasing
            X, e = universal_extension(A_qq, DEFAULT_ORDER, w, X)
            changed = changed or bool(e)
    # the other order also ends at a tilting module, now with two extra simple summands T(10)
    from sl3tilt.pathalg import direct_sum

    S = delta_module(A_qq, DEFAULT_ORDER, "10")
    assert rep_isomorphic(X, direct_sum([tilting_43(A_qq), S, S]))
