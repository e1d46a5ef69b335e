from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from assocext.coalgebra import Cochain, SplitSpace, apply_group_element, phi, pullback_exp_beta
from assocext.extensions import (
    DEFAULT_GRID,
    ExtensionStructure,
    ScalarGrid,
    Witness,
    algebra_invariants,
    bimodule_report,
    beta_matrix,
    classify_bimodule_extensions,
    classify_extensions,
    classify_infinitesimal_extensions,
    equivalent_general,
    equivalent_restricted,
    find_beta,
    fingerprint,
    mc_obstruction,
    solve_psi,
    tau_classes,
    validate,
)
from assocext.linalg import Matrix
from properties import extension_codifferentials
from strategies import even_invertible


def ext(d, split):
    return ExtensionStructure.from_codifferential(d, split)


def test_grid_normalises_and_requires_zero_one():
    g = ScalarGrid.of(1, 0, -1, 1)
    # ordered by size, positive before negative
    assert g.values == (0, 1, -1)
    assert set(g.nonzero) == {-1, 1}
    with pytest.raises(ValueError):
        ScalarGrid.of(1, 2)
    assert set(DEFAULT_GRID.doubled().values) == {-2, -1, 0, 1, 2}
    assert Fraction(1, 2) in ScalarGrid.of(0, 1, 2).doubled().values


def test_structure_rejects_bad_pieces(S02, V02):
    with pytest.raises(ValueError):
        ExtensionStructure.build(S02, delta=phi(V02, [2, 2], 2))
    with pytest.raises(ValueError):
        ext(phi(V02, [1, 2], 1), S02)


def test_structure_rejects_even_components(S11w, V11):
    # psi[1,2->2] is even on 1|1, so it cannot be lambda
    with pytest.raises(ValueError):
        ExtensionStructure.build(S11w, lambda_=phi(V11, [1, 2], 2))


def test_decomposition_and_actions(S02, D02):
    e = ext(D02["d4"], S02)
    assert e.delta == phi(S02.space, [1, 1], 1)
    assert e.lambda_L == phi(S02.space, [1, 2], 2)
    assert e.lambda_R == phi(S02.space, [2, 1], 2)
    assert e.d == D02["d4"]
    assert e.replace(psi=phi(S02.space, [1, 1], 2)).psi == phi(S02.space, [1, 1], 2)


@pytest.mark.parametrize("name", ["d2", "d3", "d4", "d5", "d6"])
def test_listed_02_extensions_validate(S02, D02, name):
    assert validate(ext(D02[name], S02)).passed


def test_validate_names_failures(S02, V02):
    # lambda = 2 psi[1,2->2] with delta = psi[1,1->1] breaks the MC equation
    e = ExtensionStructure.build(S02, delta=phi(V02, [1, 1], 1), lambda_=phi(V02, [1, 2], 2, 2))
    r = validate(e)
    assert not r.passed
    assert r.failures() == ["MC: [delta,lambda]+1/2[lambda,lambda]+[mu,psi]"]
    assert r.square


@pytest.mark.parametrize("a, obstructed", [(0, False), (1, False), (2, True), (-1, True)])
def test_mc_obstruction(S02, V02, a, obstructed):
    delta = phi(V02, [1, 1], 1)
    lam = phi(V02, [1, 2], 2, a)
    obs = mc_obstruction(delta, Cochain.zero(V02), lam, S02)
    assert bool(obs) == obstructed
    assert (solve_psi(delta, Cochain.zero(V02), lam, S02) is None) == obstructed


def test_solve_psi_trivial(S02, V02):
    z = Cochain.zero(V02)
    psi, free = solve_psi(z, z, z, S02)
    assert not psi
    assert free.dim == 1


def test_tau_classes_trivial(S02, V02):
    cls = tau_classes(ExtensionStructure.build(S02))
    assert len(cls) == 2
    assert cls[0].is_zero
    assert cls[1].rep == phi(V02, [1, 1], 2)


def test_beta_matrix(V02):
    assert beta_matrix(phi(V02, [1], 2, 3)) == Matrix.from_rows([[0, 0], [3, 0]])


@settings(max_examples=100, deadline=None)
@given(extension_codifferentials())
def test_find_beta_round_trip(data):
    split, d, beta = data
    e1 = ext(d, split)
    e2 = ext(pullback_exp_beta(d, beta, split), split)
    found = find_beta(e1, e2)
    assert found is not None
    assert pullback_exp_beta(d, found, split) == e2.d
    assert equivalent_restricted(e1, e2) is not None


def test_restricted_needs_same_delta_mu(S02, D02):
    with pytest.raises(ValueError):
        equivalent_restricted(ext(D02["d5"], S02), ext(D02["d6"], S02))


def test_restricted_inequivalent(S02, D02):
    assert find_beta(ext(D02["d2"], S02), ext(D02["d5"], S02)) is None


def test_general_rescale(S11m, V11):
    e1 = ExtensionStructure.build(S11m, psi=phi(V11, [1, 1], 2))
    e2 = ExtensionStructure.build(S11m, psi=phi(V11, [1, 1], 2, 4))
    grid = ScalarGrid.of(-2, -1, 0, 1, 2)
    w = equivalent_general(e1, e2, grid)
    assert isinstance(w, Witness)
    assert apply_group_element(e1.d, w.h) == e2.d
    assert equivalent_general(e1, e2, DEFAULT_GRID) is None


def test_general_swap_needs_split_change(S02, D02, V02):
    a = ExtensionStructure.build(S02, mu=phi(V02, [2, 2], 2))
    b = ExtensionStructure.build(S02, delta=phi(V02, [1, 1], 1))
    assert equivalent_general(a, b) is None
    w = equivalent_general(a, b, preserve_split=False)
    assert w is not None and w.h == Matrix.from_rows([[0, 1], [1, 0]])


def test_general_with_beta(S02, D02, V02):
    e1 = ext(D02["d2"], S02)
    beta = phi(V02, [1], 2)
    e2 = ext(pullback_exp_beta(e1.d, beta, S02), S02)
    w = equivalent_general(e1, e2)
    assert w is not None
    assert apply_group_element(e1.d, w.h) == e2.d


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(["d2", "d3", "d4", "d5", "d6"]), st.data())
def test_fingerprint_invariant(name, data):
    from conftest import moduli_02
    from assocext.coalgebra import GradedSpace

    V = GradedSpace.from_even_odd((), ("f1", "f2"))
    split = SplitSpace.from_names(V, ["f2"], ["f1"])
    d = moduli_02(V)[name]
    g = data.draw(even_invertible(V, split))
    e = ext(d, split)
    assert fingerprint(ext(apply_group_element(d, g), split)) == fingerprint(e)
    assert algebra_invariants(apply_group_element(d, g)) == algebra_invariants(d)


def test_classify_case1_and_stability(S02, V02, D02):
    z = Cochain.zero(V02)
    res = classify_extensions(z, z, S02)
    assert res.status == "ok"
    assert res.codifferentials == [D02["d6"]]
    wide = classify_extensions(z, z, S02, grid=DEFAULT_GRID.doubled())
    assert len(wide.classes) == 1
    assert len(classify_extensions(z, z, S02, include_trivial=True).classes) == 2


def test_classify_case4_stability(S02, V02, D02):
    delta, mu = phi(V02, [1, 1], 1), phi(V02, [2, 2], 2)
    assert classify_extensions(delta, mu, S02).codifferentials == [D02["d1"]]
    assert classify_extensions(delta, mu, S02, grid=DEFAULT_GRID.doubled()).codifferentials == [D02["d1"]]


def test_classify_rejects_non_codifferential(S02, V02):
    with pytest.raises(ValueError):
        classify_extensions(phi(V02, [2, 2], 2), Cochain.zero(V02), S02)


def test_classify_parallel_matches_serial(S02, V02):
    delta = phi(V02, [1, 1], 1)
    z = Cochain.zero(V02)
    a = classify_extensions(delta, z, S02)
    b = classify_extensions(delta, z, S02, parallel=True)
    assert a.codifferentials == b.codifferentials


def test_infinitesimal_case2(S02, V02):
    inf = classify_infinitesimal_extensions(phi(V02, [1, 1], 1), Cochain.zero(V02), S02)
    # with delta = psi[1,1->1] the linearised MC equation leaves only lambda = 0
    assert inf.lambda_basis == ()
    assert inf.tau_basis == ()
    assert inf.representatives == ((Cochain.zero(V02), Cochain.zero(V02)),)


def test_infinitesimal_trivial(S02, V02):
    z = Cochain.zero(V02)
    inf = classify_infinitesimal_extensions(z, z, S02)
    assert len(inf.lambda_basis) == 2
    assert inf.tau_basis == (phi(V02, [1, 1], 2),)
    assert len(inf.representatives) == 9


def test_bimodule_d4(S02, V02, D02):
    e = ext(D02["d4"], S02)
    assert bimodule_report(e).passed
    res = classify_bimodule_extensions(e.delta, e.mu, e.lambda_, S02)
    assert res.dim == 0 and res.classes == []


def test_bimodule_rejects_non_module(S02, V02):
    with pytest.raises(ValueError):
        classify_bimodule_extensions(phi(V02, [1, 1], 1), Cochain.zero(V02), phi(V02, [1, 2], 2, 2), S02)


@pytest.mark.parametrize("side", ["M", "W"])
def test_degenerate_split(side):
    from assocext.coalgebra import GradedSpace

    V = GradedSpace.from_even_odd((), ("f1",))
    z = Cochain.zero(V)
    prod = phi(V, [1, 1], 1)
    if side == "M":
        split = SplitSpace.from_names(V, [], ["f1"])
        res = classify_extensions(prod, z, split)
    else:
        split = SplitSpace.from_names(V, ["f1"], [])
        res = classify_extensions(z, prod, split)
    assert res.codifferentials == [prod]


@settings(max_examples=50, deadline=None)
@given(extension_codifferentials())
def test_restricted_implies_general(data):
    split, d, beta = data
    e1 = ext(d, split)
    e2 = ext(pullback_exp_beta(d, beta, split), split)
    w = equivalent_general(e1, e2)
    assert w is not None
    assert apply_group_element(e1.d, w.h) == e2.d
