
import pytest
from hypothesis import given, settings, strategies as st

from assocext.coalgebra import C, Cochain, bracket, phi
from assocext.deformations import (
    DeformationDirection,
    Dual,
    RepDeformationA,
    anticommutator_matrix,
    check_deformation,
    check_rep_a,
    classify_infinitesimal_deformations,
    deformation_key,
    dual_square,
    equivalence_moves,
    eta_admissible,
    rep_b_obstruction,
    rep_deform_A,
    rep_deform_B,
    solve_zeta,
)
from assocext.extensions import ExtensionStructure
from properties import brute_force_deformations, dual_valid

rationals = st.fractions(max_denominator=6).filter(lambda x: abs(x) < 10)


@settings(max_examples=100, deadline=None)
@given(rationals, rationals, rationals, rationals)
def test_dual_ring(a, b, c, d):
    x, y = Dual(a, b), Dual(c, d)
    assert x * y == Dual(a * c, a * d + b * c)
    assert Dual(0, 1) * Dual(0, 1) == 0
    assert (x + y) - y == x
    assert 2 * x == x + x


def test_dual_square_splits(S02, D02):
    d = D02["d6"]
    x = phi(S02.space, [1, 2], 2)
    const, lin = dual_square(d, x)
    assert const == bracket(d, d)
    assert lin == bracket(d, x) * 2


@pytest.fixture
def d6(S02, D02):
    return ExtensionStructure.from_codifferential(D02["d6"], S02)


@pytest.fixture
def d4(S02, D02):
    return ExtensionStructure.from_codifferential(D02["d4"], S02)


def test_check_deformation_d6(d6, V02):
    z = Cochain.zero(V02)
    both = phi(V02, [1, 2], 2) + phi(V02, [2, 1], 2)
    assert check_deformation(d6, DeformationDirection(both, z)).passed
    r = check_deformation(d6, DeformationDirection(phi(V02, [1, 2], 2), z))
    assert r.failures() == ["cond2: [delta+lambda,zeta]+[psi,eta]"]


def test_check_deformation_rejects_wrong_pieces(d6, V02):
    with pytest.raises(ValueError):
        check_deformation(d6, DeformationDirection(phi(V02, [1, 1], 2), Cochain.zero(V02)))


def test_eta_admissible(d6, V02):
    both = phi(V02, [1, 2], 2) + phi(V02, [2, 1], 2)
    adm = eta_admissible(d6, both)
    assert adm.ok and adm.stage == "ok"
    assert adm.zeta == Cochain.zero(V02)
    bad = eta_admissible(d6, phi(V02, [1, 2], 2))
    assert not bad.ok and bad.stage == "D_psi-cocycle"


def test_solve_zeta_d4(d4, V02):
    # rescaling the action is obstructed since lambda must stay idempotent
    assert solve_zeta(d4, d4.lambda_) is None
    assert solve_zeta(d4, Cochain.zero(V02)) == Cochain.zero(V02)
    # a trivial direction coming from beta = phi[1->2]
    beta = phi(V02, [1], 2)
    eta = bracket(d4.mu, beta)
    zeta = bracket(d4.dl, beta)
    assert zeta and check_deformation(d4, DeformationDirection(eta, zeta)).passed


def test_classify_d6(d6, V02):
    cls = classify_infinitesimal_deformations(d6)
    assert cls.dims == (1, 0)
    assert cls.eta_classes == [phi(V02, [1, 2], 2) + phi(V02, [2, 1], 2)]
    assert len(cls.directions) == 1


def test_classify_d4(d4):
    cls = classify_infinitesimal_deformations(d4)
    assert cls.dims == (0, 0)
    assert cls.directions == ()


def test_classify_rejects_invalid(S02, V02):
    bad = ExtensionStructure.build(S02, delta=phi(V02, [1, 1], 1), lambda_=phi(V02, [1, 2], 2, 2))
    with pytest.raises(ValueError):
        classify_infinitesimal_deformations(bad)


@pytest.mark.parametrize("name", ["d2", "d3", "d4", "d5", "d6"])
def test_brute_force_agrees(S02, D02, name):
    e = ExtensionStructure.from_codifferential(D02[name], S02)
    valid, groups = brute_force_deformations(e)
    cls = classify_infinitesimal_deformations(e)
    ok = [(x, z) for x in _grid(e, C(1, 1)) for z in _grid(e, C(0, 2))
          if deformation_key(e, x, z, cls) is not None]
    assert set(ok) == set(valid)
    keyed = {}
    for x, z in valid:
        keyed.setdefault(deformation_key(e, x, z, cls), set()).add((x, z))
    assert sorted(map(frozenset, keyed.values()), key=sorted_key) == sorted(map(frozenset, groups), key=sorted_key)


def sorted_key(group):
    return sorted(repr(p) for p in group)


def _grid(e, piece):
    from properties import grid_cochains
    from assocext.coalgebra import piece_basis

    return list(grid_cochains(e.space, piece_basis(e.split, piece)))


def test_key_invariant_under_moves(d6, V02):
    cls = classify_infinitesimal_deformations(d6)
    eta = phi(V02, [1, 2], 2) + phi(V02, [2, 1], 2)
    zeta = solve_zeta(d6, eta)
    key = deformation_key(d6, eta, zeta, cls)
    for _, _, de, dz in equivalence_moves(d6):
        assert deformation_key(d6, eta + de, zeta + dz, cls) == key
    # the canonical representative maps to itself
    ce = cls.eta_cohomology.canonical(eta)
    assert deformation_key(d6, ce, solve_zeta(d6, ce), cls) == key


def test_dual_validity_oracle(d6, V02):
    both = phi(V02, [1, 2], 2) + phi(V02, [2, 1], 2)
    assert dual_valid(d6.d, both)
    assert not dual_valid(d6.d, phi(V02, [1, 2], 2))


def modules_11(V, S):
    out = []
    for a in (0, -1):
        for b in (0, 1):
            lam = phi(V, [1, 2], 1, a) + phi(V, [2, 1], 1, b)
            out.append(((a, b), ExtensionStructure.build(S, delta=phi(V, [2, 2], 2), lambda_=lam)))
    return out


def test_rep_deformations_pinned(V11, S11w):
    for _, e in modules_11(V11, S11w):
        A = rep_deform_A(e)
        assert (A.dims, A.admissible_dim, A.coboundary_dim) == ((0, 0), 1, 1)
        assert A.examples[0].delta1 == phi(V11, [2, 2], 2)
        assert A.examples[0].lambda1 == e.lambda_
        B = rep_deform_B(e)
        assert (B.dims, B.admissible_dim, B.coboundary_dim) == ((0, 0), 0, 0)
        assert rep_deform_A(e).dims == A.dims


def test_check_rep_a(V11, S11w):
    _, e = modules_11(V11, S11w)[3]
    res = check_rep_a(e, RepDeformationA(e.delta, e.lambda_))
    assert not any(res.values())
    res = check_rep_a(e, RepDeformationA(e.delta, Cochain.zero(V11)))
    assert any(res.values())


def test_rep_requires_psi_zero(S02, D02):
    with pytest.raises(ValueError):
        rep_deform_A(ExtensionStructure.from_codifferential(D02["d6"], S02))


def test_rep_b_obstruction_needs_cocycle(V11, S11w):
    _, e = modules_11(V11, S11w)[0]
    assert not rep_b_obstruction(e, Cochain.zero(V11))


@pytest.mark.parametrize("arity", [1, 2, 3])
def test_anticommutator_vanishes(V11, S11w, arity):
    for _, e in modules_11(V11, S11w):
        m = anticommutator_matrix(e.delta, e.lambda_, e.split, arity)
        assert all(x == 0 for row in m.rows for x in row)


def test_anticommutator_detects_non_module(V11, S11w):
    # lambda = 2 psi[1,2->1] is not a left module over delta = psi[2,2->2]
    lam = phi(V11, [1, 2], 1, 2)
    delta = phi(V11, [2, 2], 2)
    m = anticommutator_matrix(delta, lam, S11w, 1)
    assert any(x != 0 for row in m.rows for x in row)
