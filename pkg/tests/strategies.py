"""Hypothesis strategies for small graded spaces and cochains."""

from fractions import Fraction

from hypothesis import strategies as st

from assocext.coalgebra import (
    Cochain,
    GradedSpace,
    SplitSpace,
    apply_group_element,
    cochain_basis,
    piece_basis,
)
from assocext.linalg import Matrix, rank

coefficients = st.one_of(
    st.integers(-3, 3).filter(bool).map(Fraction),
    st.tuples(st.integers(-3, 3).filter(bool), st.integers(2, 4)).map(lambda t: Fraction(*t)),
)


@st.composite
def spaces(draw, max_dim=3):
    n = draw(st.integers(1, max_dim))
    n_even = draw(st.integers(0, n))
    names = [f"e{i + 1}" for i in range(n)]
    return GradedSpace.from_even_odd(names[:n_even], names[n_even:])


@st.composite
def split_spaces(draw, max_dim=3):
    space = draw(spaces(max_dim))
    member = tuple(draw(st.sampled_from(["M", "W"])) for _ in range(space.dim))
    return SplitSpace(space, member)


def cochains_from(space, basis, max_terms=4):
    basis = list(basis)
    if not basis:
        return st.just(Cochain.zero(space))
    return st.lists(st.tuples(st.sampled_from(basis), coefficients), max_size=max_terms).map(
        lambda ts: Cochain(space, {b: c for b, c in ts})
    )


@st.composite
def homogeneous_cochains(draw, space, max_arity=3):
    arity = draw(st.integers(1, max_arity))
    parity = draw(st.integers(0, 1))
    return draw(cochains_from(space, cochain_basis(space, arity, parity)))


@st.composite
def piece_cochains(draw, split, pieces):
    piece = draw(st.sampled_from(pieces))
    return piece, draw(cochains_from(split.space, piece_basis(split, piece)))


@st.composite
def even_invertible(draw, space, split=None, entries=(-2, -1, 0, 1, 2)):
    """Even (and block diagonal if split is given) invertible matrix."""
    n = space.dim
    par = space.parities
    rows = []
    for r in range(n):
        row = []
        for j in range(n):
            allowed = par[r] == par[j] and (split is None or split.membership[r] == split.membership[j])
            row.append(Fraction(draw(st.sampled_from(entries))) if allowed else Fraction(0))
        rows.append(row)
    g = Matrix.from_rows(rows, n)
    if rank(g) < n:
        # fall back to a diagonal perturbation, which is always even and block diagonal
        g = Matrix.from_rows([[Fraction(int(r == j)) for j in range(n)] for r in range(n)], n)
    return g


def transported(d, g):
    return apply_group_element(d, g)
