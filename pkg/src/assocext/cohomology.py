"""Coboundary operators D_a = ad_a and the cohomology tower built from them.

All computations are per bidegree piece and return explicit subspaces in
the coordinates of that piece's basis (see :func:`coalgebra.piece_basis`),
so that class equality is a single reduction against a modulus.

Cochains that may appear as solutions or lifts ("the complex") are the
natural-parity cochains of bidegree C^{k,l} or C^l; maps W -> M-containing
inputs are never part of an extension and are left out.  With
``restricted=True`` the pieces C^{0,l} are dropped as well, which is the
k >= 1 complex used for deformations of representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

from .coalgebra import (
    M,
    Bidegree,
    Cochain,
    SplitSpace,
    bidegree,
    bracket,
    cochain_basis,
    natural_parity,
    piece_basis,
)
from .linalg import Matrix, Subspace, kernel, solve_affine

MU_SHIFT = (1, 0)
DL_SHIFT = (0, 1)
PSI_SHIFT = (-1, 2)


def shifted(piece: Bidegree, shift) -> Bidegree:
    return Bidegree(piece.k + shift[0], piece.l + shift[1], piece.target)


@lru_cache(maxsize=None)
def complex_basis(split: SplitSpace, arity: int, restricted: bool = False) -> tuple:
    """Natural-parity basis of all admissible pieces of one arity."""
    if arity < 1:
        return ()
    out = []
    for b in cochain_basis(split.space, arity, natural_parity(arity)):
        bd = bidegree(b, split)
        if bd.ideal_violating:
            continue
        if restricted and bd.target == M and bd.k == 0:
            continue
        out.append(b)
    return tuple(out)


def basis_of(split: SplitSpace, pieces, restricted: bool = False) -> tuple:
    if isinstance(pieces, Bidegree):
        pieces = [pieces]
    keep = set()
    for p in pieces:
        if restricted and p.target == M and p.k == 0:
            continue
        keep.update(piece_basis(split, p))
    return tuple(sorted(keep))


@lru_cache(maxsize=4096)
def _ad_images(alpha: Cochain, basis: tuple) -> tuple:
    space = alpha.space
    return tuple(bracket(alpha, Cochain(space, {b: 1})) for b in basis)


def _matrix(images: Sequence[Cochain], basis: Sequence) -> Matrix:
    return Matrix.from_columns([c.to_vector(basis) for c in images], len(basis))


def _support(cochains) -> tuple:
    s = set()
    for c in cochains:
        s.update(b for b, _ in c.items())
    return tuple(sorted(s))


def _combine(space, basis, vec) -> Cochain:
    return Cochain.from_vector(space, basis, vec)


def _lin_combo(space, vectors_coeffs, cochains) -> Cochain:
    out = Cochain.zero(space)
    for x, c in zip(vectors_coeffs, cochains):
        if x:
            out = out + c * x
    return out


@dataclass(frozen=True)
class CoboundaryOperator:
    alpha: Cochain
    domain_basis: tuple
    codomain_basis: tuple
    matrix: Matrix

    def __call__(self, phi: Cochain) -> Cochain:
        v = self.matrix @ phi.to_vector(self.domain_basis)
        return _combine(self.alpha.space, self.codomain_basis, v)


def coboundary_matrix(alpha: Cochain, split: SplitSpace, dom, cod, restricted: bool = False) -> CoboundaryOperator:
    """Matrix of phi -> [alpha, phi] from the ``dom`` pieces into the ``cod`` pieces.

    ``dom``/``cod`` are a Bidegree or a list of them.  Raises ValueError if
    some image has a component outside ``cod``.
    """
    if alpha.parity not in (None, 1) or (alpha and alpha.parity is None):
        raise ValueError("coboundary operators need an odd alpha")
    db = basis_of(split, dom, restricted)
    cb = basis_of(split, cod, restricted)
    images = _ad_images(alpha, db)
    try:
        mat = _matrix(images, cb)
    except ValueError:
        raise ValueError(f"ad_alpha maps {dom} outside {cod}") from None
    return CoboundaryOperator(alpha, db, cb, mat)


def full_coboundary(alpha: Cochain, split: SplitSpace, arity: int, restricted: bool = False) -> CoboundaryOperator:
    """[alpha, -] on the whole complex of one arity, into the next arity."""
    db = complex_basis(split, arity, restricted)
    cb = complex_basis(split, arity + max(alpha.arities, default=2) - 1, restricted)
    images = _ad_images(alpha, db)
    if restricted:
        # restriction is a quotient on the codomain side: drop C^{0,l} coordinates
        keep = set(cb)
        images = tuple(c.restrict(lambda b: b in keep) for c in images)
    return CoboundaryOperator(alpha, db, cb, _matrix(images, cb))


def cocycle_space(alpha: Cochain, basis: Sequence) -> Subspace:
    """{phi in span(basis) : [alpha, phi] = 0}."""
    basis = tuple(basis)
    if not basis:
        return Subspace.zero(0)
    images = _ad_images(alpha, basis)
    sup = _support(images)
    if not sup:
        return Subspace.full(len(basis))
    return kernel(_matrix(images, sup))


def constrained_images(maps: Sequence, space, source: Sequence[Cochain], target_basis: Sequence):
    """Span of T(x) over x in span(source) subject to side conditions.

    ``maps`` is ``(T, *conditions)``: each is a function Cochain -> Cochain.
    The conditions must vanish and T(x) must lie in span(target_basis).
    Returns (subspace of target coordinates, list of admissible x, list of T(x)).
    """
    source = list(source)
    n = len(target_basis)
    if not source:
        return Subspace.zero(n), [], []
    T, conds = maps[0], maps[1:]
    timgs = [T(x) for x in source]
    tset = set(target_basis)
    outside = [c.restrict(lambda b: b not in tset) for c in timgs]
    blocks = [outside] + [[f(x) for x in source] for f in conds]
    rows = []
    for imgs in blocks:
        sup = _support(imgs)
        if sup:
            rows.extend(_matrix(imgs, sup).rows)
    if rows:
        k = kernel(Matrix(tuple(rows), len(source)))
        combos = list(k.basis)
    else:
        combos = [tuple(int(i == j) for j in range(len(source))) for i in range(len(source))]
    xs = [_lin_combo(space, v, source) for v in combos]
    ys = [_lin_combo(space, v, timgs) for v in combos]
    sub = Subspace.span([y.to_vector(target_basis) for y in ys], n)
    return sub, xs, ys


def coboundaries_in(alpha: Cochain, split: SplitSpace, target_basis: Sequence, sources=None, restricted: bool = False) -> Subspace:
    """{[alpha, y] : y in sources, [alpha, y] in span(target_basis)}.

    ``sources`` defaults to the whole complex in the preceding arity.
    """
    target_basis = tuple(target_basis)
    if not target_basis or not alpha:
        return Subspace.zero(len(target_basis))
    if sources is None:
        arity = target_basis[0].arity - (max(alpha.arities) - 1)
        sources = [Cochain(alpha.space, {b: 1}) for b in complex_basis(split, arity, restricted)]
    sub, _, _ = constrained_images([lambda x: bracket(alpha, x)], alpha.space, sources, target_basis)
    return sub


def is_codifferential(alpha: Cochain) -> bool:
    return not bracket(alpha, alpha)


@dataclass(frozen=True)
class CohomologySpace:
    """Cocycles modulo coboundaries inside one graded piece."""

    space: object
    piece: Bidegree
    ambient_basis: tuple
    cocycles: Subspace
    coboundaries: Subspace

    @property
    def dim(self) -> int:
        return self.cocycles.dim - self.coboundaries.dim

    @property
    def modulus(self) -> Subspace:
        return self.coboundaries

    @property
    def classes(self) -> list:
        """Canonical representatives of a basis of the cohomology."""
        vecs = self.cocycles.complement_basis(self.modulus)
        return [_combine(self.space, self.ambient_basis, v) for v in vecs]

    def vector(self, phi: Cochain) -> tuple:
        return phi.to_vector(self.ambient_basis)

    def is_cocycle(self, phi: Cochain) -> bool:
        try:
            return self.vector(phi) in self.cocycles
        except ValueError:
            return False

    def canonical(self, phi: Cochain) -> Cochain:
        """Canonical representative of the class of phi (which must be a cocycle)."""
        v = self.vector(phi)
        if v not in self.cocycles:
            raise ValueError(f"{phi} is not a cocycle in {self.piece}")
        return _combine(self.space, self.ambient_basis, self.modulus.reduce(v))

    def is_trivial_class(self, phi: Cochain) -> bool:
        return not self.canonical(phi)


def _as_cochains(space, basis):
    return [Cochain(space, {b: 1}) for b in basis]


def cohomology(alpha: Cochain, split: SplitSpace, piece: Bidegree, sources=None, restricted: bool = False) -> CohomologySpace:
    """H_alpha at ``piece``: kernel of ad_alpha there modulo ad_alpha-images lying in it.

    ``sources`` are pieces whose images are taken as coboundaries; by
    default every piece of the complex in the preceding arity.
    """
    if not is_codifferential(alpha):
        raise ValueError("alpha is not a codifferential: [alpha, alpha] != 0")
    basis = basis_of(split, piece, restricted)
    Z = cocycle_space(alpha, basis) if basis else Subspace.zero(0)
    src = None
    if sources is not None:
        src = _as_cochains(split.space, basis_of(split, sources, restricted))
    B = coboundaries_in(alpha, split, basis, src, restricted)
    return CohomologySpace(split.space, piece, basis, Z, B)


def restricted_cohomology(mu: Cochain, constraint: Cochain, split: SplitSpace, piece: Bidegree, restricted: bool = False, sources=None) -> CohomologySpace:
    """H_mu computed inside the subcomplex ker(D_constraint).

    Requires [mu, constraint] = 0 so that D_mu preserves the subcomplex.
    ``sources`` limits the pieces whose images count as coboundaries.
    """
    if not is_codifferential(mu):
        raise ValueError("mu is not a codifferential")
    if bracket(mu, constraint):
        raise ValueError("[mu, constraint] != 0, D_mu does not preserve ker(D_constraint)")
    space = split.space
    basis = basis_of(split, piece, restricted)
    n = len(basis)
    K = cocycle_space(constraint, basis) if basis else Subspace.zero(0)
    Zmu = cocycle_space(mu, basis) if basis else Subspace.zero(0)
    Z = K.intersection(Zmu) if basis else Subspace.zero(0)
    if not basis or not mu:
        return CohomologySpace(space, piece, basis, Z, Subspace.zero(n))
    if sources is None:
        prev = complex_basis(split, piece.arity - 1, restricted)
    else:
        prev = basis_of(split, sources, restricted)
    Kprev = cocycle_space(constraint, prev) if prev else Subspace.zero(0)
    src = [_combine(space, prev, v) for v in Kprev.basis]
    B = coboundaries_in(mu, split, basis, src, restricted)
    return CohomologySpace(space, piece, basis, Z, B)


@dataclass(frozen=True)
class IteratedClass:
    """Class [phi-bar] of the cohomology of D_{outer} on H_{inner}."""

    rep: Cochain
    piece: Bidegree
    basis: tuple = field(repr=False)
    inner_mod: Subspace = field(repr=False)
    outer_mod: Subspace = field(repr=False)
    extra_mod: Optional[Subspace] = field(default=None, repr=False)

    @property
    def modulus(self) -> Subspace:
        m = self.inner_mod + self.outer_mod
        return m + self.extra_mod if self.extra_mod is not None else m

    @property
    def is_zero(self) -> bool:
        return not self.rep

    def canonical_vector(self) -> tuple:
        return self.modulus.reduce(self.rep.to_vector(self.basis))

    def __eq__(self, other):
        if not isinstance(other, IteratedClass):
            return NotImplemented
        return (
            self.piece == other.piece
            and self.basis == other.basis
            and self.modulus == other.modulus
            and self.canonical_vector() == other.canonical_vector()
        )

    def __hash__(self):
        return hash((self.piece, self.canonical_vector()))


@dataclass(frozen=True)
class IteratedCohomology(CohomologySpace):
    """H_{inner, outer} at one piece.

    ``cocycles``: phi with [inner, phi] = 0 and [outer, phi] a D_inner-coboundary.
    ``inner_mod``: D_inner-coboundaries in the piece.
    ``outer_mod``: [outer, b] for lifts b with [inner, b] = 0 and image in the piece.
    """

    inner_mod: Subspace = None
    outer_mod: Subspace = None

    @property
    def modulus(self) -> Subspace:
        return self.inner_mod + self.outer_mod

    def class_of(self, phi: Cochain) -> IteratedClass:
        rep = self.canonical(phi)
        return IteratedClass(rep, self.piece, self.ambient_basis, self.inner_mod, self.outer_mod)

    @property
    def class_list(self) -> list:
        return [self.class_of(c) for c in self.classes]


def _check_tower(inner: Cochain, outer: Cochain, split: SplitSpace, restricted: bool):
    if not is_codifferential(inner):
        raise ValueError("inner operator is not a codifferential")
    if bracket(inner, outer):
        raise ValueError("[inner, outer] != 0")
    sq = bracket(outer, outer)
    if sq:
        if not inner:
            raise ValueError("[outer, outer] != 0 and there is no inner operator to absorb it")
        target = _support([sq])
        arity = next(iter(sq.arities)) - (max(inner.arities) - 1)
        src = complex_basis(split, arity, restricted)
        imgs = _ad_images(inner, src)
        sup = tuple(sorted(set(_support(imgs)) | set(target)))
        if solve_affine(_matrix(imgs, sup), sq.to_vector(sup)) is None:
            raise ValueError("induced MC equation fails: [outer, outer] is not a D_inner-coboundary")


def iterated_cohomology(
    inner: Cochain,
    outer: Cochain,
    split: SplitSpace,
    piece: Bidegree,
    lift_pieces=None,
    restricted: bool = False,
    check: bool = True,
) -> IteratedCohomology:
    """Cohomology of D_{outer-bar} on H_{inner} at ``piece``.

    ``lift_pieces`` bounds the cochains b whose images [outer, b] count as
    coboundaries; the default is the piece one W-input below ``piece``.
    """
    if check:
        _check_tower(inner, outer, split, restricted)
    space = split.space
    basis = basis_of(split, piece, restricted)
    n = len(basis)
    if not n:
        z = Subspace.zero(0)
        return IteratedCohomology(space, piece, basis, z, z, z, z)
    # cocycles: [inner, phi] = 0 and [outer, phi] = [inner, y] for some y
    ys = complex_basis(split, piece.arity + 1 - (max(inner.arities, default=2) - 1), restricted)
    phi_imgs_in = _ad_images(inner, basis)
    phi_imgs_out = _ad_images(outer, basis)
    y_imgs = _ad_images(inner, ys) if inner else ()
    sup_in = _support(phi_imgs_in)
    sup_out = tuple(sorted(set(_support(phi_imgs_out)) | set(_support(y_imgs))))
    rows = []
    if sup_in:
        rows.extend(r + (0,) * len(y_imgs) for r in _matrix(phi_imgs_in, sup_in).rows)
    if sup_out:
        a = _matrix(phi_imgs_out, sup_out)
        b = _matrix([-c for c in y_imgs], sup_out) if y_imgs else None
        for i, r in enumerate(a.rows):
            rows.append(r + (b.rows[i] if b is not None else ()))
    if rows:
        k = kernel(Matrix(tuple(tuple(r) for r in rows), n + len(y_imgs)))
        Z = Subspace.span([v[:n] for v in k.basis], n)
    else:
        Z = Subspace.full(n)
    inner_mod = coboundaries_in(inner, split, basis, None, restricted)
    if lift_pieces is None:
        lift_pieces = [Bidegree(piece.k, piece.l - 1, piece.target)] if piece.l >= 1 else []
    lifts = _as_cochains(space, basis_of(split, lift_pieces, restricted))
    outer_mod, _, _ = constrained_images(
        [lambda x: bracket(outer, x), lambda x: bracket(inner, x)], space, lifts, basis
    )
    H = IteratedCohomology(space, piece, basis, Z, inner_mod + outer_mod, inner_mod, outer_mod)
    if check and not H.modulus <= Z:
        raise ValueError("coboundaries are not cocycles; the operator does not square to zero here")
    return H


def _solve_in_piece(alpha: Cochain, split: SplitSpace, piece: Bidegree, rhs: Cochain):
    """Particular x in ``piece`` with [alpha, x] = rhs, plus the homogeneous solutions."""
    space = split.space
    basis = piece_basis(split, piece) if piece.k >= 0 and piece.l >= 0 else ()
    imgs = _ad_images(alpha, basis)
    sup = tuple(sorted(set(_support(imgs)) | set(_support([rhs]))))
    if not sup:
        return Cochain.zero(space), []
    if not basis:
        return None if rhs else (Cochain.zero(space), [])
    res = solve_affine(_matrix(imgs, sup), rhs.to_vector(sup))
    if res is None:
        return None
    x, hom = res
    return _combine(space, basis, x), [_combine(space, basis, v) for v in hom.basis]


def _corrected_operator(phi, first, dl, second, split, piece, first_shift, second_shift, beta=None, target=None):
    """[second, phi] - [dl, b] with [first, b] = [dl, phi]; the class in H_{first,dl}."""
    space = split.space
    bpiece = shifted(shifted(piece, DL_SHIFT), (-first_shift[0], -first_shift[1]))
    if beta is None:
        sol = _solve_in_piece(first, split, bpiece, bracket(dl, phi))
        if sol is None:
            raise ValueError("no b solves [first, b] = [dl, phi]; phi is not a class in H_{first,dl}")
        beta = sol[0]
    elif bracket(first, beta) != bracket(dl, phi):
        raise ValueError("supplied b does not solve [first, b] = [dl, phi]")
    out = bracket(second, phi) - bracket(dl, beta)
    tpiece = shifted(piece, second_shift)
    if target is None:
        target = iterated_cohomology(first, dl, split, tpiece)
    if not target.ambient_basis:
        if out:
            raise ArithmeticError("corrected operator produced terms in an empty piece")
        return target, Cochain.zero(space)
    if not target.is_cocycle(out):
        raise ArithmeticError("corrected operator output is not a cocycle")
    return target, out


def triple_D_psi(phi: Cochain, psi: Cochain, mu: Cochain, dl: Cochain, split: SplitSpace, piece: Bidegree, beta: Cochain = None, target=None) -> IteratedClass:
    """D_psi([phi-bar]) = [([psi, phi] - [dl, b])-bar] where [mu, b] = [dl, phi]."""
    target, out = _corrected_operator(phi, mu, dl, psi, split, piece, MU_SHIFT, PSI_SHIFT, beta, target)
    return target.class_of(out)


def triple_D_mu(phi: Cochain, psi: Cochain, mu: Cochain, dl: Cochain, split: SplitSpace, piece: Bidegree, beta: Cochain = None, target=None) -> IteratedClass:
    """D_mu on H_{psi,dl}: [mu, phi] - [dl, b] where [psi, b] = [dl, phi]."""
    target, out = _corrected_operator(phi, psi, dl, mu, split, piece, PSI_SHIFT, MU_SHIFT, beta, target)
    return target.class_of(out)


@dataclass(frozen=True)
class TripleCohomology(IteratedCohomology):
    """Kernel of the corrected operator on H_{first,dl} modulo its image.

    ``cocycles`` are cochains (in piece coordinates) whose class is killed;
    ``extra_mod`` is spanned by images of the corrected operator.
    """

    extra_mod: Subspace = None
    iterated: IteratedCohomology = None

    @property
    def modulus(self) -> Subspace:
        return self.inner_mod + self.outer_mod + self.extra_mod

    def class_of(self, phi: Cochain) -> IteratedClass:
        rep = self.canonical(phi)
        return IteratedClass(rep, self.piece, self.ambient_basis, self.inner_mod, self.outer_mod, self.extra_mod)


def _triple(first, dl, second, split, piece, first_shift, second_shift) -> TripleCohomology:
    space = split.space
    H = iterated_cohomology(first, dl, split, piece)
    n = len(H.ambient_basis)
    if not n:
        z = Subspace.zero(0)
        return TripleCohomology(space, piece, (), z, z, z, z, z, H)
    Ht = iterated_cohomology(first, dl, split, shifted(piece, second_shift))
    zs = [_combine(space, H.ambient_basis, v) for v in H.cocycles.basis]
    cols = []
    for z in zs:
        _, out = _corrected_operator(z, first, dl, second, split, piece, first_shift, second_shift, target=Ht)
        cols.append(Ht.modulus.reduce(out.to_vector(Ht.ambient_basis)) if Ht.ambient_basis else ())
    if Ht.ambient_basis and cols:
        k = kernel(Matrix.from_columns(cols, len(Ht.ambient_basis)))
        T_Z = Subspace.span([_lin_combo(space, v, zs).to_vector(H.ambient_basis) for v in k.basis], n)
    else:
        T_Z = H.cocycles
    src_piece = shifted(piece, (-second_shift[0], -second_shift[1]))
    Hs = iterated_cohomology(first, dl, split, src_piece)
    imgs = []
    for v in Hs.cocycles.basis:
        z = _combine(space, Hs.ambient_basis, v)
        _, out = _corrected_operator(z, first, dl, second, split, src_piece, first_shift, second_shift, target=H)
        imgs.append(out.to_vector(H.ambient_basis))
    extra = Subspace.span(imgs, n)
    T = TripleCohomology(space, piece, H.ambient_basis, T_Z, H.inner_mod + H.outer_mod + extra,
                         H.inner_mod, H.outer_mod, extra, H)
    if not T.modulus <= T_Z:
        raise ArithmeticError("corrected operator does not square to zero")
    return T


def triple_cohomology(mu: Cochain, dl: Cochain, psi: Cochain, split: SplitSpace, piece: Bidegree) -> TripleCohomology:
    """H_{mu, dl, psi} at ``piece``: cohomology of D_psi on H_{mu, dl}."""
    return _triple(mu, dl, psi, split, piece, MU_SHIFT, PSI_SHIFT)


def triple_cohomology_mu(psi: Cochain, dl: Cochain, mu: Cochain, split: SplitSpace, piece: Bidegree) -> TripleCohomology:
    """H_{psi, dl, mu} at ``piece``: cohomology of D_mu on H_{psi, dl}."""
    return _triple(psi, dl, mu, split, piece, PSI_SHIFT, MU_SHIFT)
