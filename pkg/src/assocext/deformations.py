"""First-order deformations of extensions and of representations.

``d_t = d + t * direction`` with t^2 = 0.  Validity is checked both through
the graded conditions and by expanding [d_t, d_t] over dual numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .coalgebra import C, CW, Cochain, SplitSpace, bracket, in_piece, piece_basis
from .cohomology import (
    _ad_images,
    _combine,
    _matrix,
    _support,
    cohomology,
    full_coboundary,
    iterated_cohomology,
    restricted_cohomology,
    triple_cohomology,
)
from .extensions import ExtensionStructure, validate
from .linalg import Matrix, Subspace, as_scalar, kernel, solve_affine


@dataclass(frozen=True)
class Dual:
    """a + b t with t^2 = 0."""

    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", as_scalar(self.a))
        object.__setattr__(self, "b", as_scalar(self.b))

    @staticmethod
    def _lift(x):
        return x if isinstance(x, Dual) else Dual(x)

    def __add__(self, other):
        o = self._lift(other)
        return Dual(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __mul__(self, other):
        o = self._lift(other)
        return Dual(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Dual(other)
        if not isinstance(other, Dual):
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b)) if self.b else hash(self.a)

    def __str__(self):
        return f"{self.a}+{self.b}t"


def dual_square(d: Cochain, direction: Cochain) -> tuple:
    """[d_t, d_t] for d_t = d + t*direction, split as (constant part, t part)."""
    space = d.space
    terms = {}
    for b, c in d.items():
        terms[b] = terms.get(b, Dual(0)) + Dual(c)
    for b, c in direction.items():
        terms[b] = terms.get(b, Dual(0)) + Dual(0, c)
    dt = Cochain(space, terms)
    sq = bracket(dt, dt)
    const = Cochain(space, {b: c.a for b, c in sq.items()})
    lin = Cochain(space, {b: c.b for b, c in sq.items()})
    return const, lin


@dataclass(frozen=True)
class DeformationDirection:
    eta: Cochain
    zeta: Cochain

    @property
    def cochain(self) -> Cochain:
        return self.eta + self.zeta


@dataclass(frozen=True)
class DeformationReport:
    residuals: dict

    @property
    def passed(self) -> bool:
        return all(not r for r in self.residuals.values())

    def failures(self) -> list:
        return [k for k, r in self.residuals.items() if r]


def check_deformation(e: ExtensionStructure, direction: DeformationDirection) -> DeformationReport:
    """Residuals of the four conditions for d + t(eta + zeta)."""
    eta, zeta = direction.eta, direction.zeta
    if not in_piece(eta, e.split, C(1, 1)) or not in_piece(zeta, e.split, C(0, 2)):
        raise ValueError("eta must lie in C^{1,1} and zeta in C^{0,2}")
    res = {
        "cond1: [delta+lambda,eta]+[mu,zeta]": bracket(e.dl, eta) + bracket(e.mu, zeta),
        "cond2: [delta+lambda,zeta]+[psi,eta]": bracket(e.dl, zeta) + bracket(e.psi, eta),
        "cond3: [mu,eta]": bracket(e.mu, eta),
    }
    if bracket(e.psi, zeta):
        raise ArithmeticError("[psi, zeta] != 0 for zeta in C^{0,2}")
    res["cond4: [psi,zeta]"] = Cochain.zero(e.space)
    const, lin = dual_square(e.d, direction.cochain)
    total = Cochain.zero(e.space)
    for r in res.values():
        total = total + r
    if lin != total * 2:
        raise ArithmeticError("t-coefficient of [d_t,d_t] disagrees with the four conditions")
    if const != bracket(e.d, e.d):
        raise ArithmeticError("constant part of [d_t,d_t] is not [d,d]")
    return DeformationReport(res)


def _solve(columns, targets, basis_len):
    """Solve sum x_j columns[i][j] = targets[i] over all blocks i."""
    rows, rhs = [], []
    for cols, target in zip(columns, targets):
        sup = tuple(sorted(set(_support(cols)) | set(_support([target]))))
        if sup:
            rows.extend(_matrix(cols, sup).rows)
            rhs.extend(target.to_vector(sup))
    if not rows:
        return tuple(Fraction(0) for _ in range(basis_len)), Subspace.full(basis_len)
    return solve_affine(Matrix(tuple(rows), basis_len), rhs)


def solve_zeta(e: ExtensionStructure, eta: Cochain) -> Optional[Cochain]:
    """A zeta in C^{0,2} completing eta to a deformation (free variables zero)."""
    basis = piece_basis(e.split, C(0, 2))
    target1 = -bracket(e.dl, eta)
    target2 = -bracket(e.psi, eta)
    if not basis:
        return Cochain.zero(e.space) if not target1 and not target2 else None
    res = _solve([_ad_images(e.mu, basis), _ad_images(e.dl, basis)], [target1, target2], len(basis))
    return None if res is None else _combine(e.space, basis, res[0])


@dataclass(frozen=True)
class Admissibility:
    triple_class: object
    zeta: Optional[Cochain]
    stage: str
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.triple_class is not None


def eta_admissible(e: ExtensionStructure, eta: Cochain) -> Admissibility:
    """Whether eta extends to a deformation; the triple class of eta if so."""
    if not validate(e).passed:
        raise ValueError("extension does not satisfy [d,d] = 0")
    if not in_piece(eta, e.split, C(1, 1)):
        raise ValueError("eta must lie in C^{1,1}")
    if bracket(e.mu, eta):
        return Admissibility(None, None, "D_mu-cocycle", "[mu, eta] != 0")
    H = iterated_cohomology(e.mu, e.dl, e.split, C(1, 1))
    if not H.is_cocycle(eta):
        return Admissibility(None, None, "D_(delta+lambda)-cocycle", "[delta+lambda, eta] is not a D_mu-coboundary")
    T = triple_cohomology(e.mu, e.dl, e.psi, e.split, C(1, 1))
    zeta = solve_zeta(e, eta)
    if not T.is_cocycle(eta):
        if zeta is not None:
            raise ArithmeticError("triple cocycle test disagrees with the zeta solve")
        return Admissibility(None, None, "D_psi-cocycle", "D_psi of the class is nonzero")
    if zeta is None:
        raise ArithmeticError("triple cocycle without a completing zeta")
    if not check_deformation(e, DeformationDirection(eta, zeta)).passed:
        raise ArithmeticError("solved zeta does not give a deformation")
    return Admissibility(T.class_of(eta), zeta, "ok")


@dataclass(frozen=True)
class DeformationClassification:
    eta_cohomology: object
    tau_cohomology: object
    directions: tuple

    @property
    def eta_classes(self) -> list:
        return self.eta_cohomology.classes

    @property
    def tau_classes(self) -> list:
        return self.tau_cohomology.classes

    @property
    def dims(self) -> tuple:
        return (self.eta_cohomology.dim, self.tau_cohomology.dim)


def classify_infinitesimal_deformations(e: ExtensionStructure) -> DeformationClassification:
    """Triple cohomology at (1,1) for eta and at (0,2) for the zeta freedom."""
    if not validate(e).passed:
        raise ValueError("extension does not satisfy [d,d] = 0")
    T11 = triple_cohomology(e.mu, e.dl, e.psi, e.split, C(1, 1))
    T02 = triple_cohomology(e.mu, e.dl, e.psi, e.split, C(0, 2))
    z = Cochain.zero(e.space)
    dirs = []
    for eta in T11.classes:
        adm = eta_admissible(e, eta)
        dirs.append(DeformationDirection(eta, adm.zeta))
    dirs.extend(DeformationDirection(z, tau) for tau in T02.classes)
    for dr in dirs:
        if not check_deformation(e, dr).passed:
            raise ArithmeticError("emitted direction fails the deformation conditions")
    return DeformationClassification(T11, T02, tuple(dirs))


def equivalence_moves(e: ExtensionStructure) -> list:
    """Generators (d eta, d zeta) of infinitesimal equivalence.

    alpha in C^{1,0} with [mu, alpha] = 0 and beta in C^{0,1} act by
    (eta, zeta) -> (eta + [lambda,alpha] + [mu,beta], zeta + [psi,alpha] + [delta+lambda,beta]).
    """
    space = e.space
    moves = []
    abasis = piece_basis(e.split, C(1, 0))
    if abasis:
        K = kernel(_matrix(_ad_images(e.mu, abasis), _support(_ad_images(e.mu, abasis)))) if e.mu else Subspace.full(len(abasis))
        for v in K.basis:
            a = _combine(space, abasis, v)
            moves.append((a, Cochain.zero(space), bracket(e.lambda_, a), bracket(e.psi, a)))
    for b in piece_basis(e.split, C(0, 1)):
        beta = Cochain(space, {b: 1})
        moves.append((Cochain.zero(space), beta, bracket(e.mu, beta), bracket(e.dl, beta)))
    return moves


def deformation_key(e: ExtensionStructure, eta: Cochain, zeta: Cochain, cls: DeformationClassification = None):
    """Canonical form of the equivalence class of (eta, zeta), or None if not a deformation."""
    if cls is None:
        cls = classify_infinitesimal_deformations(e)
    T11, T02 = cls.eta_cohomology, cls.tau_cohomology
    if not check_deformation(e, DeformationDirection(eta, zeta)).passed:
        return None
    eta_c = T11.canonical(eta)
    moves = equivalence_moves(e)
    shift = eta_c - eta
    if moves:
        res = _solve([[m[2] for m in moves]], [shift], len(moves))
        if res is None:
            raise ArithmeticError("eta and its canonical form are not related by a move")
        x = res[0]
    elif shift:
        raise ArithmeticError("eta and its canonical form are not related by a move")
    else:
        x = ()
    zeta2 = zeta
    for xi, m in zip(x, moves):
        if xi:
            zeta2 = zeta2 + m[3] * xi
    zeta0 = solve_zeta(e, eta_c)
    tau = zeta2 - zeta0
    tau_c = T02.canonical(tau) if T02.ambient_basis else tau
    return (eta_c.to_vector(T11.ambient_basis), tau_c.to_vector(T02.ambient_basis) if T02.ambient_basis else ())


def _require_representation(e: ExtensionStructure):
    if e.psi:
        raise ValueError("representation deformations need psi = 0")
    if not validate(e).passed:
        raise ValueError("extension does not satisfy [d,d] = 0")


def tau_cohomology_rep(e: ExtensionStructure):
    """[tau-bar] classes in C^{1,1} on the k >= 1 complex with C^{1,0} + C^1 lifts."""
    return iterated_cohomology(e.mu, e.dl, e.split, C(1, 1), lift_pieces=[C(1, 0), CW(1)], restricted=True)


@dataclass(frozen=True)
class RepDeformationA:
    delta1: Cochain
    lambda1: Cochain


@dataclass(frozen=True)
class RepDeformationB:
    lambda1: Cochain
    mu1: Cochain


def check_rep_a(e: ExtensionStructure, r: RepDeformationA) -> dict:
    res = {
        "[delta,delta1]": bracket(e.delta, r.delta1),
        "[lambda,delta1]+[delta+lambda,lambda1]": bracket(e.lambda_, r.delta1) + bracket(e.dl, r.lambda1),
        "[mu,lambda1]": bracket(e.mu, r.lambda1),
    }
    _, lin = dual_square(e.d, r.delta1 + r.lambda1)
    if lin != sum(res.values(), Cochain.zero(e.space)) * 2:
        raise ArithmeticError("dual-number expansion disagrees with the conditions")
    return res


def check_rep_b(e: ExtensionStructure, r: RepDeformationB) -> dict:
    res = {
        "[mu,mu1]": bracket(e.mu, r.mu1),
        "[delta+lambda,mu1]+[mu,lambda1]": bracket(e.dl, r.mu1) + bracket(e.mu, r.lambda1),
        "[delta+lambda,lambda1]": bracket(e.dl, r.lambda1),
    }
    _, lin = dual_square(e.d, r.mu1 + r.lambda1)
    if lin != sum(res.values(), Cochain.zero(e.space)) * 2:
        raise ArithmeticError("dual-number expansion disagrees with the conditions")
    return res


@dataclass(frozen=True)
class RepClassification:
    """Classes of the varying structure plus the [tau-bar] freedom.

    ``first_classes`` are delta1 classes (scenario A) or mu1 classes
    (scenario B); ``admissible_dim`` counts cocycles passing the
    obstruction before quotienting.
    """

    scenario: str
    first_classes: tuple
    admissible_dim: int
    coboundary_dim: int
    tau: object
    examples: tuple

    @property
    def dims(self) -> tuple:
        return (len(self.first_classes), self.tau.dim)


def _linear_family(e, unknown_pieces, equations):
    """Kernel of a block linear system; unknowns are coordinates of the pieces in order.

    ``equations`` is a list of lists of functions (one per unknown block)
    mapping a basis cochain to its contribution.
    """
    space = e.space
    bases = [piece_basis(e.split, p) for p in unknown_pieces]
    cols_all = []
    for eq in equations:
        cols = []
        for basis, f in zip(bases, eq):
            for b in basis:
                cols.append(f(Cochain(space, {b: 1})) if f else Cochain.zero(space))
        cols_all.append(cols)
    n = sum(len(b) for b in bases)
    rows = []
    for cols in cols_all:
        sup = _support(cols)
        if sup:
            rows.extend(_matrix(cols, sup).rows)
    K = kernel(Matrix(tuple(rows), n)) if rows else Subspace.full(n)
    return bases, K


def _split_vec(bases, v):
    out, i = [], 0
    for b in bases:
        out.append(v[i : i + len(b)])
        i += len(b)
    return out


def rep_deform_A(e: ExtensionStructure) -> RepClassification:
    """Deformations varying delta and lambda with mu fixed."""
    _require_representation(e)
    space = e.space
    eqs = [
        [lambda x: bracket(e.delta, x), None],
        [lambda x: bracket(e.lambda_, x), lambda x: bracket(e.dl, x)],
        [None, lambda x: bracket(e.mu, x)],
    ]
    bases, K = _linear_family(e, [CW(2), C(1, 1)], eqs)
    nd = len(bases[0])
    A = Subspace.span([v[:nd] for v in K.basis], nd)
    Hd = cohomology(e.delta, e.split, CW(2), sources=CW(1))
    B = Hd.coboundaries
    if not B <= A:
        raise ArithmeticError("D_delta-coboundaries are not admissible deformations")
    firsts = tuple(_combine(space, bases[0], v) for v in A.complement_basis(B))
    examples = []
    for v in K.basis:
        d1, l1 = _split_vec(bases, v)
        r = RepDeformationA(_combine(space, bases[0], d1), _combine(space, bases[1], l1))
        if any(check_rep_a(e, r).values()):
            raise ArithmeticError("kernel element is not a deformation")
        examples.append(r)
    return RepClassification("A", firsts, A.dim, B.dim, tau_cohomology_rep(e), tuple(examples))


def rep_b_obstruction(e: ExtensionStructure, mu1: Cochain) -> Cochain:
    """Class of [delta+lambda, mu1] in H_mu(ker D_{delta+lambda}) at C^{2,1}, sources C^{1,1}."""
    if bracket(e.mu, mu1):
        raise ValueError("mu1 is not a D_mu-cocycle")
    H = restricted_cohomology(e.mu, e.dl, e.split, C(2, 1), restricted=True, sources=C(1, 1))
    return H.canonical(bracket(e.dl, mu1))


def rep_deform_B(e: ExtensionStructure) -> RepClassification:
    """Deformations varying mu and lambda with delta fixed."""
    _require_representation(e)
    space = e.space
    eqs = [
        [lambda x: bracket(e.mu, x), None],
        [lambda x: bracket(e.dl, x), lambda x: bracket(e.mu, x)],
        [None, lambda x: bracket(e.dl, x)],
    ]
    bases, K = _linear_family(e, [C(2, 0), C(1, 1)], eqs)
    nm = len(bases[0])
    A = Subspace.span([v[:nm] for v in K.basis], nm)
    # mu1 -> mu1 + [mu, alpha] for alpha in C^{1,0}
    abasis = piece_basis(e.split, C(1, 0))
    B = Subspace.span([c.to_vector(bases[0]) for c in _ad_images(e.mu, abasis)], nm) if nm else Subspace.zero(0)
    if not B <= A:
        raise ArithmeticError("D_mu-coboundaries are not admissible deformations")
    firsts = tuple(_combine(space, bases[0], v) for v in A.complement_basis(B))
    examples = []
    for v in K.basis:
        m1, l1 = _split_vec(bases, v)
        r = RepDeformationB(_combine(space, bases[1], l1), _combine(space, bases[0], m1))
        if any(check_rep_b(e, r).values()):
            raise ArithmeticError("kernel element is not a deformation")
        examples.append(r)
    return RepClassification("B", firsts, A.dim, B.dim, tau_cohomology_rep(e), tuple(examples))


def anticommutator_matrix(delta: Cochain, lambda_: Cochain, split: SplitSpace, arity: int) -> Matrix:
    """D_lambda D_delta + D_{delta+lambda} D_lambda from one arity to arity + 2."""
    Dd = full_coboundary(delta, split, arity)
    Dl = full_coboundary(lambda_, split, arity)
    Dl2 = full_coboundary(lambda_, split, arity + 1)
    Ddl2 = full_coboundary(delta + lambda_, split, arity + 1)
    return (Dl2.matrix @ Dd.matrix) + (Ddl2.matrix @ Dl.matrix)
