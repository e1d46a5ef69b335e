"""Extension structures d = delta + mu + lambda + psi and their classification.

M is the ideal and W the quotient: delta is the algebra on W (C^2), mu the
algebra on M (C^{2,0}), lambda the bimodule part (C^{1,1}) and psi the
cocycle (C^{0,2}).  Maurer-Cartan equations are solved over a finite grid of
rationals; everything else is exact linear algebra.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .coalgebra import (
    C,
    CW,
    M,
    W,
    Cochain,
    SplitSpace,
    apply_group_element,
    bidegree_split,
    bracket,
    evaluate,
    in_piece,
    piece_basis,
    pullback_exp_beta,
)
from .cohomology import (
    _ad_images,
    _combine,
    _matrix,
    _support,
    cohomology,
    iterated_cohomology,
    restricted_cohomology,
)
from .linalg import Matrix, Subspace, as_scalar, inverse, kernel, rank, solve_affine

HALF = Fraction(1, 2)
PIECES = {"delta": CW(2), "mu": C(2, 0), "lambda_": C(1, 1), "psi": C(0, 2)}


@dataclass(frozen=True)
class ScalarGrid:
    """Finite set of rationals used for sweeps and witness search."""

    values: tuple

    def __post_init__(self):
        vals = tuple(sorted({as_scalar(v) for v in self.values}, key=lambda x: (abs(x), x < 0, x)))
        if not vals:
            raise ValueError("grid must be nonempty")
        if 0 not in vals or 1 not in vals:
            raise ValueError("grid must contain 0 and 1")
        object.__setattr__(self, "values", vals)

    @classmethod
    def of(cls, *values) -> "ScalarGrid":
        return cls(tuple(values))

    @property
    def nonzero(self) -> tuple:
        return tuple(v for v in self.values if v != 0)

    def doubled(self) -> "ScalarGrid":
        """A grid with the sums and quotients of pairs, used for stability checks."""
        vals = set(self.values)
        for a in self.values:
            for b in self.values:
                vals.add(a + b)
                if b:
                    vals.add(a / b)
        return ScalarGrid(tuple(vals))

    def combinations(self, n: int):
        return itertools.product(self.values, repeat=n)


DEFAULT_GRID = ScalarGrid.of(-1, 0, 1)


@dataclass(frozen=True)
class ExtensionStructure:
    split: SplitSpace
    delta: Cochain
    mu: Cochain
    lambda_: Cochain
    psi: Cochain

    def __post_init__(self):
        space = self.split.space
        for name, piece in PIECES.items():
            c = getattr(self, name)
            if c.space != space:
                raise ValueError(f"{name} lives on a different space")
            if not in_piece(c, self.split, piece):
                raise ValueError(f"{name} = {c} is not in {piece}")
            if c and c.parity != 1:
                raise ValueError(f"{name} must be odd")

    @classmethod
    def build(cls, split: SplitSpace, delta=None, mu=None, lambda_=None, psi=None) -> "ExtensionStructure":
        z = Cochain.zero(split.space)
        return cls(split, delta or z, mu or z, lambda_ or z, psi or z)

    @classmethod
    def from_codifferential(cls, d: Cochain, split: SplitSpace) -> "ExtensionStructure":
        parts = bidegree_split(d, split)
        names = {v: k for k, v in PIECES.items()}
        kw = {}
        for bd, c in parts.items():
            if bd not in names:
                why = "maps M-containing inputs into W" if bd.ideal_violating else f"has bidegree {bd}"
                raise ValueError(f"not an extension: a component {why}")
            kw[names[bd]] = c
        return cls.build(split, **kw)

    @property
    def space(self):
        return self.split.space

    @property
    def d(self) -> Cochain:
        return self.delta + self.mu + self.lambda_ + self.psi

    @property
    def dl(self) -> Cochain:
        return self.delta + self.lambda_

    @property
    def lambda_L(self) -> Cochain:
        """Left action W x M -> M (first input in W)."""
        return self.lambda_.restrict(lambda b: self.split.membership[b.inputs[0]] == W)

    @property
    def lambda_R(self) -> Cochain:
        """Right action M x W -> M."""
        return self.lambda_.restrict(lambda b: self.split.membership[b.inputs[0]] == M)

    def replace(self, **kw) -> "ExtensionStructure":
        args = {k: getattr(self, k) for k in ("delta", "mu", "lambda_", "psi")}
        args.update(kw)
        return ExtensionStructure(self.split, **args)

    def __str__(self):
        return str(self.d)


@dataclass(frozen=True)
class ValidationReport:
    residuals: dict
    square: Cochain

    @property
    def passed(self) -> bool:
        return all(not r for r in self.residuals.values())

    def failures(self) -> list:
        return [k for k, r in self.residuals.items() if r]


def validate(e: ExtensionStructure) -> ValidationReport:
    """Residuals of the relations that together say [d, d] = 0."""
    res = {
        "algebra W: [delta,delta]": bracket(e.delta, e.delta),
        "algebra M: [mu,mu]": bracket(e.mu, e.mu),
        "MC: [delta,lambda]+1/2[lambda,lambda]+[mu,psi]": bracket(e.delta, e.lambda_)
        + bracket(e.lambda_, e.lambda_) * HALF
        + bracket(e.mu, e.psi),
        "compatibility: [mu,lambda]": bracket(e.mu, e.lambda_),
        "cocycle: [delta+lambda,psi]": bracket(e.dl, e.psi),
    }
    # these two vanish for bidegree reasons
    if bracket(e.mu, e.delta) or bracket(e.psi, e.psi):
        raise ArithmeticError("[mu,delta] or [psi,psi] nonzero; bidegree bookkeeping is broken")
    sq = bracket(e.d, e.d)
    report = ValidationReport(res, sq)
    if report.passed != (not sq):
        raise ArithmeticError("relation residuals disagree with [d,d]")
    return report


def _require_codifferentials(delta, mu, split):
    if not in_piece(delta, split, CW(2)):
        raise ValueError("delta must lie in C^2")
    if not in_piece(mu, split, C(2, 0)):
        raise ValueError("mu must lie in C^{2,0}")
    if bracket(delta, delta):
        raise ValueError("[delta, delta] != 0")
    if bracket(mu, mu):
        raise ValueError("[mu, mu] != 0")


def mc_obstruction(delta: Cochain, mu: Cochain, lambda_: Cochain, split: SplitSpace) -> Cochain:
    """Canonical representative of the class of [delta+lambda, delta+lambda].

    The class lives in H_mu^{1,2} of the subcomplex ker D_{delta+lambda},
    with coboundaries coming from C^{0,2}.  It is zero exactly when some psi
    completes (delta, mu, lambda) to an extension.
    """
    if bracket(mu, lambda_):
        raise ValueError("[mu, lambda] != 0")
    dl = delta + lambda_
    H = restricted_cohomology(mu, dl, split, C(1, 2), sources=C(0, 2))
    return H.canonical(bracket(dl, dl))


def solve_psi(delta: Cochain, mu: Cochain, lambda_: Cochain, split: SplitSpace):
    """psi in C^{0,2} with [mu,psi] = -([delta,lambda]+1/2[lambda,lambda]) and [delta+lambda,psi] = 0.

    Returns None when there is none, else ``(psi, freedom)`` where
    ``freedom`` is the subspace of C^{0,2} (coordinates of ``piece_basis``)
    that can be added to psi.
    """
    space = split.space
    dl = delta + lambda_
    rhs = -(bracket(delta, lambda_) + bracket(lambda_, lambda_) * HALF)
    basis = piece_basis(split, C(0, 2))
    if not basis:
        return (Cochain.zero(space), Subspace.zero(0)) if not rhs else None
    mu_imgs = _ad_images(mu, basis)
    dl_imgs = _ad_images(dl, basis)
    sup1 = tuple(sorted(set(_support(mu_imgs)) | set(_support([rhs]))))
    sup2 = _support(dl_imgs)
    rows, b = [], []
    if sup1:
        rows.extend(_matrix(mu_imgs, sup1).rows)
        b.extend(rhs.to_vector(sup1))
    if sup2:
        rows.extend(_matrix(dl_imgs, sup2).rows)
        b.extend([0] * len(sup2))
    if not rows:
        return Cochain.zero(space), Subspace.full(len(basis))
    res = solve_affine(Matrix(tuple(rows), len(basis)), b)
    if res is None:
        return None
    x, free = res
    return _combine(space, basis, x), free


def tau_classes(e: ExtensionStructure) -> list:
    """Zero class followed by a basis of H^{0,2}_{mu,delta+lambda}."""
    if not validate(e).passed:
        raise ValueError("base extension does not satisfy [d,d] = 0")
    H = iterated_cohomology(e.mu, e.dl, e.split, C(0, 2))
    zero = H.class_of(Cochain.zero(e.space)) if H.ambient_basis else None
    return ([zero] if zero is not None else []) + H.class_list


def beta_matrix(beta: Cochain) -> Matrix:
    """Linear map of an arity-1 cochain, columns indexed by inputs."""
    n = beta.space.dim
    rows = [[Fraction(0)] * n for _ in range(n)]
    for b, c in beta.items():
        rows[b.output][b.inputs[0]] += c
    return Matrix.from_rows(rows, n)


@dataclass(frozen=True)
class Witness:
    """h = g (1 + beta) with h^*(e1.d) = e2.d."""

    g: Matrix
    beta: Cochain

    @property
    def h(self) -> Matrix:
        return self.g @ (Matrix.identity(self.g.nrows) + beta_matrix(self.beta))


def find_beta(e1: ExtensionStructure, e2: ExtensionStructure) -> Optional[Cochain]:
    """Exact search for beta in C^{0,1} with exp(beta) carrying e1 to e2.

    lambda2 = lambda1 + [mu,beta] is linear; on its solutions [mu,beta] is
    fixed, so the psi equation becomes linear as well.
    """
    if e1.delta != e2.delta or e1.mu != e2.mu:
        return None
    space, split = e1.space, e1.split
    basis = piece_basis(split, C(0, 1))
    dlam = e2.lambda_ - e1.lambda_
    dpsi = e2.psi - e1.psi
    if not basis:
        return Cochain.zero(space) if not dlam and not dpsi else None
    # on solutions, 1/2[[mu,beta],beta] = 1/2[dlam, beta]
    op = e1.dl + dlam * HALF
    imgs1 = _ad_images(e1.mu, basis)
    imgs2 = _ad_images(op, basis)
    rows, rhs = [], []
    for imgs, target in ((imgs1, dlam), (imgs2, dpsi)):
        sup = tuple(sorted(set(_support(imgs)) | set(_support([target]))))
        if sup:
            rows.extend(_matrix(imgs, sup).rows)
            rhs.extend(target.to_vector(sup))
    if not rows:
        return Cochain.zero(space)
    res = solve_affine(Matrix(tuple(rows), len(basis)), rhs)
    if res is None:
        return None
    beta = _combine(space, basis, res[0])
    if pullback_exp_beta(e1.d, beta, split) != e2.d:
        raise ArithmeticError("beta solve disagrees with the exponential action")
    return beta


def equivalent_restricted(e1: ExtensionStructure, e2: ExtensionStructure, grid: ScalarGrid = DEFAULT_GRID) -> Optional[Cochain]:
    """A beta with exp(beta) carrying e1 to e2, or None if there is none.

    The equations are linear once lambda is matched, so this is decided
    exactly; ``grid`` is accepted for interface symmetry and unused.
    """
    if e1.delta != e2.delta or e1.mu != e2.mu:
        raise ValueError("restricted equivalence needs equal delta and mu")
    return find_beta(e1, e2)


def group_elements(split: SplitSpace, grid: ScalarGrid, preserve_split: bool = True):
    """Invertible even matrices with grid entries, block diagonal if asked."""
    space = split.space
    n = space.dim
    par = space.parities
    pos = [
        (r, j)
        for r in range(n)
        for j in range(n)
        if par[r] == par[j] and (not preserve_split or split.membership[r] == split.membership[j])
    ]
    for vals in itertools.product(grid.values, repeat=len(pos)):
        rows = [[Fraction(0)] * n for _ in range(n)]
        for (r, j), v in zip(pos, vals):
            rows[r][j] = v
        g = Matrix.from_rows(rows, n)
        if rank(g) == n:
            yield g


def equivalent_general(
    e1: ExtensionStructure,
    e2: ExtensionStructure,
    grid: ScalarGrid = DEFAULT_GRID,
    preserve_split: bool = True,
) -> Optional[Witness]:
    """Search h = g exp(beta) with h^*(e1) = e2.

    g runs over block-diagonal even matrices with grid entries; beta is
    then solved exactly.  With ``preserve_split=False`` g is any even
    invertible matrix with grid entries and only the codifferentials are
    compared (the splits may differ).
    """
    if e1.space != e2.space:
        raise ValueError("extensions live on different spaces")
    if e1.d == e2.d:
        return Witness(Matrix.identity(e1.space.dim), Cochain.zero(e1.space))
    if not preserve_split:
        for g in group_elements(e1.split, grid, preserve_split=False):
            if apply_group_element(e1.d, g) == e2.d:
                return Witness(g, Cochain.zero(e1.space))
        return None
    if e1.split != e2.split:
        raise ValueError("split-preserving equivalence needs equal splits")
    for g in group_elements(e1.split, grid):
        ginv = inverse(g)
        if apply_group_element(e1.delta, g, ginv=ginv) != e2.delta:
            continue
        if apply_group_element(e1.mu, g, ginv=ginv) != e2.mu:
            continue
        eg = ExtensionStructure.from_codifferential(apply_group_element(e1.d, g, ginv=ginv), e1.split)
        beta = find_beta(eg, e2)
        if beta is not None:
            w = Witness(g, beta)
            if apply_group_element(e1.d, w.h) != e2.d:
                raise ArithmeticError("witness failed exact verification")
            return w
    return None


def algebra_invariants(d: Cochain) -> tuple:
    """GL-invariant dimensions of the algebra d: left/right annihilators and d(V,V)."""
    space = d.space
    n = space.dim
    prods = {(a, b): evaluate(d, (a, b)) for a in range(n) for b in range(n)}
    image = rank(Matrix.from_rows([prods[a, b] for a in range(n) for b in range(n)], n))
    # left annihilator {v : d(v, -) = 0}
    left = Matrix.from_columns([sum((prods[a, b] for b in range(n)), ()) for a in range(n)], n * n)
    right = Matrix.from_columns([sum((prods[a, b] for a in range(n)), ()) for b in range(n)], n * n)
    return (n - rank(left), n - rank(right), image)


FINGERPRINT_PIECES = (C(1, 1), C(0, 2), C(1, 2), C(0, 1))


def fingerprint(e: ExtensionStructure) -> tuple:
    """Exact invariants; differing fingerprints prove inequivalence."""
    out = []
    for p in FINGERPRINT_PIECES:
        out.append(cohomology(e.mu, e.split, p).dim)
    for p in (C(0, 2), C(1, 1)):
        out.append(iterated_cohomology(e.mu, e.dl, e.split, p).dim)
    out.extend(algebra_invariants(e.d))
    return tuple(out)


def simplicity_key(c: Cochain) -> tuple:
    items = c.items()
    return (
        len(items),
        sum(1 for _, v in items if v < 0),
        sum(abs(v) for _, v in items),
        tuple((b.inputs, b.output, -v) for b, v in items),
    )


@dataclass(frozen=True)
class ClassifiedExtension:
    structure: ExtensionStructure
    lambda_class: Cochain
    tau_class: Cochain
    invariants: tuple

    @property
    def d(self) -> Cochain:
        return self.structure.d


@dataclass
class Classification:
    classes: list
    unresolved: list = field(default_factory=list)
    candidates: int = 0
    rejected: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "distinct-unproven" if self.unresolved else "ok"

    @property
    def codifferentials(self) -> list:
        return [c.d for c in self.classes]


def _grid_combos(basis: Sequence[Cochain], grid: ScalarGrid, space) -> list:
    out = []
    for coeffs in grid.combinations(len(basis)):
        c = Cochain.zero(space)
        for x, b in zip(coeffs, basis):
            if x:
                c = c + b * x
        out.append(c)
    return out


def _candidates_for_lambda(args):
    delta, mu, lam, split, grid = args
    rej = None
    if bracket(mu, lam):
        return [], "compatibility"
    if mc_obstruction(delta, mu, lam, split):
        return [], "obstructed"
    sol = solve_psi(delta, mu, lam, split)
    if sol is None:
        raise ArithmeticError("obstruction vanished but psi could not be solved")
    psi0, _ = sol
    base = ExtensionStructure(split, delta, mu, lam, psi0)
    H = iterated_cohomology(mu, base.dl, split, C(0, 2))
    out = []
    for tau in _grid_combos(H.classes, grid, split.space):
        e = base.replace(psi=psi0 + tau)
        if not validate(e).passed:
            raise ArithmeticError(f"candidate {e.d} fails validation")
        out.append((e, lam, tau))
    return out, rej


def classify_extensions(
    delta: Cochain,
    mu: Cochain,
    split: SplitSpace,
    grid: ScalarGrid = DEFAULT_GRID,
    include_trivial: bool = False,
    parallel: bool = False,
    witness_grid: Optional[ScalarGrid] = None,
) -> Classification:
    """Extensions of (W, delta) by (M, mu) up to split-preserving equivalence.

    lambda runs over grid combinations of a basis of H_mu^{1,1}; obstructed
    ones are dropped, psi is solved, and tau runs over grid combinations of
    H^{0,2}_{mu,delta+lambda}.  Candidates are merged by fingerprint and
    witness search; pairs neither separated nor joined are reported in
    ``unresolved``.
    """
    _require_codifferentials(delta, mu, split)
    space = split.space
    witness_grid = witness_grid or grid
    Hmu = cohomology(mu, split, C(1, 1))
    lams = _grid_combos(Hmu.classes, grid, space)
    jobs = [(delta, mu, lam, split, grid) for lam in lams]
    if parallel and len(jobs) > 1:
        with ProcessPoolExecutor() as ex:
            results = list(ex.map(_candidates_for_lambda, jobs))
    else:
        results = [_candidates_for_lambda(j) for j in jobs]
    rejected = {}
    cands = []
    for lam, (found, why) in zip(lams, results):
        if why:
            rejected[lam] = why
        cands.extend(found)
    cands.sort(key=lambda t: simplicity_key(t[0].d))
    result = Classification([], candidates=len(cands), rejected=rejected)
    reps = []
    for e, lam, tau in cands:
        fp = fingerprint(e)
        merged = False
        pending = []
        for i, r in enumerate(reps):
            if r.invariants != fp:
                continue
            if equivalent_general(e, r.structure, witness_grid) or equivalent_general(r.structure, e, witness_grid):
                merged = True
                break
            pending.append(i)
        if merged:
            continue
        for i in pending:
            result.unresolved.append((i, len(reps)))
        reps.append(ClassifiedExtension(e, lam, tau, fp))
    if not include_trivial:
        keep = [i for i, r in enumerate(reps) if r.d]
        index = {old: new for new, old in enumerate(keep)}
        result.unresolved = [(index[a], index[b]) for a, b in result.unresolved if a in index and b in index]
        reps = [reps[i] for i in keep]
    result.classes = reps
    return result


@dataclass(frozen=True)
class InfinitesimalExtensions:
    """lambda-bar classes with vanishing obstruction, and tau-bar classes."""

    lambda_basis: tuple
    tau_basis: tuple
    representatives: tuple


def classify_infinitesimal_extensions(delta: Cochain, mu: Cochain, split: SplitSpace, grid: ScalarGrid = DEFAULT_GRID) -> InfinitesimalExtensions:
    """Linearised classification: [delta,lambda]+[mu,psi] = 0, [mu,lambda] = 0, [delta,psi] = 0.

    The conditions are linear, so the admissible lambda-bar form a subspace
    of H_mu^{1,1}; grid combinations of its basis are emitted with a psi.
    """
    _require_codifferentials(delta, mu, split)
    space = split.space
    Hmu = cohomology(mu, split, C(1, 1))
    lam_basis = Hmu.classes
    psi_basis = piece_basis(split, C(0, 2))
    # unknowns: coefficients of lambda classes, then psi coordinates
    nl, npsi = len(lam_basis), len(psi_basis)
    psi_cochains = [Cochain(space, {b: 1}) for b in psi_basis]
    cols_mc = [bracket(delta, l) for l in lam_basis] + [bracket(mu, p) for p in psi_cochains]
    cols_d = [Cochain.zero(space)] * nl + [bracket(delta, p) for p in psi_cochains]
    rows = []
    for cols in (cols_mc, cols_d):
        sup = _support(cols)
        if sup:
            rows.extend(_matrix(cols, sup).rows)
    if nl == 0:
        admissible = []
    elif rows:
        k = kernel(Matrix(tuple(rows), nl + npsi))
        A = Subspace.span([v[:nl] for v in k.basis], nl)
        admissible = [_combine_list(space, v, lam_basis) for v in A.basis]
    else:
        admissible = list(lam_basis)
    tau = iterated_cohomology(mu, delta, split, C(0, 2))
    reps = []
    for lam in _grid_combos(admissible, grid, space):
        rhs = -bracket(delta, lam)
        psi = _solve_linear_psi(mu, delta, rhs, split)
        if psi is None:
            raise ArithmeticError("admissible lambda without a psi")
        if bracket(delta, lam) + bracket(mu, psi) or bracket(mu, lam) or bracket(delta, psi):
            raise ArithmeticError("emitted representative violates the linear conditions")
        reps.append((lam, psi))
    return InfinitesimalExtensions(tuple(admissible), tuple(tau.classes), tuple(reps))


def _combine_list(space, coeffs, cochains) -> Cochain:
    out = Cochain.zero(space)
    for x, c in zip(coeffs, cochains):
        if x:
            out = out + c * x
    return out


def _solve_linear_psi(mu, delta, rhs, split):
    space = split.space
    basis = piece_basis(split, C(0, 2))
    if not basis:
        return Cochain.zero(space) if not rhs else None
    imgs1 = _ad_images(mu, basis)
    imgs2 = _ad_images(delta, basis)
    rows, b = [], []
    for imgs, target in ((imgs1, rhs), (imgs2, Cochain.zero(space))):
        sup = tuple(sorted(set(_support(imgs)) | set(_support([target]))))
        if sup:
            rows.extend(_matrix(imgs, sup).rows)
            b.extend(target.to_vector(sup))
    if not rows:
        return Cochain.zero(space)
    res = solve_affine(Matrix(tuple(rows), len(basis)), b)
    return None if res is None else _combine(space, basis, res[0])


@dataclass(frozen=True)
class BimoduleReport:
    left: Cochain
    right: Cochain
    compatibility: Cochain

    @property
    def passed(self) -> bool:
        return not (self.left or self.right or self.compatibility)


@dataclass(frozen=True)
class BimoduleClassification:
    report: BimoduleReport
    cohomology: object

    @property
    def classes(self) -> list:
        return self.cohomology.classes

    @property
    def dim(self) -> int:
        return self.cohomology.dim


def bimodule_report(e: ExtensionStructure) -> BimoduleReport:
    """Left module, right module and commuting-actions residuals of lambda."""
    L, R = e.lambda_L, e.lambda_R
    return BimoduleReport(
        bracket(e.delta, L) + bracket(L, L) * HALF,
        bracket(e.delta, R) + bracket(R, R) * HALF,
        bracket(L, R),
    )


def classify_bimodule_extensions(delta: Cochain, mu: Cochain, lambda_: Cochain, split: SplitSpace) -> BimoduleClassification:
    """Classes of psi for a fixed bimodule structure lambda.

    psi must satisfy [mu,psi] = 0 and [delta+lambda,psi] = 0 and is taken
    modulo [delta+lambda, beta] for beta in C^{0,1} with [mu,beta] = 0,
    which is H^{0,2}_{mu,delta+lambda}.
    """
    _require_codifferentials(delta, mu, split)
    if bracket(delta, lambda_) + bracket(lambda_, lambda_) * HALF:
        raise ValueError("lambda is not a bimodule structure: [delta,lambda]+1/2[lambda,lambda] != 0")
    if bracket(mu, lambda_):
        raise ValueError("[mu, lambda] != 0")
    e = ExtensionStructure.build(split, delta, mu, lambda_)
    rep = bimodule_report(e)
    if not rep.passed:
        raise ArithmeticError("bimodule decomposition disagrees with the MC equation")
    H = iterated_cohomology(mu, e.dl, split, C(0, 2))
    return BimoduleClassification(rep, H)
