"""Cochains on the tensor coalgebra of a Z2-graded space.

A cochain is a finite linear combination of basis coderivations
``phi^I_i`` (inputs ``I``, output ``i``), stored sparsely.  Everything
is in the parity-reversed model: an ungraded algebra lives on an all-odd
space and a structure is an odd arity-2 cochain ``d`` with ``[d, d] = 0``.

Indices are 0-based internally.  Printing uses the 1-based ``psi[1,2->2]``
notation (``psi`` for odd terms, ``phi`` for even ones).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

from .linalg import Matrix, as_scalar, inverse

EVEN, ODD = 0, 1
M, W = "M", "W"


@dataclass(frozen=True)
class GradedSpace:
    names: tuple
    parities: tuple

    def __post_init__(self):
        if len(self.names) != len(self.parities):
            raise ValueError("names and parities differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate basis names in {self.names}")
        if any(p not in (EVEN, ODD) for p in self.parities):
            raise ValueError("parities must be 0 or 1")

    @classmethod
    def from_even_odd(cls, even: Sequence[str] = (), odd: Sequence[str] = ()) -> "GradedSpace":
        """Even basis vectors first, then odd ones."""
        return cls(tuple(even) + tuple(odd), (EVEN,) * len(even) + (ODD,) * len(odd))

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def superdim(self) -> str:
        odd = sum(self.parities)
        return f"{self.dim - odd}|{odd}"

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown basis vector {name!r}") from None


@dataclass(frozen=True)
class SplitSpace:
    """V = M + W with M the ideal; ``membership[i]`` is "M" or "W"."""

    space: GradedSpace
    membership: tuple

    def __post_init__(self):
        if len(self.membership) != self.space.dim:
            raise ValueError("membership must assign every basis vector")
        if any(m not in (M, W) for m in self.membership):
            raise ValueError("membership entries must be 'M' or 'W'")

    @classmethod
    def from_names(cls, space: GradedSpace, m_names: Iterable[str] = (), w_names: Iterable[str] = ()):
        m_names, w_names = list(m_names), list(w_names)
        if set(m_names) & set(w_names):
            raise ValueError("a basis vector cannot lie in both M and W")
        member = []
        for n in space.names:
            if n in m_names:
                member.append(M)
            elif n in w_names:
                member.append(W)
            else:
                raise ValueError(f"basis vector {n!r} assigned to neither M nor W")
        for n in m_names + w_names:
            space.index(n)
        return cls(space, tuple(member))


@dataclass(frozen=True, order=True)
class BasisCoderivation:
    inputs: tuple
    output: int

    @property
    def arity(self) -> int:
        return len(self.inputs)

    def parity(self, space: GradedSpace) -> int:
        par = space.parities
        return (par[self.output] + sum(par[j] for j in self.inputs)) % 2

    def label(self, space: GradedSpace) -> str:
        head = "psi" if self.parity(space) else "phi"
        ins = ",".join(str(j + 1) for j in self.inputs)
        return f"{head}[{ins}->{self.output + 1}]"


@dataclass(frozen=True, order=True)
class Bidegree:
    """k inputs from M, l inputs from W, output in ``target``.

    ``Bidegree(k, l, "M")`` is C^{k,l}; ``Bidegree(0, l, "W")`` is C^l.
    A W-target with k > 0 never occurs in an extension (M is an ideal).
    """

    k: int
    l: int
    target: str = M

    @property
    def arity(self) -> int:
        return self.k + self.l

    @property
    def ideal_violating(self) -> bool:
        return self.target == W and self.k > 0

    def __str__(self) -> str:
        if self.target == M:
            return f"C^{{{self.k},{self.l}}}"
        if self.k == 0:
            return f"C^{{{self.l}}}"
        return f"bad^{{{self.k},{self.l}}}"


def C(k: int, l: int) -> Bidegree:
    return Bidegree(k, l, M)


def CW(l: int) -> Bidegree:
    return Bidegree(0, l, W)


def natural_parity(arity: int) -> int:
    """Parity of cochains that take part in the structure theory.

    Structures (arity 2) are odd, automorphism generators (arity 1) even,
    and the bracket of an odd structure with such a cochain raises arity
    and flips parity, so arity n carries parity n + 1 mod 2.
    """
    return (arity + 1) % 2


def _coerce(c):
    if isinstance(c, (int, str, Fraction)):
        return as_scalar(c)
    return c


class Cochain:
    """Sparse linear combination of basis coderivations; immutable."""

    __slots__ = ("space", "_terms", "_hash")

    def __init__(self, space: GradedSpace, terms: Mapping = None):
        self.space = space
        clean = {}
        n = space.dim
        for b, c in (terms or {}).items():
            if b.arity < 1:
                raise ValueError("cochains have arity at least 1")
            if not (0 <= b.output < n) or any(not (0 <= j < n) for j in b.inputs):
                raise ValueError(f"basis index out of range in {b}")
            c = _coerce(c)
            if c != 0:
                clean[b] = c
        self._terms = dict(sorted(clean.items()))
        self._hash = None

    @classmethod
    def zero(cls, space: GradedSpace) -> "Cochain":
        return cls(space)

    @classmethod
    def from_vector(cls, space: GradedSpace, basis: Sequence[BasisCoderivation], vec) -> "Cochain":
        return cls(space, {b: c for b, c in zip(basis, vec) if c != 0})

    def to_vector(self, basis: Sequence[BasisCoderivation], strict: bool = True) -> tuple:
        index = {b: i for i, b in enumerate(basis)}
        out = [Fraction(0)] * len(basis)
        for b, c in self._terms.items():
            i = index.get(b)
            if i is None:
                if strict:
                    raise ValueError(f"term {b.label(self.space)} outside the coordinate basis")
                continue
            out[i] = c
        return tuple(out)

    def items(self):
        return self._terms.items()

    def coeff(self, b: BasisCoderivation):
        return self._terms.get(b, Fraction(0))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def arities(self) -> frozenset:
        return frozenset(b.arity for b in self._terms)

    @property
    def parity(self) -> Optional[int]:
        """The common parity of all terms, or None for mixed (or zero) cochains."""
        ps = {b.parity(self.space) for b in self._terms}
        return ps.pop() if len(ps) == 1 else None

    def restrict(self, pred) -> "Cochain":
        return Cochain(self.space, {b: c for b, c in self._terms.items() if pred(b)})

    def _check(self, other: "Cochain"):
        if not isinstance(other, Cochain):
            return NotImplemented
        if other.space != self.space:
            raise ValueError("cochains live on different spaces")
        return None

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for b, c in other._terms.items():
            out[b] = out.get(b, 0) + c
        return Cochain(self.space, out)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return Cochain(self.space, {b: -c for b, c in self._terms.items()})

    def __mul__(self, s):
        s = _coerce(s)
        return Cochain(self.space, {b: c * s for b, c in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Cochain):
            return NotImplemented
        return self.space == other.space and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.space, tuple(self._terms.items())))
        return self._hash

    def __repr__(self):
        return format_cochain(self)

    def to_json(self) -> list:
        names = self.space.names
        return [
            {"inputs": [names[j] for j in b.inputs], "output": names[b.output], "coeff": str(c)}
            for b, c in self._terms.items()
        ]

    @classmethod
    def from_json(cls, space: GradedSpace, data: list) -> "Cochain":
        terms = {}
        for t in data:
            b = BasisCoderivation(tuple(space.index(n) for n in t["inputs"]), space.index(t["output"]))
            terms[b] = terms.get(b, 0) + as_scalar(t["coeff"])
        return cls(space, terms)


def format_cochain(c: Cochain) -> str:
    if not c._terms:
        return "0"
    parts = []
    for b, coef in c._terms.items():
        lab = b.label(c.space)
        if isinstance(coef, Fraction):
            sign = "-" if coef < 0 else "+"
            mag = abs(coef)
            body = lab if mag == 1 else f"{mag}*{lab}"
        else:
            sign, body = "+", f"({coef})*{lab}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def phi(space: GradedSpace, inputs: Sequence[int], output: int, coeff=1) -> Cochain:
    """Single-term cochain with 1-based indices, matching phi^{I}_{i}."""
    b = BasisCoderivation(tuple(j - 1 for j in inputs), output - 1)
    return Cochain(space, {b: coeff})


psi = phi


def cochain_basis(space: GradedSpace, arity: int, parity: Optional[int] = None) -> list:
    """All basis coderivations of the given arity in lexicographic (I, i) order."""
    if arity < 1:
        raise ValueError("arity must be at least 1")
    out = []
    for ins in itertools.product(range(space.dim), repeat=arity):
        for i in range(space.dim):
            b = BasisCoderivation(ins, i)
            if parity is None or b.parity(space) == parity:
                out.append(b)
    return out


def evaluate(c: Cochain, args: Sequence[int]) -> tuple:
    """Value of c on the basis tensor e_{args} (0-based indices), in V-coordinates."""
    args = tuple(args)
    if c and len(args) not in c.arities:
        raise ValueError(f"no component of arity {len(args)} in cochain")
    out = [Fraction(0)] * c.space.dim
    for b, coef in c.items():
        if b.inputs == args:
            out[b.output] += coef
    return tuple(out)


def evaluate_multilinear(c: Cochain, vectors: Sequence[Sequence]) -> tuple:
    """Value of c on v_1 x ... x v_n for arbitrary coordinate vectors."""
    out = [Fraction(0)] * c.space.dim
    for b, coef in c.items():
        if b.arity != len(vectors):
            continue
        w = coef
        for j, v in zip(b.inputs, vectors):
            w = w * v[j]
            if w == 0:
                break
        else:
            out[b.output] += w
    return tuple(out)


@lru_cache(maxsize=None)
def _circle_basis(parities: tuple, f: BasisCoderivation, g: BasisCoderivation) -> tuple:
    """phi_f o phi_g as ((basis, sign), ...); the Koszul sign counts inputs passed over."""
    pg = (parities[g.output] + sum(parities[j] for j in g.inputs)) % 2
    out = []
    passed = 0
    for p, j in enumerate(f.inputs):
        if j == g.output:
            sign = -1 if (pg and passed % 2) else 1
            out.append((BasisCoderivation(f.inputs[:p] + g.inputs + f.inputs[p + 1 :], f.output), sign))
        passed += parities[j]
    return tuple(out)


def _same_space(f: Cochain, g: Cochain):
    if f.space != g.space:
        raise ValueError("cochains live on different spaces")


def circle_product(f: Cochain, g: Cochain) -> Cochain:
    """Insertion product f o g, extended bilinearly over terms."""
    _same_space(f, g)
    par = f.space.parities
    out = {}
    for bf, cf in f.items():
        for bg, cg in g.items():
            for b, s in _circle_basis(par, bf, bg):
                out[b] = out.get(b, 0) + s * (cf * cg)
    return Cochain(f.space, out)


def bracket(f: Cochain, g: Cochain) -> Cochain:
    """Graded commutator [f, g] = f o g - (-1)^{|f||g|} g o f."""
    _same_space(f, g)
    space = f.space
    par = space.parities
    out = {}
    for bf, cf in f.items():
        pf = bf.parity(space)
        for bg, cg in g.items():
            coef = cf * cg
            for b, s in _circle_basis(par, bf, bg):
                out[b] = out.get(b, 0) + s * coef
            twist = 1 if (pf and bg.parity(space)) else -1
            for b, s in _circle_basis(par, bg, bf):
                out[b] = out.get(b, 0) + twist * s * coef
    return Cochain(space, out)


def bidegree(b: BasisCoderivation, split: SplitSpace) -> Bidegree:
    k = sum(1 for j in b.inputs if split.membership[j] == M)
    return Bidegree(k, b.arity - k, split.membership[b.output])


def bidegree_split(c: Cochain, split: SplitSpace) -> dict:
    """Partition c by bidegree; the parts sum back to c."""
    if c.space != split.space:
        raise ValueError("cochain and split live on different spaces")
    parts = {}
    for b, coef in c.items():
        parts.setdefault(bidegree(b, split), {})[b] = coef
    return {bd: Cochain(c.space, t) for bd, t in sorted(parts.items())}


def in_piece(c: Cochain, split: SplitSpace, *pieces: Bidegree) -> bool:
    return all(bidegree(b, split) in pieces for b, _ in c.items())


@lru_cache(maxsize=None)
def piece_basis(split: SplitSpace, piece: Bidegree, parity="natural") -> tuple:
    """Basis coderivations of one bidegree, in the global lexicographic order.

    ``parity`` is "natural" (the default, see :func:`natural_parity`),
    ``None`` for both parities, or an explicit 0/1.
    """
    if piece.k < 0 or piece.l < 0 or piece.arity < 1:
        return ()
    if parity == "natural":
        parity = natural_parity(piece.arity)
    return tuple(
        b for b in cochain_basis(split.space, piece.arity, parity) if bidegree(b, split) == piece
    )


def pullback_exp_beta(d: Cochain, beta: Cochain, split: SplitSpace) -> Cochain:
    """exp(-ad_beta)(d) = d + [d, b] + 1/2 [[d, b], b] + ... for beta in C^{0,1}.

    For an arity-2 extension structure the series stops after the quadratic
    term; that and the componentwise formulas for lambda' and psi' are
    checked on every call.
    """
    if not in_piece(beta, split, C(0, 1)):
        raise ValueError("beta must lie in C^{0,1} = Hom(W, M)")
    if beta.parity not in (None, EVEN):
        raise ValueError("beta must be even")
    out = d
    term = d
    k = 0
    limit = max(d.arities, default=0) + 2
    while True:
        k += 1
        term = bracket(term, beta) * Fraction(1, k)
        if not term:
            break
        if k > limit:
            raise ArithmeticError("exp(-ad_beta) series failed to terminate")
        out = out + term
    if d.arities <= {2} and not any(bidegree(b, split).ideal_violating for b, _ in d.items()):
        if k > 3:
            raise ArithmeticError("[[[d,beta],beta],beta] does not vanish")
        _check_pullback_components(d, beta, out, split)
    return out


def _check_pullback_components(d, beta, out, split):
    parts = bidegree_split(d, split)
    zero = Cochain.zero(d.space)
    delta = parts.get(CW(2), zero)
    mu = parts.get(C(2, 0), zero)
    lam = parts.get(C(1, 1), zero)
    ps = parts.get(C(0, 2), zero)
    new = bidegree_split(out, split)
    mb = bracket(mu, beta)
    lam2 = lam + mb
    psi2 = ps + bracket(delta + lam, beta) + bracket(mb, beta) * Fraction(1, 2)
    if new.get(C(1, 1), zero) != lam2 or new.get(C(0, 2), zero) != psi2:
        raise ArithmeticError("pullback components disagree with lambda + [mu,b] / psi formula")
    if new.get(CW(2), zero) != delta or new.get(C(2, 0), zero) != mu:
        raise ArithmeticError("pullback changed delta or mu")


def check_group_element(g: Matrix, space: GradedSpace, split: Optional[SplitSpace] = None) -> Matrix:
    """Validate g (columns are images of basis vectors) and return its inverse."""
    n = space.dim
    if g.shape != (n, n):
        raise ValueError(f"group element must be {n}x{n}")
    par = space.parities
    for r in range(n):
        for j in range(n):
            if g.rows[r][j] != 0:
                if par[r] != par[j]:
                    raise ValueError("group element does not preserve parity")
                if split is not None and split.membership[r] != split.membership[j]:
                    raise ValueError("group element is not block diagonal for the M/W split")
    try:
        return inverse(g)
    except ZeroDivisionError:
        raise ValueError("group element is singular") from None


def apply_group_element(c: Cochain, g: Matrix, split: Optional[SplitSpace] = None, ginv: Matrix = None) -> Cochain:
    """g^*(c) = g^{-1} o c o (g x ... x g) for an even invertible g."""
    if ginv is None:
        ginv = check_group_element(g, c.space, split)
    n = c.space.dim
    rows = g.rows
    support = [[j for j in range(n) if rows[r][j] != 0] for r in range(n)]
    out = {}
    for b, coef in c.items():
        targets = [(k, ginv.rows[k][b.output]) for k in range(n) if ginv.rows[k][b.output] != 0]
        for J in itertools.product(*(support[r] for r in b.inputs)):
            w = coef
            for r, j in zip(b.inputs, J):
                w = w * rows[r][j]
            for k, h in targets:
                nb = BasisCoderivation(tuple(J), k)
                out[nb] = out.get(nb, 0) + w * h
    return Cochain(c.space, out)
