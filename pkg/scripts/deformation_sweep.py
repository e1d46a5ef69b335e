"""Compare infinitesimal deformation classes with a brute-force grid sweep.

For each 0|2 extension d2..d6 the script counts grid directions
(eta, zeta) with coefficients in {-1, 0, 1} that pass the dual-number
test, and the number of classes under the equivalence moves.
"""

import itertools

from assocext.coalgebra import C, Cochain, GradedSpace, SplitSpace, phi, piece_basis
from assocext.deformations import classify_infinitesimal_deformations, deformation_key, dual_square
from assocext.extensions import ExtensionStructure

V = GradedSpace.from_even_odd((), ("f1", "f2"))
SPLIT = SplitSpace.from_names(V, ["f2"], ["f1"])
p = lambda i, o: phi(V, i, o)
STRUCTURES = {
    "d2": p([1, 1], 1) + p([1, 2], 2),
    "d3": p([1, 1], 1) + p([2, 1], 2),
    "d4": p([1, 1], 1) + p([1, 2], 2) + p([2, 1], 2),
    "d5": p([1, 1], 1),
    "d6": p([1, 1], 2),
}


def grid(piece):
    basis = piece_basis(SPLIT, piece)
    for coeffs in itertools.product((-1, 0, 1), repeat=len(basis)):
        yield Cochain(V, {b: c for b, c in zip(basis, coeffs) if c})


def main():
    print(f"{'ext':4} {'valid':>6} {'classes':>8} {'dims':>8}")
    for name, d in STRUCTURES.items():
        e = ExtensionStructure.from_codifferential(d, SPLIT)
        cls = classify_infinitesimal_deformations(e)
        keys = set()
        valid = 0
        for eta in grid(C(1, 1)):
            for zeta in grid(C(0, 2)):
                _, lin = dual_square(d, eta + zeta)
                if lin:
                    continue
                valid += 1
                keys.add(deformation_key(e, eta, zeta, cls))
        print(f"{name:4} {valid:>6} {len(keys):>8} {str(cls.dims):>8}")


if __name__ == "__main__":
    main()
