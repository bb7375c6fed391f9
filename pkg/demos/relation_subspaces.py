"""Relation families carve out the subspace the constrained theory lives on.

For the commutative family the complement dimension has a closed form
(sum over degrees of the number of monomials in n commuting variables);
the q-commuting family matches it degree for degree.  Compressing the
creation operators to the complement produces tuples that satisfy the
relations *exactly* -- that is checked here, including the fact that the
right-side compressions pick up the opposite orientation of the
q-relation because appending letters reverses composition order.
"""

import math

import numpy as np

from fockmodel import (
    PolyIdealSpec,
    TruncatedFockSpace,
    constrained_creation_tuple,
    ideal_subspace,
)


def norm(a):
    return np.linalg.norm(a, 2)


def main():
    n, d = 2, 5
    q = np.exp(1j * np.pi / 3)
    space = TruncatedFockSpace(n, d)
    print(f"ambient dim (n={n}, degree<={d}): {space.dim}")

    for kind, extra in [("zero", {}), ("commutative", {}), ("q_commutative", {"q": q})]:
        spec = PolyIdealSpec(n=n, kind=kind, **extra)
        sub = ideal_subspace(spec, space)
        print(f"  {kind:15s} dim M = {sub.dim_M:3d}   dim N = {sub.dim_N:3d}")

    formula = sum(math.comb(n + k - 1, k) for k in range(d + 1))
    print(f"closed-form commutative count: {formula}")

    sub = ideal_subspace(PolyIdealSpec(n=n, kind="q_commutative", q=q), space)
    b = constrained_creation_tuple(sub, "left")
    w = constrained_creation_tuple(sub, "right")
    print(f"left compressions:  |B1 B2 - q B2 B1| = {norm(b[0] @ b[1] - q * b[1] @ b[0]):.2e}")
    print(f"right compressions: |W2 W1 - q W1 W2| = {norm(w[1] @ w[0] - q * w[0] @ w[1]):.2e}")
    print(f"  (wrong orientation, for contrast:  |W1 W2 - q W2 W1| = "
          f"{norm(w[0] @ w[1] - q * w[1] @ w[0]):.2f})")


if __name__ == "__main__":
    main()
