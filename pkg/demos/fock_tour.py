"""A quick tour of the truncated word space and its creation operators.

Everything downstream (kernels, characteristic functions, models) lives on
the span of words of length <= d in n letters.  This script prints the
bookkeeping for a small instance and then checks the operator identities
that make the truncation usable: creations are isometries off the top
degree, their ranges tile the complement of the vacuum, and the order-
reversing flip swaps left and right creations exactly.
"""

import numpy as np

from fockmodel import (
    TruncatedFockSpace,
    flip_unitary,
    left_creation_tuple,
    right_creation_tuple,
    word_label,
)


def main():
    space = TruncatedFockSpace(2, 4)
    print(f"n={space.n} letters, degree <= {space.d}: dim = {space.dim}")
    print("first ten basis words:", [word_label(space.word(i)) for i in range(10)])

    s = left_creation_tuple(space)
    r = right_creation_tuple(space)
    eye = np.eye(space.dim)

    top = space.degree_slice(space.d)
    p_top = np.zeros_like(eye)
    p_top[top, top] = np.eye(top.stop - top.start)
    p_vac = np.zeros_like(eye)
    p_vac[0, 0] = 1.0

    worst = 0.0
    for i, si in enumerate(s):
        for j, sj in enumerate(s):
            want = eye - p_top if i == j else np.zeros_like(eye)
            worst = max(worst, np.linalg.norm(si.conj().T @ sj - want, 2))
    print(f"S_i* S_j = delta_ij (I - P_top):   residual {worst:.2e}")

    row = sum(si @ si.conj().T for si in s)
    print(f"sum S_i S_i* = I - P_vacuum:       residual "
          f"{np.linalg.norm(row - (eye - p_vac), 2):.2e}")

    u = flip_unitary(space)
    worst = max(np.linalg.norm(u @ si @ u - ri, 2) for si, ri in zip(s, r))
    print(f"flip conjugates left to right:     residual {worst:.2e}")

    # the flip literally reverses words
    w = (1, 2, 2)
    print("flip sends", word_label(w), "to",
          word_label(space.word(int(np.argmax(np.abs(u @ space.basis_vector(w)))))))


if __name__ == "__main__":
    main()
