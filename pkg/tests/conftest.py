"""Shared fixtures and slow cross-check oracles.

The constraint-dimension oracle here deliberately avoids the production
route: it spans the relation subspace by *acting with explicit operator
products on basis vectors* and takes a single numpy matrix_rank, whereas
ideal_subspace assembles coefficient vectors by index arithmetic and splits
an SVD per degree.  The two share nothing beyond the generator polynomials.
"""

import itertools

import numpy as np
import pytest

from fockmodel import PolyIdealSpec, TruncatedFockSpace, ideal_subspace
from fockmodel.fock import left_creation_tuple, word_operator

Q_TEST = np.exp(1j * np.pi / 3)


def opnorm(a):
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def adj(a):
    return np.conj(a.T)


def brute_force_constraint_dims(spec: PolyIdealSpec, space: TruncatedFockSpace):
    """(dim relation span, dim complement) the slow way; see module docstring."""
    gens = spec.generators()
    if not gens:
        return 0, space.dim
    s = left_creation_tuple(space)
    cols = []
    for p in gens:
        t = p.degree
        pmat = p.apply_to(s)
        for ka in range(space.d - t + 1):
            for alpha in itertools.product(range(1, space.n + 1), repeat=ka):
                left = word_operator(space, alpha) @ pmat
                for kb in range(space.d - t - ka + 1):
                    for beta in itertools.product(range(1, space.n + 1), repeat=kb):
                        cols.append(left @ space.basis_vector(beta))
    if not cols:  # every generator is too long to fit below the truncation
        return 0, space.dim
    rank = int(np.linalg.matrix_rank(np.column_stack(cols)))
    return rank, space.dim - rank


@pytest.fixture(scope="session")
def space_factory():
    cache = {}

    def make(n, d):
        if (n, d) not in cache:
            cache[(n, d)] = TruncatedFockSpace(n, d)
        return cache[(n, d)]

    return make


def make_spec(kind, n=2, q=None):
    if kind == "q_commutative":
        return PolyIdealSpec(n=n, kind=kind, q=Q_TEST if q is None else q)
    return PolyIdealSpec(n=n, kind=kind)


@pytest.fixture(scope="session")
def subspace_factory(space_factory):
    cache = {}

    def make(kind, n=2, d=6, q=None):
        qq = None if kind != "q_commutative" else (Q_TEST if q is None else complex(q))
        key = (kind, n, d, qq)
        if key not in cache:
            cache[key] = ideal_subspace(make_spec(kind, n=n, q=qq), space_factory(n, d))
        return cache[key]

    return make
