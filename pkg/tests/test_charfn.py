"""Characteristic functions: Fourier data, factorization, inner/outer tests.

Scalar oracle (worked by hand, n = 1, T = [a], |a| < 1): the function is the
Moebius map (z - a)/(1 - conj(a) z), whose coefficients are

    theta_()     = -a
    theta_(1^k)  = (1 - |a|^2) * conj(a)^(k-1),   k >= 1.

With a = 1/2 the first few are -0.5, 0.75, 0.375, 0.1875, ...
"""

import numpy as np
import pytest

from conftest import Q_TEST, adj, make_spec, opnorm
from fockmodel import (
    NCPoly,
    PolyIdealSpec,
    TruncatedFockSpace,
    characteristic_function,
    classify,
    coincidence_necessary_mismatch,
    constrained_characteristic_function,
    constrained_creation_tuple,
    constrained_poisson_kernel,
    delta_and_classify,
    eval_commutative,
    factorization_defect,
    fourier_block,
    fourier_sum,
    ideal_subspace,
    truncation_tail,
)
from fockmodel.ideals import ConstrainedSubspace
from fockmodel.sampling import (
    commuting_nilpotent_tuple,
    q_commuting_nilpotent_tuple,
    random_row_contraction,
)

PAIR = [np.array([[0.5]]), np.array([[0.5]])]


@pytest.fixture(scope="module")
def mobius_half():
    space = TruncatedFockSpace(1, 10)
    return characteristic_function([np.array([[0.5]])], space)


# ---------------------------------------------------------------------------
# Fourier coefficients


def test_mobius_blocks_frozen(mobius_half):
    assert fourier_block(mobius_half, ())[0, 0] == pytest.approx(-0.5, abs=1e-14)
    assert fourier_block(mobius_half, (1,))[0, 0] == pytest.approx(0.75, abs=1e-14)
    assert fourier_block(mobius_half, (1, 1))[0, 0] == pytest.approx(0.375, abs=1e-14)
    assert fourier_block(mobius_half, (1, 1, 1))[0, 0] == pytest.approx(0.1875, abs=1e-14)


def test_mobius_blocks_follow_the_geometric_law(mobius_half):
    a = 0.5
    for k in range(1, 11):
        want = (1 - a**2) * a ** (k - 1)
        got = fourier_block(mobius_half, (1,) * k)[0, 0]
        assert abs(got - want) < 1e-13


def test_unilateral_shift_blocks():
    space = TruncatedFockSpace(1, 6)
    cf = characteristic_function([np.array([[0.0]])], space)
    assert fourier_block(cf, ())[0, 0] == pytest.approx(0.0, abs=1e-14)
    assert fourier_block(cf, (1,))[0, 0] == pytest.approx(1.0, abs=1e-14)
    assert fourier_block(cf, (1, 1))[0, 0] == pytest.approx(0.0, abs=1e-14)


def test_zero_pair_blocks_are_coordinate_functionals():
    space = TruncatedFockSpace(2, 4)
    cf = characteristic_function([np.zeros((1, 1)), np.zeros((1, 1))], space)
    assert (cf.d_T, cf.d_star) == (1, 2)
    assert opnorm(fourier_block(cf, ())) < 1e-14
    b = np.vstack([fourier_block(cf, (1,)), fourier_block(cf, (2,))])
    # the two degree-one blocks assemble to a unitary of the adjoint defect
    assert opnorm(adj(b) @ b - np.eye(2)) < 1e-12
    for w in [(1, 1), (1, 2), (2, 1), (2, 2)]:
        assert opnorm(fourier_block(cf, w)) < 1e-14


def test_block_count(mobius_half):
    assert mobius_half.block_count == 11
    assert mobius_half.matrix.shape == (11, 11)


# ---------------------------------------------------------------------------
# commutative evaluation


@pytest.mark.parametrize("a", [0.5, 0.37 + 0.21j])
@pytest.mark.parametrize("z", [0.3, -0.62, 0.5j, 0.21 - 0.4j])
def test_eval_reproduces_the_mobius_map(a, z):
    ts = [np.array([[a]])]
    got = eval_commutative(ts, [z])[0, 0]
    want = (z - a) / (1 - np.conj(a) * z)
    assert abs(got - want) < 1e-12


def test_eval_rejects_noncommuting_tuples():
    rng = np.random.default_rng(5)
    bad = [m / 4 for m in (rng.normal(size=(2, 2)), rng.normal(size=(2, 2)))]
    with pytest.raises(ValueError):
        eval_commutative(bad, [0.1, 0.2])


def test_partial_sum_approximates_eval_within_geometric_tail():
    d = 6
    space = TruncatedFockSpace(2, d)
    rng = np.random.default_rng(77)
    mats = [np.diag([0.5, 0.1]).astype(complex), np.diag([0.2, 0.6]).astype(complex)]
    mats = [m * (0.8 / opnorm(np.hstack(mats)) ** 2) ** 0.5 for m in mats]
    cf = characteristic_function(mats, space)
    for _ in range(8):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        z *= rng.uniform(0.1, 0.7) / np.linalg.norm(z)
        r = np.linalg.norm(z)
        bound = 2 * r ** (d + 1) / (1 - r)
        diff = opnorm(fourier_sum(cf, z) - eval_commutative(mats, z))
        assert diff <= bound


# ---------------------------------------------------------------------------
# factorization of the identity


def test_factorization_scalar_pair_commutative():
    space = TruncatedFockSpace(2, 6)
    sub = ideal_subspace(make_spec("commutative"), space)
    th = constrained_characteristic_function(PAIR, sub)
    k = constrained_poisson_kernel(PAIR, sub)
    assert factorization_defect(th, k) < 1e-9


def test_factorization_commuting_matrix_pair_high_degree():
    mats = [np.diag([0.6, 0.2]).astype(complex), np.diag([0.3, 0.7]).astype(complex)]
    scale = (0.8**0.5) / opnorm(np.hstack(mats))
    mats = [scale * m for m in mats]
    assert classify(mats).pure.value == "yes"
    space = TruncatedFockSpace(2, 8)
    sub = ideal_subspace(make_spec("commutative"), space)
    th = constrained_characteristic_function(mats, sub)
    k = constrained_poisson_kernel(mats, sub)
    assert factorization_defect(th, k) < 1e-9


def test_factorization_q_nilpotent_exact():
    rng = np.random.default_rng(13)
    mats = q_commuting_nilpotent_tuple(rng, Q_TEST, 0.75)
    space = TruncatedFockSpace(2, 4)
    sub = ideal_subspace(make_spec("q_commutative"), space)
    th = constrained_characteristic_function(mats, sub)
    k = constrained_poisson_kernel(mats, sub)
    assert th.tail_bound == 0.0
    assert factorization_defect(th, k) < 1e-9


def test_complementary_projections_on_the_model_side():
    space = TruncatedFockSpace(2, 6)
    sub = ideal_subspace(make_spec("commutative"), space)
    th = constrained_characteristic_function(PAIR, sub)
    k = constrained_poisson_kernel(PAIR, sub)
    p_th = th.matrix @ adj(th.matrix)
    p_k = k.matrix @ adj(k.matrix)
    eye = np.eye(p_th.shape[0])
    # the sum is the identity to rounding; each summand is idempotent only up
    # to the truncation tail (they fail to be projections individually by
    # exactly the amount the tail steals)
    assert opnorm(eye - p_th - p_k) < 1e-9
    tail = th.tail_bound
    assert opnorm(p_th @ p_th - p_th) <= tail + 1e-10
    assert opnorm(p_k @ p_k - p_k) <= tail + 1e-10


# ---------------------------------------------------------------------------
# constrained shifts have vanishing characteristic function


@pytest.mark.parametrize("kind", ["zero", "commutative", "q_commutative"])
def test_constrained_shift_theta_vanishes(kind, subspace_factory):
    sub = subspace_factory(kind, d=4)
    b = constrained_creation_tuple(sub, "left")
    th = constrained_characteristic_function(b, sub)
    assert opnorm(th.matrix) < 1e-12


def test_random_pure_tuple_is_far_from_a_shift(subspace_factory):
    rng = np.random.default_rng(23)
    mats = random_row_contraction(rng, 2, 2, 0.6)
    sub = subspace_factory("zero", d=4)
    th = constrained_characteristic_function(mats, sub)
    assert opnorm(th.matrix) > 0.1


# ---------------------------------------------------------------------------
# structure of the constrained function


@pytest.fixture(scope="module")
def comm_theta_d5(subspace_factory):
    sub = subspace_factory("commutative", d=5)
    rng = np.random.default_rng(41)
    mats = commuting_nilpotent_tuple(rng, 2, 0.7)
    th = constrained_characteristic_function(mats, sub)
    return sub, th


def test_constrained_function_is_multi_analytic(comm_theta_d5):
    sub, th = comm_theta_d5
    b = constrained_creation_tuple(sub, "left")
    d = sub.space.d
    keep = sub.n_cols_up_to(d - 1) * th.d_star
    for bi in b:
        comm = th.matrix @ np.kron(bi, np.eye(th.d_star)) - np.kron(bi, np.eye(th.d_T)) @ th.matrix
        assert opnorm(comm[:, :keep]) < 1e-10


def test_coinvariance_leak_is_tiny_for_graded_families(comm_theta_d5):
    _, th = comm_theta_d5
    assert th.coinvariance_leak is not None
    assert th.coinvariance_leak < 1e-12


def test_series_route_agrees_with_compression():
    space = TruncatedFockSpace(2, 6)
    sub = ideal_subspace(make_spec("commutative"), space)
    th_c = constrained_characteristic_function(PAIR, sub, method="compression")
    th_s = constrained_characteristic_function(PAIR, sub, method="series")
    assert th_s.series_agreement is not None
    assert th_s.series_agreement < 1e-10
    assert opnorm(th_s.matrix - th_c.matrix) < 1e-10


def test_series_route_requires_graded_relations():
    space = TruncatedFockSpace(2, 3)
    spec = PolyIdealSpec(n=2, kind="custom", polys=[NCPoly({(1, 2): 1.0, (1,): -1.0})])
    sub = ideal_subspace(spec, space)
    with pytest.raises(ValueError, match="graded"):
        constrained_characteristic_function(
            [np.zeros((1, 1)), np.zeros((1, 1))], sub, method="series"
        )


def test_zero_family_matches_the_unconstrained_function():
    space = TruncatedFockSpace(2, 4)
    sub = ideal_subspace(make_spec("zero"), space)
    th_free = characteristic_function(PAIR, space)
    th_sub = constrained_characteristic_function(PAIR, sub)
    assert opnorm(th_free.matrix - th_sub.matrix) < 1e-14


# ---------------------------------------------------------------------------
# inner / outer classification


def test_mobius_is_inner_and_outer(mobius_half):
    dc = delta_and_classify(mobius_half)
    assert dc.inner and dc.outer
    tail = 0.25**11
    assert dc.partial_isometry_residual == pytest.approx(tail, rel=1e-5)
    assert dc.singular_values.min() == pytest.approx(0.5**11, rel=1e-6)
    assert dc.rank_deficiency == 0


def test_shift_function_is_inner_but_not_outer(subspace_factory):
    sub = subspace_factory("commutative", d=4)
    b = constrained_creation_tuple(sub, "left")
    th = constrained_characteristic_function(b, sub)
    dc = delta_and_classify(th)
    assert dc.inner  # the zero function is a (degenerate) partial isometry
    assert not dc.outer
    assert dc.rank_deficiency == th.matrix.shape[0]


def test_rank_deficiency_counts_the_kernel_of_one_minus_gram(subspace_factory):
    # dual route: dim ker(I - K*K) computed from the kernel gram must agree
    # with the corank of the function on the codomain side
    sub = subspace_factory("commutative", d=6)
    rng = np.random.default_rng(19)
    mats = commuting_nilpotent_tuple(rng, 2, 0.6)
    th = constrained_characteristic_function(mats, sub)
    k = constrained_poisson_kernel(mats, sub)
    dc = delta_and_classify(th)
    gram = adj(k.matrix) @ k.matrix
    eigs = np.linalg.eigvalsh(np.eye(gram.shape[0]) - gram)
    dim_ker = int(np.count_nonzero(eigs <= 1e-8))
    assert dc.rank_deficiency == dim_ker
    assert dc.outer == (dim_ker == 0)


# ---------------------------------------------------------------------------
# coincidence screen


def test_necessary_mismatch(mobius_half):
    assert coincidence_necessary_mismatch(mobius_half, mobius_half) == 0.0
    space = TruncatedFockSpace(1, 10)
    other = characteristic_function([np.array([[0.3]])], space)
    assert coincidence_necessary_mismatch(mobius_half, other) == pytest.approx(0.2)
    sp2 = TruncatedFockSpace(2, 4)
    shaped = characteristic_function([np.zeros((1, 1)), np.zeros((1, 1))], sp2)
    assert coincidence_necessary_mismatch(mobius_half, shaped) == np.inf
