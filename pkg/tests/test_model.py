"""Model-space reconstruction and unitary-equivalence certification.

Dimension oracles (worked by hand):

* T = [0] on C, d = 6: both defects are 1-dimensional, the function is the
  degree-one coordinate, and the model collapses to a single copy of the
  7-word space: (p, q, s, h) = (7, 7, 1, 1), with the model operator equal
  to the 1x1 zero matrix.
* the commuting nilpotent triple-space tuple (m = 3) under the commutative
  family at d = 6 (dim N = 28): p = 28*3 = 84, q = 28*6 = 168, and the
  model complement has s = 87, h = 3 (the model recovers a 3-dimensional
  space, matching m).
"""

import numpy as np
import pytest

from conftest import adj, make_spec, opnorm
from fockmodel import (
    TriState,
    TruncatedFockSpace,
    build_model,
    characteristic_function,
    classify,
    coincidence_from_unitary,
    constrained_characteristic_function,
    constrained_creation_tuple,
    constrained_poisson_kernel,
    ideal_subspace,
    model_operators,
    model_unitary,
    validate,
    verify_coincidence_implies_equivalence,
)
from fockmodel.sampling import (
    commuting_nilpotent_tuple,
    conjugated_tuple,
    haar_unitary,
    random_scalar_tuple,
)


def _pipeline(mats, sub):
    cls = classify(mats)
    th = constrained_characteristic_function(mats, sub)
    k = constrained_poisson_kernel(mats, sub)
    model = build_model(th, classification=cls)
    ops = model_operators(model, classification=cls)
    return cls, th, k, model, ops


# ---------------------------------------------------------------------------
# dimensions


def test_unilateral_shift_model_is_one_dimensional(subspace_factory):
    sub = subspace_factory("zero", n=1, d=6)
    cls, _, k, model, ops = _pipeline([np.array([[0.0]])], sub)
    assert (model.p, model.q, model.s, model.h) == (7, 7, 1, 1)
    assert model.isometry_residual == 0.0
    assert ops.Tt[0].shape == (1, 1)
    assert abs(ops.Tt[0][0, 0]) < 1e-14
    assert ops.injectivity_margin == pytest.approx(1.0)
    assert max(ops.defining_residual) == 0.0
    g = model_unitary(model, k, ops)
    assert g.unitary_residual == 0.0
    assert max(g.intertwining.values()) == 0.0


def test_commuting_nilpotent_triple_dims(subspace_factory):
    sub = subspace_factory("commutative", d=6)
    rng = np.random.default_rng(3)
    mats = commuting_nilpotent_tuple(rng, 2, 0.6)
    cls, th, _, model, ops = _pipeline(mats, sub)
    assert (model.p, model.q, model.s, model.h) == (84, 168, 87, 3)
    assert model.h == mats[0].shape[0]
    assert model.tail_bound == 0.0  # nilpotent: the truncation is lossless
    assert model.isometry_residual < 1e-12
    assert max(ops.defining_residual) < 1e-12
    assert ops.injectivity_margin == pytest.approx(1.0, abs=1e-10)


def test_model_operators_inherit_the_relations(subspace_factory):
    sub = subspace_factory("commutative", d=5)
    rng = np.random.default_rng(41)
    mats = commuting_nilpotent_tuple(rng, 2, 0.7)
    *_, ops = _pipeline(mats, sub)
    t1, t2 = ops.Tt
    assert opnorm(t1 @ t2 - t2 @ t1) < 1e-10
    assert validate(ops.Tt).is_row_contraction


# ---------------------------------------------------------------------------
# the shift reproduces itself


def test_shift_model_reproduces_the_shift(subspace_factory):
    sub = subspace_factory("commutative", d=4)
    b = constrained_creation_tuple(sub, "left")
    cls, th, k, model, ops = _pipeline(b, sub)
    assert model.p == model.h  # vanishing function: the model is all of N x D_T
    w = ops.basis[: model.p]
    assert opnorm(adj(w) @ w - np.eye(model.h)) < 1e-12
    for i in range(2):
        assert opnorm(ops.Tt[i] - adj(w) @ b[i] @ w) < 1e-12
    g = model_unitary(model, k, ops)
    assert g.unitary_residual < 1e-12
    assert max(g.intertwining.values()) < 1e-12


# ---------------------------------------------------------------------------
# branches, tilts, and the canonical identification


@pytest.fixture(scope="module")
def scalar_half_model(subspace_factory):
    sub = subspace_factory("zero", n=1, d=10)
    mats = [np.array([[0.5]])]
    return _pipeline(mats, sub) + (sub,)


def test_pure_branch_is_used_for_certified_pure_tuples(scalar_half_model):
    cls, *_, ops, _ = scalar_half_model
    assert cls.pure is TriState.YES
    assert ops.used == "pure"
    assert ops.pure is not None
    assert ops.branch_agreement is not None


def test_defining_residual_scales_with_the_subspace_tilt(scalar_half_model):
    # the least-squares residual of the defining relation reflects how far
    # the truncated model space tilts out of its ideal position: sqrt(tail),
    # not tail -- the recovered operator is still tail-accurate
    cls, th, k, model, ops, _ = scalar_half_model
    tilt = np.sqrt(model.tail_bound)
    assert 0 < max(ops.defining_residual) < 10 * tilt
    assert max(ops.branch_agreement) < 1e-8 + 10 * model.tail_bound
    assert ops.injectivity_margin > 0.99
    # and the operator itself is within tail of the original scalar
    assert abs(ops.Tt[0][0, 0] - 0.5) < 10 * model.tail_bound + 1e-12


def test_model_unitary_identifications(scalar_half_model):
    cls, th, k, model, ops, _ = scalar_half_model
    g = model_unitary(model, k, ops)
    tail = model.tail_bound
    assert g.unitary_residual < 1e-8 + 10 * tail
    assert g.embedding_residual < 1e-8 + 10 * tail
    assert g.norm_identity_residual < 1e-7 + 10 * tail
    assert g.projection_residual < 1e-7 + 10 * tail
    assert max(g.intertwining.values()) < 1e-8 + 10 * tail


def test_build_model_rejects_norm_preserving_tuples():
    one = [np.array([[1.0]])]
    th = characteristic_function(one, TruncatedFockSpace(1, 6))
    with pytest.raises(ValueError, match="noncoisometric"):
        build_model(th, classification=classify(one))


# ---------------------------------------------------------------------------
# coincidence witnesses


@pytest.fixture(scope="module")
def conjugated_pair(subspace_factory):
    sub = subspace_factory("commutative", d=5)
    rng = np.random.default_rng(17)
    mats = commuting_nilpotent_tuple(rng, 2, 0.7)
    u = haar_unitary(3, rng)
    return sub, mats, conjugated_tuple(mats, u), u


def test_witness_from_a_true_conjugation(conjugated_pair):
    sub, mats, mats_p, u = conjugated_pair
    wit = coincidence_from_unitary(mats, mats_p, u, sub)
    assert wit.residual < 1e-12
    assert wit.conjugation_residual < 1e-12
    assert opnorm(adj(wit.tau) @ wit.tau - np.eye(wit.tau.shape[1])) < 1e-12
    assert opnorm(adj(wit.tau_star) @ wit.tau_star - np.eye(wit.tau_star.shape[1])) < 1e-12


def test_witness_rejects_non_unitaries(conjugated_pair):
    sub, mats, mats_p, _ = conjugated_pair
    with pytest.raises(ValueError, match="unitary"):
        coincidence_from_unitary(mats, mats_p, np.eye(3) * 1.5, sub)


def test_witness_rejects_non_conjugating_unitaries(conjugated_pair):
    sub, mats, _, u = conjugated_pair
    rng = np.random.default_rng(99)
    other = commuting_nilpotent_tuple(rng, 2, 0.5)
    with pytest.raises(ValueError, match="not conjugated"):
        coincidence_from_unitary(mats, other, u, sub)


# ---------------------------------------------------------------------------
# coincidence implies unitary equivalence, constructively


def test_full_equivalence_certificate(conjugated_pair):
    sub, mats, mats_p, u = conjugated_pair
    wit = coincidence_from_unitary(mats, mats_p, u, sub)
    eq = verify_coincidence_implies_equivalence(mats, mats_p, wit, sub)
    assert eq.equivalent
    assert eq.coincidence_residual < 1e-12
    assert eq.max_principal_angle < 1e-8
    assert eq.model_intertwining < 1e-8
    assert eq.recovered_unitarity < 1e-8
    assert eq.recovered_intertwining < 1e-8
    # the recovered unitary conjugates the tuples, like the witness's own
    v = eq.recovered_unitary
    assert max(opnorm(v @ t - tp @ v) for t, tp in zip(mats, mats_p)) < 1e-8


def test_equivalence_without_any_relations(subspace_factory):
    # the free case: same machinery with the empty relation family
    sub = subspace_factory("zero", d=6)
    rng = np.random.default_rng(57)
    mats = random_scalar_tuple(rng, 2, 0.04)
    u = haar_unitary(1, rng)
    mats_p = conjugated_tuple(mats, u)
    wit = coincidence_from_unitary(mats, mats_p, u, sub)
    eq = verify_coincidence_implies_equivalence(mats, mats_p, wit, sub)
    assert eq.equivalent
    # scalars are irreducible, so the recovered unitary can only differ from
    # the witness by a global phase
    assert eq.phase_deviation < 1e-6


def test_gamma_residuals_serializable_types(conjugated_pair):
    sub, mats, _, _ = conjugated_pair
    cls, th, k, model, ops = _pipeline(mats, sub)
    g = model_unitary(model, k, ops)
    assert isinstance(g.unitary_residual, float)
    assert isinstance(g.norm_identity_residual, float)
    assert isinstance(g.projection_residual, float)
    assert set(g.intertwining) == {1, 2}
