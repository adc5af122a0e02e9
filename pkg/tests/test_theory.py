import itertools
import math

import numpy as np
import pytest

from semlink.theory import (
    ContradictoryMessageError,
    DiscreteJoint,
    Hypothesis,
    WorldModel,
    capacity_objective,
    capacity_sup,
    hypothesis_classifier,
    load_world_model,
    logical_probability,
    semantic_entropy,
)


def uniform_model(satisfied):
    return WorldModel(
        worlds=("w0", "w1", "w2", "w3"),
        probs=(0.25, 0.25, 0.25, 0.25),
        satisfaction={"m": frozenset(satisfied)},
    )


# ---------------------------------------------------------------- oracles


def enum_logical_probability(model: WorldModel, msg: str) -> float:
    """Direct enumeration over worlds, independent of the implementation."""
    total = 0.0
    for world, prob in zip(model.worlds, model.probs):
        if world in model.satisfaction[msg]:
            total += prob
    return total


def enum_objective(px, pzx, pxhz, hse) -> float:
    """Brute-force triple summation of the capacity objective."""
    nx, nz = len(px), len(pzx[0])
    nxh = len(pxhz[0])
    joint = [[0.0] * nxh for _ in range(nx)]
    for x in range(nx):
        for z in range(nz):
            for xh in range(nxh):
                joint[x][xh] += px[x] * pzx[x][z] * pxhz[z][xh]
    p_xhat = [sum(joint[x][xh] for x in range(nx)) for xh in range(nxh)]
    mi = 0.0
    for x in range(nx):
        for xh in range(nxh):
            p = joint[x][xh]
            if p > 0:
                mi += p * math.log2(p / (px[x] * p_xhat[xh]))
    hzx = 0.0
    for x in range(nx):
        for z in range(nz):
            if pzx[x][z] > 0:
                hzx -= px[x] * pzx[x][z] * math.log2(pzx[x][z])
    return mi - hzx + sum(p_xhat[xh] * hse[xh] for xh in range(nxh))


# ------------------------------------------------------ logical probability


def test_tautology_has_full_mass():
    assert logical_probability(uniform_model(["w0", "w1", "w2", "w3"]), "m") == 1.0


def test_single_world_under_uniform_mass():
    assert logical_probability(uniform_model(["w2"]), "m") == 0.25


def test_weighted_worlds_sum():
    model = WorldModel(
        worlds=("a", "b", "c", "d"),
        probs=(0.5, 0.25, 0.125, 0.125),
        satisfaction={"m": frozenset({"a", "b"})},
    )
    assert logical_probability(model, "m") == pytest.approx(0.75, abs=1e-12)


def test_unknown_message_rejected():
    with pytest.raises(KeyError):
        logical_probability(uniform_model(["w0"]), "nope")


def test_unnormalized_model_rejected():
    with pytest.raises(ValueError):
        WorldModel(("a", "b"), (0.6, 0.6), {"m": frozenset({"a"})})
    with pytest.raises(ValueError):
        WorldModel(("a", "b"), (-0.2, 1.2), {"m": frozenset({"a"})})


def test_satisfaction_must_reference_known_worlds():
    with pytest.raises(ValueError):
        WorldModel(("a",), (1.0,), {"m": frozenset({"ghost"})})


def test_monotone_under_satisfaction_inclusion(rng):
    for _ in range(50):
        probs = rng.dirichlet(np.ones(4))
        worlds = ("a", "b", "c", "d")
        small = set(rng.choice(worlds, size=rng.integers(0, 4), replace=False))
        big = small | set(rng.choice(worlds, size=rng.integers(0, 4), replace=False))
        model = WorldModel(
            worlds, tuple(probs), {"s": frozenset(small), "b": frozenset(big)}
        )
        assert logical_probability(model, "b") >= logical_probability(model, "s") - 1e-12


# ---------------------------------------------------------- semantic entropy


def test_entropy_examples():
    assert semantic_entropy(uniform_model(["w0", "w1", "w2", "w3"]), "m") == 0.0
    assert semantic_entropy(uniform_model(["w1"]), "m") == pytest.approx(2.0, abs=1e-12)
    model = WorldModel(
        worlds=("a", "b", "c", "d"),
        probs=(0.5, 0.25, 0.125, 0.125),
        satisfaction={"m": frozenset({"a", "b"})},
    )
    # frozen from -log2(0.75)
    assert semantic_entropy(model, "m") == pytest.approx(0.4150374992788438, abs=1e-6)


def test_contradiction_is_an_error_not_infinity():
    model = uniform_model([])
    with pytest.raises(ContradictoryMessageError, match="contradictory"):
        semantic_entropy(model, "m")


def test_entropy_antitone_in_probability(rng):
    for _ in range(50):
        probs = tuple(rng.dirichlet(np.ones(4)))
        model = WorldModel(
            ("a", "b", "c", "d"),
            probs,
            {"one": frozenset({"a"}), "two": frozenset({"a", "b"})},
        )
        lp1 = logical_probability(model, "one")
        lp2 = logical_probability(model, "two")
        if lp1 > 0 and lp2 > lp1:
            assert semantic_entropy(model, "two") < semantic_entropy(model, "one")


# --------------------------------------------------------- capacity objective


def _identity(n):
    return np.eye(n).tolist()


def test_lossless_pipeline_reaches_source_entropy():
    joint = DiscreteJoint([0.5, 0.5], _identity(2), _identity(2), [0.0, 0.0])
    assert capacity_objective(joint) == pytest.approx(1.0, abs=1e-12)


def test_fully_noisy_delivery_leaves_only_coding_penalty():
    pzx = [[0.7, 0.3], [0.4, 0.6]]
    noisy = [[0.5, 0.5], [0.5, 0.5]]
    joint = DiscreteJoint([0.5, 0.5], pzx, noisy, [0.0, 0.0])
    hzx = enum_objective([0.5, 0.5], pzx, _identity(2), [0.0, 0.0])
    # with I = 0 the objective is exactly -H(Z|X)
    expected = -(
        -0.5 * (0.7 * math.log2(0.7) + 0.3 * math.log2(0.3))
        - 0.5 * (0.4 * math.log2(0.4) + 0.6 * math.log2(0.6))
    )
    assert capacity_objective(joint) == pytest.approx(expected, abs=1e-12)


def test_binary_symmetric_coding_matches_triple_sum():
    px = [0.5, 0.5]
    pzx = [[0.9, 0.1], [0.1, 0.9]]
    joint = DiscreteJoint(px, pzx, _identity(2), [0.0, 0.0])
    # frozen from the enumeration oracle
    assert capacity_objective(joint) == pytest.approx(0.06200881282143772, abs=1e-9)
    assert capacity_objective(joint) == pytest.approx(
        enum_objective(px, pzx, _identity(2), [0.0, 0.0]), abs=1e-9
    )


def test_objective_matches_oracle_on_random_alphabets(rng):
    for _ in range(200):
        nx, nz, nxh = rng.integers(2, 4, size=3)
        px = rng.dirichlet(np.ones(nx))
        pzx = rng.dirichlet(np.ones(nz), size=nx)
        pxhz = rng.dirichlet(np.ones(nxh), size=nz)
        hse = rng.uniform(0, 3, size=nxh)
        joint = DiscreteJoint(px, pzx, pxhz, hse)
        expected = enum_objective(px.tolist(), pzx.tolist(), pxhz.tolist(), hse.tolist())
        assert capacity_objective(joint) == pytest.approx(expected, abs=1e-9)


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        DiscreteJoint([0.5, 0.5], _identity(3), _identity(2), [0.0, 0.0])


# -------------------------------------------------------------- capacity sup


def test_sup_noiseless_binary_attains_one_bit():
    value, coding = capacity_sup([0.5, 0.5], _identity(2), [0.0, 0.0], grid_steps=11)
    assert value == pytest.approx(1.0, abs=1e-12)
    assert sorted(np.abs(coding).max(axis=1)) == [1.0, 1.0]


def test_sup_constant_semantic_entropy_is_an_offset():
    value, _ = capacity_sup([0.5, 0.5], _identity(2), [1.0, 1.0], grid_steps=11)
    assert value == pytest.approx(2.0, abs=1e-12)


def test_sup_noisy_delivery_beats_identity_and_cross_checks():
    flip = 0.11
    pxhz = [[1 - flip, flip], [flip, 1 - flip]]
    identity_value = capacity_objective(
        DiscreteJoint([0.5, 0.5], _identity(2), pxhz, [0.0, 0.0])
    )
    v21, _ = capacity_sup([0.5, 0.5], pxhz, [0.0, 0.0], grid_steps=21)
    v51, _ = capacity_sup([0.5, 0.5], pxhz, [0.0, 0.0], grid_steps=51)
    assert v21 >= identity_value - 1e-12
    assert abs(v51 - v21) <= 1.0 / 20  # coarse-grid resolution bound


def test_sup_monotone_on_nested_grids():
    pxhz = [[0.85, 0.15], [0.2, 0.8]]
    values = [
        capacity_sup([0.3, 0.7], pxhz, [0.5, 0.25], grid_steps=g)[0]
        for g in (11, 21, 41)  # nested: each grid refines the previous
    ]
    assert values[0] <= values[1] + 1e-12
    assert values[1] <= values[2] + 1e-12


def test_sup_guards_combinatorics():
    with pytest.raises(ValueError):
        capacity_sup([0.2] * 5, np.eye(5), np.zeros(5), grid_steps=11)
    with pytest.raises(ValueError):
        capacity_sup([0.25] * 4, np.eye(4), np.zeros(4), grid_steps=101)


# ------------------------------------------------------- hypothesis classifier


def test_hypothesis_examples():
    assert hypothesis_classifier(2.0, 1.0) is Hypothesis.SEMANTIC_AMBIGUITY
    assert hypothesis_classifier(1.0, 2.0) is Hypothesis.DECODER_OVERCOMES
    assert hypothesis_classifier(1.0, 1.0) is Hypothesis.DECODER_OVERCOMES


def test_hypothesis_rejects_negative_entropy():
    with pytest.raises(ValueError):
        hypothesis_classifier(-0.1, 1.0)


# ------------------------------------------------------------- file loading


def test_world_model_file_round_trip(tmp_path):
    doc = """\
worlds:
  - {id: sunny, prob: 0.5}
  - {id: cloudy, prob: 0.3}
  - {id: rainy, prob: 0.2}
messages:
  wet: [rainy]
  sky_visible: [sunny, cloudy]
"""
    path = tmp_path / "wm.yaml"
    path.write_text(doc)
    model = load_world_model(path)
    assert logical_probability(model, "wet") == pytest.approx(0.2)
    assert logical_probability(model, "sky_visible") == pytest.approx(0.8)


def test_world_model_file_rejects_unknown_keys(tmp_path):
    path = tmp_path / "wm.yaml"
    path.write_text("worlds: []\nmessages: {}\nbogus: 1\n")
    with pytest.raises(ValueError, match="bogus"):
        load_world_model(path)
