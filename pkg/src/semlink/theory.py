"""Information measures over finite, enumerable world models.

A world model is a finite set of possible worlds with a probability mass
on each, plus a map from message identifiers to the subset of worlds that
satisfy them.  All entropies are in bits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import numpy as np
import yaml

PROB_TOL = 1e-9

# Guards for the brute-force maximization: alphabets stay desk-scale and the
# number of candidate conditionals stays enumerable.
MAX_ALPHABET = 4
MAX_GRID_COMBINATIONS = 2_000_000


class ContradictoryMessageError(ValueError):
    """Raised for messages with zero logical probability."""


@dataclass(frozen=True)
class WorldModel:
    worlds: tuple[str, ...]
    probs: tuple[float, ...]
    satisfaction: Mapping[str, frozenset[str]]

    def __post_init__(self) -> None:
        if len(self.worlds) != len(self.probs):
            raise ValueError("one probability per world is required")
        if len(set(self.worlds)) != len(self.worlds):
            raise ValueError("world identifiers must be unique")
        if any(p < 0 for p in self.probs):
            raise ValueError("world probabilities must be non-negative")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"world probabilities sum to {total}, expected 1")
        known = set(self.worlds)
        for msg, sat in self.satisfaction.items():
            extra = set(sat) - known
            if extra:
                raise ValueError(
                    f"message {msg!r} is satisfied by unknown worlds {sorted(extra)}"
                )

    def prob_of(self, world: str) -> float:
        return self.probs[self.worlds.index(world)]


@dataclass(frozen=True)
class MessageId:
    id: str


def _message_key(msg) -> str:
    return msg.id if isinstance(msg, MessageId) else str(msg)


def logical_probability(model: WorldModel, msg) -> float:
    """Total probability mass of the worlds consistent with the message."""
    key = _message_key(msg)
    if key not in model.satisfaction:
        raise KeyError(f"unknown message id {key!r}")
    sat = model.satisfaction[key]
    index = {w: p for w, p in zip(model.worlds, model.probs)}
    return math.fsum(index[w] for w in sat)


def semantic_entropy(model: WorldModel, msg) -> float:
    """Semantic surprise of a message: -log2 of its logical probability."""
    lp = logical_probability(model, msg)
    if lp <= 0.0:
        raise ContradictoryMessageError(
            f"contradictory message {_message_key(msg)!r}: logical probability is 0"
        )
    return -math.log2(lp)


@dataclass(frozen=True)
class DiscreteJoint:
    """Distributions describing a source -> features -> reconstruction chain.

    ``px`` is the source distribution, ``p_z_given_x`` the semantic coding
    conditional, ``p_xhat_given_z`` the end-to-end channel-plus-decoding
    conditional, and ``semantic_entropy_of_xhat`` a per-symbol table of
    semantic entropies for the reconstructed alphabet.
    """

    px: np.ndarray
    p_z_given_x: np.ndarray
    p_xhat_given_z: np.ndarray
    semantic_entropy_of_xhat: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "px", np.asarray(self.px, dtype=float))
        object.__setattr__(
            self, "p_z_given_x", np.asarray(self.p_z_given_x, dtype=float)
        )
        object.__setattr__(
            self, "p_xhat_given_z", np.asarray(self.p_xhat_given_z, dtype=float)
        )
        object.__setattr__(
            self,
            "semantic_entropy_of_xhat",
            np.asarray(self.semantic_entropy_of_xhat, dtype=float),
        )
        if self.px.ndim != 1 or self.p_z_given_x.ndim != 2 or self.p_xhat_given_z.ndim != 2:
            raise ValueError("px must be 1-D and the conditionals 2-D")
        nx, nz = self.p_z_given_x.shape
        nz2, nxh = self.p_xhat_given_z.shape
        if self.px.shape[0] != nx:
            raise ValueError("px length does not match rows of p(z|x)")
        if nz != nz2:
            raise ValueError("columns of p(z|x) do not match rows of p(xhat|z)")
        if self.semantic_entropy_of_xhat.shape != (nxh,):
            raise ValueError("semantic entropy table must cover the xhat alphabet")
        for name, dist in (("px", self.px[None, :]),
                           ("p_z_given_x", self.p_z_given_x),
                           ("p_xhat_given_z", self.p_xhat_given_z)):
            if np.any(dist < -PROB_TOL):
                raise ValueError(f"{name} has negative entries")
            rows = dist.sum(axis=1)
            if np.any(np.abs(rows - 1.0) > PROB_TOL):
                raise ValueError(f"{name} rows must each sum to 1")


def _xlog2x_ratio(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """p * log2(p / q), with 0 * log(0/q) taken as 0."""
    out = np.zeros_like(p)
    mask = p > 0
    out[mask] = p[mask] * np.log2(p[mask] / q[mask])
    return out


def capacity_objective(joint: DiscreteJoint) -> float:
    """I(X; Xhat) - H(Z|X) + E[H_se(Xhat)] for fixed distributions.

    The reconstruction marginal is induced by the Markov chain
    X -> Z -> Xhat, and the expectation of the per-symbol semantic entropy
    table is taken under that induced marginal.
    """
    px = joint.px
    joint_xz = px[:, None] * joint.p_z_given_x        # p(x, z)
    joint_xxh = joint_xz @ joint.p_xhat_given_z       # p(x, xhat)
    p_xhat = joint_xxh.sum(axis=0)

    denom = np.outer(px, p_xhat)
    # Cells with p(x, xhat) > 0 always have positive marginals; clamp the
    # rest so the masked ratio never divides by zero.
    safe = np.where(denom > 0, denom, 1.0)
    mutual_information = float(_xlog2x_ratio(joint_xxh, safe).sum())

    pz = np.where(joint.p_z_given_x > 0, joint.p_z_given_x, 1.0)
    cond_entropy_zx = float(-(joint_xz * np.log2(pz)).sum())

    expected_hse = float(p_xhat @ joint.semantic_entropy_of_xhat)
    return mutual_information - cond_entropy_zx + expected_hse


def _simplex_grid(dim: int, grid_steps: int) -> np.ndarray:
    """All probability vectors of the given dimension on a uniform grid."""
    levels = grid_steps - 1
    rows = []
    for combo in itertools.combinations_with_replacement(range(dim), levels):
        counts = np.bincount(combo, minlength=dim)
        rows.append(counts / levels)
    return np.array(rows)


def capacity_sup(
    px,
    p_xhat_given_z,
    h_se,
    grid_steps: int,
) -> tuple[float, np.ndarray]:
    """Brute-force maximization of the capacity objective over p(Z|X).

    Each row of the coding conditional is discretized on a simplex grid
    with ``grid_steps`` levels per coordinate.  Returns the best value
    found and the conditional that achieves it.
    """
    px = np.asarray(px, dtype=float)
    p_xhat_given_z = np.asarray(p_xhat_given_z, dtype=float)
    h_se = np.asarray(h_se, dtype=float)
    if grid_steps < 2:
        raise ValueError("grid_steps must be at least 2")
    nx = px.shape[0]
    nz, nxh = p_xhat_given_z.shape
    if max(nx, nz, nxh) > MAX_ALPHABET:
        raise ValueError(
            f"alphabets larger than {MAX_ALPHABET} symbols are not supported"
        )
    rows = _simplex_grid(nz, grid_steps)
    n_combos = len(rows) ** nx
    if n_combos > MAX_GRID_COMBINATIONS:
        raise ValueError(
            f"grid search would evaluate {n_combos} conditionals "
            f"(limit {MAX_GRID_COMBINATIONS}); reduce grid_steps or alphabets"
        )

    best_value = -math.inf
    best_coding = None
    for choice in itertools.product(range(len(rows)), repeat=nx):
        coding = rows[list(choice)]
        value = capacity_objective(
            DiscreteJoint(px, coding, p_xhat_given_z, h_se)
        )
        if value > best_value:
            best_value = value
            best_coding = coding
    return best_value, np.array(best_coding)


class Hypothesis(Enum):
    DECODER_OVERCOMES = "decoder_overcomes"
    SEMANTIC_AMBIGUITY = "semantic_ambiguity"


def hypothesis_classifier(h_z_given_x: float, h_se_xhat: float) -> Hypothesis:
    """Classify whether receiver-side semantic entropy covers the coding noise.

    Ties go to the decoder: ambiguity requires the coding noise to strictly
    exceed the receiver's semantic entropy.
    """
    if h_z_given_x < 0 or h_se_xhat < 0:
        raise ValueError("entropies must be non-negative")
    if h_z_given_x > h_se_xhat:
        return Hypothesis.SEMANTIC_AMBIGUITY
    return Hypothesis.DECODER_OVERCOMES


def load_world_model(path) -> WorldModel:
    """Load a world model from its YAML declaration file.

    Schema::

        worlds:
          - {id: sunny, prob: 0.5}
          - {id: rainy, prob: 0.5}
        messages:
          wet: [rainy]

    Unknown keys are rejected.
    """
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ValueError(f"malformed YAML in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValueError("world model file must hold a mapping")
    extra = set(doc) - {"worlds", "messages"}
    if extra:
        raise ValueError(f"unknown top-level keys in world model file: {sorted(extra)}")
    if "worlds" not in doc or "messages" not in doc:
        raise ValueError("world model file needs 'worlds' and 'messages'")

    worlds: list[str] = []
    probs: list[float] = []
    for entry in doc["worlds"]:
        if not isinstance(entry, dict) or set(entry) != {"id", "prob"}:
            raise ValueError(f"world entries must be {{id, prob}}, got {entry!r}")
        worlds.append(str(entry["id"]))
        probs.append(float(entry["prob"]))

    messages = doc["messages"]
    if not isinstance(messages, dict):
        raise ValueError("'messages' must map message ids to world lists")
    satisfaction = {
        str(msg): frozenset(str(w) for w in sat) for msg, sat in messages.items()
    }
    return WorldModel(tuple(worlds), tuple(probs), satisfaction)
