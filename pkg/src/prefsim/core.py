"""Domain primitives: feature spaces, cases, comparisons, and seeded random streams.

A case is a plain float vector of length ``d``; a comparison is an ordered
pair of cases drawn from one space.  All randomness flows through
:class:`RandomSource`, which derives an independent generator from a
``(seed, label)`` pair so that adding a new consumer of randomness never
perturbs existing streams.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

Case = np.ndarray
"""A case is a 1-D float vector of length ``FeatureSpace.d``."""

INTEGER_KIND = "integer-range"
BINARY_KIND = "binary"

# Rejection-sampling budget for candidate pools, per requested comparison.
POOL_ATTEMPT_FACTOR = 100


class DegenerateSpaceError(ValueError):
    """Raised when a space cannot yield the requested distinct comparisons."""


def _stream_entropy(seed: int, label: str) -> tuple[int, int]:
    digest = hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest()
    return int(seed) & 0xFFFFFFFFFFFFFFFF, int.from_bytes(digest, "big")


class RandomSource:
    """A deterministic random stream identified by ``(seed, label)``.

    Two sources constructed with the same seed and label produce identical
    value sequences; distinct labels give independent-appearing streams.
    Each source owns its generator state and must not be shared across
    workers.
    """

    def __init__(self, seed: int, label: str):
        self.seed = int(seed)
        self.label = label
        self.gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(_stream_entropy(seed, label)))
        )

    def spawn(self, sublabel: str) -> "RandomSource":
        """Derive an independent child stream labelled ``label/sublabel``."""
        return RandomSource(self.seed, f"{self.label}/{sublabel}")

    def __repr__(self) -> str:  # pragma: no cover
        return f"RandomSource(seed={self.seed}, label={self.label!r})"


@dataclass(frozen=True)
class FeatureSpace:
    """The query domain: ``d`` features, each integer-valued in a range or binary.

    The default space matches the usual simulation setup: integer features
    ranging over ``{1, ..., 10}``.  Values are represented as floats so that
    downstream linear algebra is uniform across space kinds.
    """

    d: int
    kind: str = INTEGER_KIND
    lo: int = 1
    hi: int = 10

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.kind == INTEGER_KIND:
            if self.lo >= self.hi:
                raise ValueError(f"integer range needs lo < hi, got [{self.lo}, {self.hi}]")
        elif self.kind != BINARY_KIND:
            raise ValueError(f"unknown space kind: {self.kind!r}")

    @property
    def value_lo(self) -> float:
        return 0.0 if self.kind == BINARY_KIND else float(self.lo)

    @property
    def value_hi(self) -> float:
        return 1.0 if self.kind == BINARY_KIND else float(self.hi)

    def contains(self, case: Case) -> bool:
        arr = np.asarray(case, dtype=float)
        if arr.shape != (self.d,):
            return False
        in_range = (arr >= self.value_lo) & (arr <= self.value_hi)
        return bool(in_range.all() and (arr == np.round(arr)).all())

    def token(self) -> str:
        """Canonical text form, used in CSV columns and config files."""
        if self.kind == BINARY_KIND:
            return "binary"
        return f"integer-range({self.lo},{self.hi})"

    @staticmethod
    def from_token(token: str, d: int) -> "FeatureSpace":
        token = token.strip()
        if token == "binary":
            return FeatureSpace(d=d, kind=BINARY_KIND)
        if token.startswith("integer-range(") and token.endswith(")"):
            lo, hi = token[len("integer-range(") : -1].split(",")
            return FeatureSpace(d=d, kind=INTEGER_KIND, lo=int(lo), hi=int(hi))
        raise ValueError(f"unknown feature-space token: {token!r}")

    def sample_values(self, rng: RandomSource, shape) -> np.ndarray:
        """Uniform i.i.d. feature values of the given shape, as floats."""
        if self.kind == BINARY_KIND:
            return rng.gen.integers(0, 2, size=shape).astype(float)
        return rng.gen.integers(self.lo, self.hi + 1, size=shape).astype(float)


@dataclass(frozen=True, eq=False)
class Comparison:
    """An ordered pair of cases presented as a single query."""

    left: Case
    right: Case

    @property
    def diff(self) -> np.ndarray:
        return self.left - self.right

    def equals(self, other: "Comparison") -> bool:
        return np.array_equal(self.left, other.left) and np.array_equal(
            self.right, other.right
        )


@dataclass(frozen=True, eq=False)
class LabeledComparison:
    """A comparison together with the agent's response and its timestep."""

    comparison: Comparison
    response: int
    timestep: int

    def __post_init__(self):
        if self.response not in (0, 1):
            raise ValueError(f"response must be 0 or 1, got {self.response}")
        if self.timestep < 1:
            raise ValueError(f"timestep must be >= 1, got {self.timestep}")


class ComparisonPool:
    """An array-backed sequence of comparisons with no zero feature differences.

    Stores all left/right cases as ``(m, d)`` matrices so samplers can score
    candidates with vectorised linear algebra; indexing yields individual
    :class:`Comparison` values.
    """

    def __init__(self, lefts: np.ndarray, rights: np.ndarray):
        self.lefts = lefts
        self.rights = rights
        self.diffs = lefts - rights

    def __len__(self) -> int:
        return self.lefts.shape[0]

    def __getitem__(self, i: int) -> Comparison:
        return Comparison(self.lefts[i], self.rights[i])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]


def sample_case(space: FeatureSpace, rng: RandomSource) -> Case:
    """Draw one case uniformly from the space."""
    return space.sample_values(rng, space.d)


def feature_diff(c: Comparison) -> np.ndarray:
    """Componentwise ``left - right``; the learner's input representation."""
    left = np.asarray(c.left, dtype=float)
    right = np.asarray(c.right, dtype=float)
    if left.shape != right.shape:
        raise ValueError(f"mismatched case lengths: {left.shape} vs {right.shape}")
    return left - right


def sample_candidate_pool(space: FeatureSpace, m: int, rng: RandomSource) -> ComparisonPool:
    """Sample ``m`` comparisons with distinct cases, in generation order.

    Pairs whose cases coincide componentwise carry no information and are
    rejected and resampled, up to ``100 * m`` total attempts.
    """
    if m < 1:
        raise ValueError(f"pool size must be >= 1, got {m}")
    max_attempts = POOL_ATTEMPT_FACTOR * m
    lefts = np.empty((m, space.d))
    rights = np.empty((m, space.d))
    filled = 0
    attempts = 0
    while filled < m:
        want = m - filled
        budget = max_attempts - attempts
        if budget <= 0:
            raise DegenerateSpaceError(
                f"could not sample {m} distinct-case comparisons from {space.token()} "
                f"within {max_attempts} attempts"
            )
        batch = min(want, budget)
        draw = space.sample_values(rng, (batch, 2, space.d))
        attempts += batch
        keep = ~np.all(draw[:, 0, :] == draw[:, 1, :], axis=1)
        kept = int(keep.sum())
        lefts[filled : filled + kept] = draw[keep, 0, :]
        rights[filled : filled + kept] = draw[keep, 1, :]
        filled += kept
    return ComparisonPool(lefts, rights)
