"""Seed-deterministic train/validation/test splitting."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SplitError

DEFAULT_FRACTIONS = (0.70, 0.10, 0.20)


@dataclass(frozen=True)
class Split:
    train: tuple[int, ...]
    validation: tuple[int, ...]
    test: tuple[int, ...]
    fractions: tuple[float, float, float]
    seed: int

    def to_dict(self) -> dict:
        return {
            "train": list(self.train),
            "validation": list(self.validation),
            "test": list(self.test),
            "fractions": list(self.fractions),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Split":
        return cls(
            train=tuple(d["train"]),
            validation=tuple(d["validation"]),
            test=tuple(d["test"]),
            fractions=tuple(d["fractions"]),
            seed=int(d["seed"]),
        )


def split_data(
    n_rows: int,
    fractions: tuple[float, float, float] = DEFAULT_FRACTIONS,
    seed: int = 0,
) -> Split:
    """Partition row indices; validation/test sizes are round(n*f), the
    remainder goes to train."""
    if any(f <= 0 for f in fractions):
        raise SplitError("all fractions must be positive")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise SplitError(f"fractions must sum to 1, got {sum(fractions)}")

    n_val = round(n_rows * fractions[1])
    n_test = round(n_rows * fractions[2])
    n_train = n_rows - n_val - n_test
    if min(n_train, n_val, n_test) < 1:
        raise SplitError(
            f"{n_rows} rows cannot give every split at least one row "
            f"at fractions {fractions}"
        )

    perm = np.random.default_rng(seed).permutation(n_rows)
    return Split(
        train=tuple(int(i) for i in perm[:n_train]),
        validation=tuple(int(i) for i in perm[n_train : n_train + n_val]),
        test=tuple(int(i) for i in perm[n_train + n_val :]),
        fractions=tuple(fractions),
        seed=seed,
    )
