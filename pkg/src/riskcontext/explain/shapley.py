"""Per-feature game-theoretic attributions against a reference input.

The coalition value v(S) is the model output with features in S taken
from the patient and all others from the reference vector. Exact
enumeration covers every coalition; the sampled variant averages
marginal contributions over random feature permutations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, InputError

EXACT_FEATURE_CAP = 20


@dataclass(frozen=True)
class Attribution:
    patient_id: str
    baseline_value: float
    phi: np.ndarray
    method: str  # "exact" | "sampled"
    feature_names: tuple[str, ...] = ()
    n_samples: int = 0
    seed: int | None = None
    standard_errors: np.ndarray | None = None

    def to_dict(self) -> dict:
        d = {
            "patient_id": self.patient_id,
            "baseline_value": self.baseline_value,
            "phi": [float(v) for v in self.phi],
            "method": self.method,
            "feature_names": list(self.feature_names),
        }
        if self.method == "sampled":
            d["n_samples"] = self.n_samples
            d["seed"] = self.seed
            d["standard_errors"] = [float(v) for v in self.standard_errors]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Attribution":
        return cls(
            patient_id=d["patient_id"],
            baseline_value=float(d["baseline_value"]),
            phi=np.array(d["phi"], dtype=np.float64),
            method=d["method"],
            feature_names=tuple(d.get("feature_names", ())),
            n_samples=int(d.get("n_samples", 0)),
            seed=d.get("seed"),
            standard_errors=(
                np.array(d["standard_errors"], dtype=np.float64)
                if d.get("standard_errors") is not None
                else None
            ),
        )


def _as_predict_fn(model):
    """Accept a RiskModel or any batch callable mapping (n, d) -> (n,)."""
    return model.predict_proba if hasattr(model, "predict_proba") else model


def _masked_inputs(masks: np.ndarray, x: np.ndarray, reference: np.ndarray) -> np.ndarray:
    return np.where(masks > 0, x[None, :], reference[None, :])


def shapley_exact(
    model,
    x,
    reference,
    feature_subset: list[int] | None = None,
    patient_id: str = "",
    feature_names: tuple[str, ...] = (),
    cap: int = EXACT_FEATURE_CAP,
) -> Attribution:
    """Exact attribution by enumerating all 2^k coalitions of the players.

    Features outside `feature_subset` stay at the patient's own values;
    phi for them is reported as 0.
    """
    predict = _as_predict_fn(model)
    x = np.asarray(x, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    if x.shape != reference.shape or x.ndim != 1:
        raise InputError("x and reference must be 1-D vectors of equal width")
    d = len(x)
    players = list(range(d)) if feature_subset is None else list(feature_subset)
    k = len(players)
    if k > cap:
        raise ConfigurationError(
            f"{k} features exceeds the exact-enumeration cap of {cap}; "
            "use shapley_sampled instead"
        )

    # Coalition c (bitmask over players) -> full-width inclusion mask.
    n_coalitions = 1 << k
    coalitions = np.arange(n_coalitions, dtype=np.int64)
    player_bits = ((coalitions[:, None] >> np.arange(k)) & 1).astype(np.float64)
    masks = np.ones((n_coalitions, d), dtype=np.float64)
    masks[:, players] = player_bits
    values = np.asarray(predict(_masked_inputs(masks, x, reference)), dtype=np.float64)

    sizes = player_bits.sum(axis=1).astype(np.int64)
    fact = [math.factorial(i) for i in range(k + 1)]
    # weight(|S|) = |S|! (k - |S| - 1)! / k! for coalitions S not containing i
    weight_by_size = np.array(
        [fact[s] * fact[k - s - 1] / fact[k] if s < k else 0.0 for s in range(k + 1)]
    )

    phi = np.zeros(d, dtype=np.float64)
    for bit, player in enumerate(players):
        without = (coalitions >> bit) & 1 == 0
        idx_without = coalitions[without]
        idx_with = idx_without | (1 << bit)
        w = weight_by_size[sizes[idx_without]]
        phi[player] = float(np.sum(w * (values[idx_with] - values[idx_without])))

    return Attribution(
        patient_id=patient_id,
        baseline_value=float(values[0]),
        phi=phi,
        method="exact",
        feature_names=tuple(feature_names),
    )


def shapley_sampled(
    model,
    x,
    reference,
    n_samples: int,
    seed: int,
    patient_id: str = "",
    feature_names: tuple[str, ...] = (),
    batch_size: int = 4096,
) -> Attribution:
    """Unbiased permutation-sampling estimate of the exact attribution.

    Each sample is one random feature permutation; marginal contributions
    accumulate per feature, with standard errors from the per-permutation
    spread.
    """
    if n_samples < 100:
        raise ConfigurationError("n_samples must be at least 100")
    predict = _as_predict_fn(model)
    x = np.asarray(x, dtype=np.float64)
    reference = np.asarray(reference, dtype=np.float64)
    if x.shape != reference.shape or x.ndim != 1:
        raise InputError("x and reference must be 1-D vectors of equal width")
    d = len(x)
    rng = np.random.default_rng(seed)

    baseline = float(np.asarray(predict(reference[None, :]))[0])
    sum_phi = np.zeros(d)
    sum_sq = np.zeros(d)

    for lo in range(0, n_samples, batch_size):
        n_batch = min(batch_size, n_samples - lo)
        perms = np.argsort(rng.random((n_batch, d)), axis=1)
        # Prefix masks: row p, step t has features perms[p, :t+1] switched on.
        masks = np.zeros((n_batch, d + 1, d), dtype=np.float64)
        rows = np.repeat(np.arange(n_batch), d)
        steps = np.tile(np.arange(d), n_batch)
        cum = masks[:, 1:, :]
        cum[rows, steps, perms.ravel()] = 1.0
        np.cumsum(cum, axis=1, out=cum)

        flat = masks.reshape(-1, d)
        values = np.asarray(predict(_masked_inputs(flat, x, reference)))
        values = values.reshape(n_batch, d + 1)
        marginals = np.diff(values, axis=1)  # (n_batch, d) in permutation order

        contrib = np.zeros((n_batch, d))
        np.put_along_axis(contrib, perms, marginals, axis=1)
        sum_phi += contrib.sum(axis=0)
        sum_sq += (contrib**2).sum(axis=0)

    phi = sum_phi / n_samples
    var = np.maximum(sum_sq / n_samples - phi**2, 0.0)
    se = np.sqrt(var / n_samples)

    return Attribution(
        patient_id=patient_id,
        baseline_value=baseline,
        phi=phi,
        method="sampled",
        feature_names=tuple(feature_names),
        n_samples=n_samples,
        seed=seed,
        standard_errors=se,
    )
