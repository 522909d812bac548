"""Greedy prototype selection maximizing kernel representativeness.

Maximizes l(w) = w'mu - 0.5 w'Kw over nonnegative weights with a budget
on the support size: each step adds the candidate with the largest
positive objective gradient, then re-solves the weights over the
selected support by projected gradient descent.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InputError


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    bandwidth: float | None = None  # None -> median pairwise distance

    def to_dict(self) -> dict:
        return {"kind": self.kind, "bandwidth": self.bandwidth}

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        return cls(**d)


@dataclass
class PrototypeSet:
    indices: list[int]
    weights: np.ndarray
    objective_trace: list[float]
    kernel_spec: KernelSpec

    def __post_init__(self):
        if len(self.indices) != len(set(self.indices)):
            raise InputError("prototype indices must be distinct")
        if np.any(self.weights < 0):
            raise InputError("prototype weights must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "indices": [int(i) for i in self.indices],
            "weights": [float(w) for w in self.weights],
            "objective_trace": [float(v) for v in self.objective_trace],
            "kernel_spec": self.kernel_spec.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PrototypeSet":
        return cls(
            indices=list(d["indices"]),
            weights=np.array(d["weights"], dtype=np.float64),
            objective_trace=list(d["objective_trace"]),
            kernel_spec=KernelSpec.from_dict(d["kernel_spec"]),
        )


def median_bandwidth(rows: np.ndarray) -> float:
    """Median pairwise Euclidean distance; 1.0 when all rows coincide."""
    n = len(rows)
    if n < 2:
        return 1.0
    sq = np.sum(rows**2, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * rows @ rows.T, 0.0)
    upper = d2[np.triu_indices(n, k=1)]
    med = float(np.median(np.sqrt(upper)))
    return med if med > 0 else 1.0


def rbf_kernel(a: np.ndarray, b: np.ndarray, bandwidth: float) -> np.ndarray:
    sq_a = np.sum(a**2, axis=1)
    sq_b = np.sum(b**2, axis=1)
    d2 = np.maximum(sq_a[:, None] + sq_b[None, :] - 2.0 * a @ b.T, 0.0)
    return np.exp(-d2 / (2.0 * bandwidth**2))


def _solve_nonneg_weights(
    k_sub: np.ndarray, mu_sub: np.ndarray, w0: np.ndarray, tol: float = 1e-8
) -> np.ndarray:
    """min 0.5 w'Kw - mu'w over w >= 0 by projected gradient."""
    eigmax = float(np.linalg.eigvalsh(k_sub)[-1])
    step = 1.0 / max(eigmax, 1e-12)
    w = np.maximum(w0, 0.0)
    for _ in range(10000):
        grad = k_sub @ w - mu_sub
        w_new = np.maximum(w - step * grad, 0.0)
        if np.max(np.abs(w_new - w)) < tol:
            w = w_new
            break
        w = w_new
    return w


def objective(w: np.ndarray, k_sub: np.ndarray, mu_sub: np.ndarray) -> float:
    return float(mu_sub @ w - 0.5 * w @ k_sub @ w)


def protodash(
    candidates: np.ndarray,
    target: np.ndarray,
    k: int,
    kernel_spec: KernelSpec | None = None,
) -> PrototypeSet:
    candidates = np.asarray(candidates, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if candidates.ndim != 2 or target.ndim != 2 or len(candidates) == 0 or len(target) == 0:
        raise InputError("candidates and target must be non-empty 2-D row sets")
    if candidates.shape[1] != target.shape[1]:
        raise InputError("candidates and target must have equal width")
    if k > len(candidates):
        raise InputError(f"k={k} exceeds the {len(candidates)} candidates")

    spec = kernel_spec or KernelSpec()
    if spec.kind != "rbf":
        raise InputError(f"unsupported kernel kind {spec.kind!r}")
    bandwidth = spec.bandwidth
    if bandwidth is None:
        bandwidth = median_bandwidth(np.vstack([candidates, target]))
        spec = KernelSpec(kind="rbf", bandwidth=bandwidth)

    gram = rbf_kernel(candidates, candidates, bandwidth)
    mu = rbf_kernel(target, candidates, bandwidth).mean(axis=0)

    selected: list[int] = []
    weights = np.zeros(0, dtype=np.float64)
    trace: list[float] = []

    for _ in range(k):
        grad_full = mu.copy()
        if selected:
            grad_full = mu - gram[:, selected] @ weights
        grad_full[selected] = -np.inf
        best = int(np.argmax(grad_full))
        if grad_full[best] <= 0:
            break
        selected.append(best)
        k_sub = gram[np.ix_(selected, selected)]
        mu_sub = mu[selected]
        w0 = np.append(weights, 0.0)
        weights = _solve_nonneg_weights(k_sub, mu_sub, w0)
        trace.append(objective(weights, k_sub, mu_sub))

    return PrototypeSet(
        indices=selected,
        weights=weights,
        objective_trace=trace,
        kernel_spec=spec,
    )


def kkt_residual(proto: PrototypeSet, candidates: np.ndarray, target: np.ndarray) -> float:
    """Stationarity residual of the solved weights over their support."""
    bandwidth = proto.kernel_spec.bandwidth
    k_sub = rbf_kernel(candidates[proto.indices], candidates[proto.indices], bandwidth)
    mu_sub = rbf_kernel(target, candidates[proto.indices], bandwidth).mean(axis=0)
    grad = k_sub @ proto.weights - mu_sub
    active = proto.weights > 0
    residual = 0.0
    if np.any(active):
        residual = float(np.max(np.abs(grad[active])))
    if np.any(~active):
        residual = max(residual, float(np.max(-np.minimum(grad[~active], 0.0))))
    return residual
