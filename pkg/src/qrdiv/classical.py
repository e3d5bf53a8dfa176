"""Classical relative entropy, Renyi divergences, and the multi-variate
Q_P for finitely supported signed weights.

Divergence values are floats; +inf encodes the support-violation cases.
Classical vectors are treated as exact data: an entry is in the support
iff it is > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbiguousDefinition,
    BadParameter,
    DisjointSupports,
    LengthMismatch,
)

INF = float("inf")

PROBABILITY = "probability"
ONE_POSITIVE_SIGNED = "one_positive_signed"
OTHER = "other"


def classify_weights(weights) -> str:
    """Signed-measure class of weights summing to 1.

    probability: all weights >= 0. one_positive_signed: exactly one positive
    weight, the rest <= 0. other: anything else.
    """
    w = np.asarray(weights, dtype=float)
    if abs(w.sum() - 1.0) > 1e-12:
        raise BadParameter(f"weights sum to {w.sum()!r}, expected 1")
    if np.all(w >= 0.0):
        return PROBABILITY
    if np.sum(w > 0.0) == 1:
        return ONE_POSITIVE_SIGNED
    return OTHER


@dataclass(frozen=True)
class WeightMeasure:
    """Finitely supported signed measure on labels, summing to 1."""

    labels: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.labels) != len(self.weights):
            raise LengthMismatch("labels and weights differ in length")
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        classify_weights(self.weights)  # validates the sum

    @property
    def kind_class(self) -> str:
        return classify_weights(self.weights)


@dataclass(frozen=True)
class WeightedFamily:
    """Weight measure P plus one nonnegative vector w_x per label."""

    labels: tuple
    weights: tuple
    values: np.ndarray  # len(labels) x |I|, entrywise >= 0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != len(self.labels):
            raise LengthMismatch("values must be one row per label")
        if np.any(vals < 0.0):
            raise BadParameter("values must be entrywise nonnegative")
        if len(self.weights) != len(self.labels):
            raise LengthMismatch("labels and weights differ in length")
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "values", vals)
        classify_weights(self.weights)

    @property
    def kind_class(self) -> str:
        return classify_weights(self.weights)


def _check_pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape or p.ndim != 1:
        raise LengthMismatch(f"shapes {p.shape} vs {q.shape}")
    if np.any(p < 0) or np.any(q < 0):
        raise BadParameter("entries must be nonnegative")
    return p, q


def classical_rel_entropy(p, q) -> float:
    """Kullback-Leibler divergence sum p (log p - log q); +inf unless
    supp p is contained in supp q. D(0||q) = 0 and D(p||0) = +inf."""
    p, q = _check_pair(p, q)
    if p.sum() == 0.0:
        return 0.0
    if q.sum() == 0.0:
        return INF
    sp = p > 0
    if np.any(q[sp] == 0.0):
        return INF
    return float(np.sum(p[sp] * (np.log(p[sp]) - np.log(q[sp]))))


def classical_q_alpha(alpha: float, p, q) -> float:
    """Q_alpha = sum p^alpha q^(1-alpha) with the standard zero conventions;
    +inf for alpha > 1 when supp p is not inside supp q."""
    p, q = _check_pair(p, q)
    if alpha <= 0 or alpha == 1:
        raise BadParameter("classical_q_alpha needs alpha in (0,1) or (1,inf)")
    both = (p > 0) & (q > 0)
    if alpha > 1 and np.any((p > 0) & (q == 0.0)):
        return INF
    return float(np.sum(p[both] ** alpha * q[both] ** (1.0 - alpha)))


def classical_renyi(alpha, p, q) -> float:
    """Renyi alpha-divergence for alpha in [0, inf]; alpha = 1 is the
    relative entropy normalized by sum p."""
    p, q = _check_pair(p, q)
    if not (alpha == INF or alpha >= 0):
        raise BadParameter(f"alpha {alpha} out of range")
    if p.sum() == 0.0:
        raise BadParameter("first argument must be nonzero")
    if q.sum() == 0.0:
        return INF
    if alpha == 1:
        return classical_rel_entropy(p, q) / float(p.sum())
    if alpha == INF:
        sp = p > 0
        if np.any(q[sp] == 0.0):
            return INF
        return float(np.log(np.max(p[sp] / q[sp])))
    if alpha == 0:
        q0 = float(np.sum(q[p > 0]))
        if q0 == 0.0:
            return INF
        return float(-np.log(q0) + np.log(p.sum()))
    qa = classical_q_alpha(alpha, p, q)
    if qa == INF:
        return INF
    if qa == 0.0:
        return INF
    return (math.log(qa) - math.log(p.sum())) / (alpha - 1.0)


def multivariate_q(family: WeightedFamily) -> float:
    """Multi-variate Renyi Q_P(w): per-index weighted geometric products with
    the 0 / 1 / +inf gate on the zero pattern.

    Defined only when the two definitions (limit and variational) provably
    agree: equal supports on supp P, or P probability / one-positive-signed.
    """
    w = family.values
    pw = np.asarray(family.weights, dtype=float)
    active = pw != 0.0
    cls = family.kind_class
    supports = [frozenset(np.flatnonzero(w[x] > 0.0)) for x in range(w.shape[0])]
    act_supports = {supports[x] for x in np.flatnonzero(active)}
    if cls == OTHER and len(act_supports) > 1:
        raise AmbiguousDefinition(
            "signed weights outside the admissible classes with unequal supports"
        )
    total = 0.0
    for i in range(w.shape[1]):
        zero_mass = float(np.sum(pw[active & (w[:, i] == 0.0)]))
        if zero_mass > 0.0:
            continue
        pos = active & (w[:, i] > 0.0)
        prod = float(np.exp(np.sum(pw[pos] * np.log(w[pos, i]))))
        if zero_mass < 0.0:
            return INF
        total += prod
    return total


def hellinger_arc_point(alpha: float, p, q) -> np.ndarray:
    """Normalized p^alpha q^(1-alpha) on the common support (Hellinger arc)."""
    p, q = _check_pair(p, q)
    both = (p > 0) & (q > 0)
    if not np.any(both):
        raise DisjointSupports("no common support index")
    omega = np.zeros_like(p)
    omega[both] = p[both] ** alpha * q[both] ** (1.0 - alpha)
    return omega / omega.sum()
