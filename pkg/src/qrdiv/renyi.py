"""Reference two-variable Renyi divergences: the (alpha, z) family with its
log-Euclidean z = inf limit, maximal Renyi divergences via the optimal
reverse test and via geometric-mean traces, max-relative entropy, maximal
f-divergences, and the regularized-measured closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .classical import classical_renyi
from .errors import BadParameter, DimensionMismatch, InfiniteLimit
from .hermitian import (
    mpower,
    nlog_m,
    projection_meet,
    spectral_decompose,
    support_basis,
    support_cutoff,
    support_leq,
    support_projection,
)
from .relent import umegaki
from .supports import OpConvexFn, abs_cont_part, perspective

INF = float("inf")


def _check_shapes(rho, sigma):
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"shapes {rho.shape} vs {sigma.shape}")
    return rho, sigma


def renyi_alpha_z(alpha: float, z: float, rho: np.ndarray, sigma: np.ndarray) -> float:
    """Renyi (alpha, z)-divergence; z = inf gives the log-Euclidean family
    on the compression to the support meet."""
    rho, sigma = _check_shapes(rho, sigma)
    if not (z == INF or z > 0):
        raise BadParameter(f"z must be positive or inf, got {z}")
    if alpha < 0:
        raise BadParameter(f"alpha must be >= 0, got {alpha}")
    tr_rho = float(np.trace(rho).real)
    if tr_rho <= 0:
        raise BadParameter("first argument must be nonzero")
    if alpha == 1:
        u = umegaki(rho, sigma)
        return u / tr_rho if math.isfinite(u) else INF
    if alpha > 1 and not support_leq(rho, sigma):
        return INF
    if z == INF:
        p = projection_meet(support_projection(rho), support_projection(sigma))
        b = support_basis(p)
        if b.shape[1] == 0:
            q = 0.0
        else:
            lr = b.conj().T @ nlog_m(rho) @ b
            ls = b.conj().T @ nlog_m(sigma) @ b
            w, _ = spectral_decompose(alpha * lr + (1.0 - alpha) * ls)
            q = float(np.sum(np.exp(w)))
    else:
        a = mpower(rho, alpha / (2.0 * z))
        m = a @ mpower(sigma, (1.0 - alpha) / z) @ a
        w, _ = spectral_decompose(m)
        w = w[w > support_cutoff(w)]
        q = float(np.sum(w**z))
    if q <= 0.0:
        return INF
    return (math.log(q) - math.log(tr_rho)) / (alpha - 1.0)


def max_relative_entropy(rho: np.ndarray, sigma: np.ndarray) -> float:
    """D_inf: log of the smallest lambda with rho <= lambda sigma."""
    rho, sigma = _check_shapes(rho, sigma)
    if not support_leq(rho, sigma):
        return INF
    shi = mpower(sigma, -0.5)
    w, _ = spectral_decompose(shi @ rho @ shi)
    return float(np.log(max(w[0], 0.0))) if w[0] > 0 else -INF


# ---------------------------------------------------------------------------
# optimal reverse test and maximal Renyi divergences


@dataclass(frozen=True)
class ReverseTest:
    """Classical pair (p, q) plus the channel Gamma on basis indicators,
    satisfying Gamma(p) = rho and Gamma(q) = sigma."""

    p: np.ndarray
    q: np.ndarray
    gamma_map: list  # density matrix per index
    index_meta: list  # (eigenvalue, spectral projection) per index

    def apply(self, vec: np.ndarray) -> np.ndarray:
        out = np.zeros_like(self.gamma_map[0])
        for x, g in zip(vec, self.gamma_map):
            out = out + float(x) * g
        return out


def optimal_reverse_test(
    rho: np.ndarray, sigma: np.ndarray, tau0: np.ndarray | None = None
) -> ReverseTest:
    """Matsumoto's reverse test from the spectral decomposition of
    sigma^{-1/2} rho_ac sigma^{-1/2}; optimal for every maximal Renyi
    divergence with alpha in [0, 2] and at alpha = inf."""
    rho, sigma = _check_shapes(rho, sigma)
    d = rho.shape[0]
    if tau0 is None:
        tau0 = np.eye(d, dtype=complex) / d
    rho_ac = abs_cont_part(rho, sigma)
    shi = mpower(sigma, -0.5)
    sh = mpower(sigma, 0.5)
    m = shi @ rho_ac @ shi
    w, u = spectral_decompose(m)
    cut = support_cutoff(w)
    clusters = _cluster_indices(w)
    missing = float(np.trace(rho - rho_ac).real)
    sing = missing > 1e-12 * max(1.0, np.trace(rho).real)

    p, q, gammas, meta = [], [], [], []
    mass_cut = support_cutoff(np.array([np.trace(sigma).real]))
    for idx in clusters:
        lam = float(np.mean(w[idx]))
        lam = 0.0 if lam <= cut else lam  # zero clusters snap to exact zero
        e = u[:, idx] @ u[:, idx].conj().T
        mass = max(float(np.trace(sigma @ e).real), 0.0)
        p.append(lam * mass)
        q.append(mass)
        if mass > mass_cut:
            gammas.append(sh @ e @ sh / mass)
        else:
            gammas.append(tau0.copy())  # any state is admissible here
        meta.append((lam, e))
    p.append(missing if sing else 0.0)
    q.append(0.0)
    if sing:
        tail = (rho - rho_ac) / missing
    else:
        tail = tau0.copy()
    gammas.append(tail)
    meta.append((None, None))
    return ReverseTest(np.array(p), np.array(q), gammas, meta)


def _cluster_indices(w: np.ndarray) -> list[np.ndarray]:
    from .hermitian import eig_clusters

    return eig_clusters(w)


@dataclass(frozen=True)
class MaxRenyiValue:
    value: float
    upper_bound_only: bool = False


def max_renyi(alpha: float, rho: np.ndarray, sigma: np.ndarray) -> MaxRenyiValue:
    """Maximal Renyi alpha-divergence via the optimal reverse test.

    Exact for alpha in [0, 2] and alpha = inf; for alpha in (2, inf) the
    reverse test is not optimal and the value is flagged as an upper bound.
    """
    rho, sigma = _check_shapes(rho, sigma)
    if float(np.trace(rho).real) <= 0:
        raise BadParameter("first argument must be nonzero")
    if alpha == INF:
        return MaxRenyiValue(max_relative_entropy(rho, sigma))
    if alpha < 0:
        raise BadParameter(f"alpha must be >= 0, got {alpha}")
    rt = optimal_reverse_test(rho, sigma)
    val = classical_renyi(alpha, rt.p, rt.q)
    return MaxRenyiValue(val, upper_bound_only=alpha > 2)


def max_q_alpha_mean_route(alpha: float, rho: np.ndarray, sigma: np.ndarray) -> float:
    """Q_alpha^max as a geometric-mean trace: Tr sigma #_alpha rho for
    alpha in [0, 1], and Tr sigma (sigma^{-1/2} rho sigma^{-1/2})^alpha for
    alpha in (1, 2] on support-dominated pairs. Independent of the
    reverse-test route."""
    from .supports import kubo_ando_mean

    rho, sigma = _check_shapes(rho, sigma)
    if 0.0 <= alpha <= 1.0:
        return float(np.trace(kubo_ando_mean(alpha, rho, sigma)).real)
    if not 1.0 < alpha <= 2.0:
        raise BadParameter(f"mean route needs alpha in [0, 2], got {alpha}")
    if not support_leq(rho, sigma):
        return INF
    shi = mpower(sigma, -0.5)
    m = shi @ rho @ shi
    return float(np.trace(sigma @ mpower(m, alpha)).real)


def max_fdivergence(fn: OpConvexFn, rho: np.ndarray, sigma: np.ndarray) -> float:
    """Maximal f-divergence: trace of the perspective closed form, equal to
    the classical f-divergence of the optimal reverse test."""
    rho, sigma = _check_shapes(rho, sigma)
    if not fn.is_operator_convex:
        raise BadParameter(f"{fn.name} is not declared operator convex")
    if not math.isfinite(fn.f_at_zero_plus):
        raise BadParameter(f"{fn.name}: f(0+) must be finite")
    try:
        return float(np.trace(perspective(fn, rho, sigma)).real)
    except InfiniteLimit:
        return INF


def reg_measured_renyi(alpha: float, rho: np.ndarray, sigma: np.ndarray) -> float:
    """Regularized measured Renyi divergence: D_{alpha,alpha} for
    alpha >= 1/2 (max-relative entropy at alpha = inf), D_{alpha,1-alpha}
    below 1/2."""
    rho, sigma = _check_shapes(rho, sigma)
    if alpha == INF:
        return max_relative_entropy(rho, sigma)
    if alpha < 0:
        raise BadParameter(f"alpha must be >= 0, got {alpha}")
    if alpha >= 0.5:
        return renyi_alpha_z(alpha, alpha, rho, sigma)
    return renyi_alpha_z(alpha, 1.0 - alpha, rho, sigma)
