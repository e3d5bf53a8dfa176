"""Weighted divergence radii / centers, multi-variate barycentric Q, the
two-variable barycentric Renyi divergences with their alpha in {0, 1, inf}
limits, and the derived geometric means.

The center problem inf_omega sum_x P(x) D^{q_x}(omega || W_x) is solved by
descent in the exponential parametrization omega = exp(H) / Tr exp(H) on
the compressed feasible subspace. Umegaki and Belavkin-Staszewski terms use
analytic gradients; all other kinds fall back to central finite differences
on the H coordinates. The all-Umegaki case bypasses the solver entirely via
its closed-form center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .classical import classify_weights, OTHER
from .errors import BadParameter, DimensionMismatch, UnsupportedWeights
from .hermitian import (
    mpower,
    nlog_m,
    projection_meet,
    sample_hermitian,
    spectral_decompose,
    support_basis,
    support_leq,
    support_projection,
)
from .relent import (
    BelavkinStaszewski,
    EntropyKind,
    GeomWeighted,
    Mixture,
    Umegaki,
    rel_entropy,
)

INF = float("inf")


@dataclass(frozen=True)
class GcqChannel:
    """Labeled family (W_x) of PSD operators on a common space."""

    labels: tuple
    operators: tuple  # of ndarray

    def __post_init__(self):
        ops = tuple(np.asarray(w, dtype=complex) for w in self.operators)
        if len(ops) != len(self.labels):
            raise DimensionMismatch("one operator per label required")
        d = ops[0].shape[0]
        if any(w.shape != (d, d) for w in ops):
            raise DimensionMismatch("operators must share one dimension")
        if all(np.trace(w).real <= 1e-14 for w in ops):
            raise BadParameter("at least one W_x must be nonzero")
        object.__setattr__(self, "operators", ops)

    @property
    def dim(self) -> int:
        return self.operators[0].shape[0]

    def support_meets(self, weights: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
        """(S_+, S_-): meets of the supports over positive / negative weights
        (empty meets default to the identity)."""
        d = self.dim
        s_plus = np.eye(d, dtype=complex)
        s_minus = np.eye(d, dtype=complex)
        for w, op in zip(weights, self.operators):
            if w > 0:
                s_plus = projection_meet(s_plus, support_projection(op))
            elif w < 0:
                s_minus = projection_meet(s_minus, support_projection(op))
        return s_plus, s_minus


@dataclass
class SolverOptions:
    iters: int = 500
    tol: float = 1e-8
    restarts: int = 4
    fd_step: float = 1e-5
    seed: int = 0
    warm_start: bool = True
    grad_tol: float = 1e-6
    use_closed_form: bool = True


@dataclass
class BarycenterResult:
    q_value: float
    radius: float
    center: Optional[np.ndarray] = None
    geo_mean: Optional[np.ndarray] = None
    iterations: int = 0
    objective_gap: float = 0.0
    converged: bool = True

    def to_json(self) -> dict:
        from .hermitian import matrix_to_json

        out = {
            "q_value": _json_float(self.q_value),
            "radius": _json_float(self.radius),
            "iterations": self.iterations,
            "objective_gap": self.objective_gap,
            "converged": self.converged,
        }
        if self.center is not None:
            out["center"] = matrix_to_json(self.center)
        if self.geo_mean is not None:
            out["geo_mean"] = matrix_to_json(self.geo_mean)
        return out


def _json_float(x: float):
    if x == INF:
        return "+inf"
    if x == -INF:
        return "-inf"
    return x


# ---------------------------------------------------------------------------
# compressed objective terms


class _Term:
    """One summand weight * D^kind(omega || W) on the compressed subspace."""

    def __init__(self, weight: float, kind: EntropyKind, w_full: np.ndarray, basis: np.ndarray):
        from .supports import abs_cont_part

        self.weight = weight
        self.kind = kind
        self.basis = basis
        self.w_full = w_full
        self.mode = "gen"
        if isinstance(kind, Umegaki):
            self.mode = "um"
            self.logw = basis.conj().T @ nlog_m(w_full) @ basis
        elif isinstance(kind, BelavkinStaszewski):
            self.mode = "bs"
            g = basis.conj().T @ mpower(w_full, -1.0) @ basis
            self.sig_eff = mpower(g, -1.0)
            self.sig_isqrt = mpower(self.sig_eff, -0.5)
        elif isinstance(kind, GeomWeighted) and isinstance(
            kind.base, (Umegaki, BelavkinStaszewski)
        ):
            # W #_g omega only sees the part of W absolutely continuous
            # w.r.t. the compressed subspace, which is fixed
            self.mode = "geom"
            proj = basis @ basis.conj().T
            self.w_ac = basis.conj().T @ abs_cont_part(w_full, proj) @ basis

    def _geom_value(self, omega_c: np.ndarray) -> float:
        g = self.kind.gamma
        w, u = np.linalg.eigh(omega_c)
        w = np.clip(w, 1e-300, None)
        oh = (u * np.sqrt(w)) @ u.conj().T
        ohi = (u / np.sqrt(w)) @ u.conj().T
        inner = ohi @ self.w_ac @ ohi
        wi, ui = np.linalg.eigh((inner + inner.conj().T) / 2)
        wi = np.clip(wi, 1e-300, None)
        mean = oh @ ((ui * wi ** (1.0 - g)) @ ui.conj().T) @ oh
        if isinstance(self.kind.base, Umegaki):
            wm, um = np.linalg.eigh((mean + mean.conj().T) / 2)
            wm = np.clip(wm, 1e-300, None)
            logm = (um * np.log(wm)) @ um.conj().T
            ent = float(np.sum(w * np.log(w)))
            val = ent - float(np.trace(omega_c @ logm).real)
        else:
            # BS(omega || mean) = Tr omega log(omega^{1/2} mean^{-1} omega^{1/2})
            wm, um = np.linalg.eigh((mean + mean.conj().T) / 2)
            wm = np.clip(wm, 1e-300, None)
            minv = (um / wm) @ um.conj().T
            x = oh @ minv @ oh
            wx, ux = np.linalg.eigh((x + x.conj().T) / 2)
            wx = np.clip(wx, 1e-300, None)
            logx = (ux * np.log(wx)) @ ux.conj().T
            val = float(np.trace(omega_c @ logx).real)
        return val / (1.0 - g)

    def value(self, omega_c: np.ndarray, seed: int = 0) -> float:
        if self.mode == "um":
            w, u = np.linalg.eigh(omega_c)
            w = np.clip(w, 1e-300, None)
            ent = float(np.sum(w * np.log(w)))
            return ent - float(np.trace(omega_c @ self.logw).real)
        if self.mode == "bs":
            m = self.sig_isqrt @ omega_c @ self.sig_isqrt
            w, u = np.linalg.eigh((m + m.conj().T) / 2)
            w = np.clip(w, 0.0, None)
            eta = np.where(w > 0, w * np.log(np.clip(w, 1e-300, None)), 0.0)
            f = (u * eta) @ u.conj().T
            return float(np.trace(self.sig_eff @ f).real)
        if self.mode == "geom":
            return self._geom_value(omega_c)
        omega_full = self.basis @ omega_c @ self.basis.conj().T
        return rel_entropy(self.kind, omega_full, self.w_full, seed=seed).value

    def grad_omega(self, omega_c: np.ndarray) -> Optional[np.ndarray]:
        """Euclidean gradient w.r.t. omega for analytic modes, else None."""
        if self.mode == "um":
            w, u = np.linalg.eigh(omega_c)
            w = np.clip(w, 1e-300, None)
            logw = (u * np.log(w)) @ u.conj().T
            return logw - self.logw
        if self.mode == "bs":
            m = self.sig_isqrt @ omega_c @ self.sig_isqrt
            w, u = np.linalg.eigh((m + m.conj().T) / 2)
            w = np.clip(w, 1e-300, None)
            eta1 = _divided_diff(w, lambda x: x * np.log(x), lambda x: np.log(x) + 1.0)
            s_eig = u.conj().T @ self.sig_eff @ u
            t = u @ (eta1 * s_eig) @ u.conj().T
            return self.sig_isqrt @ t @ self.sig_isqrt
        return None


def _expand_terms(
    weight: float, kind: EntropyKind, op: np.ndarray, basis: np.ndarray
) -> list[_Term]:
    """Flatten mixtures into weighted terms so their members keep analytic
    gradients; other kinds map to a single term."""
    if isinstance(kind, Mixture):
        out = []
        for w, comp in kind.components:
            if w != 0.0:
                out.extend(_expand_terms(weight * w, comp, op, basis))
        return out
    return [_Term(weight, kind, op, basis)]


def _divided_diff(w: np.ndarray, f, fprime) -> np.ndarray:
    """First divided-difference matrix f^[1](w_i, w_j); eigenvalues closer
    than the clustering threshold use the derivative branch."""
    from .hermitian import CLUSTER_RTOL

    n = len(w)
    out = np.empty((n, n))
    fw = f(w)
    tol = CLUSTER_RTOL * max(1.0, float(np.max(np.abs(w))) if n else 1.0)
    for i in range(n):
        for j in range(n):
            if abs(w[i] - w[j]) > tol:
                out[i, j] = (fw[i] - fw[j]) / (w[i] - w[j])
            else:
                out[i, j] = fprime(0.5 * (w[i] + w[j]))
    return out


def _omega_from_h(h: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh((h + h.conj().T) / 2)
    e = np.exp(w - np.max(w))
    omega = (u * e) @ u.conj().T
    return omega / np.trace(omega).real


def _dexp_push(h: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Pushforward of an omega-gradient to the H parametrization of
    omega = exp(H)/Tr exp(H)."""
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    shift = np.max(w)
    ew = np.exp(w - shift)
    z = float(np.sum(ew))
    dd = _divided_diff(w - shift, np.exp, np.exp)
    gv = v.conj().T @ g @ v
    t = v @ (dd * gv) @ v.conj().T
    omega = (v * ew) @ v.conj().T / z
    tr_og = float(np.trace(omega @ g).real)
    eh = (v * ew) @ v.conj().T
    return (t - tr_og * eh) / z


_HERM_BASIS_CACHE: dict[int, list[np.ndarray]] = {}


def _herm_basis(m: int) -> list[np.ndarray]:
    if m not in _HERM_BASIS_CACHE:
        basis = []
        for i in range(m):
            e = np.zeros((m, m), dtype=complex)
            e[i, i] = 1.0
            basis.append(e)
        for i in range(m):
            for j in range(i + 1, m):
                e = np.zeros((m, m), dtype=complex)
                e[i, j] = e[j, i] = 1.0 / math.sqrt(2)
                basis.append(e)
                e = np.zeros((m, m), dtype=complex)
                e[i, j], e[j, i] = 1j / math.sqrt(2), -1j / math.sqrt(2)
                basis.append(e)
        _HERM_BASIS_CACHE[m] = basis
    return _HERM_BASIS_CACHE[m]


def center_solver(
    objective,
    s_plus: np.ndarray,
    options: Optional[SolverOptions] = None,
    terms: Optional[list[_Term]] = None,
):
    """Minimize the weighted-divergence objective over states supported in
    ran(S_+).

    ``objective`` maps a full-space state to a float; it is only used when
    ``terms`` (the structured compressed form) is not supplied. Returns
    (center, value, gap, iterations, converged).
    """
    opts = options or SolverOptions()
    basis = support_basis(s_plus)
    m = basis.shape[1]
    if m == 0:
        return None, INF, 0.0, 0, True
    if terms is None:
        terms = []
        fallback = objective
    else:
        fallback = None

    def f_of(omega_c: np.ndarray) -> float:
        if fallback is not None:
            return fallback(basis @ omega_c @ basis.conj().T)
        return sum(t.weight * t.value(omega_c) for t in terms)

    analytic = [t for t in terms if t.mode in ("um", "bs")]
    generic = [t for t in terms if t.mode in ("gen", "geom")]

    def gen_value(omega_c):
        return sum(t.weight * t.value(omega_c) for t in generic)

    hbasis = _herm_basis(m)
    rng = np.random.default_rng(opts.seed)

    starts: list[np.ndarray] = []
    if opts.warm_start:
        h0 = np.zeros((m, m), dtype=complex)
        got = False
        for t in terms:
            if t.mode == "um":
                h0 = h0 + t.weight * t.logw
                got = True
            elif t.mode == "bs":
                h0 = h0 + t.weight * nlog_m(t.sig_eff)
                got = True
        starts.append(h0 if got else np.zeros((m, m), dtype=complex))
    for _ in range(opts.restarts):
        starts.append(sample_hermitian(m, rng))

    mirror = not generic and fallback is None

    def direction_at(h: np.ndarray, omega_c: np.ndarray) -> np.ndarray:
        if mirror:
            # mirror descent: step along the omega-space gradient, with the
            # trace multiplier projected out (stationary iff G is a multiple
            # of the identity)
            g = np.zeros((m, m), dtype=complex)
            for t in analytic:
                g = g + t.weight * t.grad_omega(omega_c)
            return g - (np.trace(g).real / m) * np.eye(m)
        grad = np.zeros((m, m), dtype=complex)
        gw = np.zeros((m, m), dtype=complex)
        for t in analytic:
            gw = gw + t.weight * t.grad_omega(omega_c)
        if analytic:
            grad = grad + _dexp_push(h, gw)
        base_fn = f_of if fallback is not None else gen_value
        if fallback is not None:
            grad = np.zeros((m, m), dtype=complex)
        for e in hbasis:
            vp = base_fn(_omega_from_h(h + opts.fd_step * e))
            vm = base_fn(_omega_from_h(h - opts.fd_step * e))
            grad = grad + ((vp - vm) / (2 * opts.fd_step)) * e
        return grad

    best_val, best_h, best_iters, best_conv = INF, starts[0], 0, False
    for h in starts:
        val = f_of(_omega_from_h(h))
        if not math.isfinite(val):
            continue
        converged = False
        it = 0
        t_prev = 1.0
        for it in range(1, opts.iters + 1):
            omega_c = _omega_from_h(h)
            grad = direction_at(h, omega_c)
            gn = float(np.linalg.norm(grad))
            if gn < opts.grad_tol:
                converged = True
                break
            t_step, accepted = min(2.0 * t_prev, 4.0), False
            for _ in range(60):
                h_new = h - t_step * grad
                h_new = h_new - (np.trace(h_new).real / m) * np.eye(m)
                v_new = f_of(_omega_from_h(h_new))
                if math.isfinite(v_new) and v_new <= val - 1e-6 * t_step * gn * gn:
                    accepted = True
                    break
                t_step /= 2
            if not accepted:
                converged = gn < 10 * opts.grad_tol
                break
            decrease = val - v_new
            h, val, t_prev = h_new, v_new, t_step
            if decrease < opts.tol and gn < 10 * opts.grad_tol:
                converged = True
                break
        if val < best_val - 1e-15:
            best_val, best_h, best_iters, best_conv = val, h, it, converged
    center_c = _omega_from_h(best_h)
    center = basis @ center_c @ basis.conj().T
    gap = 0.0 if best_conv else opts.tol
    return center, best_val, gap, best_iters, best_conv


# ---------------------------------------------------------------------------
# multi-variate barycentric Q


def _all_umegaki(kinds: Sequence[EntropyKind], weights: Sequence[float]) -> bool:
    return all(
        isinstance(k, Umegaki) for k, w in zip(kinds, weights) if w != 0.0
    )


def barycentric_q(
    kinds: Sequence[EntropyKind],
    channel: GcqChannel,
    weights: Sequence[float],
    options: Optional[SolverOptions] = None,
) -> BarycenterResult:
    """P-weighted barycentric Q of a gcq channel: Q = exp(-radius) with
    radius = inf over states omega in ran(S_+) of sum_x P(x) D^{q_x}(omega || W_x).

    Support-projection fast paths (Q = 0 for probability P with S_+ = 0,
    Q = +inf for signed P with S_+ not below S_-) run before any solver call.
    """
    weights = [float(w) for w in weights]
    if abs(sum(weights) - 1.0) > 1e-12:
        raise BadParameter("weights must sum to 1")
    if len(kinds) != len(channel.operators) or len(weights) != len(channel.operators):
        raise DimensionMismatch("kinds/weights/operators must align")
    cls = classify_weights(weights)
    if cls == OTHER:
        sups = [
            support_projection(op)
            for op, w in zip(channel.operators, weights)
            if w != 0.0
        ]
        if any(np.max(np.abs(s - sups[0])) > 1e-7 for s in sups[1:]):
            raise UnsupportedWeights(
                "signed weights outside the admissible classes need equal supports"
            )
    s_plus, s_minus = channel.support_meets(weights)
    has_negative = any(w < 0 for w in weights)
    if has_negative and not support_leq(s_plus, s_minus):
        return BarycenterResult(q_value=INF, radius=-INF)
    rank_plus = int(round(np.trace(s_plus).real))
    if rank_plus == 0:
        return BarycenterResult(q_value=0.0, radius=INF)

    basis = support_basis(s_plus)
    use_closed = options.use_closed_form if options is not None else True
    if use_closed and _all_umegaki(kinds, weights):
        h = np.zeros((basis.shape[1],) * 2, dtype=complex)
        for w, op in zip(weights, channel.operators):
            if w != 0.0:
                h = h + w * (basis.conj().T @ nlog_m(op) @ basis)
        ww, u = np.linalg.eigh((h + h.conj().T) / 2)
        g_c = (u * np.exp(ww)) @ u.conj().T
        q = float(np.trace(g_c).real)
        geo = basis @ g_c @ basis.conj().T
        return BarycenterResult(
            q_value=q,
            radius=-math.log(q),
            center=geo / q,
            geo_mean=geo,
            iterations=0,
            objective_gap=0.0,
        )

    terms = []
    for w, k, op in zip(weights, kinds, channel.operators):
        if w != 0.0:
            terms.extend(_expand_terms(w, k, op, basis))
    center, radius, gap, iters, conv = center_solver(None, s_plus, options, terms=terms)
    q = math.exp(-radius) if math.isfinite(radius) else (0.0 if radius == INF else INF)
    geo = None if center is None else q * center
    return BarycenterResult(
        q_value=q,
        radius=radius,
        center=center,
        geo_mean=geo,
        iterations=iters,
        objective_gap=gap,
        converged=conv,
    )


# ---------------------------------------------------------------------------
# two-variable barycentric Renyi divergences


def _fast_path(alpha: float, rho: np.ndarray, sigma: np.ndarray) -> Optional[float]:
    """+inf detection from support projections only."""
    meet = projection_meet(support_projection(rho), support_projection(sigma))
    if alpha < 1:
        if np.trace(meet).real < 0.5:
            return INF
    else:
        if not support_leq(rho, sigma):
            return INF
    return None


def barycentric_renyi(
    alpha: float,
    kinds: tuple[EntropyKind, EntropyKind],
    rho: np.ndarray,
    sigma: np.ndarray,
    options: Optional[SolverOptions] = None,
) -> float:
    """Barycentric Renyi alpha-divergence generated by (D^{q0}, D^{q1}).

    alpha = 1 returns D^{q1}(rho||sigma) / Tr rho; alpha = inf evaluates the
    sup of D^{q1}(omega||sigma) - D^{q0}(omega||rho) over states in ran(rho)
    (approximate: the supremum may be unattained).
    """
    res = barycentric_renyi_full(alpha, kinds, rho, sigma, options)
    return res["value"]


def barycentric_renyi_full(
    alpha: float,
    kinds: tuple[EntropyKind, EntropyKind],
    rho: np.ndarray,
    sigma: np.ndarray,
    options: Optional[SolverOptions] = None,
) -> dict:
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"shapes {rho.shape} vs {sigma.shape}")
    tr_rho = float(np.trace(rho).real)
    if tr_rho <= 0:
        raise BadParameter("first argument must be nonzero")
    if not (alpha == INF or alpha >= 0):
        raise BadParameter(f"alpha must be >= 0, got {alpha}")
    q0, q1 = kinds
    out = {"value": INF, "center": None, "gap": 0.0, "iterations": 0, "converged": True}

    if alpha == 1:
        out["value"] = rel_entropy(q1, rho, sigma).value / tr_rho
        return out

    fp = _fast_path(alpha if alpha != INF else 2.0, rho, sigma)
    if fp is not None:
        return out

    meet = projection_meet(support_projection(rho), support_projection(sigma))
    basis = support_basis(meet)
    channel_ops = (rho, sigma)

    if alpha == INF:
        terms = _expand_terms(1.0, q0, rho, basis) + _expand_terms(-1.0, q1, sigma, basis)
        center, val, gap, iters, conv = center_solver(None, meet, options, terms=terms)
        out.update(value=-val, center=center, gap=gap, iterations=iters, converged=conv)
        return out

    if alpha == 0:
        weights = (0.0, 1.0)
    else:
        weights = (alpha, 1.0 - alpha)

    use_closed = options.use_closed_form if options is not None else True
    if use_closed and _all_umegaki(kinds, weights):
        h = np.zeros((basis.shape[1],) * 2, dtype=complex)
        for w, op in zip(weights, channel_ops):
            if w != 0.0:
                h = h + w * (basis.conj().T @ nlog_m(op) @ basis)
        ww, u = np.linalg.eigh((h + h.conj().T) / 2)
        q = float(np.sum(np.exp(ww)))
        center_c = (u * np.exp(ww)) @ u.conj().T / q
        radius = -math.log(q)
        center = basis @ center_c @ basis.conj().T
        iters, gap, conv = 0, 0.0, True
    else:
        terms = []
        for w, k, op in zip(weights, kinds, channel_ops):
            if w != 0.0:
                terms.extend(_expand_terms(w, k, op, basis))
        center, radius, gap, iters, conv = center_solver(None, meet, options, terms=terms)

    # psi_alpha = -radius; D_alpha = (psi_alpha - log Tr rho)/(alpha - 1)
    if alpha == 0:
        value = radius + math.log(tr_rho)
    else:
        value = (-radius - math.log(tr_rho)) / (alpha - 1.0)
    out.update(value=value, center=center, gap=gap, iterations=iters, converged=conv)
    return out


def dual_renyi(
    alpha: float,
    kinds: tuple[EntropyKind, EntropyKind],
    rho: np.ndarray,
    sigma: np.ndarray,
    options: Optional[SolverOptions] = None,
) -> float:
    """Dual collection at alpha in (0, 1): evaluates the primal at 1 - alpha
    with swapped arguments; equals the primal with swapped kinds."""
    if not 0.0 < alpha < 1.0:
        raise BadParameter(f"alpha must be in (0, 1), got {alpha}")
    tr_rho = float(np.trace(np.asarray(rho)).real)
    tr_sigma = float(np.trace(np.asarray(sigma)).real)
    inner = barycentric_renyi(1.0 - alpha, kinds, sigma, rho, options)
    return (alpha * inner + math.log(tr_rho) - math.log(tr_sigma)) / (1.0 - alpha)
