"""Absolutely continuous parts, operator perspective functions, and
Kubo-Ando weighted geometric means.

The gamma in {0, 1} endpoints of the geometric mean follow the continuity
convention: ``sigma #_0 rho`` is the part of sigma absolutely continuous
w.r.t. rho, and ``sigma #_1 rho`` the part of rho absolutely continuous
w.r.t. sigma. Pass ``endpoint_convention="classical"`` for the plain
sigma / rho endpoints instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BadParameter, DimensionMismatch, InfiniteLimit, NotInvertible
from .hermitian import (
    apply_function,
    clip_psd,
    mpower,
    projection_meet,
    spectral_decompose,
    support_basis,
    support_cutoff,
    support_projection,
)

INF = float("inf")


@dataclass(frozen=True)
class OpConvexFn:
    """Scalar function on (0, inf) together with its boundary limits.

    ``transpose_at_zero_plus`` is the limit at 0+ of x * f(1/x), i.e. the
    slope of f at infinity. The operator-convexity flag is declared, not
    verified.
    """

    name: str
    f: Callable[[float], float]
    f_at_zero_plus: float
    transpose_at_zero_plus: float
    is_operator_convex: bool = True

    def transpose(self) -> "OpConvexFn":
        return OpConvexFn(
            name=f"transpose({self.name})",
            f=lambda x: x * self.f(1.0 / x),
            f_at_zero_plus=self.transpose_at_zero_plus,
            transpose_at_zero_plus=self.f_at_zero_plus,
            is_operator_convex=self.is_operator_convex,
        )


def power_fn(alpha: float) -> OpConvexFn:
    """x^alpha for alpha in [0, 2]; operator convex on [1, 2], concave on [0, 1]."""
    if not 0.0 <= alpha <= 2.0:
        raise BadParameter(f"power exponent {alpha} outside [0, 2]")
    return OpConvexFn(
        name=f"pow[{alpha}]",
        f=lambda x: x**alpha,
        f_at_zero_plus=1.0 if alpha == 0.0 else 0.0,
        transpose_at_zero_plus=0.0 if alpha < 1.0 else (1.0 if alpha == 1.0 else INF),
        is_operator_convex=alpha >= 1.0,
    )


def x_log_x() -> OpConvexFn:
    return OpConvexFn("xlogx", lambda x: x * math.log(x), 0.0, INF)


def neg_log() -> OpConvexFn:
    return OpConvexFn("neglog", lambda x: -math.log(x), INF, 0.0)


def neg_power(gamma: float) -> OpConvexFn:
    if not 0.0 < gamma < 1.0:
        raise BadParameter(f"-x^gamma needs gamma in (0, 1), got {gamma}")
    return OpConvexFn(f"negpow[{gamma}]", lambda x: -(x**gamma), 0.0, 0.0)


# ---------------------------------------------------------------------------
# absolutely continuous part


def abs_cont_part(rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Largest 0 <= C <= rho with ran(C) inside ran(sigma), via the Schur
    complement of rho with respect to the kernel of sigma."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"shapes {rho.shape} vs {sigma.shape}")
    s = support_projection(sigma)
    sp = np.eye(rho.shape[0]) - s
    block = sp @ rho @ sp
    res = s @ rho @ s - s @ rho @ sp @ mpower(block, -1.0) @ sp @ rho @ s
    return clip_psd(res)


def abs_cont_part_kernel_formula(rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Independent route: S rho^{1/2} K rho^{1/2} S with K the projection
    onto the kernel of rho^{1/2} (I - S) rho^{1/2}."""
    rho = np.asarray(rho, dtype=complex)
    s = support_projection(sigma)
    sp = np.eye(rho.shape[0]) - s
    root = mpower(rho, 0.5)
    x = root @ sp @ root
    k = np.eye(rho.shape[0]) - support_projection(x)
    return clip_psd(s @ root @ k @ root @ s)


# ---------------------------------------------------------------------------
# operator perspective


def _compress(a: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return basis.conj().T @ a @ basis


def _expand(a: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return basis @ a @ basis.conj().T


def _persp_core(fn: OpConvexFn, rc: np.ndarray, sc: np.ndarray) -> np.ndarray:
    """sc^{1/2} f(sc^{-1/2} rc sc^{-1/2}) sc^{1/2} for PD compressed blocks.

    Eigenvalues are floored at the support cutoff before applying f; the
    exact arguments are strictly positive and the floor only absorbs
    rounding noise.
    """
    sh = mpower(sc, 0.5)
    shi = mpower(sc, -0.5)
    m = shi @ rc @ shi
    w, _ = spectral_decompose(m)
    floor = support_cutoff(np.abs(w))
    return sh @ apply_function(m, lambda x: fn.f(max(x, floor)), False) @ sh


def perspective(fn: OpConvexFn, rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Operator perspective P_f(rho, sigma), the eps -> 0 limit of
    (sigma+eps)^{1/2} f((sigma+eps)^{-1/2}(rho+eps)(sigma+eps)^{-1/2}) (sigma+eps)^{1/2}.

    Closed form: the core on the common-support compression plus
    f(0+) (sigma - sigma_ac) + transpose(0+) (rho - rho_ac). An infinite
    boundary limit is tolerated only against a vanishing deficiency
    (0 * inf = 0); otherwise the limit does not exist and InfiniteLimit
    is raised.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"shapes {rho.shape} vs {sigma.shape}")
    p = projection_meet(support_projection(rho), support_projection(sigma))
    rho_ac = abs_cont_part(rho, p)
    sigma_ac = abs_cont_part(sigma, p)
    rho_def = rho - rho_ac
    sigma_def = sigma - sigma_ac
    scale = max(1.0, np.trace(rho).real + np.trace(sigma).real)

    out = np.zeros_like(rho)
    if np.trace(sigma_ac).real > 1e-14 * scale:
        basis = support_basis(sigma_ac)
        core = _persp_core(fn, _compress(rho_ac, basis), _compress(sigma_ac, basis))
        out = out + _expand(core, basis)
    for limit, deficiency, side in (
        (fn.transpose_at_zero_plus, rho_def, "rho"),
        (fn.f_at_zero_plus, sigma_def, "sigma"),
    ):
        if np.trace(deficiency).real <= 1e-10 * scale:
            continue  # 0 * (+-inf) := 0
        if not math.isfinite(limit):
            raise InfiniteLimit(
                f"{fn.name}: infinite boundary limit against a nonzero {side} part"
            )
        out = out + limit * deficiency
    return (out + out.conj().T) / 2.0


def perspective_smoothed(
    fn: OpConvexFn, rho: np.ndarray, sigma: np.ndarray, eps: float
) -> np.ndarray:
    """P_f(rho + eps I, sigma + eps I) evaluated directly (all invertible)."""
    d = rho.shape[0]
    re = np.asarray(rho, dtype=complex) + eps * np.eye(d)
    se = np.asarray(sigma, dtype=complex) + eps * np.eye(d)
    sh = mpower(se, 0.5)
    shi = mpower(se, -0.5)
    return sh @ apply_function(shi @ re @ shi, fn.f, on_support_only=False) @ sh


# ---------------------------------------------------------------------------
# Kubo-Ando weighted geometric means


def kubo_ando_mean(
    gamma: float,
    rho: np.ndarray,
    sigma: np.ndarray,
    endpoint_convention: str = "paper",
) -> np.ndarray:
    """sigma #_gamma rho for gamma in [0, 1] and arbitrary PSD inputs."""
    if not 0.0 <= gamma <= 1.0:
        raise BadParameter(f"gamma {gamma} outside [0, 1]")
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if gamma == 0.0:
        if endpoint_convention == "classical":
            return sigma.copy()
        return abs_cont_part(sigma, rho)
    if gamma == 1.0:
        if endpoint_convention == "classical":
            return rho.copy()
        return abs_cont_part(rho, sigma)
    return clip_psd(perspective(power_fn(gamma), rho, sigma))


def kubo_ando_mean_real(gamma: float, rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """sigma #_gamma rho for any real gamma; both inputs must be invertible."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    for name, a in (("rho", rho), ("sigma", sigma)):
        w, _ = spectral_decompose(a)
        if w[-1] <= support_cutoff(w):
            raise NotInvertible(f"{name} has an eigenvalue at or below the cutoff")
    sh = mpower(sigma, 0.5)
    shi = mpower(sigma, -0.5)
    return sh @ apply_function(shi @ rho @ shi, lambda x: x**gamma, False) @ sh
