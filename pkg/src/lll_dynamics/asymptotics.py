"""Exact Hamiltonian pieces of the high-frequency Ansatz and their limits.

With u = a phi_0 + v_lam the quartic Hamiltonian splits by the number of
high-frequency factors into H0..H4. The exact pieces are Fock sums; their
large-lam equivalents are

    h0 = |a|^4
    h2 = 4|a|^2 int 2^(-lam x) |g(x)|^2 dx
    h3 = 2^(9/4) pi^(1/4) lam^(-1/4) Re a int x^(1/4) 2^(-lam x/2) conj(g(x/2))^2 g(x) dx
    h4 = sqrt(2 pi / lam) int sqrt(s) |g(s/2)|^4 ds

and h0 + h2 + h3 + h4 = |a|^4 + 4 int |a g(s) 2^(-lam s/2) + K (s/lam)^(1/4) g(s/2)^2|^2 ds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .core import K
from .fock import ansatz_tail, multilinear_H

LN2 = math.log(2.0)
H3_CONSTANT = 2.0 ** 2.25 * math.pi ** 0.25


class QuadratureError(ArithmeticError):
    pass


def psi(theta):
    """theta^(-theta) (1-theta)^(-(1-theta)) on (0, 1); maximal (= 2) at 1/2."""
    theta = np.asarray(theta, dtype=float)
    if np.any((theta <= 0) | (theta >= 1)):
        raise ValueError("psi is defined on the open interval (0, 1)")
    out = np.exp(_log_psi(theta))
    return float(out) if out.ndim == 0 else out


def _log_psi(theta):
    return -theta * np.log(theta) - (1 - theta) * np.log1p(-theta)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(order: int):
    if order not in _GL_CACHE:
        _GL_CACHE[order] = np.polynomial.legendre.leggauss(order)
    return _GL_CACHE[order]


def _panel_sum(f, lo, hi, panels, order):
    x, w = _gl(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).reshape(-1)
    weights = (half[:, None] * w[None, :]).reshape(-1)
    return np.sum(weights * f(nodes))


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    rtol: float = 1e-13,
    order: int = 20,
    start_panels: int = 4,
    max_panels: int = 1 << 14,
):
    """Composite Gauss-Legendre quadrature, doubling panels until two
    successive estimates agree to ``rtol`` (relative)."""
    if hi <= lo:
        return 0.0
    panels = start_panels
    prev = _panel_sum(f, lo, hi, panels, order)
    while panels < max_panels:
        panels *= 2
        cur = _panel_sum(f, lo, hi, panels, order)
        diff = abs(cur - prev)
        if diff <= rtol * abs(cur) or (cur == 0 and prev == 0):
            return cur
        prev = cur
    raise QuadratureError(
        f"quadrature did not converge on [{lo}, {hi}]: relative change "
        f"{diff / abs(cur) if cur else diff:.3e} > {rtol:.1e} with {panels} panels"
    )


class LaplaceResult(NamedTuple):
    integral: float
    asymptote: float
    ratio: float


def laplace_ratio(F: Callable, alpha: float, lam: float, rtol: float = 1e-12) -> LaplaceResult:
    """Compare int_0^1 psi^(alpha lam) F with F(1/2) 2^(alpha lam) sqrt(pi / (2 alpha lam)).

    Both sides are evaluated relative to the peak value 2^(alpha lam), so the
    ratio stays accurate when the unscaled values overflow.
    """
    n = alpha * lam
    if not n >= 4:
        raise ValueError("need alpha * lam >= 4 for a peaked integrand")
    F_half = float(F(np.array([0.5]))[0])
    probe = np.asarray(F(np.linspace(1e-6, 1 - 1e-6, 2001)), dtype=float)
    if F_half <= 0 and (np.any(probe > 0) and np.any(probe < 0)):
        raise ValueError("asymptote not applicable: F changes sign and F(1/2) <= 0")

    def scaled(theta):
        return np.exp(n * (_log_psi(theta) - LN2)) * F(theta)

    # the peak has width ~ n^(-1/2); split there so the panels resolve it
    width = min(0.5, 12.0 / math.sqrt(n))
    pieces = [(0.0, 0.5 - width), (0.5 - width, 0.5 + width), (0.5 + width, 1.0)]
    integral_scaled = sum(integrate(scaled, lo, hi, rtol) for lo, hi in pieces if hi > lo)
    asym_scaled = F_half * math.sqrt(math.pi) / math.sqrt(2 * n)
    ratio = integral_scaled / asym_scaled if asym_scaled != 0 else math.inf
    peak = 2.0**n if n < 1000 else math.inf
    return LaplaceResult(integral_scaled * peak, asym_scaled * peak, ratio)


@dataclass
class HamiltonianBreakdown:
    """Exact pieces H0..H4 and/or their limits h0, h2, h3, h4 at one lam."""

    lam: float
    H0: Optional[complex] = None
    H1: Optional[complex] = None
    H2: Optional[complex] = None
    H3: Optional[complex] = None
    H4: Optional[complex] = None
    total: Optional[float] = None
    h0: Optional[float] = None
    h2: Optional[float] = None
    h3: Optional[float] = None
    h4: Optional[float] = None
    combined: Optional[float] = None

    def ratios(self) -> dict[str, float]:
        """Re H_k / h_k for the pieces present on both sides."""
        out = {}
        for k in (0, 2, 3, 4):
            exact, limit = getattr(self, f"H{k}"), getattr(self, f"h{k}")
            if exact is not None and limit is not None:
                out[f"H{k}"] = exact.real / limit if limit != 0 else math.nan
        return out

    def merge(self, other: "HamiltonianBreakdown") -> "HamiltonianBreakdown":
        fields = {k: v for k, v in vars(other).items() if v is not None}
        merged = dict(vars(self))
        merged.update({k: v for k, v in fields.items() if merged.get(k) is None})
        return HamiltonianBreakdown(**merged)


def exact_H_terms(a: complex, g, lam: int, N: int) -> HamiltonianBreakdown:
    """H0..H4 of a phi_0 + v_lam from the quartic Fock form.

    ``g`` is a callable profile or samples g[n] = g(n/lam). Each piece is the
    grouping of multilinear forms by how many slots carry v_lam.
    """
    v = ansatz_tail(g, lam, N)
    p = np.zeros(N + 1, dtype=complex)
    p[0] = a
    H = multilinear_H
    H0 = H(p, p, p, p)
    H1 = 2 * (H(v, p, p, p) + H(p, p, v, p))
    H2 = H(v, v, p, p) + H(p, p, v, v) + 4 * H(v, p, v, p)
    H3 = 2 * (H(v, v, v, p) + H(p, v, v, v))
    H4 = H(v, v, v, v)
    c = v.copy()
    c[0] = a
    total = H(c, c, c, c).real
    return HamiltonianBreakdown(lam, H0, H1, H2, H3, H4, total=total)


def _find_s_max(g: Callable, rel: float = 1e-12) -> float:
    s = np.linspace(0, 1, 257)[1:]
    peak = np.max(np.abs(g(s)))
    hi = 1.0
    while hi < 1e6:
        probe = np.linspace(hi, 2 * hi, 257)
        vals = np.abs(g(probe))
        peak = max(peak, vals.max())
        if vals.max() <= rel * peak and np.abs(g(np.array([2 * hi]))).max() <= rel * peak:
            return hi
        hi *= 2
    raise QuadratureError("profile has no bounded essential support")


def limit_h_terms(
    a: complex,
    g: Callable,
    lam: float,
    support: tuple[float, float] | None = None,
    rtol: float = 1e-13,
) -> HamiltonianBreakdown:
    """h0, h2, h3, h4 and the combined square form by quadrature.

    ``support`` bounds the region where g is non-negligible; without it the
    upper end is found by doubling until |g| drops below 1e-12 of its peak.
    Integration ranges are then cut to where each integrand can be non-zero.
    """
    if support is None:
        lo, hi = 0.0, _find_s_max(g)
    else:
        lo, hi = map(float, support)
    prof = lambda x: np.asarray(g(x), dtype=complex)

    h0 = abs(a) ** 4
    h2 = 4 * abs(a) ** 2 * integrate(lambda x: np.exp2(-lam * x) * np.abs(prof(x)) ** 2, lo, hi, rtol)
    if a != 0:
        integrand = lambda x: np.real(a * x**0.25 * np.exp2(-lam * x / 2) * np.conj(prof(x / 2)) ** 2 * prof(x))
        h3 = H3_CONSTANT * lam**-0.25 * integrate(integrand, 2 * lo, hi, rtol)
    else:
        h3 = 0.0
    h4 = math.sqrt(2 * math.pi / lam) * integrate(lambda s: np.sqrt(s) * np.abs(prof(s / 2)) ** 4, 2 * lo, 2 * hi, rtol)

    def square(s):
        X = a * prof(s) * np.exp2(-lam * s / 2) + K * (s / lam) ** 0.25 * prof(s / 2) ** 2
        return np.abs(X) ** 2

    # g(s) switches on/off at lo, hi and g(s/2) at 2 lo, 2 hi
    cuts = sorted({lo, hi, 2 * lo, 2 * hi})
    combined = h0 + 4 * sum(integrate(square, u, v, rtol) for u, v in zip(cuts, cuts[1:]))
    pieces = h0 + h2 + h3 + h4
    if abs(combined - pieces) > 100 * rtol * max(abs(combined), abs(pieces)):
        raise QuadratureError(f"combined form {combined!r} disagrees with h0+h2+h3+h4 = {pieces!r}")
    return HamiltonianBreakdown(lam, h0=h0, h2=h2, h3=h3, h4=h4, combined=combined)


def compare(a, g: Callable, lam: int, N: int, support=None, rtol: float = 1e-13) -> HamiltonianBreakdown:
    """Exact pieces and limits side by side."""
    return exact_H_terms(a, g, lam, N).merge(limit_h_terms(a, g, lam, support, rtol))


def bump(lo: float, hi: float, height: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """Smooth compactly supported profile exp(4 - 1/(t(1-t))), t = (x-lo)/(hi-lo).

    The peak value is ``height``, reached at the midpoint.
    """
    if not 0 <= lo < hi:
        raise ValueError("need 0 <= lo < hi")

    def g(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        inside = (x > lo) & (x < hi)
        t = (x[inside] - lo) / (hi - lo)
        out[inside] = height * np.exp(4.0 - 1.0 / (t * (1.0 - t)))
        return out

    return g
