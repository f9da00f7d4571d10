"""LLL dynamics in Fock coefficients.

The equation is

    i dc_n/dt = 2 sum_{k+l=m+n} w(k,l,m,n) c_k c_l conj(c_m),
    w(k,l,m,n) = (k+l)! / (2^(k+l) sqrt(k! l! m! n!)),

which is the Hamiltonian flow i dc_n/dt = dH/d(conj c_n) of the quartic form
H(c) = sum w c_k c_l conj(c_m c_n).

Factorials are only ever handled through ln(n!). The fast kernels rely on the
split w(k,l,m,n) = beta(S,k) beta(S,m) with S = k+l = m+n and

    beta(S,k) = sqrt(binom(S,k)) / 2^(S/2)  in (0, 1],

so every per-S block is bounded by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Union

import numpy as np
from scipy.special import gammaln

from .core import FockState, HamiltonianSystem

LN2 = np.log(2.0)

ArrayOrState = Union[np.ndarray, FockState]


def _coeffs(c) -> np.ndarray:
    if isinstance(c, FockState):
        return c.c
    return np.asarray(c, dtype=complex)


@dataclass(frozen=True)
class WeightTable:
    """ln(n!) for n = 0..2N, enough for every weight with indices <= N."""

    N: int

    def __post_init__(self):
        if self.N < 0:
            raise ValueError("N must be >= 0")
        lf = gammaln(np.arange(2 * self.N + 1) + 1.0)
        lf[:2] = 0.0
        lf.setflags(write=False)
        object.__setattr__(self, "log_factorials", lf)

    def weight(self, k: int, l: int, m: int, n: int) -> float:
        if k + l != m + n:
            raise ValueError(f"momentum mismatch: {k}+{l} != {m}+{n}")
        if min(k, l, m, n) < 0:
            raise ValueError("indices must be non-negative")
        S = k + l
        if S > 2 * self.N:
            raise ValueError(f"index sum {S} exceeds table range 2N={2 * self.N}")
        lf = self.log_factorials
        # pairwise grouping keeps the value bit-identical under the index symmetries
        return float(np.exp(lf[S] - S * LN2 - 0.5 * ((lf[k] + lf[l]) + (lf[m] + lf[n]))))


@lru_cache(maxsize=32)
def _table(N: int) -> WeightTable:
    return WeightTable(N)


def interaction_weight(k: int, l: int, m: int, n: int, table: WeightTable | None = None) -> float:
    """The coupling (k+l)!/(2^(k+l) sqrt(k! l! m! n!)); requires k+l = m+n."""
    if table is None:
        table = _table(max(k, l, m, n, 1))
    return table.weight(k, l, m, n)


@lru_cache(maxsize=32)
def _beta(N: int) -> np.ndarray:
    """beta[S, k] for S = 0..2N, k = 0..N; zero where S-k is outside 0..N."""
    S = np.arange(2 * N + 1)[:, None]
    k = np.arange(N + 1)[None, :]
    valid = (k <= S) & (S - k <= N)
    lf = _table(N).log_factorials
    Sk = np.where(valid, S - k, 0)
    log_beta = 0.5 * (lf[S] - lf[k] - lf[Sk]) - 0.5 * S * LN2
    beta = np.where(valid, np.exp(np.where(valid, log_beta, 0.0)), 0.0)
    beta.setflags(write=False)
    return beta


@lru_cache(maxsize=32)
def _hankel_index(N: int):
    S = np.arange(2 * N + 1)[:, None]
    k = np.arange(N + 1)[None, :]
    valid = (k <= S) & (S - k <= N)
    idx = np.where(valid, S - k, 0)
    return idx, valid


def _pair_sums(e: np.ndarray, f: np.ndarray) -> np.ndarray:
    """B_S = sum_{k+l=S} beta(S,k) e_k f_l for S = 0..2N."""
    N = e.size - 1
    idx, valid = _hankel_index(N)
    with np.errstate(over="ignore", invalid="ignore"):
        terms = _beta(N) * e[None, :] * np.where(valid, f[idx], 0.0)
        B = terms.sum(axis=1)
    bad = np.flatnonzero(~np.isfinite(B))
    if bad.size:
        raise FloatingPointError(f"overflow in interaction block S={int(bad[0])}")
    return B


def multilinear_H(e: ArrayOrState, f: ArrayOrState, g: ArrayOrState, h: ArrayOrState) -> complex:
    """sum_{k+l=m+n} w(k,l,m,n) e_k f_l conj(g_m) conj(h_n) over indices <= N."""
    e, f, g, h = (_coeffs(x) for x in (e, f, g, h))
    if not (e.size == f.size == g.size == h.size):
        raise ValueError("all four states must share the truncation order N")
    return complex(np.sum(_pair_sums(e, f) * np.conj(_pair_sums(g, h))))


def hamiltonian(c: ArrayOrState) -> float:
    """H(c) = multilinear_H(c, c, c, c), real up to rounding."""
    B = _pair_sums(_coeffs(c), _coeffs(c))
    with np.errstate(over="ignore"):
        return float(np.sum(np.abs(B) ** 2))


@lru_cache(maxsize=4)
def _direct_tensor(N: int):
    # W[n, k, m] = w(k, m+n-k, m, n), zero where l = m+n-k is out of range.
    n = np.arange(N + 1)[:, None, None]
    k = np.arange(N + 1)[None, :, None]
    m = np.arange(N + 1)[None, None, :]
    l = m + n - k
    valid = (l >= 0) & (l <= N)
    lc = np.where(valid, l, 0)
    lf = _table(N).log_factorials
    S = k + lc
    log_w = lf[S] - S * LN2 - 0.5 * (lf[k] + lf[lc] + lf[m] + lf[n])
    W = np.where(valid, np.exp(np.where(valid, log_w, 0.0)), 0.0)
    return W, lc, valid


def lll_rhs_direct(c: ArrayOrState) -> np.ndarray:
    """Reference O(N^3) evaluation of dc/dt as an explicit triple sum."""
    c = _coeffs(c)
    W, lc, valid = _direct_tensor(c.size - 1)
    cl = np.where(valid, c[lc], 0.0)
    total = np.einsum("nkm,k,nkm,m->n", W, c, cl, np.conj(c), optimize=False)
    return -2j * total


def lll_rhs_fast(c: ArrayOrState) -> np.ndarray:
    """O(N^2) evaluation of dc/dt through per-S pair sums.

    dc_n/dt = -2i sum_S beta(S,n) conj(c_{S-n}) B_S with B_S the pair sum of c with itself.
    """
    c = _coeffs(c)
    N = c.size - 1
    B = _pair_sums(c, c)
    idx, valid = _hankel_index(N)
    conj_partner = np.where(valid, np.conj(c)[idx], 0.0)
    out = -2j * np.sum(_beta(N) * conj_partner * B[:, None], axis=0)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("overflow while assembling the Fock right-hand side")
    return out


def ansatz_coefficients(
    a: complex, g: Union[Callable, np.ndarray], lam: int, N: int
) -> np.ndarray:
    """Fock coefficients of a*phi_0 + lam^(-1/2) sum_n g(n/lam) phi_n.

    ``g`` is either a callable profile evaluated at n/lam or an array of
    samples with ``g[n] = g(n/lam)``; samples beyond N are dropped, missing
    ones are zero. The profile must vanish at 0. Resolving a profile that
    lives on [0, k_max] needs N >= lam * k_max.
    """
    v = ansatz_tail(g, lam, N)
    c = v.copy()
    c[0] = a
    return c


def ansatz_tail(g: Union[Callable, np.ndarray], lam: int, N: int) -> np.ndarray:
    """The high-frequency part v_lam alone (zero condensate entry)."""
    if lam < 1 or float(lam) != int(lam):
        raise ValueError(f"lam must be an integer >= 1, got {lam}")
    if N < 0:
        raise ValueError("N must be >= 0")
    lam = int(lam)
    if callable(g):
        samples = np.asarray(g(np.arange(N + 1) / lam), dtype=complex)
    else:
        samples = np.zeros(N + 1, dtype=complex)
        given = np.asarray(g, dtype=complex)[: N + 1]
        samples[: given.size] = given
    if samples[0] != 0:
        raise ValueError("the profile must satisfy g(0) = 0")
    return samples / np.sqrt(lam)


class FockInvariants(NamedTuple):
    mass: float
    angular_momentum: float
    hamiltonian: float


def fock_invariants(c: ArrayOrState) -> FockInvariants:
    c = _coeffs(c)
    p = np.abs(c) ** 2
    return FockInvariants(float(p.sum()), float(np.arange(c.size) @ p), hamiltonian(c))


class FockSystem(HamiltonianSystem):
    """Truncated LLL flow on c_0..c_N.

    E is the angular momentum sum n |c_n|^2 and frequencies are the indices n.
    """

    name = "fock"

    def __init__(self, N: int, fast: bool = True):
        if N < 0:
            raise ValueError("N must be >= 0")
        self.N = int(N)
        self.fast = fast
        n = np.arange(self.N + 1, dtype=float)
        self.symplectic_weights = np.ones(self.N + 1)
        self.frequencies = n
        self.energy_weights = n

    def rhs(self, y):
        return lll_rhs_fast(y) if self.fast else lll_rhs_direct(y)

    def hamiltonian(self, y):
        return hamiltonian(y)

    def describe(self) -> str:
        return "\n".join(
            [
                "fock system (LLL equation in Fock coefficients)",
                "  i dc_n/dt = 2 sum_{k+l=m+n} (k+l)!/(2^(k+l) sqrt(k! l! m! n!)) c_k c_l conj(c_m)",
                f"  truncation: N = {self.N} (modes 0..{self.N})",
                f"  kernel: {'O(N^2) pair sums' if self.fast else 'O(N^3) direct sum'}",
            ]
        )
