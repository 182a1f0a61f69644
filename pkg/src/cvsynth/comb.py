"""Closed-form analytics of superpositions of equally squeezed displaced Gaussians.

A peak centred at ``c`` with width ``sigma`` has position wavefunction
``pi^(-1/4) sigma^(-1/2) exp(-(q - c)^2 / (2 sigma^2))`` and momentum
wavefunction ``pi^(-1/4) sigma^(1/2) exp(-i c p) exp(-sigma^2 p^2 / 2)``.

Amplitudes may be exact (``int`` / ``Fraction``) so that the binomial
structure of the synthesis protocol can be checked without rounding.
Norms of a :class:`GaussianComb` use the orthogonal-peak approximation
unless stated otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb as binom
from numbers import Number
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import ApproximationInvalid, NonPositive, OutOfRange, SigmaMismatch

__all__ = [
    "GaussianComb",
    "TwoModeComb",
    "GKPSpec",
    "SynthesisResult",
    "ORTHOGONALITY_GAP",
    "FLAT_LIMIT",
    "cat",
    "vacuum",
    "bs_step",
    "project_p0",
    "synthesize_gkp",
    "success_probability",
    "success_coefficient",
    "overlap_gaussian",
    "sigma_of_m",
    "squeezing_db",
    "cat_amplitude",
    "gaussian_gkp_wavefunction",
    "binomial_wavefunction",
    "binomial_gaussian_deviation",
]

SQRT_PI = math.sqrt(math.pi)
# minimum peak gap, in units of sigma, for the orthogonal-peak approximation
ORTHOGONALITY_GAP = 6.0
# largest eta*|center| and eta*sigma accepted by the flat-projection approximation
FLAT_LIMIT = 0.1


def _merge(pairs, key_scale: float = 1e-9):
    """Sum amplitudes of terms whose centre tuples agree to ``key_scale``."""
    acc: dict[tuple, list] = {}
    for amp, centers in pairs:
        key = tuple(round(c / key_scale) for c in centers)
        if key in acc:
            acc[key][0] = acc[key][0] + amp
        else:
            acc[key] = [amp, centers]
    return sorted(((a, c) for a, c in acc.values() if a != 0), key=lambda t: t[1])


def _sum_sq(amps):
    return sum(a * a if isinstance(a, (int, Fraction)) else abs(a) ** 2 for a in amps)


def _peak(q, center: float, sigma: float):
    return np.exp(-((q - center) ** 2) / (2 * sigma**2)) / (math.pi**0.25 * math.sqrt(sigma))


@dataclass(frozen=True)
class GaussianComb:
    """Single-mode superposition ``sum_i amp_i |center_i, sigma>``.

    Amplitudes are not required to be normalized; :meth:`normalized`
    rescales them in the orthogonal-peak approximation.
    """

    sigma: float
    amps: tuple
    centers: tuple[float, ...]

    def __post_init__(self):
        if not self.sigma > 0:
            raise NonPositive("sigma must be positive")
        if len(self.amps) != len(self.centers):
            raise ValueError("amps and centers differ in length")
        if any(b <= a for a, b in zip(self.centers, self.centers[1:])):
            raise ValueError("centers must be strictly increasing")

    @classmethod
    def from_terms(cls, sigma: float, terms: Sequence[tuple[Number, float]]) -> "GaussianComb":
        merged = _merge((a, (c,)) for a, c in terms)
        return cls(sigma, tuple(a for a, _ in merged), tuple(c[0] for _, c in merged))

    def __len__(self) -> int:
        return len(self.amps)

    @property
    def min_gap(self) -> float:
        if len(self.centers) < 2:
            return math.inf
        return float(np.min(np.diff(self.centers)))

    @property
    def orthogonal(self) -> bool:
        """Whether peaks are far enough apart (``gap / sigma >= 6``) to be treated as orthogonal."""
        return self.min_gap / self.sigma >= ORTHOGONALITY_GAP

    def norm_sq(self):
        """``sum |amp|^2``, exact when amplitudes are exact."""
        return _sum_sq(self.amps)

    def exact_norm_sq(self) -> float:
        """Norm including peak overlaps ``exp(-(c_i - c_j)^2 / (4 sigma^2))``."""
        a = np.asarray(self.amps, dtype=complex)
        c = np.asarray(self.centers, dtype=float)
        gram = np.exp(-((c[:, None] - c[None, :]) ** 2) / (4 * self.sigma**2))
        return float(np.real(a.conj() @ gram @ a))

    def normalized(self) -> "GaussianComb":
        n = math.sqrt(float(self.norm_sq()))
        return GaussianComb(self.sigma, tuple(complex(a) / n for a in self.amps), self.centers)

    def wavefunction(self, q) -> np.ndarray:
        """Position amplitude, normalized exactly (peak overlaps included)."""
        q = np.asarray(q, dtype=float)
        out = np.zeros(q.shape, dtype=complex)
        for a, c in zip(self.amps, self.centers):
            out += complex(a) * _peak(q, c, self.sigma)
        return out / math.sqrt(self.exact_norm_sq())

    def momentum_wavefunction(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        out = np.zeros(p.shape, dtype=complex)
        for a, c in zip(self.amps, self.centers):
            out += complex(a) * np.exp(-1j * c * p)
        env = math.sqrt(self.sigma) / math.pi**0.25 * np.exp(-(self.sigma**2) * p**2 / 2)
        return out * env / math.sqrt(self.exact_norm_sq())


@dataclass(frozen=True)
class TwoModeComb:
    """Two-mode superposition ``sum amp |c1, sigma>|c2, sigma>``."""

    sigma: float
    terms: tuple[tuple[object, float, float], ...]

    def norm_sq(self):
        return _sum_sq(t[0] for t in self.terms)


@dataclass(frozen=True)
class GKPSpec:
    m: int
    sigma: float
    delta: float

    def __post_init__(self):
        if self.m < 1:
            raise OutOfRange("m must be >= 1")
        if not (self.sigma > 0 and self.delta > 0):
            raise NonPositive("sigma and delta must be positive")

    @classmethod
    def from_m(cls, m: int) -> "GKPSpec":
        """Symmetric spec with ``sigma = delta = (2^m pi)^(-1/2)``."""
        s = sigma_of_m(m)["sigma"]
        return cls(m, s, s)


def vacuum(sigma: float = math.sqrt(0.5)) -> GaussianComb:
    return GaussianComb(sigma, (1,), (0.0,))


def cat(center: float, sigma: float, exact: bool = False) -> GaussianComb:
    """Equal-weight peaks at ``+-center``.

    With ``exact=True`` the amplitudes are the integers 1 (unnormalized);
    otherwise they are ``1/sqrt(2)``.
    """
    if not sigma > 0:
        raise NonPositive("sigma must be positive")
    a = 1 if exact else 1 / math.sqrt(2)
    if center == 0:
        return GaussianComb(sigma, (1 if exact else 1.0,), (0.0,))
    c = abs(center)
    return GaussianComb(sigma, (a, a), (-c, c))


def bs_step(a: GaussianComb, b: GaussianComb) -> TwoModeComb:
    """Balanced beamsplitter on two combs, acting on peak labels.

    ``|mu>|lam>`` maps to ``|(mu - lam)/sqrt2>|(mu + lam)/sqrt2>``.
    """
    if not math.isclose(a.sigma, b.sigma, rel_tol=1e-12):
        raise SigmaMismatch(f"{a.sigma} != {b.sigma}")
    r = 1 / math.sqrt(2)
    pairs = (
        (x * y, ((mu - lam) * r, (mu + lam) * r))
        for x, mu in zip(a.amps, a.centers)
        for y, lam in zip(b.amps, b.centers)
    )
    return TwoModeComb(a.sigma, tuple((amp, c[0], c[1]) for amp, c in _merge(pairs)))


def project_p0(state: TwoModeComb, mode: int, eta: float) -> tuple[GaussianComb, float]:
    """Project ``mode`` onto the momentum bin ``[-eta, eta]``.

    In the flat regime every peak's momentum amplitude over the bin equals
    ``sqrt(sigma) pi^(-1/4)``, so terms sharing the surviving centre simply
    add.  Returns the surviving comb (amplitudes unnormalized, exact if the
    input was) and the outcome probability relative to the input norm.

    Raises
    ------
    ApproximationInvalid
        If ``eta * max|center|`` or ``eta * sigma`` exceeds 0.1.
    """
    if mode not in (0, 1):
        raise OutOfRange("mode must be 0 or 1")
    if not eta > 0:
        raise NonPositive("eta must be positive")
    measured = [t[1 + mode] for t in state.terms]
    if eta * max(abs(c) for c in measured) > FLAT_LIMIT or eta * state.sigma > FLAT_LIMIT:
        raise ApproximationInvalid("momentum bin too wide for the flat-projection regime")
    keep = 2 - mode
    out = GaussianComb.from_terms(state.sigma, [(t[0], t[keep]) for t in state.terms])
    ratio = out.norm_sq() / state.norm_sq()
    prob = 2 * eta * state.sigma / SQRT_PI * float(ratio)
    return out, prob


@dataclass(frozen=True)
class SynthesisResult:
    comb: GaussianComb
    weights: tuple[int, ...]
    success_prob: float
    round_probs: tuple[float, ...]
    ratio_exact: Fraction


def synthesize_gkp(m: int, sigma: float, eta: float) -> SynthesisResult:
    """Iterated cat-breeding: ``2^m`` cats, ``2^m - 1`` zero-outcome projections.

    Cats have centres ``+-sqrt(2)^m sqrt(pi)`` so that the final comb has
    peaks at ``2 sqrt(pi) (i - 2^(m-1))``.  ``weights`` are the exact
    unnormalized amplitudes; ``comb`` is normalized.  ``round_probs`` holds one
    entry per level (all merges at a level are identical).
    """
    if m < 1:
        raise OutOfRange("m must be >= 1")
    level = [cat(math.sqrt(2) ** m * SQRT_PI, sigma, exact=True)] * 2
    current = level[0]
    probs: list[float] = []
    ratio = Fraction(1)
    for lvl in range(1, m + 1):
        out, prob = project_p0(bs_step(current, current), 0, eta)
        merges = 2 ** (m - lvl)
        ratio *= Fraction(out.norm_sq(), current.norm_sq() ** 2) ** merges
        probs.extend([prob] * merges)
        current = out
    total = float(np.prod(probs))
    return SynthesisResult(current.normalized(), tuple(current.amps), total, tuple(probs), ratio)


def success_coefficient(m: int) -> float:
    """``p_m(0) / (eta sigma)^(2^m - 1)``."""
    n = 2**m
    return binom(2 * n, n) / 2**n * (2 / SQRT_PI) ** (n - 1)


def success_probability(m: int, sigma: float, eta: float) -> float:
    """Closed-form ``2^(-2^m) C(2^(m+1), 2^m) (2 eta sigma / sqrt(pi))^(2^m - 1)``."""
    n = 2**m
    return binom(2 * n, n) / 2**n * (2 * eta * sigma / SQRT_PI) ** (n - 1)


def sigma_of_m(m: int) -> dict[str, float]:
    if m < 1:
        raise OutOfRange("m must be >= 1")
    sigma = (2**m * math.pi) ** -0.5
    return {"sigma": sigma, "squeezing_db": squeezing_db(sigma)}


def squeezing_db(sigma: float) -> float:
    """Squeezing relative to vacuum variance 1/2."""
    return 10 * math.log10(0.5 / sigma**2)


def cat_amplitude(m: int, sigma: float) -> float:
    """Coherent amplitude ``sqrt(2)^(m-1) sqrt(pi) / sigma`` of the input cats."""
    return math.sqrt(2) ** (m - 1) * SQRT_PI / sigma


def overlap_gaussian(m: int) -> float:
    """Envelope overlap between the ``m``-th binomial state and its closest Gaussian GKP state."""
    if m < 1:
        raise OutOfRange("m must be >= 1")
    n = 2**m
    i = np.arange(n + 1)
    # log C(n, i) - log C(2n, n) / 2, kept in logs so large m does not overflow
    log_w = gammaln(n + 1) - gammaln(i + 1) - gammaln(n - i + 1) - (gammaln(2 * n + 1) - 2 * gammaln(n + 1)) / 2
    total = np.sum(np.exp(log_w - (i - n / 2) ** 2 / (n / 2)))
    return float(math.pi**-0.25 * (n / 4) ** -0.25 * total)


def _envelope_terms(spec: GKPSpec, logical: int, cutoff: float = 1e-12):
    if logical not in (0, 1):
        raise OutOfRange("logical must be 0 or 1")
    # envelope exp(-k^2 pi delta^2 / 2) over k with parity `logical`
    kmax = int(math.ceil(math.sqrt(-2 * math.log(cutoff) / (math.pi * spec.delta**2)))) + 1
    ks = np.arange(-kmax - 1, kmax + 2)
    ks = ks[(ks - logical) % 2 == 0]
    w = np.exp(-(ks**2) * math.pi * spec.delta**2 / 2)
    keep = w >= cutoff
    return ks[keep] * SQRT_PI, w[keep]


def gaussian_gkp_wavefunction(spec: GKPSpec, logical: int, q) -> np.ndarray:
    """Finite-squeezing GKP wavefunction, envelope terms below 1e-12 dropped, exactly normalized."""
    centers, w = _envelope_terms(spec, logical)
    return GaussianComb(spec.sigma, tuple(w), tuple(centers)).wavefunction(q).real


def binomial_wavefunction(m: int, sigma: float, q) -> np.ndarray:
    """``m``-th binomial GKP state with its closed-form normalization."""
    if m < 1:
        raise OutOfRange("m must be >= 1")
    n = 2**m
    q = np.asarray(q, dtype=float)
    out = np.zeros(q.shape)
    for i in range(n + 1):
        out += binom(n, i) * np.exp(-((q - 2 * SQRT_PI * (i - n // 2)) ** 2) / (2 * sigma**2))
    return out * math.pi**-0.25 / math.sqrt(binom(2 * n, n) * sigma)


def binomial_gaussian_deviation(m: int) -> float:
    """Max over ``i`` of ``|C(2^m, i) 2^(-2^m) - N(i; 2^(m-1), 2^(m-2))|``."""
    n = 2**m
    var = n / 4
    i = np.arange(n + 1)
    exact = np.array([Fraction(binom(n, k), 2**n) for k in i], dtype=float)
    normal = np.exp(-((i - n / 2) ** 2) / (2 * var)) / math.sqrt(2 * math.pi * var)
    return float(np.max(np.abs(exact - normal)))
