"""Position-grid wavefunctions (one or two modes) and a truncated Fock verifier.

Grids are symmetric: ``x_j = -L + j dq`` for ``j = 0 .. n-1`` with
``dq = 2L / (n - 1)``.  Continuous Fourier integrals are evaluated as
Riemann sums with a chirp-z transform, so the output grid need not be the
FFT-reciprocal one.

Fourier convention: ``(F psi)(x) = (2 pi)^(-1/2) int exp(+i x q) psi(q) dq``.
A state with momentum ``p0`` is sent to position ``-p0``, which is the
symplectic map ``q -> -p, p -> q``.  The momentum wavefunction is
``psi~(p) = (2 pi)^(-1/2) int exp(-i p q) psi(q) dq = (F^dag psi)(p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Mapping

import numpy as np
from scipy.signal import czt
from scipy.special import erf, roots_legendre

from .comb import GaussianComb
from .errors import AsymmetricGrid, GridTooSmall, TruncationTooSmall, WrongArity
from .symplectic import Gate, GateKind, GateSequence, decompose

__all__ = [
    "GridState",
    "HomodyneSpec",
    "BinnedDistribution",
    "GadgetResult",
    "FockResult",
    "TWO_MODE_CAP",
    "grid_axis",
    "from_function",
    "from_comb",
    "tensor",
    "apply_q_diagonal",
    "apply_fourier",
    "apply_cz",
    "apply_gate",
    "apply_sequence",
    "shift_q",
    "momentum_amplitudes",
    "binned_density",
    "homodyne_bins",
    "vacuum_bin_masses",
    "stabilizer_shift",
    "logical_z_expectation",
    "ec_gadget",
    "synthesis_m1_on_grid",
    "cross_kerr_fock",
]

SQRT_PI = math.sqrt(math.pi)
TWO_MODE_CAP = 1024
_ROW_CHUNK = 256


def grid_axis(L: float, n: int) -> np.ndarray:
    return np.linspace(-L, L, n)


@dataclass
class GridState:
    """Wavefunction samples on a symmetric grid, ``psi.shape == (n,) * modes``."""

    psi: np.ndarray
    L: float

    @property
    def modes(self) -> int:
        return self.psi.ndim

    @property
    def n(self) -> int:
        return self.psi.shape[0]

    @property
    def x(self) -> np.ndarray:
        return grid_axis(self.L, self.n)

    @property
    def dq(self) -> float:
        return 2 * self.L / (self.n - 1)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.psi) ** 2) * self.dq**self.modes)

    def normalized(self) -> "GridState":
        return replace(self, psi=self.psi / math.sqrt(self.norm()))

    def density(self, mode: int = 0) -> np.ndarray:
        """Position density of ``mode`` (other mode traced out)."""
        d = np.abs(self.psi) ** 2
        if self.modes == 2:
            d = d.sum(axis=1 - mode) * self.dq
        return d

    def inner(self, other: "GridState") -> complex:
        return complex(np.vdot(self.psi, other.psi) * self.dq**self.modes)

    def boundary_ratio(self) -> float:
        """Largest edge amplitude relative to the largest amplitude."""
        a = np.abs(self.psi)
        edge = max(float(np.max(np.take(a, idx, axis=ax))) for ax in range(self.modes) for idx in (0, -1))
        return edge / float(np.max(a))

    def check_boundary(self, tol: float = 1e-10) -> None:
        if self.boundary_ratio() > tol:
            raise GridTooSmall(f"edge amplitude ratio {self.boundary_ratio():.2e} exceeds {tol:g}")


def _check_size(n: int, modes: int, cap: int | None) -> None:
    cap = TWO_MODE_CAP if cap is None else cap
    if modes == 2 and n > cap:
        raise GridTooSmall(f"two-mode grids are capped at {cap} points per mode (asked {n}); raise cap explicitly")


def from_function(f: Callable, L: float, n: int, modes: int = 1, cap: int | None = None) -> GridState:
    """Sample ``f(q)`` or ``f(q1, q2)`` and normalize."""
    _check_size(n, modes, cap)
    x = grid_axis(L, n)
    psi = f(x) if modes == 1 else f(x[:, None], x[None, :])
    return GridState(np.asarray(psi, dtype=complex), L).normalized()


def from_comb(c: GaussianComb, L: float = 20.0, n: int = 4096) -> GridState:
    """Sample a comb; the grid must cover every centre by 8 sigma."""
    if max(abs(x) for x in c.centers) + 8 * c.sigma > L:
        raise GridTooSmall("grid does not cover all peaks by 8 sigma")
    return from_function(c.wavefunction, L, n)


def tensor(a: GridState, b: GridState, cap: int | None = None) -> GridState:
    if a.modes != 1 or b.modes != 1 or a.n != b.n or a.L != b.L:
        raise WrongArity("tensor needs two single-mode states on the same grid")
    _check_size(a.n, 2, cap)
    return GridState(np.multiply.outer(a.psi, b.psi), a.L)


# ------------------------------------------------------------------- gates


def _along(psi: np.ndarray, mode: int, vec: np.ndarray) -> np.ndarray:
    if psi.ndim == 1:
        return psi * vec
    return psi * (vec[:, None] if mode == 0 else vec[None, :])


def apply_q_diagonal(s: GridState, mode: int, coeffs: Mapping[int, float]) -> GridState:
    """Multiply by ``exp(i sum_k c_k q^k)`` on ``mode``."""
    x = s.x
    phase = np.zeros_like(x)
    for k, c in coeffs.items():
        phase += c * x**k
    return replace(s, psi=_along(s.psi, mode, np.exp(1j * phase)))


def apply_cz(s: GridState, b: float) -> GridState:
    """``exp(i b q1 q2)``."""
    if s.modes != 2:
        raise WrongArity("CZ needs a two-mode state")
    x = s.x
    return replace(s, psi=s.psi * np.exp(1j * b * np.multiply.outer(x, x)))


def _ft_axis(psi: np.ndarray, L: float, sign: int, axis: int, p: np.ndarray | None = None) -> np.ndarray:
    """``(2 pi)^(-1/2) sum_j psi_j exp(sign i p_k q_j) dq`` along ``axis``.

    ``p`` defaults to the input grid; it must be equispaced.
    """
    n = psi.shape[axis]
    q = grid_axis(L, n)
    dq = q[1] - q[0]
    if p is None:
        p = q
    m = len(p)
    dp = p[1] - p[0] if m > 1 else 1.0
    # exp(s i p_k q_j) = exp(s i p0 q0) exp(s i p0 j dq) exp(s i k dp q0) exp(s i j k dq dp)
    pre = np.exp(sign * 1j * p[0] * np.arange(n) * dq)
    post = np.exp(sign * 1j * (p[0] * q[0] + np.arange(m) * dp * q[0])) * dq / math.sqrt(2 * math.pi)
    w = np.exp(sign * 1j * dq * dp)
    moved = np.moveaxis(psi, axis, -1)
    flat = moved.reshape(-1, n)
    out = np.empty((flat.shape[0], m), dtype=complex)
    for lo in range(0, flat.shape[0], _ROW_CHUNK):
        out[lo : lo + _ROW_CHUNK] = czt(flat[lo : lo + _ROW_CHUNK] * pre, m=m, w=w, a=1.0, axis=-1) * post
    return np.moveaxis(out.reshape(moved.shape[:-1] + (m,)), -1, axis)


def apply_fourier(s: GridState, mode: int = 0, inverse: bool = False) -> GridState:
    """Fourier gate (``q -> -p``, ``p -> q``) or its inverse on ``mode``."""
    x = s.x
    if not np.isclose(x[0], -x[-1]):
        raise AsymmetricGrid("Fourier transform needs a symmetric grid")
    return replace(s, psi=_ft_axis(s.psi, s.L, -1 if inverse else 1, mode))


def shift_q(s: GridState, mode: int, d: float) -> GridState:
    """Translate ``mode`` by ``d`` in position (``exp(-i d p)``), via momentum space."""
    sign = -1
    phi = _ft_axis(s.psi, s.L, sign, mode)  # momentum amplitudes on the grid
    phi = _along(phi, mode, np.exp(-1j * d * s.x))
    return replace(s, psi=_ft_axis(phi, s.L, -sign, mode))


def apply_gate(s: GridState, g: Gate) -> GridState:
    k = g.kind
    if k is GateKind.CZ:
        if s.modes != 2:
            raise WrongArity("CZ needs a two-mode state")
        b = g.param
        return apply_cz(s, b)
    if k in (GateKind.FOURIER, GateKind.FOURIER_INV):
        return apply_fourier(s, g.modes[0], inverse=k is GateKind.FOURIER_INV)
    if k in (GateKind.SQUEEZE, GateKind.ROTATION, GateKind.BEAMSPLITTER):
        return apply_sequence(s, decompose(g))
    if k is GateKind.CROSS_KERR:
        raise ValueError("cross-Kerr is applied through its compiled sequence")
    if g.modes[0] >= s.modes:
        raise WrongArity(f"gate on mode {g.modes[0]} applied to {s.modes}-mode state")
    return apply_q_diagonal(s, g.modes[0], g.q_polynomial())


def apply_sequence(s: GridState, seq: GateSequence | Iterable[Gate]) -> GridState:
    for g in seq:
        s = apply_gate(s, g)
    return s


def momentum_amplitudes(s: GridState, mode: int, p: np.ndarray) -> np.ndarray:
    """``psi~`` of ``mode`` at arbitrary points ``p`` (direct sum)."""
    kern = np.exp(-1j * np.multiply.outer(s.x, np.asarray(p, float))) * s.dq / math.sqrt(2 * math.pi)
    if s.modes == 1:
        return s.psi @ kern
    return s.psi @ kern if mode == 1 else np.einsum("ij,ik->jk", s.psi, kern)


# ---------------------------------------------------------------- homodyne


@dataclass(frozen=True)
class HomodyneSpec:
    """Bins of width ``2 eta`` centred at ``2 eta k`` with ``sqrt(pi) = K eta``.

    ``k_max`` limits the explicit bins to ``|k| <= k_max``; the two tails
    are collected in overflow bins.
    """

    K: int
    k_max: int | None = None

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be a positive integer")
        if self.k_max is not None and self.k_max < 0:
            raise ValueError("k_max must be non-negative")

    @property
    def eta(self) -> float:
        return SQRT_PI / self.K

    @property
    def kmax(self) -> int:
        return 4 * self.K if self.k_max is None else self.k_max

    def centers(self) -> np.ndarray:
        return 2 * self.eta * np.arange(-self.kmax, self.kmax + 1)

    def bin_of(self, p) -> np.ndarray:
        """Bin index of momentum ``p`` (unclipped)."""
        return np.floor((np.asarray(p) + self.eta) / (2 * self.eta)).astype(int)


@dataclass(frozen=True)
class BinnedDistribution:
    """Masses of bins ``-k_max .. k_max`` plus the two overflow tails."""

    centers: np.ndarray
    masses: np.ndarray
    under: float
    over: float

    @property
    def total(self) -> float:
        return float(self.masses.sum() + self.under + self.over)

    def full(self) -> np.ndarray:
        """``[under, masses..., over]``."""
        return np.concatenate([[self.under], self.masses, [self.over]])


def _simpson_weights(n_intervals: int, h: float) -> np.ndarray:
    w = np.ones(n_intervals + 1)
    w[1:-1:2] = 4
    w[2:-1:2] = 2
    return w * h / 3


_SUB = 64  # Simpson sub-intervals per bin, also used across the overflow tails
_P_CHUNK = 4096  # momentum points per density evaluation


def _momentum_density(s: GridState, mode: int, p: np.ndarray) -> np.ndarray:
    """``|psi~|^2`` of ``mode`` on equispaced ``p``, other mode traced out."""
    phi = _ft_axis(s.psi, s.L, -1, mode, p)
    d = np.abs(phi) ** 2
    if s.modes == 2:
        d = d.sum(axis=1 - mode) * s.dq
    return d


def binned_density(
    density: Callable[[np.ndarray], np.ndarray],
    spec: HomodyneSpec,
    nyq: float,
    shift: float = 0.0,
) -> BinnedDistribution:
    """Bin a momentum density supported on ``|p'| <= nyq`` and observed at ``p = p' + shift``.

    ``density`` is evaluated on equispaced ``p'`` arrays; values beyond
    ``nyq`` are treated as zero.  Bins use composite Simpson quadrature;
    the overflow bins integrate everything beyond the outermost bin edges.
    """
    eta, kmax = spec.eta, spec.kmax
    edge = (2 * kmax + 1) * eta

    def dens(pp: np.ndarray) -> np.ndarray:
        out = np.zeros(pp.shape)
        inside = np.abs(pp) <= nyq
        if inside.any():
            lo, hi = np.argmax(inside), len(pp) - np.argmax(inside[::-1])
            for a in range(lo, hi, _P_CHUNK):
                b = min(a + _P_CHUNK, hi)
                out[a:b] = density(pp[a:b])
        return out

    h = 2 * eta / _SUB
    p = -edge + h * np.arange((2 * kmax + 1) * _SUB + 1)
    core = dens(p - shift)
    idx = np.arange(2 * kmax + 1)[:, None] * _SUB + np.arange(_SUB + 1)[None, :]
    masses = core[idx] @ _simpson_weights(_SUB, h)

    ht = 2 * eta / _SUB

    def tail(a: float, b: float) -> float:
        # integral over grid coordinates [a, b] clipped to the support
        a, b = max(a, -nyq), min(b, nyq)
        if b <= a:
            return 0.0
        n = 2 * max(1, math.ceil((b - a) / (2 * ht)))
        return float(dens(a + (b - a) / n * np.arange(n + 1)) @ _simpson_weights(n, (b - a) / n))

    over = tail(edge - shift, nyq)
    under = tail(-nyq, -edge - shift)
    return BinnedDistribution(spec.centers(), masses, under, over)


def homodyne_bins(s: GridState, mode: int, spec: HomodyneSpec, shift: float = 0.0) -> BinnedDistribution:
    """Binned momentum distribution of ``mode``, optionally displaced in momentum by ``shift``.

    Tails run out to the grid's Nyquist momentum ``pi / dq``.
    """
    return binned_density(lambda p: _momentum_density(s, mode, p), spec, math.pi / s.dq, shift)


def vacuum_bin_masses(spec: HomodyneSpec, var: float = 0.5, mean: float = 0.0) -> BinnedDistribution:
    """Closed-form bin masses of a Gaussian momentum distribution."""
    eta = spec.eta
    c = spec.centers()
    z = lambda v: erf((v - mean) / math.sqrt(2 * var))  # noqa: E731
    masses = (z(c + eta) - z(c - eta)) / 2
    lo, hi = c[0] - eta, c[-1] + eta
    return BinnedDistribution(c, masses, float((1 + z(lo)) / 2), float((1 - z(hi)) / 2))


# ------------------------------------------------------------- GKP checks


def stabilizer_shift(s: GridState, mode: int = 0) -> float:
    """Position offset modulo ``sqrt(pi)`` from ``<exp(2 i sqrt(pi) q)>``, in ``(-sqrt(pi)/2, sqrt(pi)/2]``."""
    z = np.sum(s.density(mode) * np.exp(2j * SQRT_PI * s.x)) * s.dq
    return float(np.angle(z) / (2 * SQRT_PI))


def logical_z_expectation(s: GridState, mode: int = 0) -> complex:
    """``<exp(i sqrt(pi) q)>``: near +1 for logical 0, near -1 for logical 1."""
    return complex(np.sum(s.density(mode) * np.exp(1j * SQRT_PI * s.x)) * s.dq)


# ------------------------------------------------------------- EC gadget


@dataclass
class GadgetResult:
    corrected: GridState
    measured_shift: float
    flip_flag: bool
    outcome: float
    bin_index: int


def ec_gadget(
    data: GridState,
    ancilla: GaussianComb,
    spec: HomodyneSpec,
    rng_seed: int | np.random.Generator,
    logical: int = 0,
) -> GadgetResult:
    """One round of position-error correction with a GKP ancilla.

    The coupling ``exp(i q_data q_anc)`` adds ``q_data`` to the ancilla
    momentum; measuring that momentum with outcome ``P`` leaves the data in
    ``psi(q) phi~(P - q)`` with ``phi~`` the ancilla momentum wavefunction.
    ``P`` is drawn from its exact density (inverse CDF on a fine grid, then
    uniform within the cell) using ``numpy.random.default_rng(rng_seed)``,
    then binned.  The bin centre reduced into ``(-sqrt(pi)/2, sqrt(pi)/2]``
    is the measured shift, and the data is translated back by it.

    ``K`` should satisfy ``K = 2 (mod 4)`` so that ``+-sqrt(pi)/2`` fall on
    bin edges.  ``flip_flag`` reports whether the corrected state's logical
    value differs from ``logical``, as judged by the sign of
    ``<exp(i sqrt(pi) q)>``.
    """
    if data.modes != 1:
        raise WrongArity("gadget data must be single-mode")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    x, dq = data.x, data.dq
    rho = np.abs(data.psi) ** 2
    # P = q + p_anc: its density is a convolution on the grid spacing
    half = data.L + 12.0 / ancilla.sigma
    m = int(math.ceil(half / dq))
    u = dq * np.arange(-m, m + 1)
    anc = np.abs(ancilla.normalized().momentum_wavefunction(u)) ** 2
    dens = np.convolve(rho, anc) * dq
    P_axis = x[0] + u[0] + dq * np.arange(dens.size)
    cdf = np.cumsum(dens)
    cdf /= cdf[-1]
    i = int(np.searchsorted(cdf, rng.random()))
    P = float(P_axis[min(i, P_axis.size - 1)] + (rng.random() - 0.5) * dq)

    k = int(spec.bin_of(P))
    center = 2 * spec.eta * k
    shift = center - SQRT_PI * math.floor(center / SQRT_PI + 0.5)
    if shift <= -SQRT_PI / 2 + 1e-12:
        shift += SQRT_PI
    phi = ancilla.normalized().momentum_wavefunction(P - x)
    cond = GridState(data.psi * phi, data.L).normalized()
    corrected = shift_q(cond, 0, -shift).normalized()
    z = logical_z_expectation(corrected).real * (-1) ** logical
    return GadgetResult(corrected, shift, bool(z < 0), P, k)


# ---------------------------------------------------- grid protocol oracle


@dataclass(frozen=True)
class GridSynthesis:
    fidelity: float
    success_prob: float
    grid_norm: float


def synthesis_m1_on_grid(
    sigma: float,
    K: int,
    L: float = 20.0,
    n: int = 4096,
    nodes: int = 8,
) -> tuple[GridSynthesis, GaussianComb]:
    """First synthesis round run on a two-mode grid.

    Two cats with centres ``+-sqrt(2 pi)`` pass the beamsplitter as its
    shear/CZ/Fourier decomposition; mode 1 is projected onto the momentum
    bin ``[-eta, eta]`` using Gauss-Legendre nodes.  Returns the fidelity of
    the (generally mixed) conditional state of mode 0 with the comb
    prediction, and the success probability.
    """
    from .comb import bs_step, cat, project_p0
    from .symplectic import decompose_beamsplitter

    c = cat(math.sqrt(2 * math.pi), sigma)
    single = from_comb(c, L, n)
    state = tensor(single, single, cap=n)
    state = apply_sequence(state, decompose_beamsplitter(0.5))
    eta = SQRT_PI / K
    t, w = roots_legendre(nodes)
    ps, ws = eta * t, eta * w
    amps = momentum_amplitudes(state, 1, ps)  # shape (n, nodes): psi(q0, p_node)
    predicted, prob_comb = project_p0(bs_step(c, c), 0, eta)
    target = predicted.normalized().wavefunction(state.x)
    overlaps = np.abs(target.conj() @ amps * state.dq) ** 2
    weights = np.sum(np.abs(amps) ** 2, axis=0) * state.dq
    prob = float(ws @ weights)
    fid = float(ws @ overlaps) / prob
    return GridSynthesis(fid, prob, state.norm()), predicted


# ------------------------------------------------------------------- Fock


@dataclass(frozen=True)
class FockResult:
    fidelity_lhs_rhs: float
    sign_error_prob: float
    sign_error_closed_form: float
    amplitudes: np.ndarray


def _coherent(alpha: float, D: int) -> np.ndarray:
    n = np.arange(D)
    logf = np.array([math.lgamma(k + 1) for k in n])
    with np.errstate(divide="ignore"):
        mag = np.exp(-(alpha**2) / 2 + n * np.log(abs(alpha)) - logf / 2) if alpha != 0 else (n == 0).astype(float)
    return mag * np.sign(alpha) ** n if alpha != 0 else mag


def _hermite_functions(q: np.ndarray, D: int) -> np.ndarray:
    """Position wavefunctions of Fock states 0..D-1 (stable recursion)."""
    out = np.empty((D, q.size))
    out[0] = math.pi**-0.25 * np.exp(-(q**2) / 2)
    if D > 1:
        out[1] = math.sqrt(2) * q * out[0]
    for k in range(2, D):
        out[k] = math.sqrt(2 / k) * q * out[k - 1] - math.sqrt((k - 1) / k) * out[k - 2]
    return out


def cross_kerr_fock(alpha: float, beta: float, D: int) -> FockResult:
    """Check ``exp(i pi n1 n2)|a>|b> = (|a>+|-a>)|b>/2 + (|a>-|-a>)|-b>/2`` in Fock space.

    ``sign_error_prob`` is the probability that reading the sign of ``q`` on
    mode 2 names the wrong branch, where the branch is ``+beta`` for even
    and ``-beta`` for odd photon number on mode 1.
    """
    if D < 4 * max(alpha**2, beta**2) + 20:
        raise TruncationTooSmall(f"D = {D} is below 4 max(alpha^2, beta^2) + 20")
    ca, cb = _coherent(alpha, D), _coherent(beta, D)
    cma, cmb = _coherent(-alpha, D), _coherent(-beta, D)
    n = np.arange(D)
    lhs = np.outer(ca, cb) * np.where(np.outer(n, n) % 2 == 0, 1.0, -1.0)
    rhs = 0.5 * np.outer(ca + cma, cb) + 0.5 * np.outer(ca - cma, cmb)
    fid = abs(np.vdot(rhs, lhs)) ** 2 / (np.vdot(lhs, lhs).real * np.vdot(rhs, rhs).real)

    span = 2 * math.sqrt(2) * abs(beta) + 12
    q = np.linspace(-span, span, 8001)
    hq = _hermite_functions(q, D)
    wave = lhs @ hq  # rows: n1, columns: q2
    dens = np.abs(wave) ** 2
    wq = _simpson_weights(q.size - 1, q[1] - q[0])
    neg, pos = (q < 0), (q > 0)
    if beta < 0:
        neg, pos = pos, neg
    even = n % 2 == 0
    # q = 0 lies on the grid; give it half weight to each side
    mid = ~(neg | pos)
    err_even = dens[even] @ (wq * (neg + 0.5 * mid))
    err_odd = dens[~even] @ (wq * (pos + 0.5 * mid))
    err = float(np.sum(err_even) + np.sum(err_odd))
    closed = 0.5 * math.erfc(math.sqrt(2) * abs(beta))
    return FockResult(float(fid), err, closed, lhs)
