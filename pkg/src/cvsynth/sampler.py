"""Seeded random circuits for the two sampling models and their binned outputs.

``RandomCV`` circuits act on vacuum inputs with gates from the parameterized
set (displacement, shear, cubic, CZ) plus the fixed set (logical Z, Fourier,
unit CZ, logical T).  ``CVIQP`` circuits drop the Fourier gate and start
from momentum-squeezed states ``psi~(p) ~ exp(-p^2 / (2 sigma^2))``, so
``sigma = 1`` is the vacuum.

Circuit drawing: ``depth`` layers; in each layer, for every mode ``j`` in
order, a gate is drawn uniformly from the pool.  A single-mode gate acts on
``j``; a two-mode gate acts on ``j`` and a uniformly drawn other mode.
Two-mode gates are left out of the pool when ``n = 1``.  All draws use
``numpy.random.default_rng(seed)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Literal

import numpy as np

from scipy.special import roots_legendre

from . import gridsim
from .errors import GridTooSmall, TooManyModes
from .ftcalc import gate_parameter_table
from .gridsim import BinnedDistribution, HomodyneSpec
from .symplectic import (
    Gate,
    GateKind,
    GateSequence,
    Q_DIAGONAL,
    affine_of,
    cubic,
    cz,
    decompose,
    displacement,
    fourier,
    logical_t,
    logical_z,
    shear,
)

__all__ = [
    "ModelKind",
    "CircuitModel",
    "CircuitSpec",
    "Distribution",
    "OutcomeRecord",
    "gate_pool",
    "draw_circuit",
    "is_gaussian_circuit",
    "covariance_state",
    "grid_size",
    "simulate_distribution",
    "conditional_bins",
    "sample",
    "total_variation",
]


class ModelKind(str, Enum):
    RANDOM_CV = "random_cv"
    CVIQP = "cviqp"


@dataclass(frozen=True)
class CircuitModel:
    kind: ModelKind
    m: int
    y: float
    sigma_in: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if self.kind is ModelKind.CVIQP and not 0 < self.sigma_in < 1:
            raise ValueError("CVIQP inputs need 0 < sigma < 1")

    @classmethod
    def random_cv(cls, m: int = 1, y: float = 0.1) -> "CircuitModel":
        return cls(ModelKind.RANDOM_CV, m, y)

    @classmethod
    def cviqp(cls, m: int = 6, y: float = 1e-3, sigma_in: float = 0.5) -> "CircuitModel":
        return cls(ModelKind.CVIQP, m, y, sigma_in)

    def input_moments(self) -> tuple[float, float]:
        """``(var_q, var_p)`` of each input mode."""
        if self.kind is ModelKind.RANDOM_CV:
            return 0.5, 0.5
        s = self.sigma_in
        return 1 / (2 * s * s), s * s / 2

    def input_wavefunction(self, x: np.ndarray) -> np.ndarray:
        vq, _ = self.input_moments()
        return np.exp(-(x**2) / (4 * vq))


@dataclass(frozen=True)
class CircuitSpec:
    model: CircuitModel
    n_modes: int
    gates: GateSequence
    homodyne: HomodyneSpec
    seed: int

    def to_json(self) -> dict:
        return {
            "model": self.model.kind.value,
            "m": self.model.m,
            "y": self.model.y,
            "sigma_in": self.model.sigma_in if self.model.kind is ModelKind.CVIQP else None,
            "n_modes": self.n_modes,
            "K": self.homodyne.K,
            "k_max": self.homodyne.kmax,
            "seed": self.seed,
            "gates": self.gates.to_json(),
        }


def gate_pool(model: CircuitModel, n_modes: int) -> list[Gate]:
    """Pool templates on modes 0 (and 1); :func:`draw_circuit` remaps modes."""
    table_model = "cviqp" if model.kind is ModelKind.CVIQP else "universal"
    tab = gate_parameter_table(table_model, model.m, model.y)
    v = {r.symbol: r.computed for r in tab.rows}
    pool = [
        displacement(v["d"]),
        shear(v["s1"]),
        shear(v["s2"]),
        cubic(v["c1"]),
        cubic(v["c2"]),
        logical_z(),
        logical_t(),
    ]
    if n_modes > 1:
        pool += [cz(v["b1"]), cz(v["b2"]), cz(1.0)]
    if model.kind is ModelKind.RANDOM_CV:
        pool.append(fourier())
    return pool


def draw_circuit(model: CircuitModel, n: int, depth: int, seed: int, K: int = 8, k_max: int | None = None) -> CircuitSpec:
    if n < 1 or depth < 0:
        raise ValueError("need n >= 1 and depth >= 0")
    rng = np.random.default_rng(seed)
    pool = gate_pool(model, n)
    gates = []
    for _ in range(depth):
        for j in range(n):
            t = pool[rng.integers(len(pool))]
            if len(t.modes) == 2:
                other = int(rng.integers(n - 1))
                other += other >= j
                gates.append(Gate(t.kind, t.params, (j, other)))
            else:
                gates.append(Gate(t.kind, t.params, (j,)))
    seq = GateSequence(gates, n_modes=n)
    if model.kind is ModelKind.CVIQP:
        assert seq.count(GateKind.FOURIER) == 0 and seq.count(GateKind.FOURIER_INV) == 0
    return CircuitSpec(model, n, seq, HomodyneSpec(K, k_max), seed)


def is_gaussian_circuit(spec: CircuitSpec) -> bool:
    return all(g.is_gaussian for g in spec.gates)


def covariance_state(spec: CircuitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Mean and covariance in ``(q_1..q_n, p_1..p_n)`` order after a Gaussian circuit."""
    n = spec.n_modes
    vq, vp = spec.model.input_moments()
    V = np.diag([vq] * n + [vp] * n)
    mu = np.zeros(2 * n)
    for g in spec.gates:
        S, c = affine_of(g, n)
        V = S @ V @ S.T
        mu = S @ mu + c
    return mu, V


@dataclass
class Distribution:
    """Per-mode binned momentum distributions plus what is needed to sample jointly."""

    per_mode: list[BinnedDistribution]
    method: str
    homodyne: HomodyneSpec
    mean: np.ndarray | None = None
    cov: np.ndarray | None = None
    state: gridsim.GridState | None = field(default=None, repr=False)
    shift: np.ndarray | None = None


ONE_MODE_CAP = 2**18
_TAIL_SIGMAS = 7.0  # input support radius in standard deviations


def _linear_offsets(spec: CircuitSpec) -> tuple[list[Gate], np.ndarray]:
    """Split off momentum kicks when every gate is diagonal in ``q``.

    Diagonal gates commute, so gates ``exp(i d q)`` only translate the final
    momentum distribution by ``d``.  Returns the remaining gates and the
    per-mode translation.
    """
    shift = np.zeros(spec.n_modes)
    if not all(g.kind in Q_DIAGONAL for g in spec.gates):
        return list(spec.gates), shift
    rest = []
    for g in spec.gates:
        if g.kind in (GateKind.DISPLACEMENT, GateKind.LOGICAL_Z):
            shift[g.modes[0]] += g.q_polynomial()[1]
        else:
            rest.append(g)
    return rest, shift


def _extend(g: Gate, qe: np.ndarray, pe: np.ndarray) -> None:
    if g.kind is GateKind.CZ:
        i, j = g.modes
        pe[i], pe[j] = pe[i] + abs(g.param) * qe[j], pe[j] + abs(g.param) * qe[i]
    elif g.kind in (GateKind.FOURIER, GateKind.FOURIER_INV):
        i = g.modes[0]
        qe[i], pe[i] = pe[i], qe[i]
    elif g.kind in (GateKind.SQUEEZE, GateKind.ROTATION, GateKind.BEAMSPLITTER):
        for h in decompose(g):
            _extend(h, qe, pe)
    else:
        i = g.modes[0]
        pe[i] += sum(abs(k * c) * qe[i] ** (k - 1) for k, c in g.q_polynomial().items())


def _extents(model: CircuitModel, n_modes: int, gates: list[Gate]) -> tuple[float, float]:
    """Bounds on the position and momentum support reached by any mode at any time."""
    vq, vp = model.input_moments()
    qe = np.full(n_modes, _TAIL_SIGMAS * math.sqrt(vq))
    pe = np.full(n_modes, _TAIL_SIGMAS * math.sqrt(vp))
    qmax, pmax = qe.max(), pe.max()
    for g in gates:
        _extend(g, qe, pe)
        qmax, pmax = max(qmax, qe.max()), max(pmax, pe.max())
    return float(qmax), float(pmax)


def grid_size(spec: CircuitSpec, gates: list[Gate] | None = None) -> tuple[float, int]:
    """``(L, n)`` whose grid holds the support and resolves the largest momentum.

    Raises
    ------
    GridTooSmall
        If the required points per mode exceed the cap for the mode count.
    """
    gates = list(spec.gates) if gates is None else gates
    qmax, pmax = _extents(spec.model, spec.n_modes, gates)
    L = qmax + 1.0
    dq = math.pi / (1.1 * pmax + 5.0)
    n = 2 * math.ceil(L / dq) + 1
    cap = ONE_MODE_CAP if spec.n_modes == 1 else gridsim.TWO_MODE_CAP
    if n > cap:
        raise GridTooSmall(
            f"circuit needs about {n} grid points per mode (|q| <= {L:.3g}, |p| <= {pmax:.3g}); cap is {cap}"
        )
    return L, n


def _grid_state(spec: CircuitSpec, gates: list[Gate], L: float, n: int) -> gridsim.GridState:
    one = gridsim.from_function(spec.model.input_wavefunction, L, n)
    state = one if spec.n_modes == 1 else gridsim.tensor(one, one, cap=n)
    return gridsim.apply_sequence(state, gates)


def simulate_distribution(
    spec: CircuitSpec,
    method: Literal["auto", "covariance", "grid"] = "auto",
    L: float | None = None,
    n_points: int | None = None,
    mass_tol: float = 1e-8,
) -> Distribution:
    """Binned ``p`` distribution of every mode.

    Gaussian circuits use covariance propagation with erf bin masses unless
    ``method="grid"``.  Other circuits are simulated on a grid, which needs
    ``n_modes <= 2``.  The grid is sized by :func:`grid_size` unless ``L``
    and ``n_points`` are given; when every gate is diagonal in ``q`` the
    momentum kicks are applied as exact translations of the distribution.

    Raises
    ------
    TooManyModes
        Non-Gaussian circuit on more than two modes.
    GridTooSmall
        Grid bin masses do not sum to 1 within ``mass_tol``, or the grid
        would exceed its point cap.
    """
    hs = spec.homodyne
    gaussian = is_gaussian_circuit(spec)
    if method == "auto":
        method = "covariance" if gaussian else "grid"
    if method == "covariance":
        if not gaussian:
            raise ValueError("covariance path needs a Gaussian circuit")
        mu, V = covariance_state(spec)
        n = spec.n_modes
        per = [gridsim.vacuum_bin_masses(hs, var=V[n + i, n + i], mean=mu[n + i]) for i in range(n)]
        return Distribution(per, "covariance", hs, mean=mu, cov=V)
    if spec.n_modes > 2:
        raise TooManyModes(f"grid simulation supports at most 2 modes, circuit has {spec.n_modes}")
    gates, shift = _linear_offsets(spec)
    auto_L, auto_n = grid_size(spec, gates) if L is None or n_points is None else (L, n_points)
    L = auto_L if L is None else L
    n_points = auto_n if n_points is None else n_points
    state = _grid_state(spec, gates, L, n_points)
    per = [gridsim.homodyne_bins(state, i, hs, shift[i]) for i in range(spec.n_modes)]
    for i, d in enumerate(per):
        if abs(d.total - 1) > mass_tol:
            raise GridTooSmall(f"mode {i} bin masses sum to {d.total:.10f}; refine or widen the grid")
    return Distribution(per, "grid", hs, state=state, shift=shift)


def _bin_interval(hs: HomodyneSpec, k: int, nyq: float, shift: float) -> tuple[float, float]:
    """Grid-coordinate momentum interval of bin ``k`` (overflow bins included), clipped to the support."""
    edge = (2 * hs.kmax + 1) * hs.eta
    if k < -hs.kmax:
        a, b = -np.inf, -edge
    elif k > hs.kmax:
        a, b = edge, np.inf
    else:
        a, b = 2 * hs.eta * k - hs.eta, 2 * hs.eta * k + hs.eta
    return max(a - shift, -nyq), min(b - shift, nyq)


def conditional_bins(dist: Distribution, k0: int, nodes: int = 8) -> BinnedDistribution:
    """Unnormalized binned distribution of mode 1 restricted to mode-0 outcomes in bin ``k0``.

    Mode 0 is integrated over the bin with composite Gauss-Legendre panels
    of width ``2 eta``.
    """
    state, hs = dist.state, dist.homodyne
    nyq = math.pi / state.dq
    a, b = _bin_interval(hs, k0, nyq, dist.shift[0])
    if b <= a:
        return BinnedDistribution(hs.centers(), np.zeros(2 * hs.kmax + 1), 0.0, 0.0)
    panels = max(1, math.ceil((b - a) / (2 * hs.eta)))
    t, w = roots_legendre(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = np.diff(edges)[:, None] / 2
    p0 = ((edges[:-1, None] + edges[1:, None]) / 2 + half * t).ravel()
    w0 = (half * w).ravel()
    # rows: psi(p0_node, q1) scaled so that summing |.|^2 dq over rows integrates over p0
    rows = gridsim.momentum_amplitudes(state, 0, p0).T * np.sqrt(w0 / state.dq)[:, None]

    def density(p):
        return np.sum(np.abs(gridsim._ft_axis(rows, state.L, -1, 1, p)) ** 2, axis=0) * state.dq

    return gridsim.binned_density(density, hs, nyq, dist.shift[1])


@dataclass(frozen=True)
class OutcomeRecord:
    shot: int
    mode: int
    bin_index: int
    bin_center: float


def sample(spec: CircuitSpec, shots: int, seed: int, **sim_kwargs) -> list[OutcomeRecord]:
    """Draw ``shots`` joint binned outcomes with ``numpy.random.default_rng(seed)``.

    Covariance-path circuits draw Gaussian momenta and bin them.  Grid-path
    circuits draw the mode-0 bin from its marginal, then the mode-1 bin from
    its distribution conditioned on that bin.  Overflow outcomes get bin
    index ``+-(k_max + 1)``.
    """
    if shots < 0:
        raise ValueError("shots must be non-negative")
    if shots == 0:
        return []
    rng = np.random.default_rng(seed)
    hs = spec.homodyne
    kmax = hs.kmax
    n = spec.n_modes
    dist = simulate_distribution(spec, **sim_kwargs)
    if dist.method == "covariance":
        mu, V = dist.mean[n:], dist.cov[n:, n:]
        ps = rng.multivariate_normal(mu, V, size=shots, method="eigh")
        idx = np.clip(hs.bin_of(ps), -kmax - 1, kmax + 1)
    else:
        probs = dist.per_mode[0].full()
        first = rng.choice(probs.size, size=shots, p=probs / probs.sum()) - kmax - 1
        idx = first[:, None]
        if n == 2:
            second = np.empty(shots, dtype=int)
            for k0 in np.unique(first):
                hit = np.flatnonzero(first == k0)
                cond = conditional_bins(dist, int(k0)).full()
                second[hit] = rng.choice(cond.size, size=hit.size, p=cond / cond.sum()) - kmax - 1
            idx = np.stack([first, second], axis=1)
    return [
        OutcomeRecord(s, mode, int(idx[s, mode]), 2 * hs.eta * int(idx[s, mode])) for s in range(shots) for mode in range(n)
    ]


def total_variation(a: BinnedDistribution, b: BinnedDistribution) -> float:
    return 0.5 * float(np.sum(np.abs(a.full() - b.full())))
