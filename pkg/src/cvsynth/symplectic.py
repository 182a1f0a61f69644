"""Gate records, their symplectic matrices, and exact Gaussian decompositions.

Conventions
-----------
* Quadrature ordering is ``(q_1 .. q_n, p_1 .. p_n)``.
* A matrix ``S`` describes the Heisenberg action ``U^dag x U = S x``.
* A :class:`GateSequence` acts on states first-element-first, so the matrix
  of ``[g1, g2, g3]`` is ``S3 @ S2 @ S1``.
* ``Shear(s)`` is ``exp(i s q^2)``, whose matrix is ``[[1, 0], [2s, 1]]``.
  The decompositions below are usually written with ``exp(i s q^2 / 2)``;
  they emit halved parameters so every shear uses the ``exp(i s q^2)`` form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import NonGaussian, NonPositive, OutOfRange, Singular, WrongArity

SQRT_PI = math.sqrt(math.pi)


class GateKind(str, Enum):
    DISPLACEMENT = "displacement"
    SHEAR = "shear"
    CUBIC = "cubic"
    CZ = "cz"
    FOURIER = "fourier"
    FOURIER_INV = "fourier_inv"
    SQUEEZE = "squeeze"
    ROTATION = "rotation"
    BEAMSPLITTER = "beamsplitter"
    CROSS_KERR = "cross_kerr"
    LOGICAL_Z = "logical_z"
    LOGICAL_T = "logical_t"


_ARITY = {
    GateKind.CZ: 2,
    GateKind.BEAMSPLITTER: 2,
    GateKind.CROSS_KERR: 2,
}
_NPARAMS = {
    GateKind.FOURIER: 0,
    GateKind.FOURIER_INV: 0,
    GateKind.LOGICAL_Z: 0,
    GateKind.LOGICAL_T: 0,
}
NON_GAUSSIAN = frozenset({GateKind.CUBIC, GateKind.CROSS_KERR, GateKind.LOGICAL_T})
# gates that are exp(i f(q)) for a polynomial f
Q_DIAGONAL = frozenset(
    {GateKind.DISPLACEMENT, GateKind.SHEAR, GateKind.CUBIC, GateKind.CZ, GateKind.LOGICAL_Z, GateKind.LOGICAL_T}
)

# exp(i pi/4 [2 x^3 + x^2 - 2 x]) with x = q / sqrt(pi), as coefficients of q^k
T_GATE_POLY = {
    3: (math.pi / 4) * 2 / math.pi**1.5,
    2: (math.pi / 4) / math.pi,
    1: -(math.pi / 4) * 2 / SQRT_PI,
}


@dataclass(frozen=True, slots=True)
class Gate:
    kind: GateKind
    params: tuple[float, ...] = ()
    modes: tuple[int, ...] = (0,)

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "params", tuple(float(x) for x in self.params))
        object.__setattr__(self, "modes", tuple(int(m) for m in self.modes))
        arity = _ARITY.get(kind, 1)
        if len(self.modes) != arity:
            raise WrongArity(f"{kind.value} acts on {arity} mode(s), got {self.modes}")
        if arity == 2 and self.modes[0] == self.modes[1]:
            raise WrongArity("two-mode gate needs distinct modes")
        if len(self.params) != _NPARAMS.get(kind, 1):
            raise ValueError(f"{kind.value} takes {_NPARAMS.get(kind, 1)} parameter(s)")
        if kind is GateKind.SQUEEZE and not self.params[0] > 0:
            raise NonPositive("squeezing parameter must be positive")
        if kind is GateKind.BEAMSPLITTER and not 0.0 <= self.params[0] <= 1.0:
            raise OutOfRange("beamsplitter reflectivity must lie in [0, 1]")

    @property
    def param(self) -> float:
        return self.params[0]

    @property
    def is_gaussian(self) -> bool:
        return self.kind not in NON_GAUSSIAN

    def q_polynomial(self) -> dict[int, float]:
        """Coefficients ``{power: c}`` of the phase ``f(q)`` for single-mode q-diagonal gates."""
        k = self.kind
        if k is GateKind.DISPLACEMENT:
            return {1: self.param}
        if k is GateKind.SHEAR:
            return {2: self.param}
        if k is GateKind.CUBIC:
            return {3: self.param}
        if k is GateKind.LOGICAL_Z:
            return {1: SQRT_PI}
        if k is GateKind.LOGICAL_T:
            return dict(T_GATE_POLY)
        raise ValueError(f"{k.value} is not a single-mode q-diagonal gate")

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "params": list(self.params), "modes": list(self.modes)}

    def __str__(self) -> str:
        args = ", ".join(f"{x:.6g}" for x in self.params)
        return f"{self.kind.value}({args})@{','.join(map(str, self.modes))}"


def displacement(d: float, mode: int = 0) -> Gate:
    return Gate(GateKind.DISPLACEMENT, (d,), (mode,))


def shear(s: float, mode: int = 0) -> Gate:
    return Gate(GateKind.SHEAR, (s,), (mode,))


def cubic(c: float, mode: int = 0) -> Gate:
    return Gate(GateKind.CUBIC, (c,), (mode,))


def cz(b: float, modes: tuple[int, int] = (0, 1)) -> Gate:
    return Gate(GateKind.CZ, (b,), modes)


def fourier(mode: int = 0) -> Gate:
    return Gate(GateKind.FOURIER, (), (mode,))


def fourier_inv(mode: int = 0) -> Gate:
    return Gate(GateKind.FOURIER_INV, (), (mode,))


def squeeze(s: float, mode: int = 0) -> Gate:
    return Gate(GateKind.SQUEEZE, (s,), (mode,))


def rotation(theta: float, mode: int = 0) -> Gate:
    return Gate(GateKind.ROTATION, (theta,), (mode,))


def beamsplitter(R: float, modes: tuple[int, int] = (0, 1)) -> Gate:
    return Gate(GateKind.BEAMSPLITTER, (R,), modes)


def cross_kerr(strength: float, modes: tuple[int, int] = (0, 1)) -> Gate:
    return Gate(GateKind.CROSS_KERR, (strength,), modes)


def logical_z(mode: int = 0) -> Gate:
    return Gate(GateKind.LOGICAL_Z, (), (mode,))


def logical_t(mode: int = 0) -> Gate:
    return Gate(GateKind.LOGICAL_T, (), (mode,))


@dataclass
class GateSequence:
    """Ordered gates; the first element is applied to the state first."""

    gates: list[Gate] = field(default_factory=list)
    n_modes: int | None = None

    def __post_init__(self):
        self.gates = list(self.gates)
        top = max((m for g in self.gates for m in g.modes), default=-1) + 1
        if self.n_modes is None:
            self.n_modes = max(top, 1)
        elif top > self.n_modes:
            raise OutOfRange(f"gate acts on mode {top - 1} but sequence declares {self.n_modes} modes")

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __getitem__(self, i):
        return self.gates[i]

    def append(self, g: Gate) -> None:
        if max(g.modes) >= self.n_modes:
            raise OutOfRange(f"mode {max(g.modes)} outside {self.n_modes}-mode sequence")
        self.gates.append(g)

    def extend(self, gs: Iterable[Gate]) -> None:
        for g in gs:
            self.append(g)

    def count(self, kind: GateKind) -> int:
        return sum(1 for g in self.gates if g.kind is kind)

    def to_json(self) -> list[dict]:
        return [g.to_json() for g in self.gates]


# ---------------------------------------------------------------- matrices


def omega(n: int) -> np.ndarray:
    """Symplectic form for ``(q_1..q_n, p_1..p_n)`` ordering."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def is_symplectic(S: np.ndarray, tol: float = 1e-12) -> bool:
    n = S.shape[0] // 2
    W = omega(n)
    return bool(np.max(np.abs(S @ W @ S.T - W)) <= tol)


def _local_matrix(g: Gate) -> np.ndarray:
    k = g.kind
    if k in (GateKind.DISPLACEMENT, GateKind.LOGICAL_Z):
        return np.eye(2)
    if k is GateKind.SHEAR:
        return np.array([[1.0, 0.0], [2.0 * g.param, 1.0]])
    if k is GateKind.FOURIER:
        return np.array([[0.0, -1.0], [1.0, 0.0]])
    if k is GateKind.FOURIER_INV:
        return np.array([[0.0, 1.0], [-1.0, 0.0]])
    if k is GateKind.SQUEEZE:
        return np.diag([g.param, 1.0 / g.param])
    if k is GateKind.ROTATION:
        c, s = math.cos(g.param), math.sin(g.param)
        return np.array([[c, -s], [s, c]])
    if k is GateKind.CZ:
        b = g.param
        # (q1, q2, p1, p2)
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, b, 1, 0], [b, 0, 0, 1]], dtype=float)
    if k is GateKind.BEAMSPLITTER:
        M = beamsplitter_block(g.param)
        Z = np.zeros((2, 2))
        return np.block([[M, Z], [Z, M]])
    raise NonGaussian(f"{k.value} has no symplectic representation")


def beamsplitter_block(R: float) -> np.ndarray:
    """``M_R = [[sqrt R, sqrt(1-R)], [sqrt(1-R), -sqrt R]]``."""
    r, t = math.sqrt(R), math.sqrt(1.0 - R)
    return np.array([[r, t], [t, -r]])


def _embed(local: np.ndarray, modes: Sequence[int], n: int) -> np.ndarray:
    k = len(modes)
    idx = list(modes) + [n + m for m in modes]
    S = np.eye(2 * n)
    S[np.ix_(idx, idx)] = local.reshape(2 * k, 2 * k)
    return S


def symplectic_of(g: Gate, n_modes: int | None = None) -> np.ndarray:
    """Symplectic matrix of ``g`` embedded in an ``n_modes``-mode system.

    Raises
    ------
    NonGaussian
        For cubic, cross-Kerr and logical-T gates.
    """
    n = n_modes if n_modes is not None else max(g.modes) + 1
    if max(g.modes) >= n:
        raise OutOfRange(f"gate mode {max(g.modes)} outside {n}-mode system")
    return _embed(_local_matrix(g), g.modes, n)


def affine_of(g: Gate, n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    """``(S, c)`` such that the Heisenberg action is ``x -> S x + c``."""
    S = symplectic_of(g, n_modes)
    c = np.zeros(2 * n_modes)
    if g.kind is GateKind.DISPLACEMENT:
        c[n_modes + g.modes[0]] = g.param
    elif g.kind is GateKind.LOGICAL_Z:
        c[n_modes + g.modes[0]] = SQRT_PI
    return S, c


def compose(seq: GateSequence | Sequence[Gate], n_modes: int | None = None) -> np.ndarray:
    """Matrix of a whole sequence (later gates multiply from the left)."""
    gates = list(seq)
    if n_modes is None:
        n_modes = seq.n_modes if isinstance(seq, GateSequence) else max((max(g.modes) for g in gates), default=0) + 1
    S = np.eye(2 * n_modes)
    for g in gates:
        S = symplectic_of(g, n_modes) @ S
    return S


# ---------------------------------------------------------- decompositions


def decompose_squeeze(s: float, mode: int = 0) -> GateSequence:
    """Squeezer ``diag(s, 1/s)`` as three shears interleaved with Fourier gates."""
    if not s > 0:
        raise NonPositive(f"squeezing parameter must be positive, got {s}")
    gates = [
        shear(s / 2, mode),
        fourier(mode),
        shear(1 / (2 * s), mode),
        fourier(mode),
        shear(s / 2, mode),
        fourier(mode),
    ]
    return GateSequence(gates, n_modes=mode + 1)


def rotation_shears(theta: float) -> tuple[float, float, float]:
    """Shear strengths ``(s1, s2, s3)`` in the ``exp(i s q^2 / 2)`` convention."""
    c, sn = math.cos(theta), math.sin(theta)
    if abs(c) < 1e-12:
        raise Singular(f"rotation by {theta} has cos(theta) = 0")
    t = sn / c
    return 1 / c + t, c, c + (1 + sn) * t


def decompose_rotation(theta: float, mode: int = 0) -> GateSequence:
    s1, s2, s3 = rotation_shears(theta)
    gates = [
        shear(s1 / 2, mode),
        fourier(mode),
        shear(s2 / 2, mode),
        fourier(mode),
        shear(s3 / 2, mode),
        fourier(mode),
    ]
    return GateSequence(gates, n_modes=mode + 1)


BS_FORMS = ("matrix", "fixed")


def beamsplitter_coefficients(R: float, form: str = "matrix") -> tuple[float, float, float]:
    """``(b1, b2, b3)`` of the block ``exp(i (b1 q1^2 + b2 q2^2 + b3 q1 q2))``.

    ``"matrix"`` solves ``[[2 b1, b3], [b3, 2 b2]] = M_R``.  ``"fixed"``
    is the fixed exponent ``(q1^2 - q2^2 + q1 q2) / (2 sqrt 2)``, meant for
    ``R = 1/2``; it does not reproduce the balanced beamsplitter.
    """
    if not 0.0 <= R <= 1.0:
        raise OutOfRange(f"R must lie in [0, 1], got {R}")
    if form == "matrix":
        return math.sqrt(R) / 2, -math.sqrt(R) / 2, math.sqrt(1 - R)
    if form == "fixed":
        b = 1 / (2 * math.sqrt(2))
        return b, -b, b
    raise ValueError(f"unknown beamsplitter form {form!r}")


def decompose_beamsplitter(R: float, modes: tuple[int, int] = (0, 1), form: str = "matrix") -> GateSequence:
    """Beamsplitter ``M_R (+) M_R`` as three rounds of (shear, shear, CZ, F, F)."""
    b1, b2, b3 = beamsplitter_coefficients(R, form)
    i, j = modes
    block = [shear(b1, i), shear(b2, j), cz(b3, (i, j)), fourier(i), fourier(j)]
    return GateSequence(block * 3, n_modes=max(modes) + 1)


def beamsplitter_form_check(R: float = 0.5) -> dict[str, float]:
    """Max-abs residual of each coefficient form against ``M_R (+) M_R``."""
    target = symplectic_of(beamsplitter(R))
    return {form: float(np.max(np.abs(compose(decompose_beamsplitter(R, form=form)) - target))) for form in BS_FORMS}


def decompose(g: Gate) -> GateSequence:
    """Lower a squeezer, rotation or beamsplitter into shears, CZ and Fourier gates."""
    if g.kind is GateKind.SQUEEZE:
        return decompose_squeeze(g.param, g.modes[0])
    if g.kind is GateKind.ROTATION:
        return decompose_rotation(g.param, g.modes[0])
    if g.kind is GateKind.BEAMSPLITTER:
        return decompose_beamsplitter(g.param, g.modes)
    return GateSequence([g], n_modes=max(g.modes) + 1)
