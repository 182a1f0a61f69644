"""Fault-tolerance budgets, erf tail probabilities and gate-parameter tables.

Two conventions for the tail probability are supported:

``"literal"``
    ``erf(x / sigma)``, the expression used for the success probability.
``"gaussian_tail"``
    ``erf(x / (sqrt(2) sigma))``, the two-sided tail of a normal variable
    with standard deviation ``sigma``.

The literal form is the default.  The two differ by ``sqrt(2)`` in the
effective width, which moves the minimal ``m`` of the CVIQP search by about
one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

from scipy.optimize import brentq
from scipy.special import erf

from . import comb, kerrplan
from .errors import BudgetExhausted, Infeasible, OutOfRange
from .symplectic import beamsplitter_coefficients

__all__ = [
    "Convention",
    "CONVENTIONS",
    "FTBudget",
    "CVIQPResult",
    "ParamRow",
    "PRINTED_TABLES",
    "zeta",
    "epsilon_m",
    "p_succ",
    "chi",
    "failure_probability",
    "threshold_ok",
    "cviqp_failure",
    "cviqp_max_y",
    "cviqp_minimal_m",
    "psucc_curve",
    "matches_printed",
    "gate_parameter_table",
]

Convention = Literal["literal", "gaussian_tail"]
CONVENTIONS: tuple[str, ...] = ("literal", "gaussian_tail")
HALF_CELL = math.sqrt(math.pi) / 2
M_CAP = 20


def _width(sigma: float, convention: str) -> float:
    if convention == "literal":
        return sigma
    if convention == "gaussian_tail":
        return math.sqrt(2) * sigma
    raise ValueError(f"unknown convention {convention!r}")


def zeta(m: int) -> float:
    """Trace-distance bound ``sqrt(1 - F^2)`` from the envelope overlap."""
    f = comb.overlap_gaussian(m)
    return math.sqrt(max(0.0, 1 - f * f))


def epsilon_m(m: int, y: float) -> float:
    return zeta(m) + 2**m * y


def p_succ(m: int, y: float, convention: Convention = "literal") -> float:
    """``erf((sqrt(pi)/2 - eps_m) / sigma_m)``.

    Raises
    ------
    BudgetExhausted
        If ``eps_m >= sqrt(pi)/2``.
    """
    eps = epsilon_m(m, y)
    if eps >= HALF_CELL:
        raise BudgetExhausted(f"eps_{m} = {eps:.4g} is not below sqrt(pi)/2")
    return float(erf((HALF_CELL - eps) / _width(comb.sigma_of_m(m)["sigma"], convention)))


def chi(sigma: float, delta: float, convention: Convention = "literal") -> float:
    """Probability that a Gaussian-GKP shift exceeds ``sqrt(pi)/2 - delta``, clamped to ``[0, 1]``."""
    if not sigma > 0:
        raise OutOfRange("sigma must be positive")
    x = HALF_CELL - delta
    if x <= 0:
        return 1.0
    return float(min(1.0, max(0.0, 1.0 - erf(x / _width(sigma, convention)))))


@dataclass(frozen=True)
class FTBudget:
    m: int
    y: float
    zeta_m: float
    epsilon_m: float
    sigma_m: float
    epsilon_q: float = 0.0
    epsilon_p: float = 0.0
    epsilon_th: float = 1e-6

    @classmethod
    def build(cls, m: int, y: float, epsilon_q: float = 0.0, epsilon_p: float = 0.0, epsilon_th: float = 1e-6):
        z = zeta(m)
        return cls(m, y, z, z + 2**m * y, comb.sigma_of_m(m)["sigma"], epsilon_q, epsilon_p, epsilon_th)

    def to_json(self) -> dict:
        return dict(self.__dict__)


def failure_probability(b: FTBudget, convention: Convention = "literal") -> float:
    """Two-round failure ``1 - (1 - chi(sigma, eps_q + 2 eps_m)) (1 - chi(sigma, eps_p + 2 eps_m))``."""
    cq = chi(b.sigma_m, b.epsilon_q + 2 * b.epsilon_m, convention)
    cp = chi(b.sigma_m, b.epsilon_p + 2 * b.epsilon_m, convention)
    return 1 - (1 - cq) * (1 - cp)


def threshold_ok(b: FTBudget, convention: Convention = "literal") -> bool:
    return failure_probability(b, convention) < b.epsilon_th


def cviqp_failure(m: int, y: float, convention: Convention = "literal") -> float:
    """Failure bound with the measurement-based Fourier widths ``sqrt(2) sigma`` and ``sqrt(5) sigma``."""
    s = comb.sigma_of_m(m)["sigma"]
    d = 2 * epsilon_m(m, y)
    return 1 - (1 - chi(math.sqrt(2) * s, d, convention)) * (1 - chi(math.sqrt(5) * s, d, convention))


def cviqp_max_y(m: int, epsilon_th: float, convention: Convention = "literal") -> float:
    """Largest ``y`` with ``cviqp_failure(m, y) < epsilon_th`` (0 if even ``y = 0`` fails)."""
    g = lambda y: cviqp_failure(m, y, convention) - epsilon_th  # noqa: E731
    if g(0.0) >= 0:
        return 0.0
    hi = (HALF_CELL / 2 - zeta(m)) / 2**m  # chi = 1 beyond this
    return float(brentq(g, 0.0, hi, xtol=1e-15, rtol=1e-12))


@dataclass(frozen=True)
class CVIQPResult:
    m_min: int
    epsilon_m: float
    max_y_at_m: float
    max_epsilon_at_m: float
    convention: str
    caveat: str


def cviqp_minimal_m(epsilon_th: float, y: float, convention: Convention = "literal") -> CVIQPResult:
    """Smallest ``m <= 20`` meeting the CVIQP threshold condition.

    Raises
    ------
    Infeasible
        If no ``m <= 20`` qualifies.
    """
    if not 0 < epsilon_th < 1:
        raise OutOfRange("epsilon_th must lie in (0, 1)")
    for m in range(1, M_CAP + 1):
        if cviqp_failure(m, y, convention) < epsilon_th:
            ymax = cviqp_max_y(m, epsilon_th, convention)
            other = "gaussian_tail" if convention == "literal" else "literal"
            caveat = (
                f"erf argument uses the {convention} convention; the {other} convention "
                f"changes the width by sqrt(2) and typically moves m_min by one"
            )
            return CVIQPResult(m, epsilon_m(m, y), ymax, zeta(m) + 2**m * ymax, convention, caveat)
    raise Infeasible(f"no m <= {M_CAP} satisfies the threshold {epsilon_th:g} at y = {y:g}")


def psucc_curve(ys: Sequence[float], m: int = 1) -> list[dict[str, float]]:
    """Success probability against ``y`` in both conventions (NaN once the budget is exhausted)."""
    rows = []
    for y in ys:
        row = {"y": float(y)}
        for conv in CONVENTIONS:
            try:
                row[conv] = p_succ(m, y, conv)
            except BudgetExhausted:
                row[conv] = math.nan
        rows.append(row)
    return rows


# --------------------------------------------------------- parameter tables


# printed values as strings so their precision is known; keyed by (model, m, y)
PRINTED_TABLES: dict[tuple[str, int, float], dict[str, str]] = {
    ("universal", 1, 0.1): {
        "d": "5.6", "s1": "0.73", "s2": "1.1", "b1": "0.35", "b2": "0.011", "c1": "0.011", "c2": "0.086",
    },
    ("cviqp", 6, 1e-3): {
        "d": "142", "s1": "0.28", "s2": "0.89", "b1": "0.35", "b2": "1.6e-6", "c1": "1.6e-6", "c2": "1.3e-3",
    },
}  # fmt: skip


def matches_printed(value: float, printed: str) -> bool:
    """Whether ``value`` rounds to ``printed`` at the printed number of significant digits."""
    mant = printed.lower().split("e")[0].replace("-", "").replace(".", "").lstrip("0")
    digits = max(1, len(mant))
    ref = float(printed)
    if ref == 0:
        return value == 0
    exp = math.floor(math.log10(abs(ref)))
    scale = 10.0 ** (exp - digits + 1)
    return round(value / scale) == round(ref / scale)


@dataclass(frozen=True)
class ParamRow:
    symbol: str
    evolution: str
    step: str
    computed: float
    printed: str | None = None
    match: bool | None = None
    note: str = ""

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class ParamTable:
    model: str
    m: int
    y: float
    rows: tuple[ParamRow, ...]
    plan: dict = field(default_factory=dict)

    def row(self, symbol: str) -> ParamRow:
        return next(r for r in self.rows if r.symbol == symbol)

    @property
    def mismatches(self) -> list[ParamRow]:
        return [r for r in self.rows if r.match is False]


def gate_parameter_table(
    model: Literal["universal", "cviqp"],
    m: int,
    y: float,
    p_rounding: Literal["ceil", "floor"] = "ceil",
) -> ParamTable:
    """Gate parameters for GKP generation at iteration ``m`` and cross-Kerr precision ``y``.

    * ``d``: cat amplitude ``sqrt(2)^(m-1) sqrt(pi) / sigma_m``.
    * ``s1``, ``s2``: shears of the squeezer ``s = sqrt(2) sigma_m`` taking vacuum
      width to ``sigma_m`` (``exp(i s q^2)`` convention).
    * ``b1``: beamsplitter shear/CZ coefficient at ``R = 1/2``.
    * ``b2``, ``c1``, ``c2``: small CZ, small cubic and large cubic angles of
      the cross-Kerr compilation.

    Rows carry ``match`` flags when printed values exist for ``(model, m, y)``.
    """
    model = model.lower()
    if model not in ("universal", "cviqp"):
        raise ValueError(f"unknown model {model!r}")
    sigma = comb.sigma_of_m(m)["sigma"]
    s = math.sqrt(2) * sigma
    kp = kerrplan.plan(y, p_rounding)
    ang = kp.derived_angles
    b1 = beamsplitter_coefficients(0.5)[0]
    values = [
        ("d", "displacement", "coherent state initialization", comb.cat_amplitude(m, sigma)),
        ("s1", "shear", "squeezing of the cat", s / 2),
        ("s2", "shear", "squeezing of the cat", 1 / (2 * s)),
        ("b1", "entanglement", "beamsplitter", b1),
        ("b2", "entanglement", "cross-Kerr decomposition", ang["cz_small"]),
        ("c1", "cubic", "cross-Kerr decomposition", ang["cubic_small"]),
        ("c2", "cubic", "cross-Kerr decomposition", ang["cubic_big"]),
    ]
    printed = next(
        (tab for (mod, mm, yy), tab in PRINTED_TABLES.items() if mod == model and mm == m and math.isclose(yy, y)),
        {},
    )
    rows = []
    for sym, evo, step, val in values:
        ref = printed.get(sym)
        ok = None if ref is None else matches_printed(val, ref)
        note = ""
        if ok is False:
            note = f"computed {val:.4g} does not round to printed {ref}"
        rows.append(ParamRow(sym, evo, step, float(val), ref, ok, note))
    return ParamTable(model, m, y, tuple(rows), kp.to_json())
